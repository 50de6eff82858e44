"""Constants ledger and loxodromic solution-size bounds.

The ledger holds the hyperbolicity and acylindricity constants of the relative
Cayley graph of a free product together with the multiplier ``M`` of the
solution bound.  ``M`` is assembled from the other entries by a fixed chain
(see :func:`compose_M`); every entry may be overridden, and overriding an input
re-derives everything downstream that was not itself overridden.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import geometry
from .freeprod import GroupSpec, rel_length

DEFAULT_DELTA = 4

INPUT_KEYS = ("delta", "kappa", "epsilon", "L", "inj", "K", "C_kappa_eps")
DERIVED_KEYS = ("mu", "f_slope", "f_intercept", "F_slope", "F_intercept", "M")
LEDGER_KEYS = INPUT_KEYS + DERIVED_KEYS

DERIVED = "derived-default"
USER = "user-configured"


class LedgerError(ValueError):
    pass


def R(eps) -> Fraction:
    return 6 * Fraction(eps) + 2


def ball_size(spec: GroupSpec, radius: int) -> int:
    """Size of the radius ball in the truncated peripheral alphabet.

    Finite factors contribute their whole order, each free coordinate ``2r+1``.
    """
    total = 1
    for _, sig in spec.factors:
        size = (2 * radius + 1) ** sig.free_rank * math.prod(sig.torsion_moduli)
        total += size - 1
    return total


def N(spec: GroupSpec, eps) -> Fraction:
    eps = Fraction(eps)
    return R(eps) * ball_size(spec, math.ceil(2 * eps))


def elementary_index(spec: GroupSpec) -> int:
    """Index of the infinite cyclic normal subgroup in elementary subgroups.

    A loxodromic axis can be flipped only by a conjugate of an involution in a
    factor, so the index is 2 exactly when some factor has even torsion.
    """
    if len(spec.factors) < 2:
        return 1
    even = any(m % 2 == 0 for _, sig in spec.factors for m in sig.torsion_moduli)
    return 2 if even else 1


@dataclass
class ConstantsLedger:
    delta: Fraction
    kappa: Fraction
    epsilon: Fraction
    L: Fraction
    inj: Fraction
    K: Fraction
    C_kappa_eps: Fraction
    mu: Fraction
    f_slope: Fraction
    f_intercept: Fraction
    F_slope: Fraction
    F_intercept: Fraction
    M: Fraction
    order_threshold: Fraction = Fraction(0)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        for key in LEDGER_KEYS:
            val = Fraction(getattr(self, key))
            setattr(self, key, val)
            if key in ("delta", "epsilon"):
                if val < 0:
                    raise LedgerError(f"{key} must be >= 0")
            elif val <= 0:
                raise LedgerError(f"{key} must be > 0")
        if self.kappa < 1:
            raise LedgerError("kappa must be >= 1")
        if self.M < 1:
            raise LedgerError("M must be >= 1")

    def f(self, r) -> Fraction:
        return self.f_slope * Fraction(r) + self.f_intercept

    def F(self, r) -> Fraction:
        return self.F_slope * Fraction(r) + self.F_intercept

    def as_dict(self) -> dict:
        out = {k: _num(getattr(self, k)) for k in LEDGER_KEYS}
        out["order_threshold"] = _num(self.order_threshold)
        out["provenance"] = dict(self.provenance)
        return out


def _num(q: Fraction):
    return q.numerator if q.denominator == 1 else str(q)


def compose_M(delta, kappa, epsilon, L, inj, K, R_of=R):
    """Derived constants from the inputs; returns a dict of ``DERIVED_KEYS``.

    mu         = kappa (delta + epsilon)
    nu         = 2 delta + 2 mu
    f(r)       = 2 r / inj + R(nu)
    F(r)       = f(r) + kappa (4 r + 4 delta + 5 mu) + epsilon + 1
    alpha      = kappa (2 nu + 3 + f(nu))
    beta       = kappa (2 nu + 3 + F(nu)) L
    M1         = max(kappa (1 + 2 nu) + epsilon, alpha, beta, f(nu), 2)
    M2         = 2 M1 K L^2 / inj
    M          = 2 M2 K (8 delta + 2)
    """
    delta, kappa, epsilon, L, inj, K = map(Fraction, (delta, kappa, epsilon, L, inj, K))
    mu = kappa * (delta + epsilon)
    nu = 2 * delta + 2 * mu
    f_slope, f_intercept = 2 / inj, R_of(nu)
    F_slope = f_slope + 4 * kappa
    F_intercept = f_intercept + kappa * (4 * delta + 5 * mu) + epsilon + 1
    f_nu = f_slope * nu + f_intercept
    F_nu = F_slope * nu + F_intercept
    alpha = kappa * (2 * nu + 3 + f_nu)
    beta = kappa * (2 * nu + 3 + F_nu) * L
    M1 = max(kappa * (1 + 2 * nu) + epsilon, alpha, beta, f_nu, Fraction(2))
    M2 = 2 * M1 * K * L * L / inj
    M = 2 * M2 * K * (8 * delta + 2)
    return {
        "mu": mu,
        "f_slope": f_slope,
        "f_intercept": f_intercept,
        "F_slope": F_slope,
        "F_intercept": F_intercept,
        "M": M,
    }


def default_ledger(spec: GroupSpec, overrides: dict = None, multiplier=1) -> ConstantsLedger:
    overrides = {k: Fraction(v) for k, v in (overrides or {}).items()}
    unknown = set(overrides) - set(LEDGER_KEYS)
    if unknown:
        raise LedgerError(f"unknown ledger keys: {sorted(unknown)}")
    inputs = {
        "delta": Fraction(DEFAULT_DELTA),
        "kappa": Fraction(geometry.KAPPA),
        "epsilon": Fraction(geometry.EPSILON),
        "L": Fraction(elementary_index(spec)),
        "inj": Fraction(geometry.INJ),
        "K": Fraction(1),
        "C_kappa_eps": Fraction(1),
    }
    prov = {k: DERIVED for k in LEDGER_KEYS}
    for k in INPUT_KEYS:
        if k in overrides:
            inputs[k] = overrides[k]
            prov[k] = USER
    for k in ("L", "inj", "K"):
        if inputs[k] <= 0:
            raise LedgerError(f"{k} must be > 0")
    args = {k: inputs[k] for k in ("delta", "kappa", "epsilon", "L", "inj", "K")}
    derived = compose_M(**args)
    for k in DERIVED_KEYS:
        if k in overrides:
            derived[k] = overrides[k]
            prov[k] = USER
    multiplier = Fraction(multiplier)
    if multiplier <= 0:
        raise LedgerError("bound multiplier must be positive")
    if multiplier != 1:
        derived["M"] *= multiplier
        prov["M"] = USER
    threshold = N(spec, 8 * inputs["delta"] + 1)
    return ConstantsLedger(**inputs, **derived, order_threshold=threshold, provenance=prov)


def ledger_to_text(ledger: ConstantsLedger) -> str:
    lines = []
    for k in LEDGER_KEYS:
        val = getattr(ledger, k)
        lines.append(f"{k} = {_num(val)}  # {ledger.provenance.get(k, DERIVED)}")
    return "\n".join(lines) + "\n"


def parse_ledger_text(text: str) -> dict:
    """Read ``key = value`` lines (``#`` starts a comment) into an override dict."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise LedgerError(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in LEDGER_KEYS:
            raise LedgerError(f"line {lineno}: unknown ledger key {key!r}")
        try:
            out[key] = Fraction(val)
        except ValueError:
            raise LedgerError(f"line {lineno}: bad number {val!r}") from None
    return out


# ---------------------------------------------------------------------------
# bounds


@dataclass
class BoundReport:
    kind: str
    bounds: dict  # variable -> int
    trace: dict  # variable -> summands
    ledger: dict

    def as_dict(self) -> dict:
        return {"kind": self.kind, "bounds": dict(self.bounds), "trace": self.trace, "ledger": self.ledger}


def _ceil(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def bound_simple(eq, ledger: ConstantsLedger) -> BoundReport:
    """``(n^2 + sum |a_i| + sum |g_i|) * M`` for every loxodromic base."""
    n = len(eq.terms)
    sa = sum(rel_length(t.coefficient) for t in eq.terms)
    sg = sum(rel_length(t.base) for t in eq.terms)
    bounds, trace = {}, {}
    for t in eq.terms:
        if not geometry.classify(t.base).is_loxodromic:
            continue
        total = (n * n + sa + sg) * ledger.M
        bounds[t.variable] = _ceil(total)
        trace[t.variable] = {"n2": n * n, "sum_a": sa, "sum_g": sg, "M": _num(ledger.M)}
    return BoundReport("simple", bounds, trace, ledger.as_dict())


def bound_refined(eq, ledger: ConstantsLedger) -> BoundReport:
    """Per-variable bound splitting the bases into commensurable and other ones."""
    n = len(eq.terms)
    sa = sum(rel_length(t.coefficient) for t in eq.terms)
    types = [geometry.classify(t.base) for t in eq.terms]
    bounds, trace = {}, {}
    for tj, ty in zip(eq.terms, types):
        if not ty.is_loxodromic:
            continue
        short = geometry.stable_norm(tj.base)
        non_com, com = Fraction(0), 0
        com_vars = []
        for ti, tyi in zip(eq.terms, types):
            if tyi.is_loxodromic and geometry.commensurable(tj.base, ti.base) is not None:
                com += rel_length(ti.base)
                com_vars.append(ti.variable)
            else:
                non_com += Fraction(rel_length(ti.base), short)
        coef = Fraction(sa, short)
        total = (n * n + coef + non_com + com) * ledger.M
        bounds[tj.variable] = _ceil(total)
        trace[tj.variable] = {
            "n2": n * n,
            "sum_a_over_core": _num(coef),
            "non_commensurable": _num(non_com),
            "commensurable": com,
            "commensurable_with": com_vars,
            "core_length": short,
            "M": _num(ledger.M),
        }
    return BoundReport("refined", bounds, trace, ledger.as_dict())
