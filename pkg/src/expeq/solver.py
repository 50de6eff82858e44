"""Exact solver for exponential equations ``a_1 g_1^x_1 ... a_n g_n^x_n = 1``.

Pipeline: classify the bases; branch the loxodromic exponents by iterative
deepening on their max-norm inside the ledger bounds; fold the chosen powers
into the coefficients; reduce the remaining parabolic equation to abelian
systems and solve them exactly.  Every reported assignment is re-checked by
multiplying out the equation.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Optional

from . import geometry
from .abelian import DEFAULT_MAX_POINTS, DEFAULT_WINDOW, solve_diophantine
from .bounds import ConstantsLedger, bound_refined, bound_simple, default_ledger
from .freeprod import FreeProductElement, GroupSpec, format_element, invert, multiply, power, rel_length
from .reduction import reduce

SAT, UNSAT, UNKNOWN = "SAT", "UNSAT", "UNKNOWN"

# default volume cap for the brute-force oracle
BRUTE_CAP = 2_000_000


class ExtensionError(RuntimeError):
    """A disjunct solution failed to lift to the original equation."""


class BoxTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Term:
    coefficient: FreeProductElement
    base: FreeProductElement
    variable: str


class ExponentialEquation:
    def __init__(self, spec: GroupSpec, terms):
        self.spec = spec
        self.terms = tuple(terms)
        if not self.terms:
            raise ValueError("an equation needs at least one term")
        names = [t.variable for t in self.terms]
        if len(set(names)) != len(names):
            raise ValueError("variables must be distinct")
        for t in self.terms:
            for e in (t.coefficient, t.base):
                if e.spec != spec:
                    raise ValueError("term lies in a different group")

    @property
    def variables(self) -> tuple:
        return tuple(t.variable for t in self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        return isinstance(other, ExponentialEquation) and self.spec == other.spec and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        return f"ExponentialEquation({self})"

    def __str__(self):
        parts = []
        for t in self.terms:
            if not t.coefficient.is_identity():
                parts.append(f"({format_element(t.coefficient)})")
            parts.append(f"({format_element(t.base)})^{t.variable}")
        return "*".join(parts) + " = 1"

    def evaluate(self, assignment) -> FreeProductElement:
        out = self.spec.identity()
        for t in self.terms:
            out = multiply(out, t.coefficient)
            out = multiply(out, power(t.base, assignment[t.variable]))
        return out

    def is_solution(self, assignment) -> bool:
        return self.evaluate(assignment).is_identity()

    def substitute(self, values: dict) -> "ExponentialEquation":
        """Fold ``g^k`` into the next coefficient for every variable in ``values``.

        The trailing constant, if any, is moved to the front by conjugation.
        Returns ``None`` when every variable has been substituted.
        """
        spec = self.spec
        terms, pending = [], spec.identity()
        for t in self.terms:
            pending = multiply(pending, t.coefficient)
            if t.variable in values:
                pending = multiply(pending, power(t.base, values[t.variable]))
            else:
                terms.append([pending, t.base, t.variable])
                pending = spec.identity()
        if not terms:
            return None
        terms[0][0] = multiply(pending, terms[0][0])
        return ExponentialEquation(spec, [Term(*t) for t in terms])


# ---------------------------------------------------------------------------
# results


@dataclass
class SolutionCertificate:
    assignment: dict
    trace: dict = field(default_factory=dict)
    verified: bool = False


@dataclass
class Verdict:
    status: str
    certificate: Optional[SolutionCertificate] = None
    bounds: Optional[dict] = None
    reason: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def assignment(self) -> Optional[dict]:
        return None if self.certificate is None else self.certificate.assignment

    def to_json(self) -> dict:
        cert = self.certificate
        return {
            "status": self.status,
            "assignment": None if cert is None else dict(cert.assignment),
            "branch_trace": None if cert is None else cert.trace,
            "bounds": self.bounds,
            "reason": self.reason,
            "stats": dict(self.stats),
        }


@dataclass
class SolveOptions:
    max_branches: Optional[int] = None  # None: no cap
    refined: bool = False
    window: int = DEFAULT_WINDOW
    max_points: int = DEFAULT_MAX_POINTS


@dataclass
class BranchTrace:
    """What a disjunct solution needs to become a full assignment."""

    equation: ExponentialEquation
    loxodromic: dict  # variable -> chosen exponent
    free: tuple = ()
    branch_index: Optional[int] = None


def _verify(eq, assignment) -> bool:
    return eq.is_solution(assignment)


def extend_phi_solution(phi_solution: dict, trace: BranchTrace) -> SolutionCertificate:
    """Merge a disjunct solution with the branched exponents and free variables."""
    assignment = {}
    for v in trace.equation.variables:
        if v in trace.loxodromic:
            assignment[v] = trace.loxodromic[v]
        elif v in trace.free:
            assignment[v] = 0
        elif v in phi_solution:
            assignment[v] = phi_solution[v]
        else:
            raise ExtensionError(f"no value for variable {v!r}")
    if not _verify(trace.equation, assignment):
        raise ExtensionError(f"assignment {assignment} does not solve {trace.equation}")
    return SolutionCertificate(
        assignment,
        {"loxodromic": dict(trace.loxodromic), "free": list(trace.free), "branch": trace.branch_index},
        verified=True,
    )


class _Budget(Exception):
    pass


class _Search:
    def __init__(self, eq, options):
        self.eq = eq
        self.opts = options
        self.branches = 0  # loxodromic exponent vectors tried
        self.phi_branches = 0
        self.dio_calls = 0

    def tick(self):
        self.branches += 1
        cap = self.opts.max_branches
        if cap is not None and self.branches > cap:
            raise _Budget()

    def parabolic(self, sub, fixed) -> list:
        """Candidate full assignments from the parabolic remainder ``sub``."""
        out = []
        phi = reduce(sub)
        self.phi_branches += len(phi.branches)
        for idx, br in enumerate(phi.branches):
            sol = {}
            for f, system in br.systems().items():
                self.dio_calls += 1
                res = solve_diophantine(system, self.opts.window, self.opts.max_points)
                if not res.sat:
                    sol = None
                    break
                sol.update(res.witness)
            if sol is None:
                continue
            trace = BranchTrace(self.eq, dict(fixed), phi.free, idx)
            cert = extend_phi_solution(sol, trace)
            cert.trace["peripheral"] = [br.to_json()["peripheral_rows"]]
            out.append(cert)
        return out


def _max_norm(assignment, order) -> tuple:
    vals = [assignment[v] for v in order]
    return (max((abs(x) for x in vals), default=0), vals)


def _power_root(g: FreeProductElement, w: FreeProductElement) -> Optional[int]:
    """The unique ``k`` with ``g^k = w`` for loxodromic ``g``, if any."""
    form = geometry.cyclic_reduce(g)
    conj, core = form.conjugator, form.reduced
    u = multiply(multiply(invert(conj), w), conj)
    n = len(core)
    if len(u) % n:
        return None
    k = len(u) // n
    for cand in (k, -k):
        if power(g, cand) == w:
            return cand
    return None


def solve(eq: ExponentialEquation, ledger: ConstantsLedger = None, options: SolveOptions = None) -> Verdict:
    options = options or SolveOptions()
    ledger = ledger or default_ledger(eq.spec)
    t0 = time.perf_counter()
    search = _Search(eq, options)
    report = (bound_refined if options.refined else bound_simple)(eq, ledger)
    types = [geometry.classify(t.base) for t in eq.terms]
    lox = [t.variable for t, ty in zip(eq.terms, types) if ty.is_loxodromic]
    order = eq.variables

    def finish(status, cert=None, reason=""):
        stats = {
            "branches": search.branches,
            "phi_branches": search.phi_branches,
            "diophantine_calls": search.dio_calls,
            "wall_time": round(time.perf_counter() - t0, 6),
        }
        return Verdict(status, cert, report.as_dict(), reason, stats)

    try:
        best = _deepen(eq, types, lox, report.bounds, search, order)
    except _Budget:
        return finish(UNKNOWN, reason=f"branch cap {options.max_branches} reached")
    if best is None:
        return finish(UNSAT)
    if not _verify(eq, best.assignment):
        raise ExtensionError("certificate failed final verification")
    best.verified = True
    return finish(SAT, best)


def _lox_lengths(eq, types):
    """Data for the length pruning of loxodromic exponents.

    Every product equal to 1 has each factor no longer than the sum of the
    others, and ``|g^k| >= |k| |core| - 2 |conjugator|``.
    """
    rest = sum(rel_length(t.coefficient) for t in eq.terms)
    for t, ty in zip(eq.terms, types):
        if ty.is_parabolic:
            rest += 2 * rel_length(ty.witness) + 1
    return rest


def _deepen(eq, types, lox, bounds, search, order):
    terms = {t.variable: t for t in eq.terms}
    forms = {v: geometry.cyclic_reduce(terms[v].base) for v in lox}
    rest = _lox_lengths(eq, types)
    only_lox = len(lox) == len(eq.terms)
    plen_cache = {}

    def plen(v, k):
        key = (v, k)
        if key not in plen_cache:
            plen_cache[key] = rel_length(power(terms[v].base, k))
        return plen_cache[key]

    def lower(v, k):
        f = forms[v]
        return abs(k) * len(f.reduced) - 2 * len(f.conjugator)

    # variables enumerated explicitly; with only loxodromic bases the last is solved exactly
    enum = lox[:-1] if only_lox else lox
    last = lox[-1] if only_lox else None
    cap_last = bounds[last] if last is not None else 0
    top = max((bounds[v] for v in enum), default=0)
    if not only_lox and len(enum) == 1:
        # a lone loxodromic power is no longer than the rest of the word
        f = forms[enum[0]]
        top = min(top, (rest + 2 * len(f.conjugator)) // len(f.reduced))

    best, best_key = None, None
    for r in range(top + 1):
        if best_key is not None and r > best_key[0]:
            break
        for ks in _shell(enum, r, bounds):
            fixed = dict(zip(enum, ks))
            search.tick()
            # length pruning, valid once every loxodromic exponent is fixed
            if not only_lox:
                total = rest + sum(plen(v, k) for v, k in fixed.items())
                if any(lower(v, k) > total - plen(v, k) for v, k in fixed.items()):
                    continue
            cands = []
            if only_lox:
                w = _solve_last(eq, fixed, last)
                if w is not None and abs(w) <= cap_last:
                    a = dict(fixed)
                    a[last] = w
                    trace = BranchTrace(eq, a, (), None)
                    cands.append(extend_phi_solution({}, trace))
            else:
                sub = eq.substitute(fixed)
                if sub is None:
                    if eq.is_solution(fixed):
                        cands.append(extend_phi_solution({}, BranchTrace(eq, fixed)))
                else:
                    cands.extend(search.parabolic(sub, fixed))
            for c in cands:
                key = _max_norm(c.assignment, order)
                if best_key is None or key < best_key:
                    best, best_key = c, key
    return best


def _solve_last(eq, fixed, last) -> Optional[int]:
    """Exponent of ``last`` making ``eq`` hold with the others fixed, if any."""
    spec = eq.spec
    before, after = spec.identity(), spec.identity()
    seen = False
    target = None
    for t in eq.terms:
        if t.variable == last:
            before = multiply(before, t.coefficient)
            seen = True
            target = t.base
            continue
        piece = multiply(t.coefficient, power(t.base, fixed[t.variable]))
        if seen:
            after = multiply(after, piece)
        else:
            before = multiply(before, piece)
    # before * g^x * after = 1  <=>  g^x = (after * before)^-1
    w = invert(multiply(after, before))
    if w.is_identity():
        return 0
    return _power_root(target, w)


def _shell(names, r, bounds):
    """Integer vectors of max-norm exactly ``r`` within the bounds, in a fixed order."""
    caps = [min(r, bounds[v]) for v in names]
    if not names:
        if r == 0:
            yield ()
        return
    if r == 0:
        yield (0,) * len(names)
        return
    if max(caps) < r:
        return

    def span(c):
        return sorted(range(-c, c + 1), key=lambda x: (abs(x), x))

    # first coordinate of absolute value r sits at position i
    for i, c in enumerate(caps):
        if c < r:
            continue
        head = [span(min(r - 1, cj)) for cj in caps[:i]]
        tail = [span(cj) for cj in caps[i + 1 :]]
        for h in itertools.product(*head):
            for sign in (-r, r):
                for t in itertools.product(*tail):
                    yield h + (sign,) + t


# ---------------------------------------------------------------------------
# brute-force oracle


def _box_volume(box) -> int:
    vol = 1
    for lo, hi in box:
        vol *= max(0, hi - lo + 1)
    return vol


def solve_brute(eq: ExponentialEquation, box, cap: int = BRUTE_CAP, naive: bool = False) -> list:
    """All solutions inside ``box`` (one ``(lo, hi)`` per variable), sorted.

    The default mode splits the terms in two halves and matches the inverse of
    each left product against the right products by hashing; ``naive`` multiplies
    out every point.
    """
    if isinstance(box, tuple) and len(box) == 2 and all(isinstance(b, int) for b in box):
        box = [box] * len(eq.terms)
    box = [tuple(b) for b in box]
    if len(box) != len(eq.terms):
        raise ValueError("box needs one interval per variable")
    vol = _box_volume(box)
    if vol > cap:
        raise BoxTooLarge(f"box volume {vol} exceeds cap {cap}")
    pieces = []
    for t, (lo, hi) in zip(eq.terms, box):
        pieces.append([(k, multiply(t.coefficient, power(t.base, k))) for k in range(lo, hi + 1)])
    order = eq.variables
    out = []
    if naive:
        for combo in itertools.product(*pieces):
            acc = eq.spec.identity()
            for _, e in combo:
                acc = multiply(acc, e)
            if acc.is_identity():
                out.append(dict(zip(order, (k for k, _ in combo))))
        return out
    h = len(pieces) // 2
    left = {}
    for combo in itertools.product(*pieces[:h]):
        acc = eq.spec.identity()
        for _, e in combo:
            acc = multiply(acc, e)
        left.setdefault(invert(acc), []).append(tuple(k for k, _ in combo))
    for combo in itertools.product(*pieces[h:]):
        acc = eq.spec.identity()
        for _, e in combo:
            acc = multiply(acc, e)
        for ks in left.get(acc, ()):
            out.append(dict(zip(order, ks + tuple(k for k, _ in combo))))
    out.sort(key=lambda a: [a[v] for v in order])
    return out


def minimal_solution(solutions, order) -> Optional[dict]:
    """Max-norm minimal solution with lexicographic tie-break."""
    if not solutions:
        return None
    return min(solutions, key=lambda a: _max_norm(a, order))
