"""Conjugacy geometry of free products of abelian groups.

Element classification and conjugacy, plus commensurability and axis
periodicity for loxodromics.  Lengths are syllable lengths, so translation
lengths on the Bass-Serre tree are exact integers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .freeprod import (
    FreeProductElement,
    cyclic_split,
    invert,
    multiply,
    normalize,
    power,
    rel_length,
)

# constants of the free-product specialisation
KAPPA = 1
EPSILON = 0
INJ = 1


@dataclass(frozen=True)
class CyclicForm:
    reduced: FreeProductElement
    conjugator: FreeProductElement


@dataclass(frozen=True)
class ElementType:
    tag: str  # "trivial" | "parabolic" | "loxodromic"
    factor: Optional[int] = None
    witness: Optional[FreeProductElement] = None
    value: Optional[object] = None  # AbelianElement of the factor

    @property
    def is_loxodromic(self) -> bool:
        return self.tag == "loxodromic"

    @property
    def is_parabolic(self) -> bool:
        return self.tag == "parabolic"

    @property
    def is_trivial(self) -> bool:
        return self.tag == "trivial"


@dataclass(frozen=True)
class IndexPair:
    k: int
    ell: int
    sign: int


def conjugate(w: FreeProductElement, g: FreeProductElement) -> FreeProductElement:
    """``w g w^-1``."""
    return multiply(multiply(w, g), invert(w))


def cyclic_reduce(g: FreeProductElement) -> CyclicForm:
    conj, core = cyclic_split(g)
    return CyclicForm(reduced=core, conjugator=conj)


def classify(g: FreeProductElement) -> ElementType:
    if g.is_identity():
        return ElementType("trivial")
    form = cyclic_reduce(g)
    if len(form.reduced) == 1:
        s = form.reduced.syllables[0]
        return ElementType("parabolic", s.factor, form.conjugator, s.value)
    return ElementType("loxodromic")


def stable_norm(g: FreeProductElement) -> int:
    core = cyclic_reduce(g).reduced
    return len(core) if len(core) >= 2 else 0


def _rotate(core: FreeProductElement, i: int):
    """Rotation of a cyclically reduced core by ``i`` syllables and the element ``r``
    with ``rotated = r core r^-1``."""
    syl = core.syllables
    prefix = FreeProductElement(core.spec, syl[:i])
    rotated = FreeProductElement(core.spec, syl[i:] + syl[:i])
    return rotated, invert(prefix)


def _rotations_matching(u_core: FreeProductElement, v_core: FreeProductElement):
    """All ``r`` with ``v_core = r u_core r^-1`` obtained by rotating syllables."""
    n = len(u_core)
    if n != len(v_core):
        return []
    if n <= 1:
        return [u_core.spec.identity()] if u_core == v_core else []
    out = []
    for i in range(n):
        rotated, r = _rotate(u_core, i)
        if rotated.syllables == v_core.syllables:
            out.append(r)
    return out


def conjugacy_test(u: FreeProductElement, v: FreeProductElement) -> Optional[FreeProductElement]:
    """Return ``w`` with ``v = w u w^-1``, or ``None`` if ``u`` and ``v`` are not conjugate."""
    cu, cv = cyclic_reduce(u), cyclic_reduce(v)
    rs = _rotations_matching(cu.reduced, cv.reduced)
    if not rs:
        return None
    return multiply(multiply(cv.conjugator, rs[0]), invert(cu.conjugator))


def _conjugator_candidates(h1: FreeProductElement, h2: FreeProductElement):
    c1, c2 = cyclic_reduce(h1), cyclic_reduce(h2)
    spec = h1.spec
    rs = _rotations_matching(c1.reduced, c2.reduced)
    if not rs:
        return []
    mids = []
    core = c1.reduced
    if len(core) >= 2:
        # centraliser of the core is generated by its primitive root
        root = primitive_root(core)[0]
        for r in rs:
            for j in (-1, 0, 1):
                mids.append(multiply(r, power(root, j)))
    elif len(core) == 1:
        # centraliser of a factor element contains the whole factor
        s = core.syllables[0]
        ends = [spec.identity()]
        for c in (c2.conjugator, invert(c1.conjugator)):
            for syl in (c.syllables[:1] + c.syllables[-1:]):
                if syl.factor == s.factor:
                    e = normalize(spec, [syl])
                    ends += [e, invert(e)]
        for e in ends:
            for f in ends:
                mids.append(multiply(e, f))
    else:
        mids.append(spec.identity())
    out = []
    seen = set()
    for m in mids:
        w = multiply(multiply(c2.conjugator, m), invert(c1.conjugator))
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


def find_short_conjugator(h1: FreeProductElement, h2: FreeProductElement) -> Optional[FreeProductElement]:
    """Shortest ``g`` with ``h2 = g h1 g^-1`` among rotation/splitting candidates."""
    best = None
    for w in _conjugator_candidates(h1, h2):
        if conjugate(w, h1) != h2:
            continue
        key = (len(w), str(w))
        if best is None or key < best[0]:
            best = (key, w)
    return None if best is None else best[1]


def conjugator_budget(h1: FreeProductElement, h2: FreeProductElement, C: int = 1) -> int:
    return C * (rel_length(h1) + rel_length(h2))


def _smallest_period(seq) -> int:
    """Smallest ``p`` dividing ``len(seq)`` with ``seq`` ``p``-periodic (prefix function)."""
    n = len(seq)
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and seq[i] != seq[k]:
            k = fail[k - 1]
        if seq[i] == seq[k]:
            k += 1
        fail[i] = k
    p = n - fail[-1] if n else 0
    return p if p and n % p == 0 else n


def primitive_root(core: FreeProductElement):
    """``(root, exponent)`` with ``core = root**exponent`` for a cyclically reduced core."""
    syl = core.syllables
    p = _smallest_period(syl)
    return FreeProductElement(core.spec, syl[:p]), len(syl) // p


def _require_loxodromic(*gs):
    for g in gs:
        if stable_norm(g) == 0:
            raise ValueError(f"{g} is not loxodromic")


def commensurable(u: FreeProductElement, v: FreeProductElement, search_cap: int = 16) -> Optional[IndexPair]:
    """Minimal indices ``(k, ell, sign)`` with ``u^k ~ v^(sign*ell)``.

    Decided by comparing primitive roots of the cyclically reduced cores up to
    conjugacy and inversion.  The result is re-checked by an explicit
    conjugacy test; should that ever fail, a bounded exponent search with
    ``k, ell <= search_cap`` takes over.
    """
    _require_loxodromic(u, v)
    pu, eu = primitive_root(cyclic_reduce(u).reduced)
    pv, ev = primitive_root(cyclic_reduce(v).reduced)
    sign = 0
    if conjugacy_test(pu, pv) is not None:
        sign = 1
    elif conjugacy_test(pu, invert(pv)) is not None:
        sign = -1
    if sign == 0:
        return None
    g = math.gcd(eu, ev)
    pair = IndexPair(ev // g, eu // g, sign)
    if conjugacy_test(power(u, pair.k), power(v, pair.sign * pair.ell)) is not None:
        return pair
    return index_pair_search(u, v, search_cap)


def index_pair_search(u: FreeProductElement, v: FreeProductElement, cap: int) -> Optional[IndexPair]:
    """Exhaustive ``k, s`` in ``1..cap`` search for the least ``k`` with ``u^k ~ v^s``."""
    for k in range(1, cap + 1):
        uk = power(u, k)
        for s in range(1, cap + 1):
            for sign in (1, -1):
                if conjugacy_test(uk, power(v, sign * s)) is not None:
                    return IndexPair(k, s, sign)
    return None


def power_conjugacy_normalize(z, a, b, n: int, m: int):
    """Given ``z^-1 a^n z = b^m``, return ``(s, t)`` of minimal size with ``z^-1 a^s z = b^t``.

    ``|s|`` and ``|t|`` are the commensurability indices of ``a`` and ``b``; for
    positive ``n, m`` both are positive.
    """
    if n == 0 or m == 0:
        raise ValueError("exponents must be nonzero")
    _require_loxodromic(a, b)
    zi = invert(z)
    if multiply(multiply(zi, power(a, n)), z) != power(b, m):
        raise ValueError("precondition z^-1 a^n z = b^m fails")
    pair = commensurable(a, b)
    if pair is None:
        raise ValueError("a and b are not commensurable")
    for s in (pair.k, -pair.k):
        for t in (pair.ell, -pair.ell):
            if (s > 0) != (n > 0) and n * m > 0:
                continue
            if multiply(multiply(zi, power(a, s)), z) == power(b, t):
                return s, t
    raise AssertionError("no normalized exponents found")


# ---------------------------------------------------------------------------
# periodicity


@dataclass(frozen=True)
class Overlap:
    """Aligned windows on the axes ``L(x, a)`` and ``L(y, b)``.

    The window on ``L(x, a)`` starts ``start_a`` syllables after the phase
    vertex ``x`` and the one on ``L(y, b)`` starts ``start_b`` syllables after
    ``y``; both run for ``length`` syllables and must read the same labels from
    the same vertex.
    """

    start_a: int
    start_b: int
    length: int


def _axis_prefix(g: FreeProductElement, i: int) -> FreeProductElement:
    syl = g.syllables
    q, r = divmod(i, len(syl))
    return FreeProductElement(g.spec, syl * q + syl[:r])


def _axis_labels(g: FreeProductElement, start: int, length: int):
    syl = g.syllables
    n = len(syl)
    return [syl[(start + i) % n] for i in range(length)]


def periodicity_witness(x, a, y, b, overlap: Overlap):
    """Positive ``(s, t)`` with ``(y^-1 x) a^s (x^-1 y) = b^t`` when the overlap is long enough.

    Returns ``None`` when the overlap is shorter than ``|a| + |b|``.
    """
    for g in (a, b):
        if len(g) < 2 or cyclic_reduce(g).reduced != g:
            raise ValueError(f"{g} must be loxodromic and cyclically reduced")
    if overlap.start_a < 0 or overlap.start_b < 0 or overlap.length < 0:
        raise ValueError("malformed overlap: negative offsets")
    pa = multiply(x, _axis_prefix(a, overlap.start_a))
    pb = multiply(y, _axis_prefix(b, overlap.start_b))
    if pa != pb:
        raise ValueError("malformed overlap: windows start at different vertices")
    wa = _axis_labels(a, overlap.start_a, overlap.length)
    wb = _axis_labels(b, overlap.start_b, overlap.length)
    if wa != wb:
        raise ValueError("malformed overlap: window labels differ")
    if overlap.length < len(a) + len(b):
        return None
    # the window has periods |a| and |b|, hence their gcd; use its primitive period
    d = math.gcd(len(a), len(b))
    p = _smallest_period(wa[:d])
    s, t = len(b) // p, len(a) // p
    g = math.gcd(s, t)
    s, t = s // g, t // g
    c = multiply(invert(y), x)
    if multiply(multiply(c, power(a, s)), invert(c)) != power(b, t):
        raise AssertionError("periodicity witness failed verification")
    return s, t
