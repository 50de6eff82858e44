"""Finitely generated abelian groups and exact integer linear systems over them.

An abelian group Z^r x Z/m_1 x ... x Z/m_t is described by an
:class:`AbelianSignature`; its elements are integer vectors whose torsion
coordinates are kept reduced.  Equations ``c + x_1*t_1 + ... + x_k*t_k = 0``
with integer unknowns are collected into a :class:`DiophantineSystem` and
solved by :func:`solve_diophantine`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

DEFAULT_WINDOW = 64
# max number of parameter points examined when picking a witness
DEFAULT_MAX_POINTS = 1 << 18


class SignatureMismatch(ValueError):
    pass


@dataclass(frozen=True)
class AbelianSignature:
    free_rank: int
    torsion_moduli: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion_moduli", tuple(int(m) for m in self.torsion_moduli))
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        for m in self.torsion_moduli:
            if m < 2:
                raise ValueError(f"torsion modulus {m} must be >= 2")

    @property
    def ncoords(self) -> int:
        return self.free_rank + len(self.torsion_moduli)

    @property
    def moduli(self) -> tuple:
        """Per-coordinate modulus, 0 for free coordinates."""
        return (0,) * self.free_rank + self.torsion_moduli

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> float:
        if self.free_rank:
            return math.inf
        return math.prod(self.torsion_moduli)

    def identity(self) -> "AbelianElement":
        return AbelianElement(self, (0,) * self.ncoords)

    def element(self, coords: Iterable[int]) -> "AbelianElement":
        return AbelianElement(self, tuple(coords))

    def basis(self) -> list:
        out = []
        for i in range(self.ncoords):
            c = [0] * self.ncoords
            c[i] = 1
            out.append(AbelianElement(self, tuple(c)))
        return out

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{m}" for m in self.torsion_moduli)
        return " x ".join(parts) if parts else "Z^0"


@dataclass(frozen=True)
class AbelianElement:
    signature: AbelianSignature
    coords: tuple

    def __post_init__(self):
        sig = self.signature
        coords = tuple(int(c) for c in self.coords)
        if len(coords) != sig.ncoords:
            raise ValueError(f"expected {sig.ncoords} coordinates for {sig}, got {len(coords)}")
        if sig.torsion_moduli:
            r = sig.free_rank
            coords = coords[:r] + tuple(c % m for c, m in zip(coords[r:], sig.torsion_moduli))
        object.__setattr__(self, "coords", coords)

    @classmethod
    def _raw(cls, signature: AbelianSignature, coords: tuple) -> "AbelianElement":
        # trusted constructor: coords already reduced
        obj = object.__new__(cls)
        object.__setattr__(obj, "signature", signature)
        object.__setattr__(obj, "coords", coords)
        return obj

    def is_identity(self) -> bool:
        return not any(self.coords)

    def __bool__(self):
        return not self.is_identity()

    def __add__(self, other: "AbelianElement") -> "AbelianElement":
        return ab_add(self, other)

    def __neg__(self) -> "AbelianElement":
        sig = self.signature
        if not sig.torsion_moduli:
            return AbelianElement._raw(sig, tuple(-c for c in self.coords))
        r = sig.free_rank
        tors = tuple(-c % m for c, m in zip(self.coords[r:], sig.torsion_moduli))
        return AbelianElement._raw(sig, tuple(-c for c in self.coords[:r]) + tors)

    def __sub__(self, other: "AbelianElement") -> "AbelianElement":
        return ab_add(self, ab_scale(-1, other))

    def __rmul__(self, k: int) -> "AbelianElement":
        return ab_scale(k, self)

    def order(self) -> float:
        """Order of the element; ``math.inf`` when some free coordinate is nonzero."""
        r = self.signature.free_rank
        if any(self.coords[:r]):
            return math.inf
        out = 1
        for c, m in zip(self.coords[r:], self.signature.torsion_moduli):
            out = math.lcm(out, m // math.gcd(c, m))
        return out

    def __str__(self):
        return "(" + ",".join(str(c) for c in self.coords) + ")"


def ab_add(u: AbelianElement, v: AbelianElement) -> AbelianElement:
    if u.signature != v.signature:
        raise SignatureMismatch(f"cannot add elements of {u.signature} and {v.signature}")
    return AbelianElement(u.signature, tuple(a + b for a, b in zip(u.coords, v.coords)))


def ab_scale(k: int, v: AbelianElement) -> AbelianElement:
    return AbelianElement(v.signature, tuple(k * c for c in v.coords))


# ---------------------------------------------------------------------------
# Diophantine systems


@dataclass(frozen=True)
class Row:
    """``constant + sum(x_v * coefficient) = 0`` in one abelian group."""

    constant: AbelianElement
    terms: tuple = ()  # ((variable, AbelianElement), ...)

    def evaluate(self, assignment) -> AbelianElement:
        acc = self.constant
        for var, coeff in self.terms:
            acc = acc + ab_scale(assignment[var], coeff)
        return acc


@dataclass(frozen=True)
class DiophantineSystem:
    signature: AbelianSignature
    rows: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        for row in self.rows:
            if row.constant.signature != self.signature:
                raise SignatureMismatch("row constant has the wrong signature")
            for _, coeff in row.terms:
                if coeff.signature != self.signature:
                    raise SignatureMismatch("row coefficient has the wrong signature")

    @property
    def variables(self) -> tuple:
        seen = {}
        for row in self.rows:
            for var, _ in row.terms:
                seen.setdefault(var, None)
        return tuple(seen)

    def is_satisfied(self, assignment) -> bool:
        return all(row.evaluate(assignment).is_identity() for row in self.rows)


@dataclass(frozen=True)
class SolutionSet:
    """Integer solutions ``particular + span(basis)`` of a system, or UNSAT.

    ``basis`` is a basis of the lattice of homogeneous solutions restricted to
    ``variables``; ``witness`` is the max-norm minimiser found by
    :func:`solve_diophantine`.
    """

    sat: bool
    variables: tuple = ()
    particular: tuple = ()
    basis: tuple = ()
    witness: dict = field(default_factory=dict)

    def point(self, params: Sequence[int]) -> dict:
        x = list(self.particular)
        for t, b in zip(params, self.basis):
            for i, bi in enumerate(b):
                x[i] += t * bi
        return dict(zip(self.variables, x))


def xgcd(a: int, b: int):
    """Return ``(g, s, t)`` with ``g = s*a + t*b = gcd(a, b) >= 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def column_echelon(A: list, ncols: int):
    """Column-style Hermite reduction.

    Returns ``(H, U, pivots)`` with ``A U = H`` for unimodular ``U``; ``H`` is in
    lower column echelon form and ``pivots[i]`` is the row holding the leading
    entry of column ``i`` for ``i < rank``.  Columns ``rank..ncols-1`` of ``H``
    are zero.
    """
    H = [list(r) for r in A]
    U = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    mats = (H, U)

    def colop(p, j, s, t, u, v):
        # (col_p, col_j) <- (s col_p + t col_j, u col_p + v col_j)
        for M in mats:
            for r in M:
                cp, cj = r[p], r[j]
                r[p] = s * cp + t * cj
                r[j] = u * cp + v * cj

    pivots = []
    p = 0
    for i, row in enumerate(H):
        if p == ncols:
            break
        for j in range(p + 1, ncols):
            b = row[j]
            if b == 0:
                continue
            a = row[p]
            if a == 0:
                colop(p, j, 0, 1, 1, 0)
                continue
            g, s, t = xgcd(a, b)
            colop(p, j, s, t, -b // g, a // g)
        if row[p] != 0:
            if row[p] < 0:
                for M in mats:
                    for r in M:
                        r[p] = -r[p]
            # reduce earlier columns against the new pivot to tame growth
            piv = row[p]
            for j in range(p):
                q = row[j] // piv
                if q:
                    for M in mats:
                        for r in M:
                            r[j] -= q * r[p]
            pivots.append(i)
            p += 1
    return H, U, pivots


def solve_integer_linear(A: list, b: list, ncols: int):
    """Solve ``A z = b`` over the integers.

    Returns ``None`` when unsolvable, otherwise ``(z0, kernel)`` where ``kernel``
    is a basis of the integer kernel of ``A``.
    """
    H, U, pivots = column_echelon(A, ncols)
    rank = len(pivots)
    y = [0] * ncols
    k = 0
    for i, row in enumerate(H):
        resid = b[i] - sum(row[j] * y[j] for j in range(k))
        if k < rank and pivots[k] == i:
            q, r = divmod(resid, row[k])
            if r:
                return None
            y[k] = q
            k += 1
        elif resid:
            return None
    z0 = [sum(U[r][j] * y[j] for j in range(rank)) for r in range(ncols)]
    kernel = [[U[r][j] for r in range(ncols)] for j in range(rank, ncols)]
    return z0, kernel


def lattice_basis(vectors: list, dim: int) -> list:
    """Row-echelon basis of the integer lattice spanned by ``vectors``."""
    if not vectors:
        return []
    # transpose so the column routine acts on the generators
    A = [[v[i] for v in vectors] for i in range(dim)]
    H, _, pivots = column_echelon(A, len(vectors))
    return [[H[i][j] for i in range(dim)] for j in range(len(pivots))]


def _size_reduce(x: list, basis: list) -> list:
    x = list(x)
    for b in basis:
        lead = next(i for i, c in enumerate(b) if c)
        q = _round_div(x[lead], b[lead])
        if q:
            x = [xi - q * bi for xi, bi in zip(x, b)]
    return x


def _round_div(a: int, b: int) -> int:
    if b < 0:
        a, b = -a, -b
    return (2 * a + b) // (2 * b)


def _norm(x) -> int:
    return max((abs(c) for c in x), default=0)


def _best_on_line(x0: list, b: list, window: int) -> list:
    """Max-norm minimiser of ``x0 + t b`` over ``|t| <= window``, lexicographic tie-break."""

    def f(t):
        return _norm([xi + t * bi for xi, bi in zip(x0, b)])

    # f is convex in t: binary search the leftmost and rightmost minimisers
    lo, hi = -window, window
    while lo < hi:
        mid = (lo + hi) // 2
        if f(mid + 1) < f(mid):
            lo = mid + 1
        else:
            hi = mid
    left = lo
    fmin = f(left)
    lo, hi = left, window
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if f(mid) == fmin:
            lo = mid
        else:
            hi = mid - 1
    right = lo
    xl = [xi + left * bi for xi, bi in zip(x0, b)]
    xr = [xi + right * bi for xi, bi in zip(x0, b)]
    return min(xl, xr)


def _best_in_box(x0: list, basis: list, window: int, max_points: int) -> list:
    k = len(basis)
    w = window
    while w > 0 and (2 * w + 1) ** k > max_points:
        w -= 1
    scale = _norm(x0) + w * sum(_norm(b) for b in basis)
    if scale < 2 ** 60:
        grid = np.arange(-w, w + 1, dtype=np.int64)
        T = np.stack(np.meshgrid(*([grid] * k), indexing="ij"), axis=-1).reshape(-1, k)
        X = np.asarray(x0, dtype=np.int64) + T @ np.asarray(basis, dtype=np.int64)
        norms = np.abs(X).max(axis=1)
        cand = X[norms == norms.min()]
        order = np.lexsort(cand.T[::-1])
        return [int(c) for c in cand[order[0]]]
    best = None
    for t in itertools.product(range(-w, w + 1), repeat=k):
        x = list(x0)
        for ti, b in zip(t, basis):
            x = [xi + ti * bi for xi, bi in zip(x, b)]
        key = (_norm(x), x)
        if best is None or key < best:
            best = key
    return best[1]


def solve_diophantine(
    system: DiophantineSystem,
    window: int = DEFAULT_WINDOW,
    max_points: int = DEFAULT_MAX_POINTS,
) -> SolutionSet:
    """Solve a system of abelian-group equations in integer unknowns.

    Every torsion coordinate ``j`` of every row becomes an integer equation with
    a fresh multiplier ``y`` (``... + m_j*y = 0``), so the whole system is one
    integer linear system handled by :func:`solve_integer_linear`.
    """
    variables = system.variables
    nvar = len(variables)
    index = {v: i for i, v in enumerate(variables)}
    sig = system.signature
    moduli = sig.moduli

    eqs = []
    for row in system.rows:
        for c in range(sig.ncoords):
            coeffs = [0] * nvar
            for var, coeff in row.terms:
                coeffs[index[var]] += coeff.coords[c]
            eqs.append((coeffs, -row.constant.coords[c], moduli[c]))
    naux = sum(1 for _, _, m in eqs if m)
    ncols = nvar + naux
    A, b = [], []
    aux = nvar
    for coeffs, rhs, m in eqs:
        line = coeffs + [0] * naux
        if m:
            line[aux] = m
            aux += 1
        A.append(line)
        b.append(rhs)

    solved = solve_integer_linear(A, b, ncols)
    if solved is None:
        return SolutionSet(sat=False, variables=variables)
    z0, kernel = solved
    basis = lattice_basis([k[:nvar] for k in kernel], nvar)
    x0 = _size_reduce(z0[:nvar], basis)
    if not basis:
        best = x0
    elif len(basis) == 1:
        best = _best_on_line(x0, basis[0], window)
    else:
        best = _best_in_box(x0, basis, window, max_points)
    witness = dict(zip(variables, best))
    if not system.is_satisfied(witness):
        raise AssertionError("diophantine witness failed substitution")
    return SolutionSet(
        sat=True,
        variables=variables,
        particular=tuple(x0),
        basis=tuple(tuple(v) for v in basis),
        witness=witness,
    )
