"""Free products of finitely generated abelian groups.

Elements are kept in normal form: a tuple of syllables ``(factor, value)``
with nontrivial values and no two neighbouring syllables in the same factor.
The syllable count is the word length with respect to the alphabet made of
all factor elements.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Optional

from .abelian import AbelianElement, AbelianSignature, DiophantineSystem, Row, solve_diophantine


class SpecMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    factor: int
    value: AbelianElement


class GroupSpec:
    """Ordered abelian factors together with named generators.

    ``factors`` is a sequence of ``(name, AbelianSignature)``; ``generators``
    is a sequence of ``(name, factor_name, coords)``.
    """

    def __init__(self, factors, generators=()):
        self.factors = tuple((str(n), sig) for n, sig in factors)
        if not self.factors:
            raise ValueError("a group needs at least one factor")
        names = [n for n, _ in self.factors]
        if len(set(names)) != len(names):
            raise ValueError("factor names must be unique")
        self._factor_index = {n: i for i, n in enumerate(names)}
        gens = []
        for name, fname, coords in generators:
            if fname not in self._factor_index:
                raise ValueError(f"unknown factor {fname!r} for generator {name!r}")
            i = self._factor_index[fname]
            gens.append(Generator(str(name), i, self.factors[i][1].element(coords)))
        gnames = [g.name for g in gens]
        if len(set(gnames)) != len(gnames):
            raise ValueError("generator names must be unique across factors")
        clash = set(gnames) & set(names)
        if clash:
            raise ValueError(f"generator names clash with factor names: {sorted(clash)}")
        self.generators = tuple(gens)
        self._gen_index = {g.name: g for g in gens}
        self._key = (self.factors, tuple((g.name, g.factor, g.value.coords) for g in gens))

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, GroupSpec) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        body = " * ".join(f"{n}={sig}" for n, sig in self.factors)
        return f"GroupSpec({body})"

    def signature(self, factor: int) -> AbelianSignature:
        return self.factors[factor][1]

    def factor_index(self, name: str) -> int:
        return self._factor_index[name]

    def factor_name(self, factor: int) -> str:
        return self.factors[factor][0]

    def generator(self, name: str) -> Generator:
        return self._gen_index[name]

    def has_generator(self, name: str) -> bool:
        return name in self._gen_index

    def identity(self) -> "FreeProductElement":
        return FreeProductElement(self, ())

    def gen(self, name: str) -> "FreeProductElement":
        g = self._gen_index[name]
        return self.syllable(g.factor, g.value)

    def syllable(self, factor: int, value) -> "FreeProductElement":
        if not isinstance(value, AbelianElement):
            value = self.signature(factor).element(value)
        return normalize(self, [Syllable(factor, value)])

    def element(self, text: str) -> "FreeProductElement":
        from .problem import parse_element

        return parse_element(self, text)


@dataclass(frozen=True)
class Syllable:
    factor: int
    value: AbelianElement

    def inverse(self) -> "Syllable":
        return Syllable(self.factor, -self.value)


class FreeProductElement:
    __slots__ = ("spec", "syllables", "_hash")

    def __init__(self, spec: GroupSpec, syllables: tuple):
        self.spec = spec
        self.syllables = tuple(syllables)
        self._hash = None

    @classmethod
    def checked(cls, spec: GroupSpec, syllables) -> "FreeProductElement":
        syllables = tuple(syllables)
        for i, s in enumerate(syllables):
            if s.value.is_identity():
                raise ValueError("syllable values must be nontrivial")
            if i and syllables[i - 1].factor == s.factor:
                raise ValueError("adjacent syllables must lie in distinct factors")
        return cls(spec, syllables)

    def __eq__(self, other):
        if not isinstance(other, FreeProductElement):
            return NotImplemented
        return self.syllables == other.syllables and (self.spec is other.spec or self.spec == other.spec)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple((s.factor, s.value.coords) for s in self.syllables))
        return self._hash

    def __len__(self):
        return len(self.syllables)

    def __mul__(self, other: "FreeProductElement") -> "FreeProductElement":
        return multiply(self, other)

    def __pow__(self, k: int) -> "FreeProductElement":
        return power(self, k)

    def inverse(self) -> "FreeProductElement":
        return invert(self)

    def is_identity(self) -> bool:
        return not self.syllables

    def __repr__(self):
        return f"<{format_element(self)}>"

    def __str__(self):
        return format_element(self)


def normalize(spec: GroupSpec, letters: Iterable[Syllable]) -> FreeProductElement:
    """Reduce a word of syllables to normal form.

    Adjacent same-factor letters are merged, identities dropped, and merging
    cascades through the stack.
    """
    stack: list = []
    nf = len(spec.factors)
    for s in letters:
        if not 0 <= s.factor < nf or s.value.signature != spec.factors[s.factor][1]:
            raise SpecMismatch(f"letter {s} does not belong to {spec}")
        _push(stack, s)
    return FreeProductElement(spec, tuple(stack))


def _push(stack: list, s: Syllable) -> None:
    if s.value.is_identity():
        return
    if stack and stack[-1].factor == s.factor:
        merged = stack[-1].value + s.value
        if merged.is_identity():
            stack.pop()
        else:
            stack[-1] = Syllable(s.factor, merged)
    else:
        stack.append(s)


def multiply(u: FreeProductElement, v: FreeProductElement) -> FreeProductElement:
    if u.spec is not v.spec and u.spec != v.spec:
        raise SpecMismatch("elements belong to different groups")
    if not u.syllables:
        return v
    if not v.syllables:
        return u
    stack = list(u.syllables)
    it = iter(v.syllables)
    for s in it:
        before = len(stack)
        _push(stack, s)
        # once nothing cancels the rest of v is already normal
        if len(stack) == before + 1 or (len(stack) == before and stack and stack[-1].factor == s.factor):
            stack.extend(it)
            break
    return FreeProductElement(u.spec, tuple(stack))


def product(spec: GroupSpec, elements: Iterable[FreeProductElement]) -> FreeProductElement:
    out = spec.identity()
    for e in elements:
        out = multiply(out, e)
    return out


def invert(u: FreeProductElement) -> FreeProductElement:
    return FreeProductElement(u.spec, tuple(s.inverse() for s in reversed(u.syllables)))


def rel_length(u: FreeProductElement) -> int:
    return len(u.syllables)


def cyclic_split(u: FreeProductElement):
    """Return ``(conjugator, core)`` with ``u = conjugator * core * conjugator^-1``.

    ``core`` is cyclically reduced.  When the outer syllables share a factor
    and do not cancel, the last syllable is moved to the front
    (``a^2 b a^-1 = a (a b) a^-1``).
    """
    syl = list(u.syllables)
    lo, hi = 0, len(syl)
    conj: list = []
    while hi - lo >= 2 and syl[lo].factor == syl[hi - 1].factor:
        first, last = syl[lo], syl[hi - 1]
        merged = first.value + last.value
        conj.append(last.inverse())
        if merged.is_identity():
            lo += 1
            hi -= 1
        else:
            syl[lo] = Syllable(first.factor, merged)
            hi -= 1
    spec = u.spec
    return normalize(spec, conj), FreeProductElement(spec, tuple(syl[lo:hi]))


def power(u: FreeProductElement, k: int) -> FreeProductElement:
    if k == 0 or not u.syllables:
        return u.spec.identity()
    conj, core = cyclic_split(u)
    if len(core.syllables) == 1:
        s = core.syllables[0]
        body = FreeProductElement(u.spec, (Syllable(s.factor, k * s.value),) if not (k * s.value).is_identity() else ())
    else:
        base = core.syllables if k > 0 else invert(core).syllables
        body = FreeProductElement(u.spec, base * abs(k))
    if not conj.syllables:
        return body
    return multiply(multiply(conj, body), invert(conj))


# ---------------------------------------------------------------------------
# text form


@functools.lru_cache(maxsize=4096)
def _decompose(spec: GroupSpec, factor: int, coords: tuple) -> Optional[tuple]:
    gens = [g for g in spec.generators if g.factor == factor]
    if not gens:
        return None
    sig = spec.signature(factor)
    row = Row(sig.element([-c for c in coords]), tuple((g.name, g.value) for g in gens))
    sol = solve_diophantine(DiophantineSystem(sig, [row]))
    if not sol.sat:
        return None
    return tuple((g.name, sol.witness[g.name]) for g in gens if sol.witness[g.name])


def syllable_words(spec: GroupSpec, s: Syllable) -> list:
    """Generator powers spelling one syllable, or ``None`` if outside the generated subgroup."""
    return _decompose(spec, s.factor, s.value.coords)


def format_element(u: FreeProductElement) -> str:
    if not u.syllables:
        return "1"
    parts = []
    for s in u.syllables:
        word = syllable_words(u.spec, s)
        if word is None:
            parts.append(f"{u.spec.factor_name(s.factor)}{s.value}")
            continue
        for name, k in word:
            parts.append(name if k == 1 else f"{name}^{k}")
    return "*".join(parts)


def generator_length(u: FreeProductElement) -> Optional[int]:
    """Length over the finite alphabet of declared generators (informational)."""
    total = 0
    for s in u.syllables:
        word = syllable_words(u.spec, s)
        if word is None:
            return None
        total += sum(abs(k) for _, k in word)
    return total
