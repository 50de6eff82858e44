"""Seeded random groups, elements and equations for fuzzing and the test suites."""
from __future__ import annotations

import random

from .abelian import AbelianSignature
from .freeprod import FreeProductElement, GroupSpec, Syllable, invert, multiply, normalize, power
from .solver import ExponentialEquation, Term


def spec_z_z() -> GroupSpec:
    return GroupSpec(
        [("A", AbelianSignature(1)), ("B", AbelianSignature(1))],
        [("a", "A", (1,)), ("b", "B", (1,))],
    )


def spec_z2_z6() -> GroupSpec:
    return GroupSpec(
        [("A", AbelianSignature(2)), ("B", AbelianSignature(0, (6,)))],
        [("a", "A", (1, 0)), ("c", "A", (0, 1)), ("b", "B", (1,))],
    )


def spec_z_z_z4() -> GroupSpec:
    return GroupSpec(
        [("A", AbelianSignature(1)), ("B", AbelianSignature(1)), ("C", AbelianSignature(0, (4,)))],
        [("a", "A", (1,)), ("b", "B", (1,)), ("c", "C", (1,))],
    )


def spec_z6_z() -> GroupSpec:
    return GroupSpec(
        [("A", AbelianSignature(0, (6,))), ("B", AbelianSignature(1))],
        [("a", "A", (1,)), ("b", "B", (1,))],
    )


STANDARD_SPECS = (spec_z_z, spec_z2_z6, spec_z_z_z4)


def random_value(rng: random.Random, sig: AbelianSignature, spread: int = 3):
    while True:
        coords = [rng.randint(-spread, spread) for _ in range(sig.free_rank)]
        coords += [rng.randrange(m) for m in sig.torsion_moduli]
        v = sig.element(coords)
        if not v.is_identity():
            return v


def random_syllable(rng, spec: GroupSpec, avoid=None, spread=3) -> Syllable:
    choices = [f for f in range(len(spec.factors)) if f != avoid]
    f = rng.choice(choices)
    return Syllable(f, random_value(rng, spec.signature(f), spread))


def random_element(rng, spec: GroupSpec, max_len: int = 4, min_len: int = 0, spread: int = 3):
    n = rng.randint(min_len, max_len)
    syl, prev = [], None
    for _ in range(n):
        s = random_syllable(rng, spec, prev, spread)
        syl.append(s)
        prev = s.factor
    return FreeProductElement.checked(spec, syl)


def random_parabolic(rng, spec, conj_len: int = 1) -> FreeProductElement:
    s = random_syllable(rng, spec)
    h = random_element(rng, spec, conj_len)
    return multiply(multiply(h, normalize(spec, [s])), invert(h))


def random_cyclic(rng, spec, length: int) -> FreeProductElement:
    """Cyclically reduced element with about ``length`` syllables.

    With two factors cyclically reduced words have even length, so odd
    lengths are rounded up.
    """
    if len(spec.factors) == 2 and length % 2:
        length += 1
    while True:
        e = random_element(rng, spec, length, length)
        if length < 2 or e.syllables[0].factor != e.syllables[-1].factor:
            return e


def random_loxodromic(rng, spec, max_core: int = 3, conj_len: int = 1) -> FreeProductElement:
    core = random_cyclic(rng, spec, rng.randint(2, max_core))
    h = random_element(rng, spec, conj_len)
    return multiply(multiply(h, core), invert(h))


def random_base(rng, spec, kind: str) -> FreeProductElement:
    if kind == "mixed":
        kind = rng.choice(("parabolic", "loxodromic"))
    if kind == "parabolic":
        return random_parabolic(rng, spec)
    if kind == "loxodromic":
        return random_loxodromic(rng, spec)
    raise ValueError(kind)


def random_equation(rng, spec, n: int = None, kind: str = "mixed", coef_len: int = 4) -> ExponentialEquation:
    n = n or rng.randint(1, 3)
    terms = [
        Term(random_element(rng, spec, coef_len), random_base(rng, spec, kind), f"x{i + 1}") for i in range(n)
    ]
    return ExponentialEquation(spec, terms)


def planted_equation(rng, spec, n: int = None, kind: str = "mixed", coef_len: int = 4, spread: int = 3, tries: int = 200):
    """Equation with a known solution, or ``None`` if rejection sampling gives up.

    All coefficients but the first are drawn at random and the first is chosen
    to make the planted exponents a solution; draws where it gets longer than
    ``coef_len`` syllables are rejected.
    """
    n = n or rng.randint(1, 3)
    for _ in range(tries):
        bases = [random_base(rng, spec, kind) for _ in range(n)]
        xs = [rng.randint(-spread, spread) for _ in range(n)]
        coefs = [None] + [random_element(rng, spec, coef_len) for _ in range(n - 1)]
        rest = power(bases[0], xs[0])
        for c, g, x in zip(coefs[1:], bases[1:], xs[1:]):
            rest = multiply(multiply(rest, c), power(g, x))
        a1 = invert(rest)
        if len(a1) > coef_len:
            continue
        coefs[0] = a1
        terms = [Term(c, g, f"x{i + 1}") for i, (c, g) in enumerate(zip(coefs, bases))]
        eq = ExponentialEquation(spec, terms)
        return eq, dict(zip(eq.variables, xs))
    return None


def conjugate_pair(rng, spec, max_len: int = 4, conj_len: int = 4):
    """``(h1, h2, w)`` with ``h2 = w h1 w^-1``."""
    h1 = random_element(rng, spec, max_len, 1)
    w = random_element(rng, spec, conj_len)
    return h1, multiply(multiply(w, h1), invert(w)), w
