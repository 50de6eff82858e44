import itertools
import random
from collections import deque

import pytest

from expeq import generators
from expeq.abelian import AbelianSignature, solve_diophantine
from expeq.freeprod import FreeProductElement, GroupSpec, Syllable, multiply
from expeq.reduction import (
    INF,
    Component,
    ComponentDecomposition,
    ReductionError,
    RegionPlan,
    decompose,
    enumerate_region_plans,
    parabolic_rewrite,
    plan_to_system,
    reduce,
    relative_metric,
)
from expeq.solver import BranchTrace, ExponentialEquation, Term, extend_phi_solution, solve_brute


def eq_of(spec, *terms):
    return ExponentialEquation(spec, [Term(spec.element(a), spec.element(g), v) for a, g, v in terms])


COMMUTATOR = (("1", "a", "x1"), ("b", "a", "x2"), ("b^-1", "1", "z"))


def commutator(zz):
    # a^x1 b a^x2 b^-1, written with a trailing free variable to carry b^-1
    return ExponentialEquation(
        zz,
        [
            Term(zz.identity(), zz.element("a"), "x1"),
            Term(zz.element("b"), zz.element("a"), "x2"),
            Term(zz.element("b^-1"), zz.identity(), "z"),
        ],
    )


def test_rewrite_keeps_factor_bases(zz):
    w = parabolic_rewrite(commutator(zz))
    kinds = [type(l).__name__ for l in w.letters]
    assert kinds == ["VariableLetter", "ConstantSyllable", "VariableLetter", "ConstantSyllable"]
    assert w.free == ("z",)


def test_rewrite_absorbs_conjugator(zz):
    w = parabolic_rewrite(eq_of(zz, ("1", "b*a^3*b^-1", "x")))
    var = [l for l in w.letters if type(l).__name__ == "VariableLetter"][0]
    assert var.factor == zz.factor_index("A") and var.base.coords == (3,)
    assert w.evaluate({"x": 2}) == zz.element("b*a^6*b^-1")


def test_rewrite_rejects_loxodromic(zz):
    with pytest.raises(ReductionError):
        parabolic_rewrite(eq_of(zz, ("1", "a*b", "x")))


def test_rewrite_evaluates_like_equation(rng):
    for spec_fn in generators.STANDARD_SPECS:
        spec = spec_fn()
        for _ in range(80):
            eq = generators.random_equation(rng, spec, kind="parabolic")
            w = parabolic_rewrite(eq)
            for _ in range(3):
                a = {v: rng.randint(-4, 4) for v in eq.variables}
                assert w.evaluate(a) == eq.evaluate(a)


def _admissible_reachable(spec, factor, target, radius):
    """Breadth-first search for a path 1 -> target avoiding edges inside the subgroup ``factor``.

    A vertex of ``k`` syllables needs at least ``k - 1`` more steps to reach a
    one-syllable target, so vertices that cannot make it back are dropped.
    """
    letters = []
    for f, (_, sig) in enumerate(spec.factors):
        for k in range(1, sig.torsion_moduli[0]):
            letters.append(FreeProductElement(spec, (Syllable(f, sig.element([k])),)))
    start = spec.identity()
    seen = {start}
    queue = deque([(start, 0)])
    in_sub = lambda g: len(g) == 0 or (len(g) == 1 and g.syllables[0].factor == factor)
    while queue:
        g, d = queue.popleft()
        if d == radius:
            continue
        for s in letters:
            if in_sub(g) and s.syllables[0].factor == factor:
                continue  # an edge of the subgroup's own Cayley graph
            h = multiply(g, s)
            if h == target:
                return True
            if h not in seen and len(h) - 1 <= radius - d - 1:
                seen.add(h)
                queue.append((h, d + 1))
    return False


def test_relative_metric():
    spec = GroupSpec(
        [("A", AbelianSignature(0, (10,))), ("B", AbelianSignature(0, (10,)))],
        [("a", "A", (1,)), ("b", "B", (1,))],
    )
    assert relative_metric(0, spec.signature(0).identity()) == 0
    a = spec.element("a")
    b3 = spec.element("b^3")
    assert relative_metric(0, a.syllables[0].value) == INF
    assert relative_metric(1, b3.syllables[0].value) == INF
    assert not _admissible_reachable(spec, 0, a, 8)
    assert not _admissible_reachable(spec, 1, b3, 8)


def _dec(spec, pattern):
    """Decomposition from a pattern like ``"As Bp As Bp"`` (factor letter, special/plain)."""
    comps = []
    for i, tok in enumerate(pattern.split()):
        f = spec.factor_index(tok[0])
        sig = spec.signature(f)
        if tok[1] == "s":
            comps.append(Component(f, sig.identity(), ((f"x{i}", sig.element([1])),)))
        else:
            comps.append(Component(f, sig.element([1])))
    return ComponentDecomposition(spec, tuple(comps))


def test_plan_examples(zz):
    plans = [p.blocks for p in enumerate_region_plans(_dec(zz, "As Bp As Bp"))]
    assert sorted(plans) == [((0,), (2,)), ((0, 2),)]
    assert len(list(enumerate_region_plans(_dec(zz, "As Bp")))) == 1
    assert [p.blocks for p in enumerate_region_plans(_dec(zz, "As Bs"))] == [((0,), (1,))]


def _brute_plans(dec, prune):
    """All complete non-crossing plans, found by labelling components with block ids."""
    comps = dec.components
    m = len(comps)
    out = set()
    for labels in itertools.product(range(-1, m), repeat=m):
        blocks = {}
        for i, l in enumerate(labels):
            if l >= 0:
                blocks.setdefault(l, []).append(i)
        if any(comps[i].special and labels[i] < 0 for i in range(m)):
            continue
        bl = [tuple(b) for b in blocks.values()]
        if any(len({comps[i].factor for i in b}) > 1 for b in bl):
            continue
        if any(not any(comps[i].special for i in b) for b in bl):
            continue
        crossing = any(
            p < q < r < s or q < p < s < r
            for b1, b2 in itertools.combinations(bl, 2)
            for p, r in itertools.combinations(b1, 2)
            for q, s in itertools.combinations(b2, 2)
        )
        if crossing:
            continue
        if prune and m > 1:
            bad = False
            for b in bl:
                for i in range(len(b)):
                    p, q = b[i], b[(i + 1) % len(b)]
                    gap = range(p + 1, q) if p < q else list(range(p + 1, m)) + list(range(q))
                    if not any(comps[j].special for j in gap):
                        bad = True
            if bad:
                continue
        out.add(tuple(sorted(bl)))
    return out


def test_plans_match_brute_force(rng):
    spec = generators.spec_z_z_z4()
    names = "ABC"
    for _ in range(40):
        m = rng.randint(1, 5)
        toks, prev = [], None
        for _ in range(m):
            f = rng.choice([c for c in names if c != prev])
            toks.append(f + rng.choice("sp"))
            prev = f
        if m > 1 and toks[0][0] == toks[-1][0]:
            continue
        dec = _dec(spec, " ".join(toks))
        for prune in (False, True):
            got = [p.blocks for p in enumerate_region_plans(dec, prune=prune)]
            assert len(got) == len(set(got))
            assert set(got) == _brute_plans(dec, prune)


def test_nontrivial_side_labels_multiply_plans(zz):
    dec = _dec(zz, "As Bp As Bp")
    labels = {0: (zz.signature(0).identity(), zz.signature(0).element([1])), 1: (zz.signature(1).identity(),)}
    plans = list(enumerate_region_plans(dec, labels))
    # singletons: 2 * 2 label choices, merged block: 2^2
    assert len(plans) == 8


def test_plan_to_system_examples(zz):
    dec = decompose(parabolic_rewrite(commutator(zz)))
    split = plan_to_system(RegionPlan(((0,), (2,)), ((zz.signature(0).identity(),),) * 2), dec)
    assert split.checks_pass() and len(split.rows) == 2
    sols = {}
    for f, system in split.systems().items():
        sols.update(solve_diophantine(system).witness)
    assert sols == {"x1": 0, "x2": 0}
    ident = zz.signature(0).identity()
    merged = plan_to_system(RegionPlan(((0, 2),), ((ident, ident),)), dec)
    assert not merged.checks_pass()
    eq = eq_of(zz, ("a^3", "a", "x1"), ("b^2", "b", "x2"))
    br = reduce(eq).branches
    assert len(br) == 1
    sols = {}
    for f, system in br[0].systems().items():
        sols.update(solve_diophantine(system).witness)
    assert sols == {"x1": -3, "x2": -2}


def test_reduce_examples(zz):
    phi = reduce(commutator(zz))
    assert len(phi.branches) == 1
    assert solve_brute(commutator(zz), [(-10, 10), (-10, 10), (0, 0)]) == [{"x1": 0, "x2": 0, "z": 0}]
    phi = reduce(eq_of(zz, ("1", "a", "x"), ("b", "1", "z")))
    assert phi.branches == []
    j = reduce(commutator(zz)).to_json()
    assert set(j["branches"][0]) == {"peripheral_rows", "trivial_checks", "variable_map"}


def _phi_solutions(eq, phi):
    out = []
    for idx, br in enumerate(phi.branches):
        sol = {}
        for f, system in br.systems().items():
            res = solve_diophantine(system)
            if not res.sat:
                sol = None
                break
            sol.update(res.witness)
        if sol is not None:
            out.append((idx, sol))
    return out


def test_reduce_complete_sound_and_disjoint():
    rng = random.Random(99)
    specs = [
        GroupSpec([("A", AbelianSignature(1)), ("B", AbelianSignature(2))], [("a", "A", (1,)), ("b", "B", (1, 0)), ("c", "B", (0, 1))]),
        GroupSpec([("A", AbelianSignature(1)), ("B", AbelianSignature(0, (6,)))], [("a", "A", (1,)), ("b", "B", (1,))]),
        GroupSpec(
            [("A", AbelianSignature(2)), ("B", AbelianSignature(0, (6,))), ("C", AbelianSignature(1))],
            [("a", "A", (1, 0)), ("d", "A", (0, 1)), ("b", "B", (1,)), ("c", "C", (1,))],
        ),
    ]
    oracle_sat = 0
    for i in range(500):
        spec = specs[i % 3]
        if i % 2:
            planted = generators.planted_equation(rng, spec, kind="parabolic")
            eq = planted[0] if planted else generators.random_equation(rng, spec, kind="parabolic")
        else:
            eq = generators.random_equation(rng, spec, kind="parabolic")
        phi = reduce(eq)
        for br in phi.branches:
            seen = [v for _, row in br.rows for v, _ in row.terms]
            assert len(seen) == len(set(seen))
        found = _phi_solutions(eq, phi)
        for idx, sol in found:
            cert = extend_phi_solution(sol, BranchTrace(eq, {}, phi.free, idx))
            assert cert.verified and eq.is_solution(cert.assignment)
        if solve_brute(eq, (-15, 15)):
            oracle_sat += 1
            assert found, str(eq)
    assert oracle_sat > 150
