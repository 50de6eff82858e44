from fractions import Fraction

import pytest

from expeq import generators
from expeq.bounds import (
    LEDGER_KEYS,
    USER,
    ConstantsLedger,
    LedgerError,
    N,
    R,
    ball_size,
    bound_refined,
    bound_simple,
    compose_M,
    default_ledger,
    ledger_to_text,
    parse_ledger_text,
)
from expeq.solver import ExponentialEquation, Term, solve_brute


def eq_of(spec, *terms):
    return ExponentialEquation(spec, [Term(spec.element(a), spec.element(g), v) for a, g, v in terms])


def test_default_ledger_free_product(zz):
    led = default_ledger(zz)
    assert (led.kappa, led.epsilon, led.inj, led.L) == (1, 0, 1, 1)
    assert led.delta == 4
    assert led.M >= 1
    assert set(led.provenance.values()) == {"derived-default"}


def test_M_chain_closed_form():
    # delta=4, kappa=1, eps=0: mu=4, nu=16, f(16)=32+98, F(16)=130+16*4+36+0+1
    d = compose_M(4, 1, 0, 1, 1, 1)
    assert d["f_intercept"] == R(16) == 98
    beta = 2 * 16 + 3 + (d["F_slope"] * 16 + d["F_intercept"])
    assert d["M"] == 2 * (2 * beta) * (8 * 4 + 2)


def test_override_M(zz):
    led = default_ledger(zz, {"M": 1000})
    assert led.M == 1000 and led.provenance["M"] == USER


def test_override_input_rederives(zz):
    base = default_ledger(zz)
    led = default_ledger(zz, {"delta": 2})
    assert led.provenance["delta"] == USER and led.M < base.M


def test_multiplier(zz):
    led = default_ledger(zz, multiplier=Fraction(1, 2))
    assert led.M == default_ledger(zz).M / 2
    with pytest.raises(LedgerError):
        default_ledger(zz, {"M": 1}, multiplier=Fraction(1, 2))


def test_invariants_enforced(zz):
    with pytest.raises(LedgerError):
        default_ledger(zz, {"M": Fraction(1, 2)})
    with pytest.raises(LedgerError):
        default_ledger(zz, {"inj": 0})
    with pytest.raises(LedgerError):
        default_ledger(zz, {"kappa": Fraction(1, 2)})
    with pytest.raises(LedgerError):
        default_ledger(zz, {"nonsense": 1})


def test_ledger_text_round_trip(zz):
    led = default_ledger(zz, {"M": Fraction(7, 3)})
    parsed = parse_ledger_text(ledger_to_text(led))
    assert set(parsed) == set(LEDGER_KEYS)
    again = default_ledger(zz, parsed)
    assert all(getattr(again, k) == getattr(led, k) for k in LEDGER_KEYS)
    with pytest.raises(LedgerError):
        parse_ledger_text("M 3")
    with pytest.raises(LedgerError):
        parse_ledger_text("M = x")


def test_ball_sizes(zz, z6z):
    assert ball_size(zz, 0) == 1
    assert ball_size(zz, 1) == 1 + 2 + 2
    assert ball_size(z6z, 2) == 1 + 5 + 4
    assert N(zz, 1) == 8 * ball_size(zz, 2)


def test_bound_simple_arithmetic(zz):
    # n=2, sum|a|=3, sum|g|=4, M=32
    eq = eq_of(zz, ("a*b", "a*b", "x"), ("a", "b*a", "y"))
    rep = bound_simple(eq, default_ledger(zz, {"M": 32}))
    assert rep.bounds == {"x": 352, "y": 352}


def test_bound_simple_power_example(zz):
    eq = eq_of(zz, ("(a*b)^-5", "a*b", "x"))
    rep = bound_simple(eq, default_ledger(zz, {"M": 1}))
    assert rep.bounds == {"x": 13}
    sols = solve_brute(eq, (-20, 20))
    assert sols == [{"x": 5}] and 5 <= 13


def test_no_loxodromic_bases(zz):
    eq = eq_of(zz, ("1", "a", "x"), ("b", "b", "y"))
    assert bound_simple(eq, default_ledger(zz)).bounds == {}


def test_refined_bound(zz):
    led = default_ledger(zz, {"M": 1})
    eq = eq_of(zz, ("(a*b)^-5", "a*b", "x"))
    assert bound_refined(eq, led).bounds["x"] <= bound_simple(eq, led).bounds["x"]
    eq = eq_of(zz, ("a", "a*b", "x"), ("1", "b*a", "y"))
    tr = bound_refined(eq, led).trace["x"]
    assert tr["commensurable_with"] == ["x", "y"] and tr["commensurable"] == 4
    eq = eq_of(zz, ("a", "a*b", "x"), ("1", "a*b^-1", "y"))
    tr = bound_refined(eq, led).trace["x"]
    assert tr["commensurable_with"] == ["x"] and tr["non_commensurable"] == 1


def test_refined_never_exceeds_simple(rng):
    for spec_fn in generators.STANDARD_SPECS:
        spec = spec_fn()
        led = default_ledger(spec)
        for _ in range(60):
            eq = generators.random_equation(rng, spec, kind="mixed")
            simple, refined = bound_simple(eq, led), bound_refined(eq, led)
            assert simple.bounds.keys() == refined.bounds.keys()
            for v, b in refined.bounds.items():
                assert b <= simple.bounds[v]


def test_adding_coefficient_never_decreases(rng):
    spec = generators.spec_z_z()
    led = default_ledger(spec, {"M": 3})
    for _ in range(50):
        eq = generators.random_equation(rng, spec, kind="loxodromic")
        t0 = eq.terms[0]
        longer = ExponentialEquation(
            spec, (Term(t0.coefficient * spec.element("a*b^2"), t0.base, t0.variable),) + eq.terms[1:]
        )
        if len(longer.terms[0].coefficient) < len(t0.coefficient):
            continue
        for v, b in bound_simple(eq, led).bounds.items():
            assert bound_simple(longer, led).bounds[v] >= b
