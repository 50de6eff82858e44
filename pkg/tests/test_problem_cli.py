import json
import random
import shutil
import subprocess
from pathlib import Path

import jsonschema
import pytest

from expeq import generators, schemas
from expeq.cli import main
from expeq.problem import Problem, ProblemSyntaxError, format_problem, parse_problem

FIX = Path(__file__).parent / "fixtures"
HEADER = "factor A = Z;\nfactor B = Z;\ngen a in A = (1);\ngen b in B = (1);\n"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_example():
    text = (
        "factor A = Z;\nfactor B = Z^2 x Z/6;\ngen a in A = (1);\ngen b in B = (0, 0, 1);\n"
        "ledger M = 1000;\nequation ((a*b)^-5) * (a*b)^x = 1;\n"
    )
    prob = parse_problem(text)
    assert prob.ledger_overrides == {"M": 1000}
    assert prob.spec.signature(1).torsion_moduli == (6,)
    (t,) = prob.equation.terms
    assert t.variable == "x" and t.base == prob.spec.element("a*b")
    assert prob.equation.is_solution({"x": 5})


def test_trailing_constant_moves_front():
    prob = parse_problem(HEADER + "equation a^x * b * a^y * b^-1 * a^2 = 1;")
    assert prob.equation.terms[0].coefficient == prob.spec.element("b^-1*a^2")
    assert prob.equation.is_solution({"x": -2, "y": 0})


def test_term_statements():
    prob = parse_problem(HEADER + "term x : a^3, a;\nterm y : b^2, b;\n")
    assert prob.equation.is_solution({"x": -3, "y": -2})


@pytest.mark.parametrize(
    "body, line, col",
    [
        ("equation a^ = 1;", 5, 13),
        ("equation a^x * b^x = 1;", 5, 18),
        ("equation a^x = 2;", 5, 16),
        ("equation a^x * q = 1;", 5, 16),
        ("equation a^x = 1;\nequation b^y = 1;", 6, 1),
    ],
)
def test_syntax_errors_have_positions(body, line, col):
    with pytest.raises(ProblemSyntaxError) as info:
        parse_problem(HEADER + body)
    assert (info.value.line, info.value.col) == (line, col)
    assert str(info.value).startswith(f"{line}:{col}:")


def test_other_errors():
    with pytest.raises(ProblemSyntaxError):
        parse_problem(HEADER)
    with pytest.raises(ProblemSyntaxError):
        parse_problem(HEADER + "ledger bogus = 1;\nequation a^x = 1;")
    with pytest.raises(ProblemSyntaxError):
        parse_problem("factor A = Z;\ngen a in C = (1);\nequation a^x = 1;")
    with pytest.raises(ProblemSyntaxError):
        parse_problem(HEADER + "equation a^x = 1; $")


def test_round_trip(rng):
    for i in range(200):
        spec = generators.STANDARD_SPECS[i % 3]()
        eq = generators.random_equation(rng, spec)
        led = {"M": rng.randint(1, 50)} if i % 4 == 0 else {}
        prob = Problem(spec, eq, led)
        again = parse_problem(format_problem(prob))
        assert again == prob
        assert format_problem(again) == format_problem(prob)


# ---------------------------------------------------------------------------
# command line


def test_solve_exit_codes(capsys):
    code, out, _ = run(capsys, "solve", FIX / "power5.eq")
    assert code == 0 and "x" in out and "5" in out
    code, out, _ = run(capsys, "solve", FIX / "unsat.eq")
    assert code == 1 and out.startswith("UNSAT")
    code, _, err = run(capsys, "solve", FIX / "unsat.eq", "--certified-off")
    assert code == 1 and "ledger bound" in err
    code, out, _ = run(capsys, "solve", FIX / "commutator.eq", "--json")
    assert code == 0 and json.loads(out)["assignment"] == {"x": 0, "y": 0}


def test_unknown_exit(capsys, tmp_path):
    p = tmp_path / "two.eq"
    p.write_text(HEADER + "equation a * (a*b)^x * (b*a*b)^y = 1;")
    code, out, _ = run(capsys, "solve", p, "--max-branches", "10", "--json")
    assert code == 2 and json.loads(out)["status"] == "UNKNOWN"


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "solve", tmp_path / "missing.eq")[0] == 64
    bad = tmp_path / "bad.eq"
    bad.write_text(HEADER + "equation a^ = 1;")
    code, _, err = run(capsys, "solve", bad)
    assert code == 64 and "5:13" in err
    assert run(capsys, "frobnicate")[0] == 64
    assert run(capsys, "solve", FIX / "power5.eq", "--bound-multiplier", "zz")[0] == 64
    assert run(capsys, "oracle", FIX / "power5.eq", "--box", "3:1")[0] == 64
    lox = tmp_path / "lox.eq"
    lox.write_text(HEADER + "equation (a*b)^x = 1;")
    assert run(capsys, "reduce", lox)[0] == 64


def test_json_outputs_validate(capsys):
    _, out, _ = run(capsys, "solve", FIX / "power5.eq", "--json")
    jsonschema.validate(json.loads(out), schemas.VERDICT)
    _, out, _ = run(capsys, "solve", FIX / "unsat.eq", "--json")
    jsonschema.validate(json.loads(out), schemas.VERDICT)
    _, out, _ = run(capsys, "reduce", FIX / "commutator.eq", "--json")
    jsonschema.validate(json.loads(out), schemas.PHI)
    _, out, _ = run(capsys, "bounds", FIX / "power5.eq", "--json")
    jsonschema.validate(json.loads(out), schemas.BOUNDS)
    _, out, _ = run(capsys, "bounds", FIX / "power5.eq", "--json", "--refined")
    jsonschema.validate(json.loads(out), schemas.BOUNDS)
    _, out, _ = run(capsys, "classify", FIX / "commutator.eq", "--json", "--element", "a*b*a^-1")
    data = json.loads(out)
    jsonschema.validate(data, schemas.CLASSIFY)
    assert data["elements"][0]["type"] == "parabolic"
    code, out, _ = run(capsys, "oracle", FIX / "abelian_pair.eq", "--json", "--box=-5:5")
    jsonschema.validate(json.loads(out), schemas.ORACLE)
    assert code == 0 and json.loads(out)["solutions"] == [{"x": -3, "y": -2}]


def test_bounds_and_ledger(capsys, tmp_path):
    _, out, _ = run(capsys, "bounds", FIX / "bound13.eq", "--json")
    data = json.loads(out)
    assert data["bounds"] == {"x": 13}
    assert data["ledger"]["provenance"]["M"] == "user-configured"
    led = tmp_path / "led.txt"
    led.write_text("M = 2  # doubled\n")
    _, out, _ = run(capsys, "bounds", FIX / "power5.eq", "--json", "--ledger", led)
    assert json.loads(out)["bounds"] == {"x": 26}
    _, out, _ = run(capsys, "bounds", FIX / "bound13.eq", "--json", "--bound-multiplier", "3")
    assert json.loads(out)["bounds"] == {"x": 39}
    led.write_text("M = 1/2\n")
    assert run(capsys, "bounds", FIX / "power5.eq", "--ledger", led)[0] == 64


def test_classify_text(capsys):
    code, out, _ = run(capsys, "classify", FIX / "power5.eq", "--element", "b*a*b*a*b^-1", "--element", "1")
    assert code == 0
    assert "loxodromic" in out and "trivial" in out


def test_fuzz_subcommand(capsys):
    code, out, _ = run(capsys, "fuzz", "--count", "15", "--seed", "3", "--json", "--max-branches", "100")
    data = json.loads(out)
    assert code == 0 and data["disagreements"] == [] and sum(data["verdicts"].values()) == 15


@pytest.mark.skipif(shutil.which("expeq") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["expeq", "solve", str(FIX / "power5.eq"), "--json"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["assignment"] == {"x": 5}
