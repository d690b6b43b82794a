"""Golden tests for the ``condexp`` command line, run as a subprocess."""

import os
import subprocess
import sys
from pathlib import Path

import pytest
from gmpy2 import mpq

from condexp.cli.main import main
from condexp.findim.instances import diagonal_instance, tensor_instance
from condexp.termalg import parse_term

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"


def run(*args, env_extra=None, drop_budget_env=True):
    env = dict(os.environ)
    if drop_budget_env:
        env.pop("CONDEXP_BUDGET", None)
    env.update(env_extra or {})
    proc = subprocess.run(
        [sys.executable, "-m", "condexp", *map(str, args)], capture_output=True, text=True, env=env, timeout=300
    )
    return proc.returncode, proc.stdout


def result_line(out):
    return [ln for ln in out.splitlines() if ln.startswith("RESULT")][-1]


def result_term(line):
    return parse_term(line[len("RESULT term="): line.rindex(" code=")])


def fields(line):
    return dict(part.split("=", 1) for part in line.split()[1:] if "=" in part)


def test_check_valid_problems():
    for name in ("tensor", "in_subalgebra", "tensor_expect", "central", "diagonal_pp"):
        code, out = run("check", PROBLEMS / f"{name}.yaml")
        assert code == 0, out
        assert result_line(out) == "RESULT check pass"
        assert "FAIL" not in out


def test_check_operator_norm_two():
    code, out = run("check", PROBLEMS / "not_contraction.yaml")
    assert code == 3
    assert "FAIL unit ball" in out and "negative pivot -3" in out
    assert result_line(out) == "RESULT check fail"


def test_check_bad_weights():
    code, out = run("check", PROBLEMS / "bad_weights.yaml")
    assert code == 3
    assert "FAIL trace normalization: sum weight*dim = 1/2" in out


def test_parse_errors():
    code, out = run("check", PROBLEMS / "malformed.yaml")
    assert code == 4 and out.startswith("parse error")
    code, out = run("check", PROBLEMS / "does_not_exist.yaml")
    assert code == 4


def test_yaml_syntax_error_has_line(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("algebra: [\n  x")
    code, out = run("check", p)
    assert code == 4 and "bad.yaml:2" in out


def test_negative_flags_rejected():
    code, out = run("dist", PROBLEMS / "tensor.yaml", "-k", "-1")
    assert code == 4


def test_dist_tensor_golden():
    code, out = run("dist", PROBLEMS / "tensor.yaml")
    assert code == 0
    assert result_line(out) == "RESULT Certified value=3971/4096 k=4 queries=271"
    assert abs(mpq(fields(result_line(out))["value"]) - 1) < mpq(1, 16)


def test_dist_in_subalgebra():
    for k in (2, 5):
        code, out = run("dist", PROBLEMS / "in_subalgebra.yaml", "-k", k)
        assert code == 0
        assert mpq(fields(result_line(out))["value"]) < mpq(1, 1 << k)


def test_dist_budget_zero():
    code, out = run("dist", PROBLEMS / "tensor.yaml", "--budget", 0)
    assert code == 2
    assert result_line(out) == "RESULT BudgetExhausted lower=0 upper=65/64 queries=1"


def test_dist_central_exhausts():
    code, out = run("dist", PROBLEMS / "central.yaml")
    assert code == 2
    f = fields(result_line(out))
    assert mpq(f["lower"]) < 1 <= mpq(f["upper"])


def test_budget_from_environment(tmp_path):
    text = (PROBLEMS / "tensor.yaml").read_text().replace("budget: 5000\n", "")
    p = tmp_path / "nobudget.yaml"
    p.write_text(text)
    code, out = run("dist", p, env_extra={"CONDEXP_BUDGET": "0"})
    assert code == 2 and "BudgetExhausted" in out
    code, out = run("dist", p, "--budget", 5000, env_extra={"CONDEXP_BUDGET": "0"})
    assert code == 0
    code, out = run("dist", p)
    assert code == 0


def test_audit_log():
    code, out = run("dist", PROBLEMS / "tensor.yaml", "-k", 2, "--audit")
    assert code == 0
    lines = out.splitlines()
    assert any(ln.startswith("LB r=") and "witness=8" in ln for ln in lines)
    assert any(ln.startswith("UB point=") for ln in lines)
    assert any(ln.startswith("ACCEPT r=") and ln.endswith("k=2") for ln in lines)


def test_parallel_matches_reference():
    for problem in ("tensor", "central"):
        a = run("dist", PROBLEMS / f"{problem}.yaml", "-k", 3, "--audit")
        b = run("dist", PROBLEMS / f"{problem}.yaml", "-k", 3, "--audit", "--parallel")
        assert a == b


def test_expect_examples():
    pair = tensor_instance().pair
    code, out = run("expect", PROBLEMS / "tensor.yaml", "--exact")
    assert code == 0 and result_line(out).endswith("code=1")
    code, out = run("expect", PROBLEMS / "tensor.yaml", "-k", 2)
    assert code == 0
    assert pair.n_value(result_term(result_line(out))).norm2_sq() < mpq(1, 16)
    code, out = run("expect", PROBLEMS / "tensor_expect.yaml", "--exact")
    assert code == 0
    want = pair.m_assignment[0].scale(mpq(1, 2))
    assert (pair.n_value(result_term(result_line(out))) - want).norm2_sq() < mpq(1, 64)


def test_expect_in_subalgebra_returns_target():
    pair = tensor_instance().pair
    code, out = run("expect", PROBLEMS / "in_subalgebra.yaml", "--exact", "-k", 5)
    assert code == 0
    assert (pair.n_value(result_term(result_line(out))) - pair.m_assignment[0]).norm2_sq() < mpq(1, 1 << 10)


def test_pp_expect_diagonal():
    pair = diagonal_instance().pair
    code, out = run("pp-expect", PROBLEMS / "diagonal_pp.yaml")
    assert code == 0
    e11 = pair.m_assignment[0]
    assert (pair.n_value(result_term(result_line(out))) - e11).norm2_sq() < mpq(1, 1 << 12)


def test_pp_expect_needs_basis():
    code, out = run("pp-expect", PROBLEMS / "tensor.yaml")
    assert code == 3 and "pp_basis" in out


def test_gapfn_table():
    code, out = run("gapfn", PROBLEMS / "diagonal_pp.yaml", "--n-max", 6)
    assert code == 0
    assert result_line(out) == "RESULT 0 1 2 3 4 5 6"
    code, out = run("gapfn", PROBLEMS / "tensor.yaml", "--n-max", 3)
    assert code == 0
    assert result_line(out) == "RESULT 1 1 2 3"


def test_main_in_process(capsys):
    assert main(["check", str(PROBLEMS / "tensor.yaml")]) == 0
    assert "RESULT check pass" in capsys.readouterr().out
    with pytest.raises(SystemExit):
        main(["nonsense"])
