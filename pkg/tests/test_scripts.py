import importlib.util
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


def load(name):
    spec = importlib.util.spec_from_file_location(f"script_{name}", SCRIPTS / f"{name}.py")
    mod = importlib.util.module_from_spec(spec)
    sys.modules[f"script_{name}"] = mod  # dataclasses look their module up
    spec.loader.exec_module(mod)
    return mod


def test_table_check_script(capsys):
    assert load("table_check").main(["--draws", "5"]) == 0
    assert capsys.readouterr().out.count("ok") == 4


def test_dephasing_sweep_script(capsys):
    assert load("dephasing_sweep").main(["--samples", "200", "--sigmas", "0,1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "encoding,sigma,mean_fidelity,stderr,analytic"
    assert lines[1].startswith("dfs,0,1,0,")


def test_analytic_bare_limit():
    mod = load("dephasing_sweep")
    s2 = 2**-0.5
    assert mod.analytic_bare(0.0, s2, s2) == pytest.approx(1)
    assert mod.analytic_bare(0.5, s2, s2) == pytest.approx(0.9692332345, abs=1e-8)


def test_branch_statistics_script(capsys):
    load("branch_statistics").main(["--runs", "200", "--protocol", "hadamard"])
    assert "over 32 branches" in capsys.readouterr().out
