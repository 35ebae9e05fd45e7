import numpy as np
import pytest

from dfs_sim.equations import EQUATIONS, TABLE_CELLS, random_parameters, verify_equation, verify_suite
from dfs_sim.protocols import TABLE_1, PhaseParams


@pytest.fixture
def params():
    return random_parameters(np.random.default_rng(77))


@pytest.mark.parametrize("eq", EQUATIONS + TABLE_CELLS)
def test_each_equation_passes(eq, params):
    r = verify_equation(eq, params)
    assert r.passed, r.to_dict()


@pytest.mark.parametrize("p13", [0, 1])
def test_cphase_equations_either_first_parity(p13, params):
    for eq in ("Eq4", "Eq5", "Eq6"):
        assert verify_equation(eq, dict(params, P13=p13)).passed


def test_transfer_mode_reaches_same_states(params):
    for eq in ("Eq5", "Eq6"):
        assert verify_equation(eq, params, transfer=True).passed


def test_unknown_equation(params):
    with pytest.raises(ValueError):
        verify_equation("Eq7", params)


def test_corrupted_cell_is_caught():
    bad = dict(TABLE_1)
    bad[(1, 0)] = lambda ph: (TABLE_1[(1, 0)](ph)[0] + np.pi, TABLE_1[(1, 0)](ph)[1])
    reports = verify_suite(draws=3, seed=4, table=bad)
    failing = {r.equation for r in reports if not r.passed}
    assert "T1[1,0]" in failing
    assert not failing & {"T1[0,0]", "T1[0,1]", "T1[1,1]"}
    d = next(r for r in reports if r.equation == "T1[1,0]").to_dict()
    assert "lhs" in d and "rhs" in d


def test_degenerate_phases():
    assert all(r.passed for r in verify_suite(draws=3, seed=0, phases=PhaseParams(0.0, 0.0)))
