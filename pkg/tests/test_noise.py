import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dfs_sim.logic import LogicalAmplitudes, dfs_weight, encode_register, logical_bell
from dfs_sim.noise import (
    LEAKAGE_ERRORS,
    LOGIC_ERRORS,
    AngleDistribution,
    CollectiveDephasingSpec,
    ErrorOperatorSpec,
    apply_collective_dephasing,
    apply_error_operator,
    classify_error,
    dfs_weight_under_errors,
    fidelity_under_dephasing,
)
from dfs_sim.statevector import PureState, fidelity_up_to_global_phase, new_basis_state

from conftest import angles, complex_unit_vectors

S2 = 1 / np.sqrt(2)
EQUAL = LogicalAmplitudes(S2, S2)


def test_antiparallel_pair_untouched():
    s = new_basis_state(2, "01")
    out = apply_collective_dephasing(s, CollectiveDephasingSpec((0, 1)), angle=1.234)
    assert np.array_equal(out.amplitudes, s.amplitudes)


def test_bare_qubit_at_pi():
    s = PureState(1, np.array([S2, S2]))
    out = apply_collective_dephasing(s, CollectiveDephasingSpec((0,)), angle=np.pi)
    assert np.allclose(out.amplitudes, [1j * S2, -1j * S2])
    assert fidelity_up_to_global_phase(out, s) < 1e-15


def test_bell_pair_untouched():
    s = logical_bell("Psi+")
    out = apply_collective_dephasing(s, CollectiveDephasingSpec((0, 1, 2, 3)), angle=-2.5)
    assert np.array_equal(out.amplitudes, s.amplitudes)


@given(complex_unit_vectors(8), angles)
def test_dfs_register_is_invariant(v, phi):
    s = encode_register(v)
    out = apply_collective_dephasing(s, CollectiveDephasingSpec(tuple(range(6))), angle=phi)
    assert np.array_equal(out.amplitudes, s.amplitudes)


@given(complex_unit_vectors(4), angles, angles)
def test_dephasing_angles_compose(v, a, b):
    spec = CollectiveDephasingSpec((0, 1))
    s = PureState(2, v)
    two = apply_collective_dephasing(apply_collective_dephasing(s, spec, angle=a), spec, angle=b)
    one = apply_collective_dephasing(s, spec, angle=a + b)
    assert np.allclose(two.amplitudes, one.amplitudes)


def test_logic_error_flips_logical_value():
    out, fired = apply_error_operator(new_basis_state(2, "01"), ErrorOperatorSpec("xx"), np.random.default_rng(0))
    assert fired and out.amplitude("10") == 1


def test_leakage_error_leaves_subspace():
    out, fired = apply_error_operator(new_basis_state(2, "01"), ErrorOperatorSpec("x_i"), np.random.default_rng(0))
    assert fired and out.amplitude("11") == 1
    assert dfs_weight(out, [(0, 1)]) == 0


def test_zero_probability_never_fires():
    s = new_basis_state(2, "01")
    out, fired = apply_error_operator(s, ErrorOperatorSpec("yy", probability=0.0), np.random.default_rng(0))
    assert not fired and out is s


@pytest.mark.parametrize("kind", LOGIC_ERRORS)
def test_logic_errors(kind):
    assert classify_error(kind) == "logic"


@pytest.mark.parametrize("kind", LEAKAGE_ERRORS)
def test_leakage_errors(kind):
    assert classify_error(kind) == "leakage"


def test_invalid_specs():
    with pytest.raises(ValueError):
        ErrorOperatorSpec("zz_i")
    with pytest.raises(ValueError):
        ErrorOperatorSpec("xx", probability=1.5)
    with pytest.raises(ValueError):
        AngleDistribution("cauchy")
    with pytest.raises(ValueError):
        AngleDistribution("gaussian", sigma=-1)


def test_dfs_fidelity_is_one():
    for dist in (AngleDistribution("uniform"), AngleDistribution("gaussian", sigma=2.0), AngleDistribution("fixed", value=1.0)):
        assert fidelity_under_dephasing("dfs", LogicalAmplitudes(0.6, 0.8j), dist, 200, seed=1) == 1.0


def test_bare_fidelity_at_fixed_pi():
    assert fidelity_under_dephasing("bare", EQUAL, AngleDistribution("fixed", value=np.pi), 10, seed=0) < 1e-15


def test_bare_fidelity_uniform_matches_two_over_pi():
    f = fidelity_under_dephasing("bare", EQUAL, AngleDistribution("uniform"), 10_000, seed=2024)
    assert abs(f - 2 / np.pi) < 0.02


@pytest.mark.parametrize("sigma", [0.25, 1.0])
def test_bare_fidelity_gaussian_closed_form(sigma):
    # E|cos(phi/2)| for small sigma is essentially E cos(phi/2) = exp(-sigma^2/8)
    f = fidelity_under_dephasing("bare", EQUAL, AngleDistribution("gaussian", sigma=sigma), 20_000, seed=5)
    assert abs(f - np.exp(-sigma**2 / 8)) < 0.01


def test_leakage_weight_is_bernoulli():
    w = dfs_weight_under_errors(EQUAL, [ErrorOperatorSpec("x_i", probability=0.1)], 10_000, np.random.default_rng(8))
    assert abs(w.mean() - 0.9) < 0.01
    assert set(np.unique(np.round(w, 12))) <= {0.0, 1.0}


@given(st.sampled_from(LOGIC_ERRORS + LEAKAGE_ERRORS))
def test_error_operators_are_unitary(kind):
    m = ErrorOperatorSpec(kind).matrix()
    assert np.allclose(m.conj().T @ m, np.eye(4))
