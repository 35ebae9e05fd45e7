import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dfs_sim.statevector import (
    H,
    X,
    Z,
    EntangledDiscardError,
    Projector,
    PureState,
    ZeroProbabilityBranch,
    apply_1q,
    apply_unitary,
    discard_qubit,
    discard_qubits,
    fidelity_up_to_global_phase,
    measure_projective,
    new_basis_state,
    permute_qubits,
    reduced_density,
    rz,
)

from conftest import angles, complex_unit_vectors

COMPUTATIONAL = [Projector.onto([0], [[1, 0]]), Projector.onto([0], [[0, 1]])]
S2 = 1 / np.sqrt(2)


def test_basis_states():
    assert new_basis_state(2, "01").amplitude("01") == 1
    assert new_basis_state(1, "0").amplitudes.tolist() == [1, 0]
    s = new_basis_state(4, "0110")
    assert s.amplitudes[0b0110] == 1 and np.count_nonzero(s.amplitudes) == 1


def test_basis_state_length_mismatch():
    with pytest.raises(ValueError):
        new_basis_state(3, "01")


def test_unnormalized_rejected():
    with pytest.raises(ValueError):
        PureState(1, np.array([1, 1], dtype=complex))


def test_states_are_read_only():
    s = new_basis_state(1, "0")
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0


def test_rz_on_logical_superposition():
    a, b, theta = 0.6, 0.8j, 0.37
    s = PureState(2, np.array([0, a, b, 0]))
    out = apply_1q(s, rz(theta), 0)
    assert np.allclose(out.amplitudes, [0, a, b * np.exp(1j * theta), 0], atol=1e-15)


def test_single_qubit_gates():
    assert np.allclose(apply_1q(new_basis_state(1, "0"), X, 0).amplitudes, [0, 1])
    assert np.allclose(apply_1q(new_basis_state(1, "0"), H, 0).amplitudes, [S2, S2])


def test_non_unitary_rejected():
    with pytest.raises(ValueError):
        apply_1q(new_basis_state(1, "0"), np.array([[1, 0], [0, 0.5]]), 0)


def test_measurement_born_rule():
    plus = PureState(1, np.array([S2, S2]))
    for k in (0, 1):
        idx, p, post = measure_projective(plus, COMPUTATIONAL, outcome=k)
        assert idx == k and abs(p - 0.5) < 1e-15
    idx, p, _ = measure_projective(new_basis_state(1, "1"), COMPUTATIONAL, rng=np.random.default_rng(0))
    assert idx == 1 and p == pytest.approx(1.0)


def test_forced_impossible_outcome():
    with pytest.raises(ZeroProbabilityBranch):
        measure_projective(new_basis_state(1, "1"), COMPUTATIONAL, outcome=0)


def test_incomplete_projectors():
    with pytest.raises(ValueError):
        measure_projective(new_basis_state(1, "1"), COMPUTATIONAL[:1], outcome=0)


def test_discard():
    psi = PureState(2, np.array([0, 0.6, 0.8, 0]))
    out = discard_qubit(psi.tensor(new_basis_state(1, "0")), 2)
    assert fidelity_up_to_global_phase(out, psi) == pytest.approx(1.0)
    bell = PureState(2, np.array([S2, 0, 0, S2]))
    with pytest.raises(EntangledDiscardError):
        discard_qubit(bell, 1)


def test_discard_entangled_group_as_a_whole():
    bell = PureState(2, np.array([S2, 0, 0, S2]))
    s = new_basis_state(1, "1").tensor(bell)
    out = discard_qubits(s, [1, 2])
    assert fidelity_up_to_global_phase(out, new_basis_state(1, "1")) == pytest.approx(1)


def test_fidelity_examples():
    psi = PureState(1, np.array([0.6, 0.8j]))
    assert fidelity_up_to_global_phase(psi, PureState(1, psi.amplitudes * np.exp(1j * np.pi / 3))) == pytest.approx(1)
    assert fidelity_up_to_global_phase(new_basis_state(1, "0"), new_basis_state(1, "1")) == 0
    f = fidelity_up_to_global_phase(new_basis_state(1, "0"), PureState(1, np.array([S2, S2])))
    assert f == pytest.approx(S2, abs=1e-15)


@given(complex_unit_vectors(8), angles, st.integers(0, 2))
def test_unitary_preserves_norm_and_inverts(v, theta, q):
    s = PureState(3, v)
    u = rz(theta) @ H
    out = apply_1q(s, u, q)
    assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-12
    back = apply_1q(out, u.conj().T, q)
    assert np.allclose(back.amplitudes, v, atol=1e-12)


@given(complex_unit_vectors(8), st.permutations([0, 1, 2]))
def test_permutation_round_trip(v, order):
    s = PureState(3, v)
    inverse = [order.index(k) for k in range(3)]
    assert np.allclose(permute_qubits(permute_qubits(s, order), inverse).amplitudes, v)


@given(complex_unit_vectors(4), complex_unit_vectors(2))
def test_two_qubit_gate_matches_kron(v, w):
    s = PureState(2, v).tensor(PureState(1, w))
    cz = np.diag([1, 1, 1, -1])
    out = apply_unitary(s, cz, (0, 2))
    expected = np.kron(np.eye(2), np.eye(4)) @ s.amplitudes
    expected = expected * np.array([1, 1, 1, 1, 1, -1, 1, -1])
    assert np.allclose(out.amplitudes, expected)


@given(complex_unit_vectors(4))
def test_reduced_density_is_a_state(v):
    rho = reduced_density(PureState(2, v), [1])
    assert np.isclose(np.trace(rho), 1)
    assert np.linalg.eigvalsh(rho).min() > -1e-12
