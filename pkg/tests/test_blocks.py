import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dfs_sim.blocks import (
    Forced,
    Sampler,
    detector_D,
    dressed_measure,
    parity_check,
    readout_pair,
)
from dfs_sim.equations import _eq3_register
from dfs_sim.logic import encode_register, logical_bell
from dfs_sim.noise import dephasing_unitary
from dfs_sim.statevector import PureState, ZeroProbabilityBranch, apply_unitary, new_basis_state

from conftest import angles, complex_unit_vectors

S2 = 1 / np.sqrt(2)


def test_parity_on_antiparallel_pair_is_certain():
    s = new_basis_state(2, "01")
    label, p, post = parity_check(s, 0, 1, np.random.default_rng(0))
    assert label == 0 and p == pytest.approx(1)
    assert np.allclose(post.amplitudes, s.amplitudes)


def test_parity_on_plus_plus():
    s = PureState(2, np.full(4, 0.5))
    label, p, post = parity_check(s, 0, 1, 0)
    assert label == 0 and p == pytest.approx(0.5)
    assert np.allclose(post.amplitudes, [0, S2, S2, 0])


def test_parity_13_produces_filtered_register(rng):
    a, b = 0.6, 0.8j
    c, d = S2, -1j * S2
    s = _eq3_register(a, b, c, d)
    label, p, post = parity_check(s, 0, 2, 1)
    assert label == 1 and p == pytest.approx(0.5)
    want = np.zeros(64, dtype=complex)
    for k, amp in {"0101": a, "1010": b}.items():
        want[int(k + "01", 2)] = amp * c
        want[int(k + "10", 2)] = amp * d
    assert np.allclose(post.amplitudes, want)


def test_parity_misreport_flips_only_the_label():
    label, p, post = parity_check(new_basis_state(2, "01"), 0, 1, np.random.default_rng(0), misreport=1.0)
    assert label == 1 and post.amplitude("01") == 1
    # forced outcomes are taken literally
    assert parity_check(new_basis_state(2, "01"), 0, 1, Forced({"P": 0}), misreport=1.0)[0] == 0


def test_detector_outcomes():
    psi_plus = PureState(2, np.array([0, S2, S2, 0]))
    psi_minus = PureState(2, np.array([0, S2, -S2, 0]))
    assert detector_D(psi_plus, (0, 1), np.random.default_rng(0))[:2] == ("D1", pytest.approx(1))
    assert detector_D(psi_minus, (0, 1), np.random.default_rng(0))[:2] == ("D2", pytest.approx(1))
    assert detector_D(new_basis_state(2, "00"), (0, 1), np.random.default_rng(0))[:2] == ("leak", pytest.approx(1))


def test_dressed_outcomes():
    plus = PureState(1, np.array([S2, S2]))
    assert dressed_measure(plus, 0, np.random.default_rng(0))[:2] == ("+", pytest.approx(1))
    for lab in ("+", "-"):
        assert dressed_measure(new_basis_state(1, "0"), 0, lab)[1] == pytest.approx(0.5)
    with pytest.raises(ZeroProbabilityBranch):
        dressed_measure(plus, 0, "-")


def test_readout():
    assert readout_pair(new_basis_state(2, "01"), (0, 1), np.random.default_rng(0))[:2] == ("01", pytest.approx(1))


def test_sampler_is_seed_deterministic():
    s = PureState(1, np.array([S2, S2]))
    a = [dressed_measure(s, 0, Sampler(np.random.default_rng(7)))[0] for _ in range(3)]
    b = [dressed_measure(s, 0, Sampler(np.random.default_rng(7)))[0] for _ in range(3)]
    assert a == b


@given(complex_unit_vectors(16), st.sampled_from([(0, 1), (0, 2), (1, 3)]))
def test_parity_is_idempotent(v, pair):
    s = PureState(4, v)
    probs = []
    for label in (0, 1):
        try:
            _, p, post = parity_check(s, *pair, label)
        except ZeroProbabilityBranch:
            continue
        probs.append(p)
        _, p_again, post_again = parity_check(post, *pair, label)
        assert p_again == pytest.approx(1)
        assert np.allclose(post_again.amplitudes, post.amplitudes)
    assert sum(probs) == pytest.approx(1)


@given(complex_unit_vectors(4), angles)
def test_parity_commutes_with_collective_dephasing(v, phi):
    # dephasing is diagonal, parity is diagonal: measurement statistics and
    # post-states commute
    s = PureState(2, v)
    u = dephasing_unitary(phi, 2)
    for label in (0, 1):
        try:
            _, p1, a = parity_check(apply_unitary(s, u, (0, 1)), 0, 1, label)
            _, p2, b = parity_check(s, 0, 1, label)
        except ZeroProbabilityBranch:
            continue
        assert p1 == pytest.approx(p2)
        assert np.allclose(a.amplitudes, apply_unitary(b, u, (0, 1)).amplitudes)


def test_detector_on_logical_bell_halves():
    # a logical Bell state leaves each pair maximally mixed inside the DFS
    s = logical_bell("Psi+")
    for lab in ("D1", "D2"):
        assert detector_D(s, (0, 1), lab)[1] == pytest.approx(0.5)


def test_detector_rejects_leaked_pair_as_leak():
    s = encode_register(np.array([1, 0])).tensor(new_basis_state(2, "11"))
    assert detector_D(s, (2, 3), np.random.default_rng(0))[0] == "leak"
