import numpy as np
import pytest

from dfs_sim.oracle import (
    BranchExplosionError,
    ChoiMatrix,
    choi_fidelity,
    cr_correction_angles,
    density_oracle_choi,
    derive_cr_correction,
    enumerate_branches,
    protocol_channel,
    same_phase,
    unitary_choi,
)
from dfs_sim.protocols import CZ, TABLE_1, PhaseParams, ProtocolSpec
from dfs_sim.statevector import H, X, Z, rz

from conftest import unit_vector

S2 = 1 / np.sqrt(2)


def dephasing_choi() -> ChoiMatrix:
    return ChoiMatrix(2, 2, np.diag([0.5, 0, 0, 0.5]).astype(complex))


def test_choi_self_fidelity():
    assert choi_fidelity(unitary_choi(X), unitary_choi(X)) == pytest.approx(1)


def test_choi_identity_vs_z():
    # normalized overlap: the two unitary channels are orthogonal, complete
    # dephasing sits at 1/sqrt2 from the identity
    ident = unitary_choi(np.eye(2))
    assert choi_fidelity(ident, unitary_choi(Z)) == pytest.approx(0, abs=1e-15)
    assert choi_fidelity(ident, dephasing_choi()) == pytest.approx(S2)


def test_choi_trace_and_positivity():
    for ch in (unitary_choi(H), unitary_choi(CZ), dephasing_choi()):
        assert ch.is_trace_preserving() and ch.is_completely_positive()
        assert np.trace(ch.matrix).real == pytest.approx(1)
    bad = ChoiMatrix(2, 2, np.diag([0.5, 0, 0, -0.5]).astype(complex))
    assert not bad.is_completely_positive()


def test_cr_block_eight_branches(rng):
    spec = ProtocolSpec("cr-block", phases=PhaseParams(0.7, 1.3))
    tree = enumerate_branches(spec, unit_vector(rng, 4))
    assert len(tree) == 8
    assert tree.total_probability == pytest.approx(1, abs=1e-10)
    assert tree.min_fidelity > 1 - 1e-10


def test_hadamard_branches_on_zero():
    tree = enumerate_branches(ProtocolSpec("hadamard", phases=PhaseParams(0.2, 0.9)), np.array([1, 0]))
    assert len(tree) == 32
    assert tree.min_fidelity > 1 - 1e-10
    blocks = {b for br in tree.branches for b, _, _ in br.record.entries}
    assert blocks == {"prep", "cr/P1", "cr/P2", "cr/dressed", "D"}


def test_cphase_all_branches_fix_00():
    tree = enumerate_branches(ProtocolSpec("cphase"), np.array([1, 0, 0, 0]))
    assert tree.min_fidelity > 1 - 1e-10
    assert tree.total_probability == pytest.approx(1)


def test_rz_single_branch():
    tree = enumerate_branches(ProtocolSpec("rz", theta=0.4), np.array([S2, S2]))
    assert len(tree) == 1 and tree.total_probability == 1


def test_branch_cap():
    with pytest.raises(BranchExplosionError):
        enumerate_branches(ProtocolSpec("hadamard"), np.array([1, 0]), max_branches=4)


@pytest.mark.parametrize("theta", [0.0, 1.1, -2.7])
def test_rz_channel(theta):
    ch = protocol_channel(ProtocolSpec("rz", theta=theta))
    assert choi_fidelity(ch, unitary_choi(rz(theta))) > 1 - 1e-10


def test_hadamard_and_cz_channels_by_both_routes():
    for spec, u in ((ProtocolSpec("hadamard", phases=PhaseParams(0.3, 1.9)), H),
                    (ProtocolSpec("cphase", phases=PhaseParams(2.0, 0.1)), CZ)):
        ideal = unitary_choi(u)
        a, b = protocol_channel(spec), density_oracle_choi(spec)
        assert choi_fidelity(a, ideal) > 1 - 1e-10
        assert choi_fidelity(b, ideal) > 1 - 1e-10
        assert choi_fidelity(a, b) > 1 - 1e-10
        assert a.is_trace_preserving() and a.is_completely_positive()


def test_density_oracle_has_no_transfer_model():
    with pytest.raises(NotImplementedError):
        density_oracle_choi(ProtocolSpec("cphase", transfer=True))


@pytest.mark.parametrize("p1,p2", [(0, 0), (0, 1), (1, 0), (1, 1)])
def test_derived_corrections_match_table(p1, p2, rng):
    for _ in range(5):
        ph = PhaseParams(*rng.uniform(0, 2 * np.pi, 2))
        for dressed in "+-":
            ctrl, tgt = derive_cr_correction(p1, p2, ph, dressed)
            want = TABLE_1[(p1, p2)](ph)
            assert same_phase(ctrl, want[0]) and same_phase(tgt, want[1])
            closed = cr_correction_angles(p1, p2, ph)
            assert same_phase(closed[0], want[0]) and same_phase(closed[1], want[1])
