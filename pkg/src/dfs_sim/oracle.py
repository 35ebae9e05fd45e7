"""Brute-force checks on the protocols.

Two routes to each protocol's logical channel:

* :func:`protocol_channel` enumerates every measurement branch of the
  state-vector engine and reconstructs the Choi matrix from 6-state
  tomography inputs;
* :func:`density_oracle_choi` re-derives the same circuits from full
  projector / unitary matrices acting on density matrices that carry a
  classical record, pushing matrix units straight through.

They share only the gate definitions in :mod:`dfs_sim.statevector`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import pi
from typing import Callable, Sequence

import numpy as np

from .protocols import (
    TABLE_1,
    CorrectionTable,
    MeasurementRecord,
    PhaseParams,
    ProtocolResult,
    ProtocolSpec,
    aligned_output,
    output_logical,
)
from .statevector import H, I2, X, Z, PureState, ZERO_PROB, rz

# ---------------------------------------------------------------------------
# density states and Choi matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DensityState:
    num_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = 2**self.num_qubits
        if m.shape != (d, d):
            raise ValueError("density matrix has the wrong shape")
        if not np.allclose(m, m.conj().T, atol=1e-12):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1) > 1e-12:
            raise ValueError("density matrix does not have unit trace")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise ValueError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_pure(cls, state: PureState) -> "DensityState":
        v = state.amplitudes
        return cls(state.num_qubits, np.outer(v, v.conj()))


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """Choi matrix sum_ij |i><j| (x) E(|i><j|), divided by dim_in (unit trace).

    Input factor first, output second.
    """

    dim_in: int
    dim_out: int
    matrix: np.ndarray

    def partial_trace_output(self) -> np.ndarray:
        m = self.matrix.reshape(self.dim_in, self.dim_out, self.dim_in, self.dim_out)
        return np.einsum("iaja->ij", m)

    def is_trace_preserving(self, tol: float = 1e-10) -> bool:
        return np.allclose(self.partial_trace_output(), np.eye(self.dim_in) / self.dim_in, atol=tol)

    def is_completely_positive(self, tol: float = 1e-10) -> bool:
        herm = np.allclose(self.matrix, self.matrix.conj().T, atol=tol)
        return herm and np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2).min() >= -tol


def choi_from_images(images: dict[tuple[int, int], np.ndarray], dim_in: int) -> ChoiMatrix:
    dim_out = images[(0, 0)].shape[0]
    J = np.zeros((dim_in * dim_out, dim_in * dim_out), dtype=complex)
    for (i, j), img in images.items():
        unit = np.zeros((dim_in, dim_in), dtype=complex)
        unit[i, j] = 1
        J += np.kron(unit, img)
    return ChoiMatrix(dim_in, dim_out, J / dim_in)


def unitary_choi(u: np.ndarray) -> ChoiMatrix:
    d = u.shape[0]
    omega = np.zeros(d * d, dtype=complex)
    for i in range(d):
        omega[i * d + i] = 1
    vec = np.kron(np.eye(d), u) @ omega
    return ChoiMatrix(d, d, np.outer(vec, vec.conj()) / d)


def choi_fidelity(a: ChoiMatrix, b: ChoiMatrix) -> float:
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        raise ValueError("Choi matrices act between different spaces")
    num = np.vdot(a.matrix, b.matrix)  # tr(a^dagger b)
    den = np.sqrt(np.vdot(a.matrix, a.matrix).real * np.vdot(b.matrix, b.matrix).real)
    return float(min(1.0, abs(num) / den))


# ---------------------------------------------------------------------------
# branch enumeration over the state-vector engine
# ---------------------------------------------------------------------------


class BranchExplosionError(RuntimeError):
    pass


@dataclass
class Branch:
    record: MeasurementRecord
    probability: float
    state: PureState
    corrections: list
    output_pairs: list
    fidelity: float | None = None


@dataclass
class BranchTree:
    branches: list[Branch] = field(default_factory=list)

    @property
    def total_probability(self) -> float:
        return float(sum(b.probability for b in self.branches))

    @property
    def min_fidelity(self) -> float:
        return min(b.fidelity for b in self.branches)

    def probabilities(self) -> dict[tuple, float]:
        return {b.record.key(): b.probability for b in self.branches}

    def __len__(self) -> int:
        return len(self.branches)


class _Replay:
    def __init__(self, prefix: tuple[int, ...]):
        self.prefix = prefix
        self.choices: list[int] = []
        self.alternatives: list[list[int]] = []

    def pick(self, block, labels, probs):
        d = len(self.choices)
        nonzero = [k for k, p in enumerate(probs) if p >= ZERO_PROB]
        k = self.prefix[d] if d < len(self.prefix) else nonzero[0]
        self.choices.append(k)
        self.alternatives.append(nonzero)
        return k


def enumerate_branches(
    spec: ProtocolSpec,
    logical,
    max_branches: int = 1 << 15,
    table: CorrectionTable = TABLE_1,
) -> BranchTree:
    """Depth-first expansion of every nonzero-probability outcome of every block."""
    initial = spec.initial_state(logical)
    tree = BranchTree()
    stack: list[tuple[int, ...]] = [()]
    while stack:
        prefix = stack.pop()
        replay = _Replay(prefix)
        res = spec.execute(initial, replay, table)
        branch = Branch(res.record, res.record.probability, res.state, res.corrections, res.output_pairs)
        try:
            _, branch.fidelity = aligned_output(spec, res, logical)
        except ValueError:
            branch.fidelity = 0.0
        tree.branches.append(branch)
        if len(tree.branches) > max_branches:
            raise BranchExplosionError(f"more than {max_branches} branches")
        for depth in range(len(prefix), len(replay.choices)):
            for alt in replay.alternatives[depth]:
                if alt != replay.choices[depth]:
                    stack.append(tuple(replay.choices[:depth]) + (alt,))
    return tree


# ---------------------------------------------------------------------------
# channel tomography from enumerated branches
# ---------------------------------------------------------------------------

_S2 = 1 / np.sqrt(2)
SIX_STATES = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([_S2, _S2], dtype=complex),
    "-": np.array([_S2, -_S2], dtype=complex),
    "+i": np.array([_S2, 1j * _S2], dtype=complex),
    "-i": np.array([_S2, -1j * _S2], dtype=complex),
}
_SIX_ORDER = ("0", "1", "+", "-", "+i", "-i")
# |i><j| = sum_k C[i, j, k] |s_k><s_k| over the six states
_UNIT_COEFFS = np.zeros((2, 2, 6), dtype=complex)
_UNIT_COEFFS[0, 0, 0] = 1
_UNIT_COEFFS[1, 1, 1] = 1
_UNIT_COEFFS[0, 1] = [0, 0, 0.5, -0.5, 0.5j, -0.5j]
_UNIT_COEFFS[1, 0] = [0, 0, 0.5, -0.5, -0.5j, 0.5j]


def branch_averaged_output(spec: ProtocolSpec, logical, table: CorrectionTable = TABLE_1) -> np.ndarray:
    """Logical output density matrix averaged over every branch."""
    tree = enumerate_branches(spec, logical, table=table)
    rho = 0
    for b in tree.branches:
        out = output_logical(spec, ProtocolResult(b.state, output_pairs=b.output_pairs))
        rho = rho + b.probability * np.outer(out, out.conj())
    return rho


def protocol_channel(spec: ProtocolSpec, table: CorrectionTable = TABLE_1) -> ChoiMatrix:
    k = spec.num_logical
    d = 2**k
    outputs = {}
    for labels in product(_SIX_ORDER, repeat=k):
        vec = np.ones(1, dtype=complex)
        for lab in labels:
            vec = np.kron(vec, SIX_STATES[lab])
        outputs[labels] = branch_averaged_output(spec, vec, table)
    images = {}
    for i, j in product(range(d), repeat=2):
        ib = [(i >> (k - 1 - m)) & 1 for m in range(k)]
        jb = [(j >> (k - 1 - m)) & 1 for m in range(k)]
        img = 0
        for labels in product(range(6), repeat=k):
            coef = np.prod([_UNIT_COEFFS[ib[m], jb[m], labels[m]] for m in range(k)])
            if coef != 0:
                img = img + coef * outputs[tuple(_SIX_ORDER[x] for x in labels)]
        images[(i, j)] = img
    return choi_from_images(images, d)


# ---------------------------------------------------------------------------
# independent density-matrix oracle
# ---------------------------------------------------------------------------


def embed(op: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Full 2^n operator for ``op`` acting on ``qubits`` (in that order)."""
    qubits = list(qubits)
    k = len(qubits)
    rest = [q for q in range(n) if q not in qubits]
    idx = np.arange(2**n)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    order = qubits + rest
    weights = 1 << (n - 1 - np.arange(n))
    perm = (bits[:, order] * weights).sum(axis=1)  # full index -> (support, rest) index
    big = np.kron(op, np.eye(2 ** (n - k)))
    return big[np.ix_(perm, perm)]


def _ket(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


def _proj(vectors) -> np.ndarray:
    return sum(np.outer(v, v.conj()) for v in vectors)


_PARITY = {0: _proj([_ket("01"), _ket("10")]), 1: _proj([_ket("00"), _ket("11")])}
_DETECT = {
    "D1": _proj([(_ket("01") + _ket("10")) * _S2]),
    "D2": _proj([(_ket("01") - _ket("10")) * _S2]),
    "leak": _proj([_ket("00"), _ket("11")]),
}
_DRESSED = {"+": _proj([np.array([_S2, _S2])]), "-": _proj([np.array([_S2, -_S2])])}
_READOUT = {b: _proj([_ket(b)]) for b in ("00", "01", "10", "11")}
_H_LOGICAL = (
    _proj([_ket("00"), _ket("11")])
    + _S2 * (np.outer(_ket("01"), _ket("01")) + np.outer(_ket("01"), _ket("10"))
             + np.outer(_ket("10"), _ket("01")) - np.outer(_ket("10"), _ket("10")))
)


class CQState:
    """Block-diagonal classical-quantum operator: outcome record -> (unnormalized) matrix."""

    def __init__(self, n: int, rho: np.ndarray):
        self.n = n
        self.parts: dict[tuple, np.ndarray] = {(): rho}

    def unitary(self, u: np.ndarray, qubits) -> None:
        U = embed(u, qubits, self.n)
        self.parts = {k: U @ r @ U.conj().T for k, r in self.parts.items()}

    def measure(self, name: str, projectors: dict, qubits) -> None:
        full = {lab: embed(p, qubits, self.n) for lab, p in projectors.items()}
        new = {}
        for key, r in self.parts.items():
            for lab, P in full.items():
                new[key + ((name, lab),)] = P @ r @ P
        self.parts = new

    def conditional(self, rule: Callable[[dict], list]) -> None:
        new = {}
        for key, r in self.parts.items():
            for u, qubits in rule(dict(key)):
                U = embed(u, qubits, self.n)
                r = U @ r @ U.conj().T
            new[key] = r
        self.parts = new

    def forget(self, names) -> None:
        new: dict[tuple, np.ndarray] = {}
        for key, r in self.parts.items():
            k2 = tuple(e for e in key if e[0] not in names)
            new[k2] = new.get(k2, 0) + r
        self.parts = new

    def total(self) -> np.ndarray:
        return sum(self.parts.values())


def _oracle_prep(cq: CQState, a: int, b: int, tag: str) -> None:
    cq.unitary(H, [a])
    cq.unitary(H, [b])
    cq.measure(tag, _PARITY, [a, b])
    cq.conditional(lambda r: [(X, [b])] if r[tag] == 1 else [])
    cq.forget({tag})


def cr_correction_angles(p1: int, p2: int, phases: PhaseParams) -> tuple[float, float]:
    """Closed-form R_z angles (control, target) that undo the ancilla phases."""
    ctrl = (-1) ** p1 * phases.phi_t + pi * (1 - p2)
    tgt = (-1) ** p2 * phases.phi_tp + pi * (1 - p1)
    return ctrl, tgt


def _oracle_cr(cq: CQState, c: int, t: int, a: int, ph: PhaseParams, tag: str) -> None:
    cq.unitary(rz(ph.phi_t) @ H, [a])
    cq.measure(tag + "P1", _PARITY, [c, a])
    cq.unitary(rz(ph.phi_tp) @ H, [a])
    cq.measure(tag + "P2", _PARITY, [t, a])
    cq.measure(tag + "dr", _DRESSED, [a])

    def rule(r):
        ops = [(Z, [t])] if r[tag + "dr"] == "-" else []
        ang_c, ang_t = cr_correction_angles(r[tag + "P1"], r[tag + "P2"], ph)
        return ops + [(rz(ang_c), [c]), (rz(ang_t), [t])]

    cq.conditional(rule)
    cq.forget({tag + "P1", tag + "P2", tag + "dr"})


def _oracle_circuit(spec: ProtocolSpec) -> tuple[int, Callable[[np.ndarray], np.ndarray], list, list]:
    """(register size, isometry logical->register, circuit, output qubits)."""
    name, ph = spec.name, spec.phases
    if spec.transfer:
        raise NotImplementedError("the density oracle models the relabeled cphase only")

    def logical_bits(x: int, k: int) -> str:
        return "".join("10" if (x >> (k - 1 - m)) & 1 else "01" for m in range(k))

    if name == "rz":
        n, outq = 2, [0, 1]
        layout = lambda x: logical_bits(x, 1)

        def circuit(cq):
            cq.unitary(rz(spec.theta), [0])
    elif name == "cr-block":
        n, outq = 5, [0, 1, 2, 3]
        layout = lambda x: logical_bits(x, 2) + "0"

        def circuit(cq):
            _oracle_cr(cq, 0, 2, 4, ph, "")
    elif name == "hadamard":
        n, outq = 5, [2, 3]
        layout = lambda x: logical_bits(x, 1) + "000"

        def circuit(cq):
            _oracle_prep(cq, 2, 3, "prep")
            _oracle_cr(cq, 0, 2, 4, ph, "cr")
            cq.measure("D", _DETECT, [0, 1])
            cq.conditional(lambda r: [(X, [2]), (X, [3])] if r["D"] == "D2" else [])
            cq.forget({"D"})
    else:
        n, outq = 6, [0, 1, 4, 5]

        def layout(x):
            b = logical_bits(x, 2)
            return b[:2] + "00" + b[2:]

        def circuit(cq):
            _oracle_prep(cq, 2, 3, "prep")
            cq.measure("P13", _PARITY, [0, 2])
            cq.conditional(lambda r: [(X, [2]), (X, [3])] if r["P13"] == 0 else [])
            cq.forget({"P13"})
            cq.unitary(_H_LOGICAL, [2, 3])
            cq.measure("P46", _PARITY, [3, 5])
            cq.unitary(_H_LOGICAL, [2, 3])
            cq.measure("RO", _READOUT, [2, 3])

            def fix(r):
                ops = []
                if r["P46"] == 0:
                    ops.append((Z, [0]))
                if r["RO"] == "10":
                    ops.append((Z, [4]))
                return ops

            cq.conditional(fix)
            cq.forget({"P46", "RO"})
    k = spec.num_logical
    V = np.stack([_ket(layout(x)) for x in range(2**k)], axis=1)
    return n, V, circuit, outq


def _partial_trace_keep(rho: np.ndarray, n: int, keep: Sequence[int]) -> np.ndarray:
    keep = list(keep)
    rest = [q for q in range(n) if q not in keep]
    t = rho.reshape([2] * (2 * n))
    perm = keep + rest + [n + q for q in keep] + [n + q for q in rest]
    t = t.transpose(perm).reshape(2 ** len(keep), 2 ** len(rest), 2 ** len(keep), 2 ** len(rest))
    return np.einsum("arbr->ab", t)


def density_oracle_image(spec: ProtocolSpec, rho_logical: np.ndarray) -> np.ndarray:
    """Push a logical operator (not necessarily a state) through the protocol."""
    n, V, circuit, outq = _oracle_circuit(spec)
    cq = CQState(n, V @ rho_logical @ V.conj().T)
    circuit(cq)
    out = _partial_trace_keep(cq.total(), n, outq)
    k_out = len(outq) // 2
    W = np.stack(
        [_ket("".join("10" if (x >> (k_out - 1 - m)) & 1 else "01" for m in range(k_out)))
         for x in range(2**k_out)],
        axis=1,
    )
    return W.conj().T @ out @ W


def density_oracle_choi(spec: ProtocolSpec) -> ChoiMatrix:
    d = 2**spec.num_logical
    images = {}
    for i, j in product(range(d), repeat=2):
        unit = np.zeros((d, d), dtype=complex)
        unit[i, j] = 1
        images[(i, j)] = density_oracle_image(spec, unit)
    return choi_from_images(images, d)


def derive_cr_correction(p1: int, p2: int, phases: PhaseParams, dressed: str = "+") -> tuple[float, float]:
    """Read the R_z angles that turn one uncorrected C-R branch into CZ.

    Runs the density oracle's circuit without corrections on the uniform
    logical input and reads relative phases off the output amplitudes.
    """
    n = 5
    v = sum(_ket(a + b + "0") for a in ("01", "10") for b in ("01", "10")) / 2
    cq = CQState(n, np.outer(v, v.conj()))
    cq.unitary(rz(phases.phi_t) @ H, [4])
    cq.measure("P1", {p1: _PARITY[p1]}, [0, 4])
    cq.unitary(rz(phases.phi_tp) @ H, [4])
    cq.measure("P2", {p2: _PARITY[p2]}, [2, 4])
    cq.measure("dr", {dressed: _DRESSED[dressed]}, [4])
    if dressed == "-":
        cq.unitary(Z, [2])
    rho = _partial_trace_keep(cq.total(), n, [0, 1, 2, 3])
    vals, vecs = np.linalg.eigh(rho)
    psi = vecs[:, -1]
    amp = {ct: psi[int(a + b, 2)] for ct, (a, b) in
           {(0, 0): ("01", "01"), (0, 1): ("01", "10"), (1, 0): ("10", "01"), (1, 1): ("10", "10")}.items()}
    tgt = np.angle(amp[(0, 0)] / amp[(0, 1)])
    ctrl = np.angle(amp[(0, 0)] / amp[(1, 0)])
    return float(ctrl), float(tgt)


def same_phase(a: float, b: float, tol: float = 1e-10) -> bool:
    return abs(np.exp(1j * a) - np.exp(1j * b)) < tol
