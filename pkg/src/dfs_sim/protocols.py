"""Logical gates as measurement + feed-forward protocols.

Register layouts used by :class:`ProtocolSpec` (qubit indices):

* ``rz``       -- pair (0, 1)
* ``hadamard`` -- input pair (0, 1), target pair (2, 3), C-R ancilla 4
* ``cr-block`` -- pairs (0, 1) and (2, 3), control 0, target 2, ancilla 4
* ``cphase``   -- pair A (0, 1), mediator pair (2, 3), pair B (4, 5)
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from math import pi
from typing import Any, Callable, Mapping

import numpy as np

from . import blocks
from .blocks import Forced, Sampler, as_source
from .logic import (
    LeakageError,
    LogicalQubit,
    dfs_weight,
    decode_register,
    encode_register,
)
from .statevector import (
    PROB_TOL,
    H,
    X,
    Z,
    PureState,
    apply_1q,
    apply_unitary,
    discard_qubit,
    discard_qubits,
    new_basis_state,
    permute_qubits,
    reduced_density,
    rz,
)

PROTOCOLS = ("rz", "hadamard", "cphase", "cr-block")


@dataclass(frozen=True)
class PhaseParams:
    """Free-evolution phases picked up by the C-R ancilla during its two waits."""

    phi_t: float = 0.0
    phi_tp: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.phi_t) and np.isfinite(self.phi_tp)):
            raise ValueError("phases must be finite")


@dataclass
class MeasurementRecord:
    entries: list[tuple[str, Any, float]] = field(default_factory=list)

    def add(self, block: str, label, prob: float) -> None:
        self.entries.append((block, label, float(prob)))

    def extend(self, other: "MeasurementRecord") -> None:
        self.entries.extend(other.entries)

    @property
    def probability(self) -> float:
        return float(np.prod([p for _, _, p in self.entries])) if self.entries else 1.0

    def key(self) -> tuple:
        return tuple((b, str(lab)) for b, lab, _ in self.entries)

    def outcome(self, block: str):
        for b, lab, _ in self.entries:
            if b == block:
                return lab
        raise KeyError(block)


@dataclass(frozen=True)
class Correction:
    name: str
    qubit: int
    matrix: np.ndarray = field(repr=False, compare=False)


@dataclass
class ProtocolResult:
    state: PureState
    record: MeasurementRecord = field(default_factory=MeasurementRecord)
    corrections: list[Correction] = field(default_factory=list)
    output_pairs: list[LogicalQubit] = field(default_factory=list)
    snapshots: dict[str, PureState] = field(default_factory=dict, repr=False)


def _join(prefix: str, name: str) -> str:
    return f"{prefix}/{name}" if prefix else name


def _shift(q: int, removed: int) -> int:
    return q - 1 if q > removed else q


def _correct(result: ProtocolResult, name: str, u: np.ndarray, q: int) -> None:
    result.state = apply_1q(result.state, u, q)
    result.corrections.append(Correction(name, q, u))


def _require_dfs(state: PureState, pairs) -> None:
    w = dfs_weight(state, pairs)
    if w < 1 - PROB_TOL:
        raise LeakageError(1 - w)


def _require_zero(state: PureState, qubits) -> None:
    for q in qubits:
        rho = reduced_density(state, (q,))
        if rho[0, 0].real < 1 - PROB_TOL:
            raise ValueError(f"qubit {q} is not in |0>")


_PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)


def _require_psi_plus(state: PureState, pair: LogicalQubit) -> None:
    rho = reduced_density(state, tuple(pair))
    if np.vdot(_PSI_PLUS, rho @ _PSI_PLUS).real < 1 - PROB_TOL:
        raise ValueError(f"pair {tuple(pair)} is not in (|01>+|10>)/sqrt2")


# ---------------------------------------------------------------------------
# R_z
# ---------------------------------------------------------------------------

def logical_rz(state: PureState, pair: LogicalQubit, theta: float) -> PureState:
    """alpha|0_L> + beta|1_L>  ->  alpha|0_L> + beta e^{i theta}|1_L> (phase on the pair's first spin)."""
    pair = LogicalQubit.of(pair)
    _require_dfs(state, [pair])
    return apply_1q(state, rz(theta), pair.first)


# ---------------------------------------------------------------------------
# ancilla pair preparation
# ---------------------------------------------------------------------------

def prepare_ancilla_pair(state: PureState, pair: LogicalQubit, source, block: str = "prep") -> ProtocolResult:
    """|00> -> (|01>+|10>)/sqrt2 via Hadamards and a parity check, flipping the second spin on P=1."""
    pair = LogicalQubit.of(pair)
    _require_zero(state, pair)
    s = apply_1q(apply_1q(state, H, pair.first), H, pair.second)
    result = ProtocolResult(s, output_pairs=[pair])
    label, p, result.state = blocks.parity_check(s, pair.first, pair.second, source, block=block)
    result.record.add(block, label, p)
    if label == 1:
        _correct(result, "X", X, pair.second)
    return result


# ---------------------------------------------------------------------------
# C-R block
# ---------------------------------------------------------------------------

CorrectionTable = Mapping[tuple[int, int], Callable[[PhaseParams], tuple[float, float]]]

# (P1, P2) -> (R_z angle on control, R_z angle on target)
TABLE_1: dict[tuple[int, int], Callable[[PhaseParams], tuple[float, float]]] = {
    (0, 0): lambda ph: (ph.phi_t + pi, ph.phi_tp + pi),
    (1, 0): lambda ph: (-(ph.phi_t - pi), ph.phi_tp),
    (0, 1): lambda ph: (ph.phi_t, -(ph.phi_tp - pi)),
    (1, 1): lambda ph: (-ph.phi_t, -ph.phi_tp),
}


def cr_block(
    state: PureState,
    control: int,
    target: int,
    ancilla: int,
    phases: PhaseParams = PhaseParams(),
    source=None,
    prefix: str = "",
    table: CorrectionTable = TABLE_1,
) -> ProtocolResult:
    """Ancilla-mediated controlled-phase between ``control`` and ``target``.

    The ancilla must start in |0>; it is prepared, used and discarded here,
    so indices above it shift down by one in the returned state.  Snapshots
    ``A1``..``A5`` hold the intermediate states (``A5`` after the dressed
    measurement and discard, before the R_z corrections).
    """
    if len({control, target, ancilla}) != 3:
        raise ValueError("control, target and ancilla must be distinct")
    _require_zero(state, (ancilla,))
    src = as_source(source)
    res = ProtocolResult(state)
    snap = res.snapshots

    s = apply_1q(apply_1q(state, H, ancilla), rz(phases.phi_t), ancilla)
    snap["A1"] = s
    p1, pr, s = blocks.parity_check(s, control, ancilla, src, block=_join(prefix, "P1"))
    res.record.add(_join(prefix, "P1"), p1, pr)
    snap["A2"] = s
    s = apply_1q(apply_1q(s, H, ancilla), rz(phases.phi_tp), ancilla)
    snap["A3"] = s
    p2, pr, s = blocks.parity_check(s, target, ancilla, src, block=_join(prefix, "P2"))
    res.record.add(_join(prefix, "P2"), p2, pr)
    snap["A4"] = s
    dressed, pr, s = blocks.dressed_measure(s, ancilla, src, block=_join(prefix, "dressed"))
    res.record.add(_join(prefix, "dressed"), dressed, pr)
    res.state = s
    if dressed == "-":
        _correct(res, "Z", Z, target)
    res.state = discard_qubit(res.state, ancilla)
    control, target = _shift(control, ancilla), _shift(target, ancilla)
    res.corrections = [
        Correction(c.name, _shift(c.qubit, ancilla), c.matrix) for c in res.corrections
    ]
    snap["A5"] = res.state

    ang_c, ang_t = table[(p1, p2)](phases)
    _correct(res, "Rz", rz(ang_c), control)
    _correct(res, "Rz", rz(ang_t), target)
    return res


# ---------------------------------------------------------------------------
# logical Hadamard (information moves from in_pair to anc_pair)
# ---------------------------------------------------------------------------

def logical_hadamard(
    state: PureState,
    in_pair: LogicalQubit,
    anc_pair: LogicalQubit,
    ancilla: int,
    phases: PhaseParams = PhaseParams(),
    source=None,
    prefix: str = "",
    table: CorrectionTable = TABLE_1,
) -> ProtocolResult:
    """Logical Hadamard teleported onto ``anc_pair``; the C-R ancilla is consumed.

    ``in_pair`` is left measured in (|01> +- |10>)/sqrt2.  Indices above
    ``ancilla`` shift down by one in the result.
    """
    in_pair, anc_pair = LogicalQubit.of(in_pair), LogicalQubit.of(anc_pair)
    _require_dfs(state, [in_pair])
    _require_psi_plus(state, anc_pair)
    src = as_source(source)
    res = cr_block(state, in_pair.first, anc_pair.first, ancilla, phases, src,
                   prefix=_join(prefix, "cr"), table=table)
    in_pair = LogicalQubit(*(_shift(q, ancilla) for q in in_pair))
    anc_pair = LogicalQubit(*(_shift(q, ancilla) for q in anc_pair))
    res.snapshots["Eq2"] = res.state

    label, pr, res.state = blocks.detector_D(res.state, in_pair, src, block=_join(prefix, "D"))
    res.record.add(_join(prefix, "D"), label, pr)
    if label == "leak":
        raise LeakageError(pr, "detector pair registered parallel spins")
    if label == "D2":
        _correct(res, "X", X, anc_pair.first)
        _correct(res, "X", X, anc_pair.second)
    res.output_pairs = [anc_pair]
    return res


# Logical Hadamard on one pair: H on span{|01>,|10>}, identity on |00>,|11>.
LOGICAL_H_PAIR = np.eye(4, dtype=complex)
LOGICAL_H_PAIR[np.ix_([1, 2], [1, 2])] = H


def _hadamard_in_place(res: ProtocolResult, pair: LogicalQubit, phases, src, prefix, transfer, table):
    if not transfer:
        res.state = apply_unitary(res.state, LOGICAL_H_PAIR, tuple(pair))
        return
    # Full teleporting block on two fresh spins plus a C-R ancilla, then relabel.
    n = res.state.num_qubits
    s = res.state.tensor(new_basis_state(3, "000"))
    new_pair, anc = LogicalQubit(n, n + 1), n + 2
    prep = prepare_ancilla_pair(s, new_pair, src, block=_join(prefix, "prep"))
    res.record.extend(prep.record)
    res.corrections.extend(prep.corrections)
    h = logical_hadamard(prep.state, pair, new_pair, anc, phases, src, prefix=prefix, table=table)
    res.record.extend(h.record)
    res.corrections.extend(h.corrections)
    s = discard_qubits(h.state, tuple(pair))
    # remaining order: old qubits except `pair`, then the new pair
    old = [q for q in range(n) if q not in pair]
    position = {q: i for i, q in enumerate(old)}
    position[pair.first], position[pair.second] = n - 2, n - 1
    res.state = permute_qubits(s, [position[q] for q in range(n)])


def logical_cphase(
    state: PureState,
    pair_a: LogicalQubit = LogicalQubit(0, 1),
    anc_pair: LogicalQubit = LogicalQubit(2, 3),
    pair_b: LogicalQubit = LogicalQubit(4, 5),
    phases: PhaseParams = PhaseParams(),
    source=None,
    transfer: bool = False,
    table: CorrectionTable = TABLE_1,
) -> ProtocolResult:
    """Logical controlled-phase between ``pair_a`` and ``pair_b`` mediated by ``anc_pair``.

    The mediator must hold (|01>+|10>)/sqrt2.  With ``transfer=True`` both
    Hadamards run the full teleporting block on three scratch qubits that
    are discarded again, so the returned register has the input layout.
    """
    pair_a, anc_pair, pair_b = (LogicalQubit.of(p) for p in (pair_a, anc_pair, pair_b))
    _require_dfs(state, [pair_a, anc_pair, pair_b])
    _require_psi_plus(state, anc_pair)
    src = as_source(source)
    res = ProtocolResult(state, output_pairs=[pair_a, pair_b])

    p13, pr, res.state = blocks.parity_check(res.state, pair_a.first, anc_pair.first, src, block="P13")
    res.record.add("P13", p13, pr)
    if p13 == 0:
        _correct(res, "X", X, anc_pair.first)
        _correct(res, "X", X, anc_pair.second)
    res.snapshots["Eq4"] = res.state

    _hadamard_in_place(res, anc_pair, phases, src, "H1", transfer, table)
    p46, pr, res.state = blocks.parity_check(res.state, anc_pair.second, pair_b.second, src, block="P46")
    res.record.add("P46", p46, pr)
    _hadamard_in_place(res, anc_pair, phases, src, "H2", transfer, table)
    res.snapshots["Eq5" if p46 == 1 else "Eq6"] = res.state

    bits, pr, res.state = blocks.readout_pair(res.state, anc_pair, src, block="readout34")
    res.record.add("readout34", bits, pr)
    if bits not in ("01", "10"):
        raise LeakageError(pr, f"mediator pair read out as parallel spins {bits}")
    if p46 == 1 and bits == "10":
        _correct(res, "Z", Z, pair_b.first)
    elif p46 == 0:
        _correct(res, "Z", Z, pair_a.first)
        if bits == "10":
            _correct(res, "Z", Z, pair_b.first)
    return res


# ---------------------------------------------------------------------------
# descriptors
# ---------------------------------------------------------------------------

CZ = np.diag([1, 1, 1, -1]).astype(complex)


@dataclass
class ProtocolSpec:
    """Serializable description of one protocol run (everything except the input)."""

    name: str
    theta: float = 0.0
    phases: PhaseParams = PhaseParams()
    transfer: bool = False
    forced: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.name!r}; expected one of {PROTOCOLS}")
        if isinstance(self.phases, (list, tuple)):
            self.phases = PhaseParams(*self.phases)
        elif isinstance(self.phases, dict):
            self.phases = PhaseParams(**self.phases)

    @property
    def num_logical(self) -> int:
        return 1 if self.name in ("rz", "hadamard") else 2

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ProtocolSpec":
        return cls(**json.loads(text))

    def logical_unitary(self) -> np.ndarray:
        if self.name == "rz":
            return rz(self.theta)
        if self.name == "hadamard":
            return H.copy()
        return CZ.copy()

    def ideal_output(self, logical: np.ndarray) -> np.ndarray:
        return self.logical_unitary() @ np.asarray(logical, dtype=complex)

    def initial_state(self, logical) -> PureState:
        logical = _logical_vector(logical, self.num_logical)
        enc = encode_register(logical)
        if self.name == "rz":
            return enc
        if self.name == "hadamard":
            return enc.tensor(new_basis_state(3, "000"))
        if self.name == "cr-block":
            return enc.tensor(new_basis_state(1, "0"))
        # cphase: [A, B, mediator] -> [A, mediator, B]
        return permute_qubits(enc.tensor(new_basis_state(2, "00")), (0, 1, 4, 5, 2, 3))

    def execute(self, state: PureState, source, table: CorrectionTable = TABLE_1) -> ProtocolResult:
        """Run on a register laid out by :meth:`initial_state`."""
        src = as_source(source)
        if self.name == "rz":
            return ProtocolResult(logical_rz(state, (0, 1), self.theta), output_pairs=[LogicalQubit(0, 1)])
        if self.name == "cr-block":
            res = cr_block(state, 0, 2, 4, self.phases, src, table=table)
            res.output_pairs = [LogicalQubit(0, 1), LogicalQubit(2, 3)]
            return res
        if self.name == "hadamard":
            prep = prepare_ancilla_pair(state, (2, 3), src, block="prep")
            res = logical_hadamard(prep.state, (0, 1), (2, 3), 4, self.phases, src, table=table)
        else:
            prep = prepare_ancilla_pair(state, (2, 3), src, block="prep34")
            res = logical_cphase(prep.state, phases=self.phases, source=src,
                                 transfer=self.transfer, table=table)
        res.record.entries[:0] = prep.record.entries
        res.corrections[:0] = prep.corrections
        return res

    def run(self, logical, source, table: CorrectionTable = TABLE_1) -> ProtocolResult:
        return self.execute(self.initial_state(logical), source, table)


def _logical_vector(logical, k: int) -> np.ndarray:
    if hasattr(logical, "alpha"):
        logical = [logical]
    if isinstance(logical, (list, tuple)) and logical and hasattr(logical[0], "alpha"):
        vec = np.ones(1, dtype=complex)
        for amps in logical:
            vec = np.kron(vec, amps.as_array())
        logical = vec
    vec = np.asarray(logical, dtype=complex).reshape(-1)
    if vec.size != 2**k:
        raise ValueError(f"protocol acts on {k} logical qubit(s); got {vec.size} amplitudes")
    if abs(np.linalg.norm(vec) - 1) > 1e-12:
        raise ValueError("logical input is not normalized")
    return vec


def output_logical(spec: ProtocolSpec, result: ProtocolResult) -> np.ndarray:
    return decode_register(result.state, result.output_pairs)


def aligned_output(spec: ProtocolSpec, result: ProtocolResult, logical) -> tuple[np.ndarray, float]:
    """Decoded logical output with its global phase aligned to the ideal, and the fidelity."""
    ideal = spec.ideal_output(_logical_vector(logical, spec.num_logical))
    out = output_logical(spec, result)
    overlap = np.vdot(ideal, out)
    fid = float(min(1.0, abs(overlap)))
    if abs(overlap) > 1e-12:
        out = out * (abs(overlap) / overlap)
    return out, fid


def run_protocol_sampled(spec: ProtocolSpec, logical, seed: int, table: CorrectionTable = TABLE_1) -> ProtocolResult:
    """One trajectory; blocks named in ``spec.forced`` are pinned, the rest sampled from ``seed``."""
    source = Forced(spec.forced, fallback=Sampler(np.random.default_rng(seed)))
    return spec.run(logical, source, table)
