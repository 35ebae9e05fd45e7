"""Pairwise DFS encoding: |0_L> = |01>, |1_L> = |10> on each physical pair."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .statevector import NORM_TOL, PROB_TOL, PureState, reduced_density

# Pair-local basis indices of |01> and |10>.
_DFS_INDEX = (0b01, 0b10)


class LeakageError(ValueError):
    def __init__(self, leaked_weight: float, message: str | None = None):
        self.leaked_weight = float(leaked_weight)
        super().__init__(message or f"pair has weight {self.leaked_weight:.3g} outside the DFS")


class EntangledPairError(ValueError):
    pass


class LogicalQubit(NamedTuple):
    first: int
    second: int

    @classmethod
    def of(cls, pair) -> "LogicalQubit":
        lq = cls(int(pair[0]), int(pair[1]))
        if lq.first == lq.second:
            raise ValueError("a logical qubit needs two distinct physical qubits")
        return lq


@dataclass(frozen=True)
class LogicalAmplitudes:
    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        norm2 = abs(a) ** 2 + abs(b) ** 2
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {norm2!r}, expected 1")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)


def encode_logical(amps: LogicalAmplitudes) -> PureState:
    vec = np.zeros(4, dtype=complex)
    vec[0b01], vec[0b10] = amps.alpha, amps.beta
    return PureState(2, vec)


def encode_register(logical: np.ndarray) -> PureState:
    """Encode a 2^k logical amplitude vector onto k consecutive pairs (0,1), (2,3), ..."""
    logical = np.asarray(logical, dtype=complex).reshape(-1)
    k = int(round(np.log2(logical.size)))
    vec = np.zeros(4**k, dtype=complex)
    vec[_embedding_indices(k)] = logical
    return PureState(2 * k, vec)


def _embedding_indices(k: int) -> np.ndarray:
    # Physical index of each logical basis state (logical bit b -> pair bits 01 or 10).
    idx = np.zeros(2**k, dtype=int)
    for x in range(2**k):
        phys = 0
        for j in range(k):
            bit = (x >> (k - 1 - j)) & 1
            phys = (phys << 2) | _DFS_INDEX[bit]
        idx[x] = phys
    return idx


def _check_pairs(n: int, pairs: Sequence[LogicalQubit]) -> list[LogicalQubit]:
    pairs = [LogicalQubit.of(p) for p in pairs]
    flat = [q for p in pairs for q in p]
    if len(set(flat)) != len(flat):
        raise ValueError(f"pairs overlap: {pairs}")
    if any(not 0 <= q < n for q in flat):
        raise IndexError("pair qubit out of range")
    return pairs


def dfs_weight(state: PureState, pairs: Sequence[LogicalQubit]) -> float:
    pairs = _check_pairs(state.num_qubits, pairs)
    psi = state.amplitudes.reshape([2] * state.num_qubits)
    for p in pairs:
        # zero the parallel-spin components (00 and 11) of this pair; mask is symmetric
        mask = np.ones((2, 2))
        mask[0, 0] = mask[1, 1] = 0.0
        shape = [1] * state.num_qubits
        shape[p.first], shape[p.second] = 2, 2
        psi = psi * mask.reshape(shape)
    return float(np.vdot(psi, psi).real)


def logical_density(state: PureState, pairs: Sequence[LogicalQubit]) -> tuple[np.ndarray, float]:
    """Reduced state of ``pairs`` restricted to their DFS, plus the weight outside it."""
    pairs = _check_pairs(state.num_qubits, pairs)
    keep = [q for p in pairs for q in p]
    rho = reduced_density(state, keep)
    idx = _embedding_indices(len(pairs))
    inside = rho[np.ix_(idx, idx)]
    leaked = max(0.0, 1.0 - float(np.trace(inside).real))
    return inside, leaked


def decode_register(state: PureState, pairs: Sequence[LogicalQubit], tol: float = PROB_TOL) -> np.ndarray:
    """Logical amplitude vector carried by ``pairs`` (first nonzero entry made real positive)."""
    rho, leaked = logical_density(state, pairs)
    if leaked > tol:
        raise LeakageError(leaked)
    purity = float(np.trace(rho @ rho).real)
    if purity < 1 - tol:
        raise EntangledPairError(
            f"logical register is entangled with the rest (purity {purity:.6f})"
        )
    _, vecs = np.linalg.eigh(rho)
    v = vecs[:, -1]
    lead = v[np.argmax(np.abs(v) > 1e-9)]
    return v * (abs(lead) / lead)


def decode_logical(state: PureState, pair: LogicalQubit) -> LogicalAmplitudes:
    a, b = decode_register(state, [pair])
    return LogicalAmplitudes(a, b)


_BELL = {
    "Psi+": ("0110", "1001", 1),
    "Psi-": ("0110", "1001", -1),
    "Phi+": ("0101", "1010", 1),
    "Phi-": ("0101", "1010", -1),
}


def logical_bell(kind: str) -> PureState:
    """Logical Bell state on pairs (0,1), (2,3); ``kind`` in Psi+, Psi-, Phi+, Phi-."""
    key = kind.replace("Ψ", "Psi").replace("Φ", "Phi").replace("−", "-")
    try:
        a, b, sign = _BELL[key]
    except KeyError:
        raise ValueError(f"unknown Bell state {kind!r}") from None
    vec = np.zeros(16, dtype=complex)
    vec[int(a, 2)] = 1 / np.sqrt(2)
    vec[int(b, 2)] = sign / np.sqrt(2)
    return PureState(4, vec)
