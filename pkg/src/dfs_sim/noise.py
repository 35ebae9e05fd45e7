"""Collective dephasing plus the logic / leakage Pauli errors on a DFS pair."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import pi
from typing import Sequence

import numpy as np

from .logic import LogicalAmplitudes, LogicalQubit, dfs_weight, encode_logical, encode_register
from .statevector import I2, X, Y, Z, PureState, apply_unitary, fidelity_up_to_global_phase


@dataclass(frozen=True)
class AngleDistribution:
    """``fixed`` (value), ``uniform`` (low, high) or ``gaussian`` (mean, sigma), radians."""

    kind: str = "uniform"
    value: float = 0.0
    low: float = 0.0
    high: float = 2 * pi
    mean: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in ("fixed", "uniform", "gaussian"):
            raise ValueError(f"unknown angle distribution {self.kind!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if self.kind == "uniform" and self.high < self.low:
            raise ValueError("uniform distribution needs low <= high")

    def sample(self, rng: np.random.Generator) -> float:
        if self.kind == "fixed":
            return float(self.value)
        if self.kind == "uniform":
            return float(rng.uniform(self.low, self.high))
        return float(rng.normal(self.mean, self.sigma))

    @property
    def parameter(self) -> float:
        """The single number a sweep over this distribution varies."""
        return {"fixed": self.value, "uniform": self.high - self.low, "gaussian": self.sigma}[self.kind]

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        keys = {"fixed": ("value",), "uniform": ("low", "high"), "gaussian": ("mean", "sigma")}[self.kind]
        d.update({k: getattr(self, k) for k in keys})
        return d


@dataclass(frozen=True)
class CollectiveDephasingSpec:
    qubits: tuple[int, ...]
    distribution: AngleDistribution = field(default_factory=AngleDistribution)

    def __post_init__(self):
        if not self.qubits:
            raise ValueError("collective dephasing needs at least one qubit")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))


def dephasing_unitary(phi: float, k: int) -> np.ndarray:
    """exp(i phi sum_j sigma_z^(j) / 2) on k qubits (diagonal)."""
    total = np.zeros(2**k)
    for j in range(k):
        bits = (np.arange(2**k) >> (k - 1 - j)) & 1
        total += 1 - 2 * bits
    return np.diag(np.exp(0.5j * phi * total))


def apply_collective_dephasing(
    state: PureState,
    spec: CollectiveDephasingSpec,
    rng: np.random.Generator | None = None,
    angle: float | None = None,
) -> PureState:
    if angle is None:
        if rng is None:
            raise ValueError("need an rng or a fixed angle")
        angle = spec.distribution.sample(rng)
    return apply_unitary(state, dephasing_unitary(angle, len(spec.qubits)), spec.qubits)


# Pauli content on (i, i+1) for every error listed for a pair.
ERROR_OPERATORS: dict[str, tuple[np.ndarray, np.ndarray]] = {
    "xx": (X, X),
    "yy": (Y, Y),
    "zz": (Z, Z),
    "x_i": (X, I2),
    "x_j": (I2, X),
    "y_i": (Y, I2),
    "y_j": (I2, Y),
    "x_i z_j": (X, Z),
    "z_i x_j": (Z, X),
    "y_i z_j": (Y, Z),
    "z_i y_j": (Z, Y),
}

LOGIC_ERRORS = ("xx", "yy", "zz")
LEAKAGE_ERRORS = ("x_i", "x_j", "y_i", "y_j", "x_i z_j", "z_i x_j", "y_i z_j", "z_i y_j")


@dataclass(frozen=True)
class ErrorOperatorSpec:
    """One error operator on ``pair`` = (i, i+1) firing with ``probability``."""

    kind: str
    probability: float = 1.0
    pair: tuple[int, int] = (0, 1)

    def __post_init__(self):
        if self.kind not in ERROR_OPERATORS:
            raise ValueError(f"unknown error operator {self.kind!r}")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError("probability must lie in [0, 1]")
        object.__setattr__(self, "pair", LogicalQubit.of(self.pair))

    def matrix(self) -> np.ndarray:
        a, b = ERROR_OPERATORS[self.kind]
        return np.kron(a, b)


def apply_error_operator(state: PureState, spec: ErrorOperatorSpec, rng: np.random.Generator) -> tuple[PureState, bool]:
    if spec.probability <= 0.0 or rng.random() >= spec.probability:
        return state, False
    return apply_unitary(state, spec.matrix(), tuple(spec.pair)), True


def classify_error(kind: str, trials: int = 8, seed: int = 0) -> str:
    """'logic' if the operator keeps every DFS state in the DFS, 'leakage' if it maps them out."""
    op = ErrorOperatorSpec(kind)
    rng = np.random.default_rng(seed)
    weights = []
    for _ in range(trials):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        s = encode_register(v / np.linalg.norm(v))
        s = apply_unitary(s, op.matrix(), (0, 1))
        weights.append(dfs_weight(s, [(0, 1)]))
    if all(abs(w - 1) < 1e-12 for w in weights):
        return "logic"
    if all(w < 1e-12 for w in weights):
        return "leakage"
    return "mixed"


def encoded_state(encoding: str, amps: LogicalAmplitudes) -> PureState:
    if encoding == "dfs":
        return encode_logical(amps)
    if encoding == "bare":
        return PureState(1, amps.as_array())
    raise ValueError(f"unknown encoding {encoding!r}")


def fidelity_samples(
    encoding: str,
    amps: LogicalAmplitudes,
    distribution: AngleDistribution,
    num_samples: int,
    rng: np.random.Generator,
) -> np.ndarray:
    clean = encoded_state(encoding, amps)
    spec = CollectiveDephasingSpec(tuple(range(clean.num_qubits)), distribution)
    out = np.empty(num_samples)
    for k in range(num_samples):
        noisy = apply_collective_dephasing(clean, spec, rng)
        out[k] = fidelity_up_to_global_phase(noisy, clean)
    return out


def fidelity_under_dephasing(
    encoding: str,
    amps: LogicalAmplitudes,
    distribution: AngleDistribution,
    num_samples: int,
    seed: int,
) -> float:
    """Monte-Carlo mean fidelity of a ``dfs`` or ``bare`` qubit under collective dephasing.

    The dephasing acts on every physical qubit of the encoding.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    rng = np.random.default_rng(seed)
    return float(fidelity_samples(encoding, amps, distribution, num_samples, rng).mean())


def dfs_weight_under_errors(
    amps: LogicalAmplitudes,
    errors: Sequence[ErrorOperatorSpec],
    num_samples: int,
    rng: np.random.Generator,
) -> np.ndarray:
    clean = encode_logical(amps)
    out = np.empty(num_samples)
    for k in range(num_samples):
        s = clean
        for e in errors:
            s, _ = apply_error_operator(s, e, rng)
        out[k] = dfs_weight(s, [(0, 1)])
    return out
