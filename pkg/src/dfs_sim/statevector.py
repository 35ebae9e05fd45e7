"""Dense pure-state primitives over a register of physical spin qubits.

Basis index bit k (most-significant first) is the spin of qubit k, with
0 = spin up and 1 = spin down, so ``|0101>`` reads left to right as
qubits 0..3.  States are immutable; every operation returns a new one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

NORM_TOL = 1e-12
PROB_TOL = 1e-10
ZERO_PROB = 1e-12

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def rz(theta: float) -> np.ndarray:
    """Phase rotation diag(1, e^{i theta}): leaves |0> alone, multiplies |1>."""
    return np.array([[1, 0], [0, np.exp(1j * theta)]], dtype=complex)


class ZeroProbabilityBranch(ValueError):
    """A forced measurement outcome has (numerically) zero probability."""


class EntangledDiscardError(ValueError):
    """Tried to drop a qubit that is still entangled with the rest."""


@dataclass(frozen=True, eq=False)
class PureState:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.num_qubits < 1:
            raise ValueError("register needs at least one qubit")
        if amps.size != 2**self.num_qubits:
            raise ValueError(
                f"expected {2**self.num_qubits} amplitudes, got {amps.size}"
            )
        norm2 = np.vdot(amps, amps).real
        if abs(norm2 - 1.0) > 2 * NORM_TOL:
            raise ValueError(f"state not normalized (norm={np.sqrt(norm2)!r})")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, vec, normalize: bool = False) -> "PureState":
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        n = int(round(np.log2(vec.size)))
        if normalize:
            vec = vec / np.linalg.norm(vec)
        return cls(n, vec)

    @property
    def dim(self) -> int:
        return 2**self.num_qubits

    def tensor(self, other: "PureState") -> "PureState":
        return PureState(
            self.num_qubits + other.num_qubits,
            np.kron(self.amplitudes, other.amplitudes),
        )

    def amplitude(self, bits: str) -> complex:
        return complex(self.amplitudes[int(bits, 2)])

    def __repr__(self) -> str:
        terms = [
            f"({a.real:+.4f}{a.imag:+.4f}j)|{i:0{self.num_qubits}b}>"
            for i, a in enumerate(self.amplitudes)
            if abs(a) > 1e-9
        ]
        return "PureState(" + " ".join(terms) + ")"


@dataclass(frozen=True, eq=False)
class Projector:
    """Projector acting on ``support`` (in the listed qubit order)."""

    support: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        k = len(self.support)
        if m.shape != (2**k, 2**k):
            raise ValueError("projector shape does not match its support")
        if not (
            np.allclose(m, m.conj().T, atol=NORM_TOL)
            and np.allclose(m @ m, m, atol=NORM_TOL)
        ):
            raise ValueError("matrix is not an orthogonal projector")
        object.__setattr__(self, "support", tuple(int(q) for q in self.support))
        object.__setattr__(self, "matrix", m)

    @classmethod
    def onto(cls, support: Sequence[int], vectors) -> "Projector":
        """Projector onto the span of orthonormal ``vectors``."""
        vs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
        dim = 2 ** len(support)
        m = np.zeros((dim, dim), dtype=complex)
        for v in vs:
            m += np.outer(v, v.conj())
        return cls(tuple(support), m)


def new_basis_state(num_qubits: int, bits: str) -> PureState:
    if len(bits) != num_qubits or set(bits) - {"0", "1"}:
        raise ValueError(f"bit string {bits!r} does not describe {num_qubits} qubits")
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[int(bits, 2)] = 1.0
    return PureState(num_qubits, amps)


def _check_qubits(n: int, qubits: Sequence[int]) -> None:
    for q in qubits:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n}-qubit register")
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"repeated qubit in {tuple(qubits)}")


def _apply_on(amps: np.ndarray, n: int, op: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    # op is (2^k x 2^k) on ``qubits`` in the given order; no unitarity assumed.
    k = len(qubits)
    if k == 1:
        psi = amps.reshape(2 ** qubits[0], 2, -1)
        out = np.empty_like(psi)
        out[:, 0] = op[0, 0] * psi[:, 0] + op[0, 1] * psi[:, 1]
        out[:, 1] = op[1, 0] * psi[:, 0] + op[1, 1] * psi[:, 1]
        return out.reshape(-1)
    axes = list(qubits) + [q for q in range(n) if q not in qubits]
    psi = amps.reshape([2] * n).transpose(axes).reshape(2**k, -1)
    psi = (op @ psi).reshape([2] * n)
    return psi.transpose(np.argsort(axes)).reshape(-1)


_UNITARY_SEEN: dict[bytes, bool] = {}


def is_unitary(u: np.ndarray, tol: float = NORM_TOL) -> bool:
    u = np.asarray(u)
    if u.size <= 16 and tol == NORM_TOL:
        key = u.astype(complex).tobytes()
        if key not in _UNITARY_SEEN:
            if len(_UNITARY_SEEN) > 4096:
                _UNITARY_SEEN.clear()
            _UNITARY_SEEN[key] = _is_unitary(u, tol)
        return _UNITARY_SEEN[key]
    return _is_unitary(u, tol)


def _is_unitary(u: np.ndarray, tol: float) -> bool:
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()) <= tol


def apply_unitary(state: PureState, u: np.ndarray, qubits: Sequence[int]) -> PureState:
    qubits = tuple(qubits)
    _check_qubits(state.num_qubits, qubits)
    u = np.asarray(u, dtype=complex)
    if u.shape != (2 ** len(qubits),) * 2 or not is_unitary(u):
        raise ValueError("operator is not a unitary of the right size")
    return PureState(state.num_qubits, _apply_on(state.amplitudes, state.num_qubits, u, qubits))


def apply_1q(state: PureState, u: np.ndarray, q: int) -> PureState:
    if np.asarray(u).shape != (2, 2):
        raise ValueError("single-qubit unitary must be 2x2")
    return apply_unitary(state, u, (q,))


def outcome_probabilities(
    state: PureState, projectors: Sequence[Projector], check: bool = True
) -> list[float]:
    if check:
        check_projectors(state.num_qubits, projectors)
    else:
        _check_qubits(state.num_qubits, projectors[0].support)
    probs = []
    for p in projectors:
        v = _apply_on(state.amplitudes, state.num_qubits, p.matrix, p.support)
        probs.append(float(np.vdot(v, v).real))
    return probs


def check_projectors(n: int, projectors: Sequence[Projector]) -> None:
    if not projectors:
        raise ValueError("empty measurement")
    support = projectors[0].support
    _check_qubits(n, support)
    if any(p.support != support for p in projectors):
        raise ValueError("all projectors of one measurement must share a support")
    total = sum(p.matrix for p in projectors)
    if not np.allclose(total, np.eye(total.shape[0]), atol=PROB_TOL):
        raise ValueError("projectors do not resolve the identity")


def measure_projective(
    state: PureState,
    projectors: Sequence[Projector],
    rng: np.random.Generator | None = None,
    outcome: int | None = None,
) -> tuple[int, float, PureState]:
    """Born-rule measurement.  Pass ``outcome`` to force a branch, else ``rng`` samples one."""
    probs = outcome_probabilities(state, projectors)
    if outcome is None:
        if rng is None:
            raise ValueError("need either an rng or a forced outcome")
        p = np.clip(np.asarray(probs), 0.0, None)
        outcome = int(rng.choice(len(p), p=p / p.sum()))
    if not 0 <= outcome < len(projectors):
        raise IndexError(f"outcome {outcome} not in measurement")
    prob = probs[outcome]
    return outcome, prob, collapse(state, projectors[outcome], prob)


def collapse(state: PureState, projector: Projector, prob: float) -> PureState:
    """Post-measurement state for a branch whose Born probability is ``prob``."""
    if prob < ZERO_PROB:
        raise ZeroProbabilityBranch(f"branch has probability {prob:.3g}")
    v = _apply_on(state.amplitudes, state.num_qubits, projector.matrix, projector.support)
    return PureState(state.num_qubits, v / np.sqrt(prob))


def reduced_density(state: PureState, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on ``keep`` (basis ordered as ``keep`` is listed)."""
    keep = tuple(keep)
    _check_qubits(state.num_qubits, keep)
    n = state.num_qubits
    psi = state.amplitudes.reshape([2] * n)
    rest = [q for q in range(n) if q not in keep]
    psi = np.transpose(psi, list(keep) + rest).reshape(2 ** len(keep), -1)
    return psi @ psi.conj().T


def discard_qubit(state: PureState, q: int) -> PureState:
    return discard_qubits(state, (q,))


def discard_qubits(state: PureState, qubits: Sequence[int]) -> PureState:
    """Drop a group of qubits that is in a product state with the rest of the register.

    Indices above the removed ones shift down.
    """
    qubits = tuple(qubits)
    _check_qubits(state.num_qubits, qubits)
    n, k = state.num_qubits, len(qubits)
    if k >= n:
        raise ValueError("cannot discard the whole register")
    rho = reduced_density(state, qubits)
    purity = float(np.trace(rho @ rho).real)
    if purity < 1 - PROB_TOL:
        raise EntangledDiscardError(
            f"qubits {qubits} are entangled with the register (reduced purity {purity:.6f})"
        )
    _, vecs = np.linalg.eigh(rho)
    v = vecs[:, -1]
    rest = [q for q in range(n) if q not in qubits]
    psi = np.transpose(state.amplitudes.reshape([2] * n), rest + list(qubits))
    remaining = psi.reshape(2 ** (n - k), 2**k) @ v.conj()
    return PureState(n - k, remaining / np.linalg.norm(remaining))


def permute_qubits(state: PureState, order: Sequence[int]) -> PureState:
    """New register whose qubit k is old qubit ``order[k]``."""
    order = tuple(order)
    if sorted(order) != list(range(state.num_qubits)):
        raise ValueError("order must be a permutation of the register")
    psi = state.amplitudes.reshape([2] * state.num_qubits)
    return PureState(state.num_qubits, np.transpose(psi, order).reshape(-1))


def fidelity_up_to_global_phase(a: PureState, b: PureState) -> float:
    if a.num_qubits != b.num_qubits:
        raise ValueError("register sizes differ")
    if np.array_equal(a.amplitudes, b.amplitudes):
        return 1.0  # not 1 - eps from an input normalized to within rounding
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes))))
