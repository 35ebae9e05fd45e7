"""Detector primitives as projective measurement blocks.

Every block takes an outcome *source*: a ``numpy.random.Generator``
(sample by the Born rule), a bare label (force that outcome), or any
object with a ``pick(block, labels, probs)`` method such as ``Forced``.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Any, Mapping, Protocol, Sequence

import numpy as np

from .logic import LogicalQubit
from .statevector import (
    ZERO_PROB,
    Projector,
    PureState,
    ZeroProbabilityBranch,
    check_projectors,
    collapse,
    outcome_probabilities,
)

PARITY_LABELS = (0, 1)
DETECTOR_LABELS = ("D1", "D2", "leak")
DRESSED_LABELS = ("+", "-")
READOUT_LABELS = ("00", "01", "10", "11")

_S2 = 1 / np.sqrt(2)


class OutcomeSource(Protocol):
    def pick(self, block: str, labels: Sequence[Any], probs: Sequence[float]) -> int: ...


class Sampler:
    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def pick(self, block, labels, probs):
        p = np.clip(np.asarray(probs, dtype=float), 0.0, None)
        # inverse-CDF draw; one uniform per measurement keeps streams reproducible
        u = self.rng.random() * p.sum()
        k = int(np.searchsorted(np.cumsum(p), u, side="right"))
        return min(k, len(p) - 1)


class Forced:
    """Force outcomes by block name; unnamed blocks go to ``fallback`` (or fail)."""

    def __init__(self, outcomes: Mapping[str, Any], fallback: OutcomeSource | None = None):
        self.outcomes = dict(outcomes)
        self.fallback = fallback

    def pick(self, block, labels, probs):
        if block in self.outcomes:
            return label_index(labels, self.outcomes[block])
        if self.fallback is None:
            raise KeyError(f"no forced outcome for block {block!r}")
        return self.fallback.pick(block, labels, probs)


class _Always:
    def __init__(self, label):
        self.label = label

    def pick(self, block, labels, probs):
        return label_index(labels, self.label)


def label_index(labels: Sequence[Any], label: Any) -> int:
    for i, lab in enumerate(labels):
        if lab == label or str(lab) == str(label):
            return i
    raise ValueError(f"{label!r} is not one of {list(labels)}")


def as_source(source) -> OutcomeSource:
    if isinstance(source, np.random.Generator):
        return Sampler(source)
    if hasattr(source, "pick"):
        return source
    if source is None:
        raise ValueError("an rng or a forced outcome is required")
    return _Always(source)


def _run(state, projectors, labels, source, block):
    # block projector sets are cached and were validated when built
    probs = outcome_probabilities(state, projectors, check=False)
    k = as_source(source).pick(block, labels, probs)
    if probs[k] < ZERO_PROB:
        raise ZeroProbabilityBranch(
            f"{block}: outcome {labels[k]!r} has probability {probs[k]:.3g}"
        )
    return k, probs[k], collapse(state, projectors[k], probs[k])


def _pair_projectors(support, vector_sets) -> tuple[Projector, ...]:
    basis = np.eye(4, dtype=complex)
    projs = tuple(Projector.onto(support, [sum(c * basis[i] for i, c in vs) for vs in vecs])
                  for vecs in vector_sets)
    check_projectors(max(support) + 1, projs)
    return projs


@lru_cache(maxsize=None)
def parity_projectors(a: int, b: int) -> tuple[Projector, ...]:
    """[antiparallel (P=0), aligned (P=1)] on qubits a, b."""
    return _pair_projectors(
        (a, b),
        [
            [[(0b01, 1)], [(0b10, 1)]],
            [[(0b00, 1)], [(0b11, 1)]],
        ],
    )


def parity_check(
    state: PureState,
    a: int,
    b: int,
    source,
    block: str = "P",
    misreport: float = 0.0,
) -> tuple[int, float, PureState]:
    """Charge-parity detection: 1 iff spins a and b are aligned.

    ``misreport`` flips the *reported* value with that probability while the
    state is still projected on the true sector.  It only acts when the
    outcome is sampled.
    """
    if a == b:
        raise ValueError("parity check needs two distinct qubits")
    k, p, post = _run(state, parity_projectors(a, b), PARITY_LABELS, source, block)
    if misreport > 0.0 and isinstance(source, (Sampler, np.random.Generator)):
        rng = source.rng if isinstance(source, Sampler) else source
        if rng.random() < misreport:
            k = 1 - k
    return PARITY_LABELS[k], p, post


@lru_cache(maxsize=None)
def detector_projectors(pair: LogicalQubit) -> tuple[Projector, ...]:
    return _pair_projectors(
        tuple(pair),
        [
            [[(0b01, _S2), (0b10, _S2)]],
            [[(0b01, _S2), (0b10, -_S2)]],
            [[(0b00, 1)], [(0b11, 1)]],
        ],
    )


def detector_D(state: PureState, pair: LogicalQubit, source, block: str = "D") -> tuple[str, float, PureState]:
    """D1 clicks for (|01>+|10>)/sqrt2, D2 for (|01>-|10>)/sqrt2, 'leak' for parallel spins."""
    pair = LogicalQubit.of(pair)
    k, p, post = _run(state, detector_projectors(tuple(pair)), DETECTOR_LABELS, source, block)
    return DETECTOR_LABELS[k], p, post


@lru_cache(maxsize=None)
def dressed_projectors(q: int) -> tuple[Projector, ...]:
    plus = np.array([1, 1], dtype=complex) * _S2
    minus = np.array([1, -1], dtype=complex) * _S2
    projs = (Projector.onto((q,), [plus]), Projector.onto((q,), [minus]))
    check_projectors(q + 1, projs)
    return projs


def dressed_measure(state: PureState, q: int, source, block: str = "dressed") -> tuple[str, float, PureState]:
    k, p, post = _run(state, dressed_projectors(q), DRESSED_LABELS, source, block)
    return DRESSED_LABELS[k], p, post


@lru_cache(maxsize=None)
def readout_projectors(pair: LogicalQubit) -> tuple[Projector, ...]:
    return _pair_projectors(tuple(pair), [[[(i, 1)]] for i in range(4)])


def readout_pair(state: PureState, pair: LogicalQubit, source, block: str = "readout") -> tuple[str, float, PureState]:
    pair = LogicalQubit.of(pair)
    k, p, post = _run(state, readout_projectors(tuple(pair)), READOUT_LABELS, source, block)
    return READOUT_LABELS[k], p, post
