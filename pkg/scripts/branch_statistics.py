#!/usr/bin/env python3
"""Sampled outcome frequencies vs enumerated branch probabilities for one protocol."""
from __future__ import annotations

import argparse
import sys
from collections import Counter
from dataclasses import dataclass

import numpy as np

from dfs_sim.oracle import enumerate_branches
from dfs_sim.protocols import PROTOCOLS, PhaseParams, ProtocolSpec, run_protocol_sampled


@dataclass(frozen=True)
class BranchStatsConfig:
    protocol: str = "cr-block"
    runs: int = 10_000
    seed: int = 0
    phi_t: float = 0.7
    phi_tp: float = 1.3


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--protocol", choices=PROTOCOLS, default="cr-block")
    ap.add_argument("--runs", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    cfg = BranchStatsConfig(args.protocol, args.runs, args.seed)

    spec = ProtocolSpec(cfg.protocol, phases=PhaseParams(cfg.phi_t, cfg.phi_tp))
    rng = np.random.default_rng(cfg.seed)
    v = rng.normal(size=2**spec.num_logical) + 1j * rng.normal(size=2**spec.num_logical)
    v /= np.linalg.norm(v)
    expected = enumerate_branches(spec, v).probabilities()
    counts = Counter(run_protocol_sampled(spec, v, (cfg.seed + 1) * cfg.runs + k).record.key() for k in range(cfg.runs))
    worst = 0.0
    print(f"{'branch':60s} {'p':>8s} {'freq':>8s} {'z':>6s}")
    for key, p in sorted(expected.items()):
        f = counts.get(key, 0) / cfg.runs
        z = (f - p) / np.sqrt(p * (1 - p) / cfg.runs) if 0 < p < 1 else 0.0
        worst = max(worst, abs(z))
        label = " ".join(f"{b}={o}" for b, o in key)
        print(f"{label:60s} {p:8.5f} {f:8.5f} {z:6.2f}")
    print(f"worst |z| = {worst:.2f} over {len(expected)} branches")
    return 0 if worst <= 3 else 1


if __name__ == "__main__":
    sys.exit(main())
