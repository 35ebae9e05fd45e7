#!/usr/bin/env python3
"""Re-derive the C-R correction angles from the density oracle and compare with the table.

For each (P1, P2) cell, dressed outcome and random phase pair, the oracle
reads the R_z angles that turn the uncorrected branch into CZ; the script
prints the worst phase mismatch per cell.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from itertools import product

import numpy as np

from dfs_sim.oracle import derive_cr_correction
from dfs_sim.protocols import TABLE_1, PhaseParams


@dataclass(frozen=True)
class TableCheckConfig:
    draws: int = 100
    seed: int = 0
    tol: float = 1e-10


def _gap(a: float, b: float) -> float:
    return float(abs(np.exp(1j * a) - np.exp(1j * b)))


def check(cfg: TableCheckConfig) -> dict[tuple[int, int], float]:
    rng = np.random.default_rng(cfg.seed)
    worst = {cell: 0.0 for cell in product((0, 1), (0, 1))}
    for _ in range(cfg.draws):
        ph = PhaseParams(*rng.uniform(0, 2 * np.pi, 2))
        for cell, dressed in product(worst, "+-"):
            got = derive_cr_correction(*cell, ph, dressed)
            want = TABLE_1[cell](ph)
            worst[cell] = max(worst[cell], _gap(got[0], want[0]), _gap(got[1], want[1]))
    return worst


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--draws", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    cfg = TableCheckConfig(args.draws, args.seed)
    worst = check(cfg)
    for (p1, p2), gap in worst.items():
        print(f"P1={p1} P2={p2}  max |e^(i derived) - e^(i table)| = {gap:.3e}  {'ok' if gap < cfg.tol else 'MISMATCH'}")
    return 0 if all(g < cfg.tol for g in worst.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
