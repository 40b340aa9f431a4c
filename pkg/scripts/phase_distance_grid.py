"""Closed-form vs numerically minimized phase distance on the diagonal pairs,
written as CSV for plotting elsewhere.

    python3 scripts/phase_distance_grid.py > grid.csv
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field

from hamlocal.lower_bound import ZChainPair, check_diagonal_pair


@dataclass
class GridConfig:
    n: int = 3
    kprime: int = 2
    eps: list[float] = field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    ts: list[float] = field(default_factory=lambda: [round(0.1 * i, 10) for i in range(1, 31)])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--kprime", type=int, default=2)
    a = ap.parse_args()
    cfg = GridConfig(n=a.n, kprime=a.kprime)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["eps1", "eps2", "t", "closed_form", "generic", "diamond_hi"])
    for e1 in cfg.eps:
        for e2 in cfg.eps:
            if e2 < e1:
                continue
            for r in check_diagonal_pair(ZChainPair(cfg.n, cfg.kprime, e1, e2), cfg.ts):
                w.writerow([e1, e2, r["t"], r["closed_form"], r["generic"], r["diamond_hi"]])


if __name__ == "__main__":
    main()
