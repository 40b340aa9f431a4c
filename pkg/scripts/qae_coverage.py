"""Empirical coverage of the kernel-mode amplitude estimate across eta.

    python3 scripts/qae_coverage.py --eps2 0.6 --draws 10000
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

import numpy as np

from hamlocal.amplitude import AEConfig, qae_grid_size, qae_outcome_law
from hamlocal.seeding import generator


@dataclass
class CoverageConfig:
    eps1: float = 0.0
    eps2: float = 0.6
    c: float = 1.0
    draws: int = 10_000
    seed: int = 0
    points: int = 11


def coverage_table(cfg: CoverageConfig) -> list[tuple[float, int, float]]:
    xi = AEConfig(cfg.eps1, cfg.eps2, cfg.c).xi
    rows = []
    for j, eta in enumerate(np.linspace(0, 1, cfg.points)):
        M = qae_grid_size(eta, xi)
        probs, est = qae_outcome_law(eta, M)
        y = generator(cfg.seed, j).choice(M, size=cfg.draws, p=probs)
        rows.append((float(eta), M, float(np.mean(np.abs(est[y] - eta) <= xi))))
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps1", type=float, default=0.0)
    ap.add_argument("--eps2", type=float, default=0.6)
    ap.add_argument("--draws", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    cfg = CoverageConfig(eps1=a.eps1, eps2=a.eps2, draws=a.draws, seed=a.seed)
    print(f"target level 8/pi^2 = {8 / math.pi**2:.4f}")
    print("eta,grid_size,coverage")
    for eta, M, cov in coverage_table(cfg):
        print(f"{eta:.2f},{M},{cov:.4f}")


if __name__ == "__main__":
    main()
