"""Time-vs-gap curves for all three testers on diagonal hard pairs.

    python3 scripts/scaling_sweep.py --reps 200 --out-dir results/
"""

from __future__ import annotations

import argparse
import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from hamlocal.harness import default_workers
from hamlocal.lower_bound import distinguishability_experiment


@dataclass
class SweepConfig:
    eps1: float = 0.0
    eps2_values: list[float] = field(default_factory=lambda: [0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    testers: tuple[str, ...] = ("trotter", "ae", "baseline")
    n: int = 3
    k: int = 1
    kprime: int = 2
    reps: int = 200
    seed: int = 0
    workers: int = field(default_factory=default_workers)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=SweepConfig.reps)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args()
    cfg = SweepConfig(reps=args.reps, seed=args.seed)
    if args.workers:
        cfg.workers = args.workers
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for tester in cfg.testers:
        res = distinguishability_experiment(
            tester, cfg.eps1, cfg.eps2_values, n=cfg.n, k=cfg.k, kprime=cfg.kprime,
            reps=cfg.reps, seed=cfg.seed, workers=cfg.workers,
        )
        (out / f"sweep_{tester}.csv").write_text(res.to_csv())
        summary[tester] = res.exponent
        print(f"{tester:9s} fitted time exponent {res.exponent:+.3f}")
    cfg_dict = dataclasses.asdict(cfg)
    cfg_dict.pop("workers")
    (out / "sweep_summary.json").write_text(json.dumps({"config": cfg_dict, "exponents": summary},
                                                       indent=2, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
