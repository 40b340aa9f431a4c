"""Running testers by name, repeatedly, over a deterministic worker pool."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .amplitude import AEConfig, run_ae_tester, run_baseline_tester
from .oracle import FORWARD_ONLY, FULL_ACCESS, AccessFlags, EvolutionOracle
from .pauli import PauliSum
from .seeding import SeedLike, substream
from .trotter import TestSpec, run_tester
from .verdict import Verdict

TESTERS = ("trotter", "ae", "baseline")
WORKERS_ENV = "HAMLOCAL_WORKERS"


def default_workers() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


def default_access(tester: str) -> AccessFlags:
    return FULL_ACCESS if tester == "ae" else FORWARD_ONLY


@dataclass(frozen=True)
class RunRequest:
    tester: str
    hamiltonian: PauliSum
    spec: TestSpec
    seed: SeedLike
    c: float = 1.0
    ae_mode: str = "kernel"
    access: AccessFlags | None = None


def run_once(req: RunRequest) -> Verdict:
    if req.tester not in TESTERS:
        raise ValueError(f"unknown tester {req.tester!r}")
    oracle = EvolutionOracle(req.hamiltonian, req.access or default_access(req.tester))
    if req.tester == "trotter":
        return run_tester(oracle, req.spec, req.seed)
    cfg = AEConfig.from_spec(req.spec, req.c)
    if req.tester == "ae":
        return run_ae_tester(oracle, req.spec, cfg, req.seed, mode=req.ae_mode)
    return run_baseline_tester(oracle, req.spec, cfg, req.seed)


def run_many(requests: list[RunRequest], workers: int = 1) -> list[Verdict]:
    """Results come back in request order whatever the worker count."""
    if workers <= 1 or len(requests) <= 1:
        return [run_once(r) for r in requests]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunk = max(1, len(requests) // (4 * workers))
        return list(pool.map(run_once, requests, chunksize=chunk))


def repeat(
    tester: str,
    hamiltonian: PauliSum,
    spec: TestSpec,
    seed: SeedLike,
    reps: int,
    *,
    workers: int = 1,
    **kwargs,
) -> list[Verdict]:
    """``reps`` independent runs; run ``r`` draws from ``substream(seed, r)``."""
    reqs = [
        RunRequest(tester, hamiltonian, spec, substream(seed, r), **kwargs) for r in range(reps)
    ]
    return run_many(reqs, workers)
