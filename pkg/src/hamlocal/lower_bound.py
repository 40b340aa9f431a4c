"""The diagonal hard pair H1 = eps1 Z_{1:k'}, H2 = eps2 Z_{1:k'}.

Their evolutions differ by a relative phase only, so the phase-minimized
spectral distance has a closed form and grows linearly in t.  The sweep
below runs the testers on such pairs and records how much evolution time
each needs; an impossibility result cannot be demonstrated by simulation,
so these curves only show consistency with it.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .harness import RunRequest, run_many
from .linalg import diamond_interval, evolve, min_phase_spectral_distance
from .pauli import HamiltonianSpec, validate_hamiltonian, z_chain
from .seeding import SeedLike, substream
from .trotter import TestSpec
from .verdict import Decision

CSV_COLUMNS = ["gap", "tester", "mean_time", "mean_queries", "success_rate", "fitted_exponent"]


@dataclass(frozen=True)
class ZChainPair:
    n: int
    kprime: int
    eps1: float
    eps2: float

    def __post_init__(self):
        if not 0 <= self.eps1 <= self.eps2 <= 1:
            raise ValueError("need 0 <= eps1 <= eps2 <= 1")
        if not 1 <= self.kprime <= self.n:
            raise ValueError("need 1 <= k' <= n")

    def hamiltonian(self, eps: float) -> HamiltonianSpec:
        return validate_hamiltonian([(z_chain(self.n, self.kprime), eps)])

    @property
    def h1(self) -> HamiltonianSpec:
        return self.hamiltonian(self.eps1)

    @property
    def h2(self) -> HamiltonianSpec:
        return self.hamiltonian(self.eps2)


def diagonal_pair_distance(eps1: float, eps2: float, t: float) -> float:
    """Closed-form min over theta of ||e^{i theta} U1 - U2||_inf for the pair."""
    half = (eps2 - eps1) * t / 2
    return 2 * min(abs(math.sin(half)), abs(math.cos(half)))


def check_diagonal_pair(pair: ZChainPair, ts, *, tol: float = 1e-9) -> list[dict]:
    rows = []
    gap = pair.eps2 - pair.eps1
    for t in ts:
        U1 = evolve(pair.h1, t)
        U2 = evolve(pair.h2, t)
        closed = diagonal_pair_distance(pair.eps1, pair.eps2, t)
        generic = min_phase_spectral_distance(U1, U2)
        lo, hi = diamond_interval(U1, U2)
        rows.append({
            "t": t,
            "closed_form": closed,
            "generic": generic,
            "agree": abs(generic - closed) <= tol,
            "linear_ok": closed <= gap * abs(t) + tol,
            "diamond_hi": hi,
            "diamond_ok": hi <= 2 * gap * abs(t) + tol,
        })
    return rows


def fit_exponent(gaps, values) -> float:
    """Least-squares slope of log(value) against log(gap)."""
    slope, _ = np.polyfit(np.log(np.asarray(gaps, float)), np.log(np.asarray(values, float)), 1)
    return float(slope)


@dataclass
class SweepResult:
    tester: str
    rows: list[dict] = field(default_factory=list)
    exponent: float = float("nan")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([repr(r["gap"]), self.tester, repr(r["mean_time"]),
                        repr(r["mean_queries"]), repr(r["success_rate"]), ""])
        w.writerow(["fit", self.tester, "", "", "", repr(self.exponent)])
        return buf.getvalue()


def distinguishability_experiment(
    tester: str,
    eps1: float,
    eps2_values,
    *,
    n: int = 3,
    k: int = 1,
    kprime: int = 2,
    reps: int = 200,
    delta: float = 1 / 3,
    seed: SeedLike = 0,
    workers: int = 1,
    c: float = 1.0,
) -> SweepResult:
    """Run ``tester`` ``reps`` times on each side of every hard pair.

    Success counts "local" on H1 and "far" on H2; time and queries are
    averaged over all 2 * reps runs of a point.
    """
    eps2_values = list(eps2_values)
    reqs = []
    for p, e2 in enumerate(eps2_values):
        pair = ZChainPair(n, kprime, eps1, e2)
        spec = TestSpec(eps1, e2, delta, k)
        for side, h in enumerate((pair.h1, pair.h2)):
            for r in range(reps):
                reqs.append(RunRequest(tester, h, spec, substream(seed, p, side, r), c=c))
    verdicts = run_many(reqs, workers)
    out = SweepResult(tester)
    per_point = 2 * reps
    for p, e2 in enumerate(eps2_values):
        chunk = verdicts[p * per_point:(p + 1) * per_point]
        correct = sum(v.decision == Decision.LOCAL for v in chunk[:reps])
        correct += sum(v.decision == Decision.FAR for v in chunk[reps:])
        out.rows.append({
            "gap": e2 - eps1,
            "mean_time": float(np.mean([v.total_time for v in chunk])),
            "mean_queries": float(np.mean([v.queries for v in chunk])),
            "success_rate": correct / per_point,
            "min_time": float(min(v.total_time for v in chunk)),
        })
    if len(out.rows) >= 2:
        out.exponent = fit_exponent([r["gap"] for r in out.rows], [r["mean_time"] for r in out.rows])
    return out
