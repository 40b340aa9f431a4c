"""Trotterized post-selection locality tester (forward evolution only).

One primitive run starts at |sigma_I>, alternates m short forward evolutions
with the two-outcome measurement {Pi_D, I - Pi_D} (aborting on the second
outcome), and finally measures in the Bell basis: 0 for sigma_I, 1 otherwise.
The tester repeats the primitive until it has ``s`` non-aborted runs (at most
``s'`` attempts) and declares "far" when the number of ones reaches s * tau.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .bell import (
    IDENTITY_INDEX,
    DoubledState,
    ProjectorD,
    project_D,
    sample_index,
    sigma_identity,
)
from .linalg import evolve
from .oracle import EvolutionOracle
from .pauli import PauliSum
from .seeding import SeedLike, substream
from .verdict import Decision, Verdict

_CEIL_SLACK = 1e-9


def _ceil(x: float) -> int:
    return math.ceil(x - _CEIL_SLACK)


@dataclass(frozen=True)
class TestSpec:
    __test__ = False  # not a pytest class

    eps1: float
    eps2: float
    delta: float
    k: int

    def __post_init__(self):
        if not 0 <= self.eps1 < self.eps2 <= 1:
            raise ValueError(f"need 0 <= eps1 < eps2 <= 1, got ({self.eps1}, {self.eps2})")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.k < 0:
            raise ValueError("k must be non-negative")


@dataclass(frozen=True)
class Schedule:
    eps1: float
    eps2: float
    delta: float
    alpha: float  # nominal step (eps2^2 - eps1^2) / (100 eps2)
    t: float  # total evolution per primitive run
    m: int  # number of steps, ceil of the nominal t / alpha
    alpha_eff: float  # step actually used, t / m <= alpha
    s: int  # successful runs needed
    s_prime: int  # run budget
    upsilon: float
    lam: float
    tau: float
    xi: float

    @property
    def time_bound(self) -> float:
        gap = self.eps2 - self.eps1
        return 79 * math.sqrt(self.eps2 / gap**5) * math.log(2 / self.delta)

    @property
    def query_bound(self) -> float:
        gap = self.eps2 - self.eps1
        return 7850 * math.sqrt(self.eps2 / gap**7) * math.log(2 / self.delta)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["time_bound"] = self.time_bound
        out["query_bound"] = self.query_bound
        return out


def _upsilon(eps: float, alpha: float, t: float) -> float:
    return eps**2 * t**2 * (1 - t**2 / 10 - 13 / 50 * eps**2 * t**2) - 3.5 * eps * alpha * t**2


def _lambda(eps: float, eps2: float, alpha: float, t: float) -> float:
    return eps**2 * t**2 * (1 + t**2 / 10) + 287 / 80 * eps * alpha * t**2 + 49 / 1600 * eps2 * alpha * t**2


def plan_schedule(spec: TestSpec) -> Schedule:
    e1, e2 = spec.eps1, spec.eps2
    diff2 = e2**2 - e1**2
    alpha = diff2 / (100 * e2)
    t = math.sqrt(diff2) / (2 * e2)
    m = _ceil(50 / math.sqrt(diff2))
    alpha_eff = t / m
    ratio = e2**4 / diff2**3 * math.log(2 / spec.delta)
    s = _ceil(78 * ratio)
    s_prime = _ceil(157 * ratio)
    ups = _upsilon(e2, alpha_eff, t)
    lam = _lambda(e1, e2, alpha_eff, t)
    return Schedule(
        eps1=e1, eps2=e2, delta=spec.delta, alpha=alpha, t=t, m=m,
        alpha_eff=alpha_eff, s=s, s_prime=s_prime, upsilon=ups, lam=lam,
        tau=(ups + lam) / 2, xi=(ups - lam) / 2,
    )


def conditional_acceptance_bounds(eps: float, sched: Schedule) -> tuple[float, float]:
    """Interval containing Pr[output 1 | no abort] when ||H_{>k}||_2 = eps."""
    lo = max(0.0, _upsilon(eps, sched.alpha_eff, sched.t))
    hi = _lambda(eps, sched.eps2, sched.alpha_eff, sched.t)
    return lo, hi


class TrialOutcome(enum.IntEnum):
    ABORT = -1
    ZERO = 0
    ONE = 1


def run_primitive(
    oracle: EvolutionOracle, proj: ProjectorD, sched: Schedule, rng: np.random.Generator
) -> TrialOutcome:
    """One literal run of the primitive, measurement by measurement.

    Draws ``m + 1`` uniforms up front (one per post-selection, one for the
    final Bell measurement) so the batched engine can replay the same stream.
    """
    u = rng.random(sched.m + 1)
    phi = sigma_identity(oracle.n)
    for step in range(sched.m):
        phi = oracle.query(phi, sched.alpha_eff)
        s_in, p_in = project_D(phi, proj)
        if not u[step] < p_in:
            return TrialOutcome.ABORT
        phi = s_in * (1.0 / math.sqrt(p_in))
    idx = int(sample_index(phi, u[sched.m]))
    return TrialOutcome.ZERO if idx == IDENTITY_INDEX else TrialOutcome.ONE


def run_trials(
    oracle: EvolutionOracle,
    proj: ProjectorD,
    sched: Schedule,
    seeds: list[np.random.SeedSequence],
) -> np.ndarray:
    """Batched primitive runs, one per seed, outcome-identical to
    :func:`run_primitive` with ``np.random.default_rng(seed)``.

    All surviving runs hold the same post-selected state at each step, so
    the state is evolved once per step and the oracle is charged once per
    surviving run.
    """
    m = sched.m
    if not seeds:
        return np.zeros(0, dtype=int)
    u = np.stack([np.random.default_rng(ss).random(m + 1) for ss in seeds])
    alive = np.ones(len(seeds), dtype=bool)
    outcome = np.full(len(seeds), int(TrialOutcome.ABORT))
    phi = sigma_identity(oracle.n)
    for step in range(m):
        n_alive = int(alive.sum())
        if n_alive == 0:
            return outcome
        phi = oracle.query(phi, sched.alpha_eff, repeat=n_alive)
        s_in, p_in = project_D(phi, proj)
        alive &= u[:, step] < p_in
        if p_in > 0:
            phi = s_in * (1.0 / math.sqrt(p_in))
    if alive.any():
        idx = sample_index(phi, u[alive, m])
        outcome[alive] = np.where(idx == IDENTITY_INDEX, int(TrialOutcome.ZERO), int(TrialOutcome.ONE))
    return outcome


def run_tester(
    oracle: EvolutionOracle,
    spec: TestSpec,
    seed: SeedLike,
    *,
    schedule: Schedule | None = None,
    early_stop: bool = True,
) -> Verdict:
    """Repeat the primitive and threshold the tally of ones.

    Run ``i`` uses stream ``substream(seed, i)``.  With ``early_stop`` the
    tester stops issuing runs once ``s`` have succeeded; batches are never
    larger than the number still needed, so no run past that point is charged.
    """
    sched = schedule or plan_schedule(spec)
    proj = ProjectorD(oracle.n, spec.k)
    outcomes: list[np.ndarray] = []
    issued = successes = 0
    while issued < sched.s_prime and (successes < sched.s or not early_stop):
        size = sched.s_prime - issued
        if early_stop:
            size = min(size, sched.s - successes)
        seeds = [substream(seed, i) for i in range(issued, issued + size)]
        batch = run_trials(oracle, proj, sched, seeds)
        outcomes.append(batch)
        issued += size
        successes += int(np.sum(batch != TrialOutcome.ABORT))
    all_out = np.concatenate(outcomes) if outcomes else np.zeros(0, dtype=int)
    ok = all_out[all_out != TrialOutcome.ABORT][: sched.s]
    tally = int(np.sum(ok == TrialOutcome.ONE))
    threshold = sched.s * sched.tau
    if ok.size < sched.s:
        decision = Decision.INCONCLUSIVE
    elif tally >= threshold:  # equality decides "far"
        decision = Decision.FAR
    else:
        decision = Decision.LOCAL
    return Verdict(
        tester="trotter",
        decision=decision,
        statistic=tally,
        threshold=threshold,
        transcript=oracle.transcript.to_dict(),
        details={
            "runs": int(all_out.size),
            "successes": int(np.sum(all_out != TrialOutcome.ABORT)),
            "aborts": int(np.sum(all_out == TrialOutcome.ABORT)),
            "schedule": sched.to_dict(),
        },
    )


# White-box exact mode.  These take the Hamiltonian directly.


@dataclass
class PrimitiveExact:
    p_abort: float
    p_zero: float
    p_one: float
    final_state: DoubledState | None
    step_success: list[float] = field(default_factory=list)

    @property
    def conditional_one(self) -> float:
        survive = 1.0 - self.p_abort
        return self.p_one / survive if survive > 0 else float("nan")


def primitive_probabilities(h: PauliSum, proj: ProjectorD, sched: Schedule) -> PrimitiveExact:
    """Exact (abort, zero, one) probabilities of one primitive run.

    Propagates the unnormalized vector (Pi_D (I (x) U))^r |sigma_I>, whose
    squared norm is the probability of surviving r post-selections.
    """
    U = evolve(h, sched.alpha_eff)
    v = sigma_identity(h.n)
    survive = 1.0
    steps = []
    for _ in range(sched.m):
        v, mass = project_D(v.apply_right(U), proj)
        steps.append(mass / survive if survive > 0 else 0.0)
        survive = mass
    p_zero = float(abs(v.coeffs[IDENTITY_INDEX]) ** 2)
    p_one = max(survive - p_zero, 0.0)
    final = v * (1.0 / math.sqrt(survive)) if survive > 0 else None
    return PrimitiveExact(1.0 - survive, p_zero, p_one, final, steps)


def exact_tester_report(h: PauliSum, spec: TestSpec, schedule: Schedule | None = None) -> dict:
    """Exact outcome law of the tester for a known Hamiltonian."""
    sched = schedule or plan_schedule(spec)
    prim = primitive_probabilities(h, ProjectorD(h.n, spec.k), sched)
    p1 = prim.conditional_one
    cut = math.ceil(sched.s * sched.tau - 1e-12)
    p_far = float(stats.binom.sf(cut - 1, sched.s, p1)) if p1 == p1 else 0.0
    p_short = float(stats.binom.cdf(sched.s - 1, sched.s_prime, 1.0 - prim.p_abort))
    return {
        "p_abort": prim.p_abort,
        "p_zero": prim.p_zero,
        "p_one": prim.p_one,
        "conditional_one": p1,
        "tau": sched.tau,
        "exact_decision": (Decision.FAR if p1 >= sched.tau else Decision.LOCAL).value,
        "prob_far_given_enough_successes": p_far,
        "prob_inconclusive": p_short,
        "schedule": sched.to_dict(),
    }
