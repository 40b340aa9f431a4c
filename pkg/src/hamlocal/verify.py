"""Numerical checks of the bounds the testers rely on, with measured values."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .amplitude import locality_thresholds, qae_grid_size, qae_outcome_law, AEConfig
from .bell import (
    ProjectorD,
    bell_matrix,
    dense_A,
    evolve_dense,
    sigma_identity,
)
from .linalg import evolve, spectral_norm
from .lower_bound import ZChainPair, check_diagonal_pair
from .pauli import PauliString, PauliSum, distance_to_klocal, random_pauli_hamiltonian, validate_hamiltonian
from .seeding import generator
from .trotter import Schedule, TestSpec, conditional_acceptance_bounds, plan_schedule, primitive_probabilities

COVERAGE_LEVEL = 8 / math.pi**2


@dataclass
class CheckResult:
    name: str
    anchor: str
    worst: float  # largest measured value (or smallest, for coverage)
    bound: float
    cases: int
    violations: int

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["passed"] = self.passed
        return out


def random_suite(size: int, seed: int, ns=(2, 3, 4), terms: int = 6) -> list[PauliSum]:
    return [
        random_pauli_hamiltonian(ns[i % len(ns)], terms, generator(seed, i)) for i in range(size)
    ]


def truncation_gap(h: PauliSum, k: int, alpha: float) -> float:
    """||Pi_D (I (x) e^{-i alpha H}) Pi_D - e^{-i alpha A}||_inf on range(Pi_D).

    Off that range e^{-i alpha A} is the identity while the left side is zero,
    so both sides are compressed by Pi_D before comparing.
    """
    proj = ProjectorD(h.n, k)
    P = proj.dense()
    lhs = P @ bell_matrix(evolve(h, alpha)) @ P
    rhs = P @ evolve_dense(dense_A(h, proj), alpha) @ P
    return spectral_norm(lhs - rhs)


def final_state_gap(h: PauliSum, k: int, sched: Schedule, reference_t: float | None = None):
    """(p_abort, ||final - e^{-iAt} sigma_I||_2) for one primitive run."""
    proj = ProjectorD(h.n, k)
    prim = primitive_probabilities(h, proj, sched)
    t = sched.t if reference_t is None else reference_t
    target = evolve_dense(dense_A(h, proj), t) @ sigma_identity(h.n).coeffs
    dist = float(np.linalg.norm(prim.final_state.coeffs - target)) if prim.final_state else math.inf
    return prim.p_abort, dist


def trace_identities(h: PauliSum, k: int) -> tuple[float, float]:
    """(|<sI|A|sI>|, |<sI|A^2|sI> - ||H_{>k}||_2^2|)."""
    A = dense_A(h, ProjectorD(h.n, k))
    e = sigma_identity(h.n).coeffs
    first = abs(np.vdot(e, A @ e))
    second = abs(np.vdot(e, A @ (A @ e)) - distance_to_klocal(h, k) ** 2)
    return float(first), float(second)


def qae_coverage(eta: float, xi: float, draws: int, rng: np.random.Generator) -> float:
    M = qae_grid_size(eta, xi)
    probs, est = qae_outcome_law(eta, M)
    y = rng.choice(M, size=draws, p=probs)
    return float(np.mean(np.abs(est[y] - eta) <= xi))


def _collect(name, anchor, values, bounds, *, upper=True) -> CheckResult:
    values = np.asarray(values, float)
    bounds = np.broadcast_to(np.asarray(bounds, float), values.shape)
    bad = values > bounds if upper else values < bounds
    worst_i = int(np.argmax(values - bounds)) if upper else int(np.argmin(values - bounds))
    return CheckResult(name, anchor, float(values[worst_i]), float(bounds[worst_i]),
                       int(values.size), int(bad.sum()))


def run_battery(
    *,
    suite_size: int = 10,
    seed: int = 0,
    k: int = 1,
    corrupt_alpha: float = 1.0,
    qae_draws: int = 2000,
) -> list[CheckResult]:
    suite = random_suite(suite_size, seed)
    results = []

    vals, bnds = [], []
    for h in suite:
        for a in (0.01, 0.002):
            vals.append(truncation_gap(h, k, a))
            bnds.append(math.exp(a) * a * a)
    results.append(_collect("truncation", "||eta||_inf <= e^alpha alpha^2", vals, bnds))

    vals = [spectral_norm(dense_A(h, ProjectorD(h.n, k))) for h in suite]
    results.append(_collect("A-norm", "||A||_inf <= ||H||_inf <= 1", vals,
                            [h.spectral_norm + 1e-12 for h in suite]))

    ids = [trace_identities(h, k) for h in suite]
    results.append(_collect("trace-A", "<sigma_I|A|sigma_I> = 0", [a for a, _ in ids], 1e-10))
    results.append(_collect("trace-A2", "<sigma_I|A^2|sigma_I> = ||H_>k||_2^2",
                            [b for _, b in ids], 1e-10))

    nominal = plan_schedule(TestSpec(0.0, 0.6, 1 / 3, k))
    run = dataclasses.replace(nominal, alpha_eff=nominal.alpha_eff * corrupt_alpha)
    aborts, dists = [], []
    for h in suite:
        pa, dist = final_state_gap(h, k, run, reference_t=nominal.t)
        aborts.append(pa)
        dists.append(dist)
    results.append(_collect("abort-bound", "Pr[abort] <= (99/98) alpha t", aborts,
                            99 / 98 * nominal.alpha_eff * nominal.t))
    results.append(_collect("final-state", "||Delta||_2 <= (7/4) alpha t", dists,
                            7 / 4 * nominal.alpha_eff * nominal.t))

    lo_gaps, hi_gaps = [], []
    P = PauliString.from_label("XYZ")
    for i in range(1, 11):
        eps = i / 10
        spec = TestSpec(0.0, eps, 1 / 3, k)
        sched = plan_schedule(spec)
        run = dataclasses.replace(sched, alpha_eff=sched.alpha_eff * corrupt_alpha)
        h = validate_hamiltonian([(P, eps)])
        p1 = primitive_probabilities(h, ProjectorD(3, k), run).conditional_one
        lo, hi = conditional_acceptance_bounds(eps, sched)
        lo_gaps.append(lo - p1)
        hi_gaps.append(p1 - hi)
    results.append(_collect("acceptance-sandwich", "lo <= Pr[1 | no abort] <= hi",
                            np.maximum(lo_gaps, hi_gaps), 1e-15))

    grid = [0.0, 0.25, 0.5, 0.75, 1.0]
    ts = [round(0.1 * i, 10) for i in range(1, 31)]
    gen_err, lin = [], []
    for e1 in grid:
        for e2 in grid:
            if e2 < e1:
                continue
            for row in check_diagonal_pair(ZChainPair(3, 2, e1, e2), ts):
                gen_err.append(abs(row["generic"] - row["closed_form"]))
                if (e2 - e1) * row["t"] <= math.pi / 2:
                    lin.append(row["closed_form"] - (e2 - e1) * row["t"])
    results.append(_collect("phase-distance", "generic min-phase = closed form", gen_err, 1e-9))
    results.append(_collect("linear-growth", "closed form <= (eps2-eps1) t", lin, 1e-12))

    xi = AEConfig(0.0, 0.6).xi
    covs = [qae_coverage(eta, xi, qae_draws, generator(seed, 10_000, j))
            for j, eta in enumerate((0.0, 0.25, 0.5))]
    slack = 3 * math.sqrt(COVERAGE_LEVEL * (1 - COVERAGE_LEVEL) / qae_draws)
    results.append(_collect("qae-coverage", "Pr[|eta_hat - eta| <= xi] >= 8/pi^2", covs,
                            COVERAGE_LEVEL - slack, upper=False))

    low, high = locality_thresholds(0.0, 0.6, 1.0)
    results.append(_collect("thresholds", "(0.0016, 0.0064) at (0, 0.6, c=1)",
                            [abs(low - 0.0016), abs(high - 0.0064)], 1e-15))
    return results
