import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hamlocal.bell import ProjectorD
from hamlocal.oracle import EvolutionOracle
from hamlocal.pauli import random_pauli_hamiltonian, validate_hamiltonian, zero_hamiltonian
from hamlocal.seeding import substream
from hamlocal.trotter import (
    TestSpec,
    TrialOutcome,
    conditional_acceptance_bounds,
    exact_tester_report,
    plan_schedule,
    primitive_probabilities,
    run_primitive,
    run_tester,
    run_trials,
)
from hamlocal.verdict import Decision

SPEC = TestSpec(0.0, 0.6, 1 / 3, 1)
FAR = validate_hamiltonian([("ZZZ", 0.6)])
LOCAL = validate_hamiltonian([("ZII", 0.6)])


def test_schedule_example():
    s = plan_schedule(SPEC)
    assert math.isclose(s.alpha, 0.006)
    assert s.t == 0.5 and s.m == 84
    assert math.isclose(s.alpha_eff, 0.5 / 84)
    assert s.s == 389 and s.s_prime == 782


def test_schedule_at_eps2_one():
    s = plan_schedule(TestSpec(0.0, 1.0, 0.1, 1))
    assert s.t == 0.5 and s.m == 50


@given(st.floats(0, 0.9), st.floats(0.05, 1), st.floats(0.01, 0.9))
def test_schedule_invariants(e1, gap, delta):
    e2 = min(1.0, e1 + gap)
    if e2 <= e1:
        return
    s = plan_schedule(TestSpec(e1, e2, delta, 1))
    assert math.isclose(s.m * s.alpha_eff, s.t, rel_tol=1e-12)
    assert s.t <= 0.5
    assert s.alpha_eff <= s.alpha * (1 + 1e-12)
    assert s.s <= s.s_prime


def test_spec_validation():
    with pytest.raises(ValueError):
        TestSpec(0.5, 0.5, 0.3, 1)
    with pytest.raises(ValueError):
        TestSpec(0.0, 0.5, 1.0, 1)


def test_zero_hamiltonian_never_aborts(rng):
    h = zero_hamiltonian(2)
    sched = plan_schedule(SPEC)
    o = EvolutionOracle(h)
    assert all(run_primitive(o, ProjectorD(2, 1), sched, rng) == TrialOutcome.ZERO for _ in range(20))
    ex = primitive_probabilities(h, ProjectorD(2, 1), sched)
    assert (ex.p_abort, ex.p_zero, ex.p_one) == (0.0, 1.0, 0.0)


def test_single_local_term_closed_form():
    h = validate_hamiltonian([("ZI", 0.8)])
    sched = plan_schedule(SPEC)
    ex = primitive_probabilities(h, ProjectorD(2, 1), sched)
    want = 1 - (1 - math.sin(0.8 * sched.alpha_eff) ** 2) ** sched.m
    assert abs(ex.p_abort - want) < 1e-12
    _, hi = conditional_acceptance_bounds(0.0, sched)
    assert ex.conditional_one <= hi


def test_bounds_at_zero():
    sched = plan_schedule(SPEC)
    lo, hi = conditional_acceptance_bounds(0.0, sched)
    assert lo == 0.0
    assert math.isclose(hi, 49 / 1600 * 0.6 * sched.alpha_eff * sched.t**2)


def test_bounds_direct_substitution():
    sched = plan_schedule(SPEC)
    a, t, e = sched.alpha_eff, sched.t, 0.6
    lo, hi = conditional_acceptance_bounds(e, sched)
    assert math.isclose(lo, e**2 * t**2 * (1 - t**2 / 10 - 13 / 50 * e**2 * t**2) - 3.5 * e * a * t**2)
    assert math.isclose(hi, e**2 * t**2 * (1 + t**2 / 10) + 287 / 80 * e * a * t**2 + 49 / 1600 * e * a * t**2)


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1))
def test_abort_bound_random(seed):
    h = random_pauli_hamiltonian(3, 6, np.random.default_rng(seed))
    sched = plan_schedule(SPEC)
    ex = primitive_probabilities(h, ProjectorD(3, 1), sched)
    assert ex.p_abort <= 99 / 98 * sched.alpha_eff * sched.t


@pytest.mark.parametrize("h", [FAR, LOCAL, random_pauli_hamiltonian(3, 6, np.random.default_rng(3))])
def test_batched_equals_literal(h):
    sched = plan_schedule(SPEC)
    # a coarse schedule makes aborts common so both branches are exercised
    coarse = plan_schedule(TestSpec(0.0, 0.6, 1 / 3, 1)).__class__(
        **{**sched.__dict__, "alpha_eff": 0.2, "m": 6, "t": 1.2}
    )
    for sch in (sched, coarse):
        seeds = [substream(99, i) for i in range(60)]
        o1, o2 = EvolutionOracle(h), EvolutionOracle(h)
        literal = [run_primitive(o1, ProjectorD(3, 1), sch, np.random.default_rng(s)) for s in seeds]
        batched = run_trials(o2, ProjectorD(3, 1), sch, seeds)
        assert list(batched) == [int(x) for x in literal]
        assert o1.transcript.query_count == o2.transcript.query_count
        assert math.isclose(o1.transcript.total_evolution_time, o2.transcript.total_evolution_time)


def test_monte_carlo_matches_exact():
    sched = plan_schedule(SPEC)
    ex = primitive_probabilities(FAR, ProjectorD(3, 1), sched)
    N = 100_000
    out = run_trials(EvolutionOracle(FAR), ProjectorD(3, 1), sched, [substream(5, i) for i in range(N)])
    ok = out != TrialOutcome.ABORT
    freq = np.mean(out[ok] == TrialOutcome.ONE)
    p1 = ex.conditional_one
    assert abs(freq - p1) <= 3 * math.sqrt(p1 * (1 - p1) / ok.sum())
    pa = ex.p_abort
    assert abs(np.mean(~ok) - pa) <= 4 * math.sqrt(pa * (1 - pa) / N) + 1e-12


def test_tester_verdicts_and_budget():
    sched = plan_schedule(SPEC)
    v_far = run_tester(EvolutionOracle(FAR), SPEC, 1)
    v_loc = run_tester(EvolutionOracle(LOCAL), SPEC, 1)
    assert v_far.decision == Decision.FAR and v_loc.decision == Decision.LOCAL
    for v in (v_far, v_loc):
        assert v.total_time <= sched.time_bound
        assert v.queries <= sched.query_bound
        assert v.details["successes"] == sched.s
        assert v.details["runs"] <= sched.s_prime
    # ZZZ keeps the state inside D, so nothing aborts and every run is charged m queries
    assert v_far.details["aborts"] == 0
    assert v_far.queries == sched.s * sched.m


def test_no_early_stop_charges_full_budget():
    sched = plan_schedule(SPEC)
    v = run_tester(EvolutionOracle(FAR), SPEC, 2, early_stop=False)
    assert v.details["runs"] == sched.s_prime
    assert v.queries == sched.s_prime * sched.m


def test_tie_decides_far():
    sched = plan_schedule(SPEC)
    # tau chosen so s * tau equals the realized tally exactly
    v = run_tester(EvolutionOracle(FAR), SPEC, 1)
    tied = sched.__class__(**{**sched.__dict__, "tau": v.statistic / sched.s})
    v2 = run_tester(EvolutionOracle(FAR), SPEC, 1, schedule=tied)
    assert v2.statistic == v2.threshold and v2.decision == Decision.FAR


def test_inconclusive_when_budget_runs_out():
    sched = plan_schedule(SPEC)
    starved = sched.__class__(**{**sched.__dict__, "s_prime": sched.s - 1})
    v = run_tester(EvolutionOracle(FAR), SPEC, 1, schedule=starved)
    assert v.decision == Decision.INCONCLUSIVE


def test_exact_report():
    far = exact_tester_report(FAR, SPEC)
    loc = exact_tester_report(LOCAL, SPEC)
    assert far["exact_decision"] == "far" and loc["exact_decision"] == "local"
    assert far["prob_far_given_enough_successes"] >= 2 / 3
    assert loc["prob_far_given_enough_successes"] <= 1 / 3
