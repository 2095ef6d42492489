import random

import pytest
from hypothesis import given, settings, strategies as st

from darp.instgen import generate
from darp.model import Route
from darp.schedule import (
    EvaluationLevel,
    RouteContractError,
    evaluate_route,
    evaluate_solution,
    is_feasible,
    objective,
    violations,
)

from conftest import make_instance

L1, L2, L3 = EvaluationLevel.LEVEL1, EvaluationLevel.LEVEL2, EvaluationLevel.LEVEL3


def random_route(n, rng, k=None):
    reqs = rng.sample(range(1, n + 1), k or rng.randint(1, n))
    seq, open_ = [], []
    pending = list(reqs)
    while pending or open_:
        if pending and (not open_ or rng.random() < 0.5):
            p = pending.pop()
            seq.append(p)
            open_.append(p)
        else:
            p = open_.pop(rng.randrange(len(open_)))
            seq.append(p + n)
    return seq


def weighted(ev):
    return ev.duration_excess + ev.window_lateness + ev.ride_excess


def test_open_windows_no_waiting(line_instance):
    for level in EvaluationLevel:
        ev = evaluate_route(line_instance, [1, 2], level)
        assert ev.service_start[1:3] == (10.0, 20.0)
        assert ev.ride_times == {1: 10.0}
        assert ev.window_lateness == 0.0
        assert ev.cost == pytest.approx(40.0)


def test_depot_departure_is_delayed_to_absorb_waiting():
    inst = make_instance([((10.0, 0.0), (20.0, 0.0), (100.0, 120.0), (0.0, 1440.0), 0.0)], m=1)
    ev1 = evaluate_route(inst, [1, 2], L1)
    assert ev1.wait[1] == 90.0 and ev1.service_start[1] == 100.0
    ev2 = evaluate_route(inst, [1, 2], L2)
    assert ev2.departure[0] == 90.0
    assert ev1.duration - ev2.duration == pytest.approx(90.0)


def test_schedule_identities_hold():
    inst = generate(5, 1, 3)
    rng = random.Random(0)
    for _ in range(30):
        seq = random_route(5, rng)
        for level in EvaluationLevel:
            ev = evaluate_route(inst, seq, level)
            v = ev.vertices
            for k in range(1, len(v)):
                vert = inst.vertices[v[k]]
                assert ev.arrival[k] == pytest.approx(ev.departure[k - 1] + inst.travel[v[k - 1], v[k]])
                assert ev.service_start[k] == pytest.approx(ev.arrival[k] + ev.wait[k])
                assert ev.service_start[k] >= vert.window_earliest - 1e-9
                if k < len(v) - 1:
                    assert ev.departure[k] == pytest.approx(ev.service_start[k] + vert.service_duration)
            assert min(ev.violations) >= 0.0


def test_reevaluation_is_deterministic():
    inst = generate(4, 1, 9)
    seq = random_route(4, random.Random(2), 4)
    assert evaluate_route(inst, seq, L3) == evaluate_route(inst, seq, L3)


def test_cost_independent_of_level():
    inst = generate(6, 1, 4)
    rng = random.Random(1)
    for _ in range(20):
        seq = random_route(6, rng)
        costs = {evaluate_route(inst, seq, lv).cost for lv in EvaluationLevel}
        assert len(costs) == 1


def test_later_levels_never_worsen():
    inst = generate(4, 1, 21)
    rng = random.Random(5)
    for _ in range(200):
        seq = random_route(4, rng)
        e1, e2, e3 = (weighted(evaluate_route(inst, seq, lv)) for lv in (L1, L2, L3))
        assert e1 + 1e-6 >= e2 >= e3 - 1e-6


def test_load_excess_counts_peak_over_capacity():
    reqs = [((float(i), 0.0), (float(i), 1.0), (0, 1440), (0, 1440), 0.0) for i in range(1, 8)]
    inst = make_instance(reqs, m=1, Q=6)
    ev = evaluate_route(inst, list(range(1, 8)) + list(range(8, 15)), L1)
    assert ev.peak_load == 7
    assert ev.load_excess == 1.0


def test_lateness_at_dropoff():
    # drop-off reached at 20 but closes at 15
    inst = make_instance([((10.0, 0.0), (20.0, 0.0), (0.0, 1440.0), (0.0, 15.0), 0.0)], m=1)
    ev = evaluate_route(inst, [1, 2], L3)
    assert ev.window_lateness == pytest.approx(5.0)


def test_ride_time_measured_from_pickup_departure():
    inst = make_instance([((10.0, 0.0), (20.0, 0.0), (0.0, 1440.0), (0.0, 1440.0), 4.0)], m=1, L=5.0)
    ev = evaluate_route(inst, [1, 2], L3)
    assert ev.ride_times[1] == pytest.approx(10.0)
    assert ev.ride_excess == pytest.approx(5.0)


@pytest.mark.parametrize("seq, msg", [([2, 1], "earlier pickup"), ([1], "without"), ([1, 1, 2], "twice"),
                                      ([7], "not a request")])
def test_contract_errors(line_instance, seq, msg):
    with pytest.raises(RouteContractError, match=msg):
        evaluate_route(line_instance, seq)


def test_violation_totals_and_objective(line_instance):
    assert violations([]) == (0.0, 0.0, 0.0, 0.0)
    assert objective(100.0, (0, 0, 0, 0), (3, 4, 5, 6)) == 100.0
    assert objective(100.0, (2, 0, 0, 0), (1, 1, 1, 1)) == 102.0
    assert objective(100.0, (1, 2, 3, 4), (1, 1, 1, 1)) == 110.0
    with pytest.raises(ValueError):
        objective(100.0, (0, 0, 0, 0), (1, 0, 1, 1))
    cost, viol, evals = evaluate_solution(line_instance, [Route(0, [1, 2])])
    assert cost == pytest.approx(40.0) and is_feasible(viol) and len(evals) == 1


def test_empty_route(line_instance):
    ev = evaluate_route(line_instance, [], L3)
    assert ev.cost == 0.0 and ev.duration == 0.0 and ev.feasible


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**6), pick=st.integers(0, 10**6))
def test_violations_nonnegative_and_sandwiched(seed, pick):
    inst = generate(3, 1, seed)
    seq = random_route(3, random.Random(pick))
    evs = [evaluate_route(inst, seq, lv) for lv in EvaluationLevel]
    for ev in evs:
        assert min(ev.violations) >= 0.0
    assert weighted(evs[0]) + 1e-6 >= weighted(evs[1]) >= weighted(evs[2]) - 1e-6
