import math
from dataclasses import replace

import pytest

from darp.instgen import GenParams, generate
from darp.model import Solution, validate_solution
from darp.oracle import enumerate_routes
from darp.neighborhood import Move, RouteCache
from darp.schedule import EvaluationLevel
from darp.tabu import (
    PENALTY_CAP,
    PENALTY_FLOOR,
    PenaltyState,
    SearchConfig,
    TabuList,
    default_tenure,
    intensify,
    is_aspirated,
    normalize_variant,
    search,
    update_penalties,
    variant_label,
)

from conftest import make_instance


def test_penalty_grows_when_violated():
    assert update_penalties(PenaltyState(), (1.0, 0, 0, 0)).alpha == pytest.approx(1.5)


def test_penalty_shrinks_when_satisfied():
    st = update_penalties(PenaltyState(), (0.0, 0, 0, 0))
    assert st.alpha == pytest.approx(2 / 3)
    assert st.beta == st.gamma == st.tau == pytest.approx(2 / 3)


def test_penalties_stay_clamped():
    st = PenaltyState()
    for _ in range(200):
        st = update_penalties(st, (0, 0, 0, 0))
    assert st.coefficients == (PENALTY_FLOOR,) * 4
    for _ in range(200):
        st = update_penalties(st, (1, 1, 1, 1))
    assert st.coefficients == (PENALTY_CAP,) * 4


def test_penalty_state_rejects_bad_delta():
    with pytest.raises(ValueError):
        PenaltyState(delta=0.0)


def test_tabu_window():
    tl = TabuList()
    tl.add(3, 1, iteration=10, tenure=5)
    assert not tl.is_tabu(3, 1, 10)
    assert all(tl.is_tabu(3, 1, t) for t in range(11, 16))
    assert not tl.is_tabu(3, 1, 16)
    assert not tl.is_tabu(3, 0, 12)


def test_expire_oldest():
    tl = TabuList()
    tl.add(1, 0, 1, 10)
    tl.add(2, 0, 3, 10)
    assert tl.expire_oldest(4)
    assert not tl.is_tabu(1, 0, 4) and tl.is_tabu(2, 0, 4)
    assert tl.expire_oldest(4) and not tl.expire_oldest(4)


def test_aspiration_is_strict():
    mv = Move(1, 0, 1, 0, 1, objective=100.0, feasible=True)
    assert is_aspirated(mv, 99.0, 100.0)
    assert not is_aspirated(mv, 100.0, 100.0)
    assert not is_aspirated(replace(mv, feasible=False), 50.0, 100.0)


def test_aspiration_before_any_feasible_uses_objective():
    mv = Move(1, 0, 1, 0, 1, objective=100.0, feasible=False)
    assert is_aspirated(mv, 80.0, None, best_objective=101.0)
    assert not is_aspirated(mv, 80.0, None, best_objective=100.0)


def test_default_tenure():
    assert default_tenure(24) == round(7.5 * math.log10(24))
    assert default_tenure(1) == 1


@pytest.mark.parametrize("label, key, shown", [("TS_32", "ts32", "TS_32"), ("its", "its", "ITS"),
                                               ("ts-11", "ts11", "TS_11")])
def test_variant_labels(label, key, shown):
    assert normalize_variant(label) == key
    assert variant_label(label) == shown


def test_unknown_variant():
    with pytest.raises(ValueError, match="unknown variant"):
        normalize_variant("ts41")


@pytest.mark.parametrize("kw", [dict(time_limit=0), dict(intensification_period=0), dict(delta=-1),
                                dict(clock="cpu"), dict(work_per_ms=0)])
def test_config_contract(kw):
    with pytest.raises(ValueError):
        SearchConfig(**kw)


def test_ablation_identity():
    its = SearchConfig.for_variant("its", seed=4, time_limit=2)
    ts = SearchConfig.for_variant("ts32", ch=True, tw=True, seed=4, time_limit=2)
    assert its == ts and its.label == "ITS"
    plain = SearchConfig.for_variant("ts32", seed=4, time_limit=2)
    diff = {k for k, v in its.to_dict().items() if plain.to_dict()[k] != v}
    assert diff == {"use_construction_heuristic", "use_time_window_adjustment"}


def test_intensify_reorders_route():
    reqs = [((1.0, 0.0), (1.0, 1.0), (0, 1440), (0, 1440), 0.0),
            ((10.0, 0.0), (10.0, 1.0), (0, 1440), (0, 1440), 0.0)]
    inst = make_instance(reqs, m=1, Q=1)  # capacity 1 makes nesting the two requests costly
    sol = Solution.from_sequences(inst, [[1, 2, 3, 4]])
    out = intensify(inst, sol)
    pens = (1.0, 1.0, 1.0, 1.0)
    best = min(enumerate_routes([1, 2], 2),
               key=lambda seq: RouteCache(inst, Solution.from_sequences(inst, [seq])).objective(pens))
    assert best == [1, 3, 2, 4]
    assert out.sequences == [best]
    assert intensify(inst, out).sequences == out.sequences


def test_intensify_never_worsens_and_keeps_empty_routes():
    inst = generate(6, 2, 3)
    sol = Solution.from_sequences(inst, [[1, 2, 7, 3, 8, 9, 4, 10, 5, 6, 11, 12], []])
    pens = (1.0, 1.0, 1.0, 1.0)
    out = intensify(inst, sol, EvaluationLevel.LEVEL3, pens)
    assert RouteCache(inst, out).objective(pens) <= RouteCache(inst, sol).objective(pens) + 1e-9
    assert out.sequences[1] == []
    assert validate_solution(inst, out) == []


def test_single_request_finds_round_trip():
    inst = generate(1, 2, 0)
    res = search(inst, SearchConfig.for_variant("ts32", time_limit=0.2, clock="work"))
    assert res.best_cost == pytest.approx(inst.travel[0, 1] + inst.travel[1, 2] + inst.travel[2, 0])
    assert res.trace.first_feasible is not None


def test_same_seed_same_trace():
    inst = generate(10, 3, 5, GenParams(window_open_max=300))
    cfg = SearchConfig.for_variant("its", time_limit=0.5, seed=7, clock="work")
    a, b = search(inst, cfg), search(inst, cfg)
    assert a.trace == b.trace
    assert a.best.sequences == b.best.sequences


def test_trace_invariants_and_result_validity():
    inst = generate(10, 3, 5, GenParams(window_open_max=300))
    res = search(inst, SearchConfig.for_variant("ts31", time_limit=0.5, seed=1, clock="work"))
    times = [e.elapsed_ms for e in res.trace.events]
    assert times == sorted(times)
    costs = [e.best_cost for e in res.trace.events if e.best_cost is not None]
    assert all(b <= a + 1e-9 for a, b in zip(costs, costs[1:]))
    if res.best is not None:
        assert validate_solution(inst, res.best) == []
        assert RouteCache(inst, res.best).feasible
        assert res.trace.first_feasible[0] >= res.best_cost - 1e-9


def test_max_iterations_stops_search():
    inst = generate(6, 2, 1)
    res = search(inst, SearchConfig.for_variant("ts22", time_limit=60, max_iterations=7))
    assert res.iterations == 7


def test_its_searches_tightened_instance():
    inst = generate(6, 2, 1)
    res = search(inst, SearchConfig.for_variant("its", time_limit=0.1, clock="work"))
    assert res.instance != inst
    res = search(inst, SearchConfig.for_variant("ts32", time_limit=0.1, clock="work"))
    assert res.instance is inst


def test_checkpoint_lookup():
    inst = generate(6, 2, 1, GenParams(window_open_max=300))
    res = search(inst, SearchConfig.for_variant("its", time_limit=0.3, clock="work"))
    tr = res.trace
    assert tr.best_at(-1.0) is None
    assert tr.best_at(1e9) == tr.final_best == res.best_cost


def test_one_vehicle_only_intensifies():
    inst = generate(3, 1, 2, GenParams(window_open_max=300))
    res = search(inst, SearchConfig.for_variant("its", time_limit=0.1))
    assert res.iterations == 0
    assert res.trace.events
