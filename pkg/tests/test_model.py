import numpy as np
import pytest

from darp.model import Instance, Solution, Vertex, validate_solution

from conftest import make_instance


def test_travel_is_euclidean_symmetric_with_zero_diagonal():
    inst = make_instance([((3.0, 4.0), (6.0, 8.0), (0, 1440), (0, 1440), 0.0)])
    assert inst.travel[0, 1] == pytest.approx(5.0)
    assert np.allclose(inst.travel, inst.travel.T)
    assert np.all(np.diag(inst.travel) == 0.0)


def test_instance_is_immutable(line_instance):
    with pytest.raises(AttributeError):
        line_instance.n_vehicles = 3
    with pytest.raises(ValueError):
        line_instance.travel[0, 1] = 1.0


@pytest.mark.parametrize(
    "change, message",
    [
        (dict(vehicle_capacity=0), "positive"),
        (dict(max_ride_time=-1.0), "positive"),
        (dict(n_vehicles=0), "n_vehicles"),
    ],
)
def test_instance_rejects_bad_bounds(line_instance, change, message):
    with pytest.raises(ValueError, match=message):
        line_instance.replace(**change)


def test_instance_rejects_unbalanced_loads(line_instance):
    verts = list(line_instance.vertices)
    verts[2] = Vertex(2, 20.0, 0.0, 0.0, -2, 0.0, 1440.0)
    with pytest.raises(ValueError, match="negate"):
        line_instance.replace(vertices=verts)


def test_instance_rejects_window_outside_horizon(line_instance):
    verts = list(line_instance.vertices)
    verts[1] = Vertex(1, 10.0, 0.0, 0.0, 1, 50.0, 2000.0)
    with pytest.raises(ValueError, match="window"):
        line_instance.replace(vertices=verts)


def test_instance_rejects_wrong_vertex_count(line_instance):
    with pytest.raises(ValueError, match="expected 3 vertices"):
        Instance(1, 1, 6, 480, 90, line_instance.vertices[:2])


def test_minimal_pairing_is_valid(line_instance):
    sol = Solution.from_sequences(line_instance, [[1, 2]])
    assert validate_solution(line_instance, sol) == []


def test_dropoff_before_pickup_is_one_precedence_defect(line_instance):
    sol = Solution.from_sequences(line_instance, [[2, 1]])
    defects = validate_solution(line_instance, sol)
    assert [(d.request, d.rule) for d in defects] == [(1, "precedence")]


def test_split_request_is_one_same_route_defect(line_instance):
    inst = line_instance.replace(n_vehicles=2)
    sol = Solution.from_sequences(inst, [[1], [2]])
    defects = validate_solution(inst, sol)
    assert [(d.request, d.rule) for d in defects] == [(1, "same_route")]


def test_missing_request_and_stray_vertex_reported():
    inst = make_instance([((1, 0), (2, 0), (0, 1440), (0, 1440), 0.0)] * 2)
    sol = Solution.from_sequences(inst, [[1, 3, 9], []])
    rules = sorted(d.rule for d in validate_solution(inst, sol))
    assert rules == ["unassigned", "unknown_vertex"]


def test_stale_assignment_is_reported(line_instance):
    inst = line_instance.replace(n_vehicles=2)
    sol = Solution.from_sequences(inst, [[1, 2], []])
    sol.assignment[1] = 1
    assert [d.rule for d in validate_solution(inst, sol)] == ["assignment"]


def test_solution_copy_is_deep(line_instance):
    sol = Solution.from_sequences(line_instance, [[1, 2]])
    dup = sol.copy()
    dup.routes[0].vertices.reverse()
    assert sol.sequences == [[1, 2]]


def test_instance_pickles():
    import pickle

    from darp.instgen import generate

    inst = generate(3, 2, 0)
    assert pickle.loads(pickle.dumps(inst)) == inst
