import json

import numpy as np
import pytest

import mlio


def test_demo_polytope_geometry():
    omega = mlio.demo2d_polytope()
    assert omega.rows == 5
    assert omega.dim == 2
    assert omega.contains(np.array([2.0, 2.0]))
    assert not omega.contains(np.array([0.0, 0.0]))
    assert omega.boundary_distance(np.array([2.0, 2.0])) == pytest.approx(1.0)
    assert len(omega.enumerate_vertices()) == 4


def test_two_point_inverse_fit():
    omega = mlio.demo2d_polytope()
    obs = mlio.Observations(np.array([[2.0, 2.0], [4.0, 2.0]]))
    model = mlio.io_solve(obs, omega)
    assert model.representative == pytest.approx([3.0, 1.0])
    assert model.loss == pytest.approx(4.0)
    assert model.cost == pytest.approx([0.0, -1.0])
    assert mlio.certify(model, omega)["worst"] <= 1e-8


def test_fit_methods_respect_the_ordering():
    omega = mlio.demo2d_polytope()
    obs = mlio.gen2d_observations(60, 42)
    seq = mlio.fit(obs, omega, method="seq", clusters=3, seed=42)
    emb = mlio.fit(obs, omega, method="emb", clusters=3, seed=42)
    assert emb.total_loss <= seq.total_loss + 1e-9
    assert all(g <= 1e-8 for g in mlio.optimality_gap(emb, omega))
    assert mlio.verify_partial_optimal(emb, obs, omega).holds()


def test_unconstrained_fit_reduces_to_kmeans():
    obs = mlio.gen2d_observations(40, 7)
    km = mlio.fit(obs, None, method="kmeans", clusters=3, seed=7)
    emb = mlio.fit(obs, None, method="emb", clusters=3, seed=7)
    assert km.assignments == emb.assignments
    for a, b in zip(km.models, emb.models):
        assert a.representative == pytest.approx(b.representative, abs=0.0)


def test_solution_json_is_deterministic():
    omega = mlio.demo2d_polytope()
    obs = mlio.gen2d_observations(30, 11)
    first = mlio.solution_json(mlio.fit(obs, omega, method="emb", clusters=2), obs)
    second = mlio.solution_json(mlio.fit(obs, omega, method="emb", clusters=2), obs)
    assert first == second
    doc = json.loads(first)
    assert doc["method"] == "emb"
    assert doc["L"] == 2


def test_lp_and_errors():
    omega = mlio.demo2d_polytope()
    sol = mlio.solve_lp(np.array([0.5, 0.5]), omega, sense="max")
    assert sol["status"] == "optimal"
    assert sol["objective"] == pytest.approx(7.5)

    with pytest.raises(mlio.MalformedInputError):
        mlio.fit(mlio.gen2d_observations(5, 1), None, method="nope")
    with pytest.raises(mlio.InstanceTooLargeError):
        mlio.fit(mlio.gen2d_observations(40, 1), None, method="exact", clusters=3)


def test_diet_generation_round_trip():
    obs, omega = mlio.gen_diet(50, 3)
    assert obs.count == 50
    assert obs.dim == 20
    assert omega.dim == 20
    emb = mlio.fit(obs, omega, method="emb", clusters=2, seed=3)
    assert all(g <= 1e-8 for g in mlio.optimality_gap(emb, omega))
