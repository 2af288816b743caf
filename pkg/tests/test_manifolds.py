import numpy as np
import pytest

from afmi import (
    Branch,
    CycleStability,
    GridSpec,
    PreconditionError,
    Section,
    Topology,
    basin_fraction,
    basin_to_json,
    classify_batch,
    find_limit_cycle,
    interior_equilibria,
    jacobian,
    manifold_to_csv,
    manifold_topology,
    trace_manifold,
)
from afmi.manifolds import BASIN_SETTINGS, MAX_SEGMENT

from conftest import params


def _saddle(p):
    e1, _ = interior_equilibria(p)
    assert e1.is_saddle
    return e1


def test_trace_manifold_polyline_pitch():
    p = params(2.2)
    m = trace_manifold(p, _saddle(p), Branch.UNSTABLE_PLUS, budget=20.0)
    seg = np.linalg.norm(np.diff(m.points, axis=0), axis=1)
    assert seg.max() <= MAX_SEGMENT * 1.0001
    assert m.arclength > 5.0


def test_manifold_leaves_along_eigenvector():
    p = params(2.2)
    e1 = _saddle(p)
    j = jacobian(p, e1.x, e1.y)
    w, v = np.linalg.eig(j)
    vu = v[:, np.argmax(w.real)].real
    vu /= np.linalg.norm(vu)
    m = trace_manifold(p, e1, Branch.UNSTABLE_PLUS, budget=5.0)
    d0 = m.points[1] - m.points[0]
    d0 /= np.linalg.norm(d0)
    assert abs(abs(d0 @ vu) - 1.0) < 1e-3


def test_trace_manifold_rejects_non_saddle():
    p = params(2.2)
    _, e2 = interior_equilibria(p)
    with pytest.raises(PreconditionError):
        trace_manifold(p, e2, Branch.UNSTABLE_PLUS)


def test_topology_before_and_after_connection():
    before = manifold_topology(params(2.47))
    after = manifold_topology(params(2.478))
    assert before.topology is Topology.UNSTABLE_INSIDE_STABLE
    assert after.topology is Topology.STABLE_INSIDE_UNSTABLE
    assert before.gap > 0 > after.gap


def test_topology_near_connection_is_coincident():
    rep = manifold_topology(params(2.4741313))
    assert rep.topology is Topology.NEAR_COINCIDENT
    assert abs(rep.gap) < 1e-3


def test_separatrix_splits_basins():
    """Seeds just either side of W^s(E1) reach different attractors."""
    for xi in (1.9, 2.2, 2.469):
        p = params(xi)
        e1 = _saddle(p)
        m = trace_manifold(p, e1, Branch.STABLE_PLUS, budget=6.0)
        # take a mid-polyline point and its local normal
        i = len(m.points) // 2
        tangent = m.points[i + 1] - m.points[i - 1]
        tangent /= np.linalg.norm(tangent)
        normal = np.array([-tangent[1], tangent[0]])
        off = 5e-2
        pair = np.array([m.points[i] + off * normal,
                         m.points[i] - off * normal])
        pair = np.clip(pair, 1e-6, None)
        sides = [str(a) for a in classify_batch(p, pair)]
        assert sides[0] != sides[1], f"no splitting at xi={xi}: {sides}"


def test_basin_fraction_grid():
    p = params(2.469)
    grid = GridSpec(x_min=0.1, x_max=15.0, y_min=0.1, y_max=10.0,
                    nx=12, ny=12)
    est = basin_fraction(p, grid)
    assert est.resolved + est.unresolved == 144
    assert 0.0 <= est.fraction_prey_free <= 1.0
    assert est.fraction_prey_free > 0.5


def test_basin_json_roundtrip():
    import json

    p = params(1.9)
    grid = GridSpec(0.5, 14.0, 0.5, 9.0, 6, 6)
    est = basin_fraction(p, grid)
    doc = json.loads(basin_to_json(est))
    assert doc["grid"]["nx"] == 6
    assert sum(doc["counts"].values()) == est.resolved
    assert doc["fraction_prey_free"] == est.fraction_prey_free


def test_unstable_limit_cycle_found():
    p = params(2.476)
    _, e2 = interior_equilibria(p)
    res = find_limit_cycle(p, e2.location + np.array([0.4, 0.0]))
    assert res is not None
    assert res.stability is CycleStability.UNSTABLE
    assert abs(res.floquet_slope) > 1.0
    assert res.period > 10.0
    # orbit closes up
    start = res.orbit[0, 1:]
    end = res.orbit[-1, 1:]
    assert np.linalg.norm(start - end) < 1e-5


def test_no_cycle_at_plain_focus():
    p = params(2.2)
    _, e2 = interior_equilibria(p)
    res = find_limit_cycle(p, e2.location + np.array([0.2, 0.0]))
    assert res is None


def test_degenerate_seed_returns_none():
    p = params(2.476)
    _, e2 = interior_equilibria(p)
    assert find_limit_cycle(p, e2.location) is None


def test_section_geometry():
    sec = Section.through(np.array([1.0, 1.0]), np.array([2.0, 1.0]))
    assert sec.radius(np.array([3.0, 1.0])) == pytest.approx(2.0)
    assert sec.offset(np.array([2.0, 2.0])) == pytest.approx(1.0)
    np.testing.assert_allclose(sec.point_at(0.5), [1.5, 1.0])


def test_manifold_csv(tmp_path):
    p = params(2.2)
    m = trace_manifold(p, _saddle(p), Branch.STABLE_MINUS, budget=3.0)
    path = tmp_path / "manifold.csv"
    manifold_to_csv(m, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "branch,x,y"
    assert lines[1].startswith("stable_minus,")
    assert len(lines) == len(m.points) + 1
