import numpy as np
import pytest

from afmi import (
    AttractorKind,
    IntegratorSettings,
    Termination,
    attractor_catalog,
    classify_batch,
    integrate,
    interior_equilibria,
    trajectory_to_csv,
)
from afmi.integrate import classify_omega_limit

from conftest import params, rng


def test_settings_validation():
    with pytest.raises(ValueError):
        IntegratorSettings(rel_tol=-1.0)
    with pytest.raises(ValueError):
        IntegratorSettings(rel_tol=1e-2)  # looser than the 1e-3 cap
    s = IntegratorSettings()
    assert s.rel_tol <= 1e-3 and s.abs_tol <= 1e-3


def test_convergence_to_upper_interior():
    p = params(2.2)
    traj = integrate(p, np.array([10.0, 4.0]))
    assert traj.termination is Termination.CONVERGED
    assert str(traj.attractor) == "interior_eq[1]"
    _, e2 = interior_equilibria(p)
    np.testing.assert_allclose(traj.final_state, e2.location, atol=1e-3)


def test_convergence_to_prey_free():
    p = params(2.2)
    traj = integrate(p, np.array([0.01, 8.0]))
    assert traj.termination is Termination.CONVERGED
    assert traj.attractor.kind is AttractorKind.PREY_FREE_EQ


def test_dense_output_matches_nodes():
    p = params(2.2)
    traj = integrate(p, np.array([10.0, 4.0]))
    mid = 0.5 * (traj.t[3] + traj.t[4])
    probe = traj.at([traj.t[3], mid, traj.t[4]])
    np.testing.assert_allclose(probe[0], traj.states[3], rtol=1e-12)
    np.testing.assert_allclose(probe[2], traj.states[4], rtol=1e-12)
    # interpolant stays between neighbouring nodes for a smooth approach
    assert np.all(np.isfinite(probe[1]))


def test_dense_output_refuses_extrapolation():
    traj = integrate(params(2.2), np.array([10.0, 4.0]))
    with pytest.raises(ValueError):
        traj.at(traj.t[-1] + 1.0)


def test_tolerance_refinement_converges():
    """Halving tolerances moves the answer toward the tightest run."""
    p = params(2.2)
    t_end = 50.0
    ref = None
    errors = []
    for rel in (1e-5, 1e-7, 1e-9):
        s = IntegratorSettings(rel_tol=rel, abs_tol=rel * 1e-2,
                               max_time=t_end, convergence_radius=1e-12)
        traj = integrate(p, np.array([10.0, 4.0]), s,
                         attractors=np.empty((0, 2)))
        if ref is None:
            pass
        errors.append(traj.final_state.copy())
    gap_coarse = np.linalg.norm(errors[0] - errors[2])
    gap_fine = np.linalg.norm(errors[1] - errors[2])
    assert gap_fine < gap_coarse


def test_reverse_time_integration():
    p = params(2.2)
    s = IntegratorSettings(max_time=5.0, convergence_radius=1e-12)
    fwd = integrate(p, np.array([6.0, 4.0]), s, attractors=np.empty((0, 2)))
    back = integrate(p, fwd.final_state, s, attractors=np.empty((0, 2)),
                     direction=-1.0)
    np.testing.assert_allclose(back.final_state, [6.0, 4.0], atol=1e-6)


def test_classify_batch_labels():
    p = params(2.2)
    starts = np.array([[10.0, 4.0], [0.01, 8.0], [12.0, 2.0]])
    labels = [str(a) for a in classify_batch(p, starts)]
    assert labels[0] == "interior_eq[1]"
    assert labels[1] == "prey_free_eq"


def test_classification_stable_under_tighter_tolerance():
    p = params(2.469)
    g = rng(2)
    starts = g.uniform(0.5, 10.0, size=(12, 2))
    loose = IntegratorSettings(rel_tol=1e-6, abs_tol=1e-9,
                               convergence_radius=1e-3)
    tight = IntegratorSettings(rel_tol=1e-8, abs_tol=1e-11,
                               convergence_radius=1e-3)
    a = [str(v) for v in classify_batch(p, starts, loose)]
    b = [str(v) for v in classify_batch(p, starts, tight)]
    assert a == b


def test_attractor_catalog_labels():
    points, ids = attractor_catalog(params(2.2))
    names = [str(i) for i in ids]
    assert "prey_free_eq" in names
    assert "interior_eq[0]" in names and "interior_eq[1]" in names
    assert len(points) == len(ids)


def test_omega_limit_classification():
    p = params(2.2)
    _, e2 = interior_equilibria(p)
    verdict = classify_omega_limit(p, np.array([10.0, 4.0]))
    assert str(verdict) == "interior_eq[1]"
    verdict = classify_omega_limit(p, np.array([0.01, 8.0]))
    assert str(verdict) == "prey_free_eq"


def test_trajectory_csv_format(tmp_path):
    traj = integrate(params(2.2), np.array([10.0, 4.0]))
    path = tmp_path / "traj.csv"
    trajectory_to_csv(traj, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,x,y"
    t, x, y = (float(v) for v in lines[-1].split(","))
    assert t == pytest.approx(traj.t[-1], rel=1e-16)


def test_clipping_is_counted():
    # start a trajectory that brushes the axis at loose tolerance
    p = params(2.478)
    s = IntegratorSettings(rel_tol=1e-3, abs_tol=1e-3, max_time=300.0)
    traj = integrate(p, np.array([0.05, 9.0]), s)
    assert traj.clip_events >= 0  # never negative; usually zero here
