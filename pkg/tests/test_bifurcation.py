import json

import numpy as np
import pytest

from afmi import (
    BracketError,
    BifurcationKind,
    ModelParams,
    event_to_json,
    interior_equilibria,
    locate_hopf,
    locate_saddle_node,
    locate_transcritical,
    quadratic_coefficients,
    saddle_node_sufficient_check,
    sotomayor_quantities,
    sweep,
    sweep_to_csv,
)
from afmi.errors import PreconditionError

from conftest import ALT, params


def test_transcritical_threshold_value():
    ev = locate_transcritical(params(1.0))
    assert ev.kind is BifurcationKind.TRANSCRITICAL
    assert ev.xi_star == pytest.approx(1.61046, abs=1e-4)
    assert abs(ev.diagnostics["c_at_threshold"]) < 1e-9


def test_transcritical_alt_parameter_set():
    ev = locate_transcritical(ModelParams(xi=1.0, **ALT))
    assert ev.xi_star == pytest.approx(1.22951, abs=1e-4)


def test_transcritical_stability_exchange():
    ev = locate_transcritical(params(1.0))
    below = ev.diagnostics["prey_free_eigs_below"]
    above = ev.diagnostics["prey_free_eigs_above"]
    # the transverse eigenvalue changes sign across the threshold
    assert max(below) > 0 > max(above)


def test_saddle_node_location_and_quantities():
    ev = locate_saddle_node(params(2.0), (2.3, 2.6))
    assert 2.4820 <= ev.xi_star <= 2.4835
    assert abs(ev.diagnostics["wT_F_xi"]) > 1e-6
    assert abs(ev.diagnostics["wT_D2F_vv"]) > 1e-6
    assert ev.diagnostics["fd_consistent"]
    # discriminant vanishes at the located point
    q = quadratic_coefficients(params(ev.xi_star))
    assert abs(q.discriminant) < 1e-8


def test_saddle_node_default_bracket():
    ev = locate_saddle_node(params(2.0))
    assert ev.xi_star == pytest.approx(2.4827835, abs=1e-5)


def test_saddle_node_bad_bracket():
    with pytest.raises(BracketError):
        locate_saddle_node(params(2.0), (1.8, 2.2))


def test_sotomayor_rejects_hyperbolic_point():
    p = params(2.2)
    e1, _ = interior_equilibria(p)
    with pytest.raises(PreconditionError):
        sotomayor_quantities(p, e1)


def test_sufficient_check_fails_at_actual_fold():
    """The published inequalities are informational: near the real
    collision the first bracket's lower bound exceeds the equilibrium
    height, so that sufficient condition fails even though the direct
    quantities are nonzero."""
    ev = locate_saddle_node(params(2.0), (2.3, 2.6))
    chk = saddle_node_sufficient_check(params(ev.xi_star), ev.location)
    assert chk["geometry"]["ok"]
    assert chk["bracket_one"]["lower"] == pytest.approx(6.33, abs=0.01)
    assert ev.location[1] == pytest.approx(5.28, abs=0.01)
    assert not chk["bracket_one"]["ok"]
    assert not chk["all_ok"]


def test_hopf_location():
    ev = locate_hopf(params(2.3), (2.3, 2.478))
    assert 2.2 < ev.xi_star < 2.478
    assert ev.diagnostics["det"] > 0
    assert abs(ev.diagnostics["transversality"]) > 1e-6
    assert abs(ev.diagnostics["trace_residual"]) < 1e-9
    lam = ev.diagnostics["eigenvalues"][0]
    assert abs(lam.real) < 1e-8
    assert abs(lam.imag) > 1e-3
    assert ev.diagnostics["complex_pair_disc"] < 0


def test_hopf_real_part_changes_sign():
    ev = locate_hopf(params(2.3), (2.3, 2.478))
    h = 1e-3
    res = []
    for xi in (ev.xi_star - h, ev.xi_star + h):
        _, e2 = interior_equilibria(params(xi))
        res.append(e2.eigenvalues[0])
    assert res[0].real * res[1].real < 0
    assert min(abs(l.imag) for l in res) > 1e-3


def test_hopf_bad_bracket():
    with pytest.raises(BracketError):
        locate_hopf(params(2.3), (2.25, 2.35))


def test_homoclinic_same_topology_error():
    from afmi import locate_homoclinic

    # both endpoints sit on the unstable-inside-stable side of the connection
    with pytest.raises(BracketError):
        locate_homoclinic(params(2.0), (2.46, 2.47))


def test_sweep_finds_all_local_events():
    ds = sweep(params(2.0), (0.5, 3.0), 500)
    kinds = {ev.kind: ev for ev in ds.events}
    assert kinds[BifurcationKind.TRANSCRITICAL].xi_star == pytest.approx(
        1.6105, abs=1e-3)
    assert kinds[BifurcationKind.HOPF].xi_star == pytest.approx(
        2.4776, abs=1e-3)
    assert kinds[BifurcationKind.SADDLE_NODE].xi_star == pytest.approx(
        2.4828, abs=1e-3)
    tagged = [row for row in ds.rows if row["events"]]
    assert len(tagged) == 3


def test_sweep_rows_shape():
    ds = sweep(params(2.0), (1.7, 2.4), 20, locate_events=False)
    assert len(ds.rows) == 20
    for row in ds.rows:
        assert "x1" in row and "x2" in row  # two interiors everywhere here
        assert row["x1"] < row["x2"]


def test_sweep_csv(tmp_path):
    ds = sweep(params(2.0), (1.0, 3.0), 30)
    path = tmp_path / "sweep.csv"
    sweep_to_csv(ds, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "xi,x1,y1,stab1,x2,y2,stab2,events"
    assert len(lines) == 31
    # rows past the fold have empty branch cells
    last = lines[-1].split(",")
    assert last[1] == "" and last[4] == ""


def test_event_json_roundtrip():
    ev = locate_saddle_node(params(2.0), (2.3, 2.6))
    doc = json.loads(event_to_json(ev))
    assert doc["kind"] == "saddle_node"
    assert doc["xi_star"] == pytest.approx(ev.xi_star, rel=1e-15)
    assert doc["location"] == pytest.approx(list(ev.location), rel=1e-15)
    assert doc["diagnostics"]["wT_F_xi"] == pytest.approx(
        ev.diagnostics["wT_F_xi"], rel=1e-15)
