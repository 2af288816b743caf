import numpy as np
import pytest

from afmi import (
    StabilityClass,
    StaleEquilibriumError,
    interior_equilibria,
    jacobian,
    stability_report,
)
from afmi.equilibria import Equilibrium, EquilibriumKind, eigenvalues_2x2
from afmi.stability import (
    FocusCase,
    interior_focus_case,
    saddle_sufficient_check,
    trace_det_simplified,
)

from conftest import params, rng


def test_case3_eigenvalues():
    e1, e2 = interior_equilibria(params(2.2))
    lam = e2.eigenvalues[0]
    assert abs(lam.real - (-0.118487)) < 1e-3
    assert abs(abs(lam.imag) - 0.011339) < 1e-3
    assert e2.stability is StabilityClass.STABLE_FOCUS


def test_case6_eigenvalues():
    _, e2 = interior_equilibria(params(2.478))
    lam = e2.eigenvalues[0]
    assert abs(lam.real - 0.000645064) < 1e-4
    assert abs(abs(lam.imag) - 0.0471803) < 1e-4
    assert e2.stability is StabilityClass.UNSTABLE_FOCUS


def test_stability_report_fields():
    p = params(2.2)
    e1, e2 = interior_equilibria(p)
    rep = stability_report(p, e2)
    j = jacobian(p, e2.x, e2.y)
    assert rep.trace == pytest.approx(j[0, 0] + j[1, 1], rel=1e-14)
    assert rep.determinant == pytest.approx(np.linalg.det(j), rel=1e-12)
    assert rep.stability is e2.stability
    assert rep.sufficient_flags is not None


def test_stability_report_rejects_stale_point():
    p = params(2.2)
    e1, _ = interior_equilibria(p)
    moved = Equilibrium(
        kind=e1.kind,
        location=e1.location + np.array([0.5, 0.0]),
        eigenvalues=e1.eigenvalues,
        stability=e1.stability,
    )
    with pytest.raises(StaleEquilibriumError):
        stability_report(p, moved)


def test_simplified_trace_det_match_jacobian():
    """The factored interior-point expressions agree with the raw 2x2."""
    g = rng(11)
    checked = 0
    for _ in range(100):
        xi = g.uniform(1.7, 2.45)
        p = params(xi)
        pts = interior_equilibria(p)
        for e in pts:
            tr_s, det_s = trace_det_simplified(p, e)
            j = jacobian(p, e.x, e.y)
            assert tr_s == pytest.approx(j[0, 0] + j[1, 1], rel=1e-8, abs=1e-12)
            assert det_s == pytest.approx(np.linalg.det(j), rel=1e-8, abs=1e-12)
            checked += 1
    assert checked > 100


def test_saddle_sufficient_check_on_lower_interior():
    p = params(2.2)
    e1, _ = interior_equilibria(p)
    chk = saddle_sufficient_check(p, e1)
    assert chk.verdict is StabilityClass.SADDLE
    assert chk.det < 0


def test_focus_case_labels():
    p = params(2.2)
    _, e2 = interior_equilibria(p)
    assert interior_focus_case(p, e2).case is FocusCase.STABLE_REGIME
    p6 = params(2.478)
    _, e2 = interior_equilibria(p6)
    assert interior_focus_case(p6, e2).case is FocusCase.REPELLER


def test_eigenvalues_closed_form_matches_numpy():
    g = rng(5)
    for _ in range(50):
        j = g.normal(size=(2, 2))
        ours = sorted(eigenvalues_2x2(j), key=lambda z: (z.real, z.imag))
        ref = sorted(np.linalg.eigvals(j).astype(complex),
                     key=lambda z: (z.real, z.imag))
        for a, b in zip(ours, ref):
            assert abs(a - b) < 1e-10 * max(1.0, abs(b))
