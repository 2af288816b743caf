"""Eigenvalue stability classification and the sufficient-condition checks.

The authoritative classifier is always the direct 2x2 eigen-solve of the
analytic Jacobian.  The inequality bounds from the published sufficient conditions
are evaluated verbatim as diagnostics; near degeneracies they can
disagree with the direct computation, and callers get both.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .equilibria import (
    Equilibrium,
    EquilibriumKind,
    StabilityClass,
    classify_trace_det,
    eigenvalues_2x2,
)
from .errors import PreconditionError, StaleEquilibriumError
from .model import ModelParams, jacobian, predator_nullcline_y, vector_field

__all__ = [
    "StabilityReport",
    "FocusCase",
    "SaddleCheck",
    "stability_report",
    "trace_det_simplified",
    "saddle_sufficient_check",
    "interior_focus_case",
]

_EQUILIBRIUM_RESIDUAL_TOL = 1e-6
_NULLCLINE_RESIDUAL_TOL = 1e-8


class FocusCase(enum.Enum):
    STABLE_REGIME = "stable_regime"  # (i): trace < 0, det > 0
    WEAK_FOCUS = "weak_focus"        # (ii): trace = 0 boundary
    REPELLER = "repeller"            # (iii): trace > 0 side


@dataclass(frozen=True)
class SaddleCheck:
    is_saddle_by_bound: bool
    bound: float
    det: float
    verdict: StabilityClass


@dataclass(frozen=True)
class FocusCaseReport:
    case: FocusCase
    det_bound: float
    trace_bound: float
    det_bound_satisfied: bool
    trace_bound_satisfied: bool
    trace: float
    det: float


@dataclass(frozen=True)
class StabilityReport:
    trace: float
    determinant: float
    eigenvalues: tuple[complex, complex]
    stability: StabilityClass
    sufficient_flags: dict | None  # populated for interior kinds only


_INTERIOR_KINDS = (
    EquilibriumKind.INTERIOR_LOW,
    EquilibriumKind.INTERIOR_HIGH,
    EquilibriumKind.INTERIOR_COLLIDED,
)


def _require_equilibrium(p: ModelParams, e: Equilibrium) -> None:
    res = np.max(np.abs(vector_field(p, e.x, e.y)))
    if res > _EQUILIBRIUM_RESIDUAL_TOL:
        raise StaleEquilibriumError(
            f"point {e.location} has field residual {res:.3g} > "
            f"{_EQUILIBRIUM_RESIDUAL_TOL}"
        )


def _det_sign_bound(p: ModelParams, x: float, xi: float, y: float) -> float:
    """The displayed y-threshold whose crossing flips the determinant sign.

    Evaluated verbatim from the published sufficient conditions, with the
    y-dependent factor (beta-delta)x + (beta-delta*alpha)xi - delta.
    """
    b, d, a, e, k = p.beta, p.delta, p.alpha, p.eps, p.k
    lam = (b - d) * x + (b - d * a) * xi - d  # equals delta*eps*y on the line
    num = (x + xi) * (b * b * (x + xi) ** 2 * (k - 2.0 * x)) * lam
    den = d * k * (
        (x + xi) * ((b - d) * x + b * xi) * lam
        + d * x * ((b - d) * x + b * xi - d * e) * (1.0 + a * xi + x)
    )
    return num / den


def _trace_sign_bound(p: ModelParams, x: float, xi: float) -> float:
    """y-threshold above which the simplified trace is negative."""
    b, d, a, k = p.beta, p.delta, p.alpha, p.k
    num = b * (x + xi) * (
        b * ((1.0 - d) * k - 2.0 * x) * (x + xi)
        + k * d * d * (1.0 + a * xi + x)
    )
    den = d * k * ((b - d) * x + b * xi)
    return num / den


def stability_report(p: ModelParams, e: Equilibrium) -> StabilityReport:
    """Full trace/det/eigenvalue report at a (verified) equilibrium."""
    _require_equilibrium(p, e)
    j = jacobian(p, e.x, e.y)
    trace = float(j[0, 0] + j[1, 1])
    det = float(j[0, 0] * j[1, 1] - j[0, 1] * j[1, 0])
    flags = None
    if e.kind in _INTERIOR_KINDS:
        det_bound = _det_sign_bound(p, e.x, p.xi, e.y)
        trace_bound = _trace_sign_bound(p, e.x, p.xi)
        flags = {
            "det_bound": det_bound,
            "trace_bound": trace_bound,
            "y_below_det_bound": e.y < det_bound,
            "y_above_trace_bound": e.y > trace_bound,
        }
    return StabilityReport(
        trace=trace,
        determinant=det,
        eigenvalues=eigenvalues_2x2(j),
        stability=classify_trace_det(j),
        sufficient_flags=flags,
    )


def trace_det_simplified(p: ModelParams, e: Equilibrium) -> tuple[float, float]:
    """Trace and determinant via the predator-nullcline substitutions.

    Valid only for interior points (they sit on the predator line); must
    agree with the raw Jacobian to relative 1e-8 -- the cross-check is the
    point of this routine.
    """
    if e.kind not in _INTERIOR_KINDS:
        raise PreconditionError(f"{e.kind} is not an interior equilibrium")
    x, y = e.x, e.y
    line_y = predator_nullcline_y(p, x)
    if abs(y - line_y) > _NULLCLINE_RESIDUAL_TOL * max(1.0, abs(line_y)):
        raise PreconditionError(
            f"point ({x}, {y}) is off the predator nullcline (y={line_y})"
        )
    b, d, a, eps, k, xi = p.beta, p.delta, p.alpha, p.eps, p.k, p.xi
    r = 1.0 + a * xi + x + eps * y
    bx = b * (x + xi)
    gx = (b - d) * x + b * xi  # = delta*(1 + alpha*xi + eps*y) on the line
    lam = (b - d) * x + (b - d * a) * xi - d  # = delta*eps*y on the line
    trace = (
        bx * (b * (1.0 - 2.0 * x / k - d) * (x + xi) + d * d * (1.0 + a * xi + x))
        - d * gx * y
    ) / (d * d * r * r)
    # second factor is (beta-delta)(x+xi); the delta*xi term, not delta*eps
    det = (
        -bx / (d**3 * r**4)
        * (bx * bx * (1.0 - 2.0 * x / k) - d * gx * y)
        * lam
        + b * x * y * (b - d) * (x + xi) * (1.0 + a * xi + x) / (d * r**4)
    )
    return float(trace), float(det)


def saddle_sufficient_check(p: ModelParams, e1: Equilibrium) -> SaddleCheck:
    """Sufficient-condition saddle test for the lower interior point.

    Returns the evaluated y-bound, whether y1 sits below it, the directly
    computed determinant, and the direct classification for comparison.
    A collided (degenerate) point reports NON_HYPERBOLIC, never SADDLE.
    """
    j = jacobian(p, e1.x, e1.y)
    det = float(j[0, 0] * j[1, 1] - j[0, 1] * j[1, 0])
    bound = _det_sign_bound(p, e1.x, p.xi, e1.y)
    verdict = classify_trace_det(j)
    if e1.kind is EquilibriumKind.INTERIOR_COLLIDED:
        verdict = StabilityClass.NON_HYPERBOLIC
    return SaddleCheck(
        is_saddle_by_bound=0.0 < e1.y < bound,
        bound=bound,
        det=det,
        verdict=verdict,
    )


def interior_focus_case(p: ModelParams, e2: Equilibrium) -> FocusCaseReport:
    """Stable / weak-focus / repeller trichotomy for the upper interior.

    The case is decided by the direct trace sign (the sufficient bounds are
    only sufficient); both bound values ship in the report so callers can
    spot disagreement near degeneracies.
    """
    if e2.kind not in _INTERIOR_KINDS:
        raise PreconditionError(f"{e2.kind} is not an interior equilibrium")
    j = jacobian(p, e2.x, e2.y)
    trace = float(j[0, 0] + j[1, 1])
    det = float(j[0, 0] * j[1, 1] - j[0, 1] * j[1, 0])
    scale = float(np.max(np.abs(j)))
    if abs(trace) < 1e-9 * max(scale, 1e-300):
        case = FocusCase.WEAK_FOCUS
    elif trace < 0.0:
        case = FocusCase.STABLE_REGIME
    else:
        case = FocusCase.REPELLER
    det_bound = _det_sign_bound(p, e2.x, p.xi, e2.y)
    trace_bound = _trace_sign_bound(p, e2.x, p.xi)
    return FocusCaseReport(
        case=case,
        det_bound=det_bound,
        trace_bound=trace_bound,
        det_bound_satisfied=e2.y > det_bound,
        trace_bound_satisfied=e2.y > trace_bound,
        trace=trace,
        det=det,
    )
