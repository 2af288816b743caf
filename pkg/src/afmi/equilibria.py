"""Closed-form equilibria of the model and the two-interior window.

Interior equilibria are roots of the quadratic

    a x^2 + b x + c = 0,
    a = beta*eps
    b = beta*eps*xi - [delta - beta(1 - eps)] k
    c = [(beta - delta*alpha - beta*eps) xi - delta] k

paired with the predator-nullcline line for the y coordinate.  The
discriminant is taken literally as b^2 - 4ac.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleGeometryError
from .model import ModelParams, jacobian, predator_nullcline_y

__all__ = [
    "EquilibriumKind",
    "StabilityClass",
    "QuadraticCoefficients",
    "Equilibrium",
    "RegimeClass",
    "eigenvalues_2x2",
    "classify_trace_det",
    "quadratic_coefficients",
    "interior_equilibria",
    "boundary_equilibria",
    "all_equilibria",
    "two_interior_window",
    "regime_classify",
    "transcritical_threshold",
]

# NonHyperbolic band on |trace|, |det| after normalising J by its max entry.
HYPERBOLICITY_TOL = 1e-9


class EquilibriumKind(enum.Enum):
    TRIVIAL = "trivial"
    PREDATOR_FREE = "predator_free"
    PREY_FREE = "prey_free"
    INTERIOR_LOW = "interior_low"    # E1, smaller prey density
    INTERIOR_HIGH = "interior_high"  # E2, larger prey density
    INTERIOR_COLLIDED = "interior_collided"


class StabilityClass(enum.Enum):
    STABLE_NODE = "stable_node"
    STABLE_FOCUS = "stable_focus"
    UNSTABLE_NODE = "unstable_node"
    UNSTABLE_FOCUS = "unstable_focus"
    SADDLE = "saddle"
    NON_HYPERBOLIC = "non_hyperbolic"

    @property
    def attracting(self) -> bool:
        return self in (StabilityClass.STABLE_NODE, StabilityClass.STABLE_FOCUS)


class RegimeClass(enum.Enum):
    NO_INTERIOR = "no_interior"
    ONE_INTERIOR = "one_interior"
    TWO_INTERIOR = "two_interior"
    DEGENERATE_BOUNDARY = "degenerate_boundary"


@dataclass(frozen=True)
class QuadraticCoefficients:
    a: float
    b: float
    c: float
    discriminant: float

    @property
    def collision_tol(self) -> float:
        # relative, scale-invariant near the saddle-node
        return 1e-10 * max(1.0, self.b * self.b)


@dataclass(frozen=True)
class Equilibrium:
    kind: EquilibriumKind
    location: np.ndarray  # shape (2,)
    eigenvalues: tuple[complex, complex]
    stability: StabilityClass

    @property
    def x(self) -> float:
        return float(self.location[0])

    @property
    def y(self) -> float:
        return float(self.location[1])

    @property
    def is_saddle(self) -> bool:
        return self.stability is StabilityClass.SADDLE


def eigenvalues_2x2(j: np.ndarray) -> tuple[complex, complex]:
    """Closed-form eigenvalues of a real 2x2 matrix, real-part ordered."""
    tr = j[0, 0] + j[1, 1]
    det = j[0, 0] * j[1, 1] - j[0, 1] * j[1, 0]
    disc = tr * tr - 4.0 * det
    if disc >= 0.0:
        s = math.sqrt(disc)
        lam = (complex((tr - s) / 2.0), complex((tr + s) / 2.0))
    else:
        s = math.sqrt(-disc)
        lam = (complex(tr / 2.0, -s / 2.0), complex(tr / 2.0, s / 2.0))
    return lam


def classify_trace_det(j: np.ndarray) -> StabilityClass:
    """Trace-determinant-plane classification with a non-hyperbolic band."""
    scale = np.max(np.abs(j))
    if scale == 0.0:
        return StabilityClass.NON_HYPERBOLIC
    jn = j / scale
    tr = jn[0, 0] + jn[1, 1]
    det = jn[0, 0] * jn[1, 1] - jn[0, 1] * jn[1, 0]
    if abs(det) < HYPERBOLICITY_TOL:
        return StabilityClass.NON_HYPERBOLIC
    if det < 0.0:
        return StabilityClass.SADDLE
    if abs(tr) < HYPERBOLICITY_TOL:
        return StabilityClass.NON_HYPERBOLIC
    focus = tr * tr - 4.0 * det < 0.0
    if tr < 0.0:
        return StabilityClass.STABLE_FOCUS if focus else StabilityClass.STABLE_NODE
    return StabilityClass.UNSTABLE_FOCUS if focus else StabilityClass.UNSTABLE_NODE


def _make_equilibrium(p: ModelParams, kind: EquilibriumKind,
                      x: float, y: float) -> Equilibrium:
    j = jacobian(p, x, y)
    return Equilibrium(
        kind=kind,
        location=np.array([x, y]),
        eigenvalues=eigenvalues_2x2(j),
        stability=classify_trace_det(j),
    )


def quadratic_coefficients(p: ModelParams) -> QuadraticCoefficients:
    """Coefficients of the interior quadratic and its discriminant."""
    a = p.beta * p.eps
    b = a * p.xi - (p.delta - p.beta * (1.0 - p.eps)) * p.k
    c = ((p.beta - p.delta * p.alpha - a) * p.xi - p.delta) * p.k
    return QuadraticCoefficients(a=a, b=b, c=c, discriminant=b * b - 4.0 * a * c)


def interior_equilibria(p: ModelParams) -> list[Equilibrium]:
    """Positive interior equilibria, ordered by prey density.

    Returns zero, one or two equilibria; a double root (the saddle-node
    collision) is reported as a single INTERIOR_COLLIDED point.
    """
    q = quadratic_coefficients(p)
    if abs(q.discriminant) < q.collision_tol:
        x = -q.b / (2.0 * q.a)
        y = predator_nullcline_y(p, x) if x >= 0.0 else -1.0
        if x > 0.0 and y > 0.0:
            return [_make_equilibrium(p, EquilibriumKind.INTERIOR_COLLIDED, x, y)]
        return []
    if q.discriminant < 0.0:
        return []
    s = math.sqrt(q.discriminant)
    roots = sorted(((-q.b - s) / (2.0 * q.a), (-q.b + s) / (2.0 * q.a)))
    kept: list[tuple[float, float]] = []
    for x in roots:
        if x <= 0.0:
            continue
        y = predator_nullcline_y(p, x)
        if y > 0.0:
            kept.append((x, y))
    if len(kept) == 2:
        return [
            _make_equilibrium(p, EquilibriumKind.INTERIOR_LOW, *kept[0]),
            _make_equilibrium(p, EquilibriumKind.INTERIOR_HIGH, *kept[1]),
        ]
    if len(kept) == 1:
        return [_make_equilibrium(p, EquilibriumKind.INTERIOR_HIGH, *kept[0])]
    return []


def prey_free_height(p: ModelParams) -> float:
    """Predator level of the prey-free state; positive iff it is feasible."""
    return ((p.beta - p.delta * p.alpha) * p.xi - p.delta) / (p.delta * p.eps)


def boundary_equilibria(p: ModelParams) -> list[Equilibrium]:
    """Trivial, predator-free and (when feasible) prey-free equilibria."""
    eqs = [
        _make_equilibrium(p, EquilibriumKind.TRIVIAL, 0.0, 0.0),
        _make_equilibrium(p, EquilibriumKind.PREDATOR_FREE, p.k, 0.0),
    ]
    y_free = prey_free_height(p)
    if y_free > 0.0:
        eqs.append(_make_equilibrium(p, EquilibriumKind.PREY_FREE, 0.0, y_free))
    return eqs


def all_equilibria(p: ModelParams) -> list[Equilibrium]:
    return boundary_equilibria(p) + interior_equilibria(p)


def two_interior_window(p: ModelParams) -> tuple[float, float] | None:
    """The open xi interval on which two positive interiors exist.

    The lower edge is the transcritical threshold (c = 0); the upper edge
    is the smallest discriminant root above it, capped by the b = 0 line.
    Returns None when beta - delta*alpha - beta*eps <= 0, or when the
    linear coefficient is positive everywhere (delta <= beta(1 - eps)):
    with a > 0 and c > 0 that forces both roots negative, so two positive
    interiors never coexist.
    """
    cc = p.beta - p.delta * p.alpha - p.beta * p.eps
    if cc <= 0.0:
        return None
    a = p.beta * p.eps
    bb = p.delta - p.beta * (1.0 - p.eps)
    if bb <= 0.0:
        return None
    xi_low = p.delta / cc
    # discriminant as a quadratic in xi:
    #   a^2 xi^2 - 2ak(bb + 2cc) xi + bb^2 k^2 + 4ak delta
    qa = a * a
    qb = -2.0 * a * p.k * (bb + 2.0 * cc)
    qc = bb * bb * p.k * p.k + 4.0 * a * p.k * p.delta
    disc = qb * qb - 4.0 * qa * qc
    xi_cap = bb * p.k / a
    xi_high = xi_cap
    if disc >= 0.0:
        s = math.sqrt(disc)
        for root in sorted(((-qb - s) / (2.0 * qa), (-qb + s) / (2.0 * qa))):
            if root > xi_low:
                xi_high = min(root, xi_cap)
                break
    if not math.isfinite(xi_high) or xi_high <= xi_low:
        return None
    return (xi_low, xi_high)


def transcritical_threshold(p: ModelParams) -> float:
    """xi at which the interior branch meets the prey-free state (c = 0)."""
    cc = p.beta - p.delta * p.alpha - p.beta * p.eps
    if cc <= 0.0:
        raise InfeasibleGeometryError(
            "transcritical threshold undefined: beta - delta*alpha - beta*eps <= 0"
        )
    return p.delta / cc


def regime_classify(p: ModelParams) -> RegimeClass:
    """Count-of-interior-equilibria regime at these parameters."""
    q = quadratic_coefficients(p)
    if abs(q.discriminant) < q.collision_tol or abs(q.c) < 1e-12 * max(1.0, abs(q.b)) * p.k:
        return RegimeClass.DEGENERATE_BOUNDARY
    n = len(interior_equilibria(p))
    return {
        0: RegimeClass.NO_INTERIOR,
        1: RegimeClass.ONE_INTERIOR,
        2: RegimeClass.TWO_INTERIOR,
    }[n]
