"""Core predator-prey model with additional food and predator interference.

The planar vector field is

    dx/dt = x (1 - x/k) - x y / (1 + alpha*xi + x + eps*y)
    dy/dt = beta (x + xi) y / (1 + alpha*xi + x + eps*y) - delta * y

where x is the pest (prey) density and y the introduced predator density.
The shared denominator is a Beddington-DeAngelis response: ``alpha`` scales
the (inverse) quality of the additional food, ``xi`` its quantity, and
``eps`` the strength of mutual interference among predators.

Everything here is a pure function of its inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DomainError,
    InfeasibleGeometryError,
    ParameterError,
    SingularNullclineError,
)

__all__ = [
    "ModelParams",
    "EquivalentParams",
    "SlopeComparison",
    "BoundednessVerdict",
    "validate_state",
    "vector_field",
    "jacobian",
    "prey_nullcline_y",
    "predator_nullcline_y",
    "predator_nullcline_slope",
    "equivalent_field",
    "is_bounded_regime",
    "slope_comparison",
]

_NULLCLINE_DENOM_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """The six positive constants defining one model instance.

    alpha : reciprocal quality of the additional food (dimensionless)
    beta  : predator conversion/birth rate (1/time)
    delta : predator death rate (1/time)
    eps   : mutual-interference strength (dimensionless)
    xi    : additional-food quantity (prey-density units)
    k     : prey carrying capacity (prey-density units)
    """

    alpha: float
    beta: float
    delta: float
    eps: float
    xi: float
    k: float

    def __post_init__(self):
        vals = (self.alpha, self.beta, self.delta, self.eps, self.xi, self.k)
        if not all(math.isfinite(v) for v in vals):
            raise ParameterError("all parameters must be finite")
        if min(self.alpha, self.beta, self.delta, self.eps, self.k) <= 0.0:
            raise ParameterError(
                "alpha, beta, delta, eps, k must be strictly positive"
            )
        if self.xi < 0.0:
            raise ParameterError("xi must be non-negative")
        if not self.beta > self.delta:
            raise ParameterError("feasibility requires beta > delta")

    @property
    def low_interference(self) -> bool:
        """True in the low-interference case eps < 1."""
        return self.eps < 1.0

    def with_xi(self, xi: float) -> "ModelParams":
        """Copy of these parameters at a different food quantity."""
        return replace(self, xi=xi)

    def denominator(self, x: float, y: float) -> float:
        """Shared functional-response denominator 1 + alpha*xi + x + eps*y."""
        return 1.0 + self.alpha * self.xi + x + self.eps * y


@dataclass(frozen=True)
class EquivalentParams:
    """Constants of the topologically equivalent polynomial system.

    Derived from :class:`ModelParams` by P=(1+alpha*xi)/k, Q=eps/k,
    R=beta/k, N=k*delta, M=xi/k.  ``k`` is kept so the conjugacy
    (u, v) -> (k*u, v) stays recoverable.
    """

    P: float
    Q: float
    R: float
    N: float
    M: float
    k: float

    @classmethod
    def from_params(cls, p: ModelParams) -> "EquivalentParams":
        return cls(
            P=(1.0 + p.alpha * p.xi) / p.k,
            Q=p.eps / p.k,
            R=p.beta / p.k,
            N=p.k * p.delta,
            M=p.xi / p.k,
            k=p.k,
        )


@dataclass(frozen=True)
class SlopeComparison:
    """Tangent-slope comparison governing the two-interior geometry.

    m_prey_axis is the prey-nullcline tangent slope at its predator-axis
    intercept; m_pred_line is the (constant) predator-nullcline slope.
    Two interior equilibria require m_prey_axis > m_pred_line.
    """

    m_prey_axis: float
    m_pred_line: float
    two_interior_slope_ok: bool
    xi_slope_bound: float


@dataclass(frozen=True)
class BoundednessVerdict:
    bounded: bool
    margin: float  # signed value of 1 - eps*(1 - delta)


def validate_state(x: float, y: float) -> None:
    """Reject states outside the closed positive quadrant."""
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DomainError(f"non-finite state ({x}, {y})")
    if x < 0.0 or y < 0.0:
        raise DomainError(f"state ({x}, {y}) outside the positive quadrant")


def vector_field(p: ModelParams, x: float, y: float) -> np.ndarray:
    """Right-hand side (dx/dt, dy/dt) at the state (x, y)."""
    validate_state(x, y)
    d = p.denominator(x, y)
    dx = x * (1.0 - x / p.k) - x * y / d
    dy = p.beta * (x + p.xi) * y / d - p.delta * y
    return np.array([dx, dy])


def vector_field_arr(p: ModelParams, s: np.ndarray) -> np.ndarray:
    """Vectorised right-hand side; ``s`` has shape (..., 2).

    No domain checks: used by the integrators, which clip states themselves.
    """
    x = s[..., 0]
    y = s[..., 1]
    d = 1.0 + p.alpha * p.xi + x + p.eps * y
    dx = x * (1.0 - x / p.k) - x * y / d
    dy = p.beta * (x + p.xi) * y / d - p.delta * y
    return np.stack([dx, dy], axis=-1)


def jacobian(p: ModelParams, x: float, y: float) -> np.ndarray:
    """Analytic 2x2 Jacobian of the vector field at (x, y)."""
    validate_state(x, y)
    a = 1.0 + p.alpha * p.xi  # denominator constant term
    d = a + x + p.eps * y
    d2 = d * d
    j11 = 1.0 - 2.0 * x / p.k - y * (a + p.eps * y) / d2
    j12 = -x * (a + x) / d2
    j21 = p.beta * y * (a + p.eps * y - p.xi) / d2
    j22 = p.beta * (x + p.xi) * (a + x) / d2 - p.delta
    return np.array([[j11, j12], [j21, j22]])


def hessians(p: ModelParams, x: float, y: float) -> tuple[np.ndarray, np.ndarray]:
    """Second-derivative matrices (H1, H2) of the two field components."""
    validate_state(x, y)
    a = 1.0 + p.alpha * p.xi
    d = a + x + p.eps * y
    d2, d3 = d * d, d * d * d
    e = p.eps
    # prey component x(1 - x/k) - x*y/d
    f1_xx = -2.0 / p.k + 2.0 * y * (a + e * y) / d3
    f1_xy = -(a + 2.0 * e * y) / d2 + 2.0 * e * y * (a + e * y) / d3
    f1_yy = 2.0 * e * x * (a + x) / d3
    # predator component beta*(x+xi)*y/d - delta*y
    f2_xx = -2.0 * p.beta * y * (a + e * y - p.xi) / d3
    f2_xy = (
        p.beta * (a + 2.0 * e * y - p.xi) / d2
        - 2.0 * p.beta * e * y * (a + e * y - p.xi) / d3
    )
    f2_yy = -2.0 * p.beta * e * (x + p.xi) * (a + x) / d3
    h1 = np.array([[f1_xx, f1_xy], [f1_xy, f1_yy]])
    h2 = np.array([[f2_xx, f2_xy], [f2_xy, f2_yy]])
    return h1, h2


def dfield_dxi(p: ModelParams, x: float, y: float) -> np.ndarray:
    """Partial derivative of the vector field with respect to xi."""
    validate_state(x, y)
    d = p.denominator(x, y)
    g1 = p.alpha * x * y / (d * d)
    g2 = p.beta * y / d - p.alpha * p.beta * (x + p.xi) * y / (d * d)
    return np.array([g1, g2])


def prey_nullcline_y(p: ModelParams, x: float) -> float:
    """Predator density on the non-trivial prey nullcline at prey level x.

    y = (k - x)(1 + alpha*xi + x) / (k - (k - x) eps), for 0 <= x <= k.
    """
    if not 0.0 <= x <= p.k:
        raise DomainError(f"x={x} outside [0, k]")
    denom = p.k - (p.k - x) * p.eps
    if abs(denom) <= _NULLCLINE_DENOM_TOL:
        raise SingularNullclineError(
            f"prey nullcline singular at x={x} (eps={p.eps})"
        )
    return (p.k - x) * (1.0 + p.alpha * p.xi + x) / denom


def predator_nullcline_y(p: ModelParams, x: float) -> float:
    """Predator density on the non-trivial predator nullcline (a line).

    y = ((beta - delta)/(delta*eps)) x + ((beta - delta*alpha) xi - delta)
        / (delta*eps).  May be negative; callers decide feasibility.
    """
    if x < 0.0:
        raise DomainError(f"x={x} must be non-negative")
    de = p.delta * p.eps
    return ((p.beta - p.delta) * x + (p.beta - p.delta * p.alpha) * p.xi - p.delta) / de


def predator_nullcline_slope(p: ModelParams) -> float:
    """Slope (beta - delta)/(delta*eps) of the predator nullcline."""
    return (p.beta - p.delta) / (p.delta * p.eps)


def equivalent_field(ep: EquivalentParams, u: float, v: float) -> np.ndarray:
    """Right-hand side of the polynomial system conjugate to the model.

    du/dtau = u [ k (1-u)(P + u + Q v) - v ]
    dv/dtau = v [ k^2 R (u + M) - N (P + u + Q v) ]

    The conjugacy is (u, v) = (x/k, y) with time rescaled by the strictly
    positive factor (P + u + Q v)/k.  Note the k^2 on the predator growth
    term: without it the polynomial field does not vanish at the images of
    the original equilibria.
    """
    if u < 0.0 or v < 0.0:
        raise DomainError(f"state ({u}, {v}) outside the positive quadrant")
    w = ep.P + u + ep.Q * v
    du = u * (ep.k * (1.0 - u) * w - v)
    dv = v * (ep.k * ep.k * ep.R * (u + ep.M) - ep.N * w)
    return np.array([du, dv])


def is_bounded_regime(p: ModelParams) -> BoundednessVerdict:
    """Closed-form boundedness predicate eps*(1 - delta) < 1 with margin."""
    margin = 1.0 - p.eps * (1.0 - p.delta)
    return BoundednessVerdict(bounded=margin > 0.0, margin=margin)


def slope_comparison(p: ModelParams) -> SlopeComparison:
    """Compare the two nullcline slopes at the predator axis.

    Only meaningful in the low-interference case; for eps >= 1 the prey
    nullcline never reaches the predator axis at a positive height.
    """
    if p.eps >= 1.0:
        raise InfeasibleGeometryError(
            "prey-axis intercept infeasible for eps >= 1"
        )
    one_m_eps = 1.0 - p.eps
    m_prey = (p.k * one_m_eps - (1.0 + p.alpha * p.xi)) / (p.k * one_m_eps**2)
    m_pred = predator_nullcline_slope(p)
    xi_bound = (
        p.k * one_m_eps * (p.delta - p.beta * one_m_eps) - p.delta * p.eps
    ) / (p.alpha * p.delta * p.eps)
    return SlopeComparison(
        m_prey_axis=m_prey,
        m_pred_line=m_pred,
        two_interior_slope_ok=m_prey > m_pred,
        xi_slope_bound=xi_bound,
    )
