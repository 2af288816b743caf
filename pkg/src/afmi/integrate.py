"""Adaptive trajectory integration and omega-limit classification.

A vectorised embedded Dormand-Prince 5(4) pair drives everything: single
trajectories (with dense output via cubic Hermite interpolation) and
whole batches of initial conditions for basin estimation.  States are
clipped to the positive quadrant; negative excursions are numerical
artifacts of the Kolmogorov form and are counted as clip events.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .equilibria import Equilibrium, EquilibriumKind, all_equilibria
from .errors import DomainError, StiffnessError
from .model import ModelParams, validate_state

__all__ = [
    "IntegratorSettings",
    "Termination",
    "AttractorKind",
    "AttractorId",
    "Trajectory",
    "integrate",
    "classify_batch",
    "classify_omega_limit",
    "attractor_catalog",
    "trajectory_to_csv",
]

_MIN_STEP = 1e-14

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.zeros((7, 6))
_A[1, 0] = 1 / 5
_A[2, :2] = (3 / 40, 9 / 40)
_A[3, :3] = (44 / 45, -56 / 15, 32 / 9)
_A[4, :4] = (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729)
_A[5, :5] = (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656)
_A[6, :6] = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([
    71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40,
])


@dataclass(frozen=True)
class IntegratorSettings:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_time: float = 2000.0
    max_steps: int = 2_000_000
    escape_norm: float = 1e6
    convergence_radius: float = 1e-5
    convergence_dwell: float = 10.0

    def __post_init__(self):
        vals = (self.rel_tol, self.abs_tol, self.max_time, self.max_steps,
                self.escape_norm, self.convergence_radius, self.convergence_dwell)
        if any(v <= 0 for v in vals):
            raise ValueError("all integrator settings must be positive")
        if self.rel_tol > 1e-3 or self.abs_tol > 1e-3:
            raise ValueError("tolerances must not exceed 1e-3")


class Termination(enum.Enum):
    CONVERGED = "converged"
    ESCAPED = "escaped"
    BUDGET_EXHAUSTED = "budget_exhausted"
    REACHED_AXIS = "reached_axis"


class AttractorKind(enum.Enum):
    TRIVIAL_EQ = "trivial_eq"
    PREDATOR_FREE_EQ = "predator_free_eq"
    PREY_FREE_EQ = "prey_free_eq"
    INTERIOR_EQ = "interior_eq"
    LIMIT_CYCLE = "limit_cycle"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class AttractorId:
    kind: AttractorKind
    index: int | None = None          # interior index (0 = E1, 1 = E2)
    reference: tuple | None = None    # a point on the cycle, for LIMIT_CYCLE

    def __str__(self) -> str:
        if self.kind is AttractorKind.INTERIOR_EQ:
            return f"interior_eq[{self.index}]"
        return self.kind.value


UNKNOWN = AttractorId(AttractorKind.UNKNOWN)

_KIND_MAP = {
    EquilibriumKind.TRIVIAL: AttractorKind.TRIVIAL_EQ,
    EquilibriumKind.PREDATOR_FREE: AttractorKind.PREDATOR_FREE_EQ,
    EquilibriumKind.PREY_FREE: AttractorKind.PREY_FREE_EQ,
    EquilibriumKind.INTERIOR_LOW: AttractorKind.INTERIOR_EQ,
    EquilibriumKind.INTERIOR_HIGH: AttractorKind.INTERIOR_EQ,
    EquilibriumKind.INTERIOR_COLLIDED: AttractorKind.INTERIOR_EQ,
}


@dataclass(frozen=True)
class Trajectory:
    """Time-stamped orbit sample with a termination verdict."""

    t: np.ndarray            # strictly increasing sample times
    states: np.ndarray       # (n, 2)
    derivs: np.ndarray       # (n, 2) field values at the samples
    termination: Termination
    attractor: AttractorId | None = None
    clip_events: int = 0
    steps: int = 0

    def at(self, times) -> np.ndarray:
        """Dense output by cubic Hermite interpolation of stored steps."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if np.any(times < self.t[0]) or np.any(times > self.t[-1]):
            raise ValueError("requested time outside the integrated range")
        idx = np.clip(np.searchsorted(self.t, times, side="right") - 1,
                      0, len(self.t) - 2)
        t0, t1 = self.t[idx], self.t[idx + 1]
        h = (t1 - t0)[:, None]
        s = ((times - t0) / (t1 - t0))[:, None]
        y0, y1 = self.states[idx], self.states[idx + 1]
        f0, f1 = self.derivs[idx], self.derivs[idx + 1]
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def _field_factory(p: ModelParams, direction: float):
    a = 1.0 + p.alpha * p.xi

    def f(s: np.ndarray) -> np.ndarray:
        x = s[..., 0]
        y = s[..., 1]
        d = a + x + p.eps * y
        dx = x * (1.0 - x / p.k) - x * y / d
        dy = p.beta * (x + p.xi) * y / d - p.delta * y
        return direction * np.stack([dx, dy], axis=-1)

    return f


def attractor_catalog(p: ModelParams) -> tuple[np.ndarray, list[AttractorId]]:
    """Capture candidates: every equilibrium of the instance, labelled."""
    points, ids = [], []
    interior_index = 0
    for e in all_equilibria(p):
        kind = _KIND_MAP[e.kind]
        idx = None
        if kind is AttractorKind.INTERIOR_EQ:
            idx = interior_index
            interior_index += 1
        points.append(e.location)
        ids.append(AttractorId(kind, index=idx))
    return np.array(points), ids


def _initial_step(f, s0: np.ndarray, settings: IntegratorSettings) -> float:
    f0 = f(s0)
    scale = settings.abs_tol + settings.rel_tol * np.abs(s0)
    d0 = np.sqrt(np.mean((s0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    return min(h, settings.max_time)


class _BatchState:
    """Mutable bookkeeping for a batch of concurrently stepped orbits."""

    def __init__(self, s0: np.ndarray, settings: IntegratorSettings):
        n = s0.shape[0]
        self.s = s0.astype(float).copy()
        self.t = np.zeros(n)
        self.h = np.empty(n)
        self.status = np.zeros(n, dtype=np.int8)  # 0 active
        self.att = np.full(n, -1, dtype=np.int64)
        self.dwell_att = np.full(n, -1, dtype=np.int64)
        self.dwell_t0 = np.full(n, np.nan)
        self.clips = np.zeros(n, dtype=np.int64)
        self.steps = 0


_ACTIVE, _CONVERGED, _ESCAPED, _BUDGET, _AXIS, _STIFF = 0, 1, 2, 3, 4, 5


def _advance(
    p: ModelParams,
    bs: _BatchState,
    settings: IntegratorSettings,
    attractors: np.ndarray,
    direction: float = 1.0,
    record: list | None = None,
    max_step: float = np.inf,
    stop_fn=None,
) -> None:
    """Step every active orbit in the batch until it terminates.

    ``record`` (single-orbit mode) accumulates (t, state, deriv) tuples.
    ``stop_fn(t, s) -> bool`` optionally terminates an orbit early with
    BUDGET status (used by manifold tracing and section crossings).
    """
    f = _field_factory(p, direction)
    rtol, atol = settings.rel_tol, settings.abs_tol
    for i in range(bs.s.shape[0]):
        bs.h[i] = min(_initial_step(f, bs.s[i], settings), max_step)
    if record is not None:
        record.append((0.0, bs.s[0].copy(), f(bs.s[0])))

    while True:
        idx = np.flatnonzero(bs.status == _ACTIVE)
        if idx.size == 0:
            break
        if bs.steps >= settings.max_steps:
            bs.status[idx] = _BUDGET
            break
        bs.steps += 1

        s = bs.s[idx]
        h = np.minimum(bs.h[idx], settings.max_time - bs.t[idx])
        h = np.minimum(h, max_step)
        k = np.empty((7,) + s.shape)
        k[0] = f(s)
        for stage in range(1, 7):
            incr = np.tensordot(_A[stage, :stage], k[:stage], axes=(0, 0))
            k[stage] = f(s + h[:, None] * incr)
        s_new = s + h[:, None] * np.tensordot(_B5, k, axes=(0, 0))
        err = h[:, None] * np.tensordot(_E, k, axes=(0, 0))
        scale = atol + rtol * np.maximum(np.abs(s), np.abs(s_new))
        err_norm = np.sqrt(np.mean((err / scale) ** 2, axis=1))

        with np.errstate(divide="ignore", invalid="ignore"):
            factor = 0.9 * err_norm ** -0.2
        factor = np.clip(np.nan_to_num(factor, nan=0.2, posinf=10.0), 0.2, 10.0)
        accept = (err_norm <= 1.0) & np.isfinite(err_norm)
        bs.h[idx] = np.minimum(h * factor, max_step)

        stiff = bs.h[idx] < _MIN_STEP
        if np.any(stiff):
            bs.status[idx[stiff]] = _STIFF

        acc = idx[accept]
        if acc.size == 0:
            continue
        sa = s_new[accept]
        neg = np.any(sa < 0.0, axis=1)
        if np.any(neg):
            bs.clips[acc[neg]] += 1
            sa = np.maximum(sa, 0.0)
        bs.s[acc] = sa
        bs.t[acc] += h[accept]

        if record is not None and acc.size:
            record.append((bs.t[acc[0]], sa[0].copy(), f(sa[0:1])[0]))

        # escape
        norms = np.linalg.norm(sa, axis=1)
        esc = norms > settings.escape_norm
        bs.status[acc[esc]] = _ESCAPED

        # attractor capture with dwell
        if attractors.size:
            dist = np.linalg.norm(sa[:, None, :] - attractors[None, :, :], axis=2)
            nearest = np.argmin(dist, axis=1)
            near = dist[np.arange(acc.size), nearest] < settings.convergence_radius
            for j in np.flatnonzero(near & ~esc):
                g = acc[j]
                if bs.dwell_att[g] == nearest[j]:
                    if bs.t[g] - bs.dwell_t0[g] >= settings.convergence_dwell:
                        bs.status[g] = _CONVERGED
                        bs.att[g] = nearest[j]
                else:
                    bs.dwell_att[g] = nearest[j]
                    bs.dwell_t0[g] = bs.t[g]
            out = np.flatnonzero(~near)
            bs.dwell_att[acc[out]] = -1

        # caller-supplied stop condition
        if stop_fn is not None:
            for g in acc:
                if bs.status[g] == _ACTIVE and stop_fn(bs.t[g], bs.s[g]):
                    bs.status[g] = _BUDGET

        # time budget
        done = bs.t[acc] >= settings.max_time * (1.0 - 1e-15)
        timed = acc[done]
        bs.status[timed[bs.status[timed] == _ACTIVE]] = _BUDGET


def integrate(
    p: ModelParams,
    s0,
    settings: IntegratorSettings | None = None,
    attractors: np.ndarray | None = None,
    attractor_ids: list[AttractorId] | None = None,
    direction: float = 1.0,
    max_step: float = np.inf,
    stop_fn=None,
) -> Trajectory:
    """Integrate one orbit from s0, recording every accepted step."""
    settings = settings or IntegratorSettings()
    s0 = np.asarray(s0, dtype=float)
    validate_state(float(s0[0]), float(s0[1]))
    if attractors is None:
        attractors, attractor_ids = attractor_catalog(p)
    bs = _BatchState(s0[None, :], settings)
    record: list = []
    _advance(p, bs, settings, attractors, direction=direction,
             record=record, max_step=max_step, stop_fn=stop_fn)
    status = int(bs.status[0])
    if status == _STIFF:
        raise StiffnessError(f"step size underflow near state {bs.s[0]}")
    termination = {
        _CONVERGED: Termination.CONVERGED,
        _ESCAPED: Termination.ESCAPED,
        _BUDGET: Termination.BUDGET_EXHAUSTED,
        _AXIS: Termination.REACHED_AXIS,
    }[status]
    attractor = None
    if termination is Termination.CONVERGED and attractor_ids is not None:
        attractor = attractor_ids[int(bs.att[0])]
    t = np.array([r[0] for r in record])
    states = np.array([r[1] for r in record])
    derivs = np.array([r[2] for r in record])
    return Trajectory(
        t=t, states=states, derivs=derivs,
        termination=termination, attractor=attractor,
        clip_events=int(bs.clips[0]), steps=bs.steps,
    )


def classify_batch(
    p: ModelParams,
    starts: np.ndarray,
    settings: IntegratorSettings | None = None,
) -> list[AttractorId]:
    """Omega-limit ids for a batch of initial states (vectorised)."""
    settings = settings or IntegratorSettings()
    starts = np.asarray(starts, dtype=float)
    if np.any(starts < 0.0) or not np.all(np.isfinite(starts)):
        raise DomainError("initial states must be finite and non-negative")
    attractors, ids = attractor_catalog(p)
    bs = _BatchState(starts, settings)
    _advance(p, bs, settings, attractors)
    out: list[AttractorId] = []
    for i in range(starts.shape[0]):
        if bs.status[i] == _CONVERGED:
            out.append(ids[int(bs.att[i])])
        else:
            out.append(UNKNOWN)
    return out


def _detect_limit_cycle(traj: Trajectory) -> AttractorId | None:
    """Angle-unwinding cycle test on the tail of a non-converged orbit."""
    n = len(traj.t)
    if n < 50:
        return None
    tail = traj.states[int(0.6 * n):]
    center = tail.mean(axis=0)
    rel = tail - center
    radii = np.linalg.norm(rel, axis=1)
    if np.any(radii < 1e-9):
        return None
    theta = np.unwrap(np.arctan2(rel[:, 1], rel[:, 0]))
    turns = abs(theta[-1] - theta[0]) / (2.0 * np.pi)
    if turns < 3.0:
        return None
    # radii at successive full revolutions off the starting angle
    marks = theta[0] + np.sign(theta[-1] - theta[0]) * 2.0 * np.pi * np.arange(
        1, int(turns) + 1)
    ring = np.interp(marks, theta, radii) if theta[-1] > theta[0] else np.interp(
        marks[::-1], theta[::-1], radii[::-1])[::-1]
    spread = (ring.max() - ring.min()) / max(ring.mean(), 1e-12)
    if spread < 0.05:
        point = tail[-1]
        return AttractorId(AttractorKind.LIMIT_CYCLE,
                           reference=(float(point[0]), float(point[1])))
    return None


def classify_omega_limit(
    p: ModelParams,
    s0,
    settings: IntegratorSettings | None = None,
) -> AttractorId:
    """Map one initial state to its numerically observed attractor."""
    settings = settings or IntegratorSettings()
    traj = integrate(p, s0, settings)
    if traj.termination is Termination.CONVERGED and traj.attractor is not None:
        return traj.attractor
    if traj.termination is Termination.BUDGET_EXHAUSTED:
        cyc = _detect_limit_cycle(traj)
        if cyc is not None:
            return cyc
    return UNKNOWN


def trajectory_to_csv(traj: Trajectory, path) -> None:
    """Write `t,x,y` rows with 17 significant digits."""
    with open(path, "w") as fh:
        fh.write("t,x,y\n")
        for t, (x, y) in zip(traj.t, traj.states):
            fh.write(f"{t:.17g},{x:.17g},{y:.17g}\n")
