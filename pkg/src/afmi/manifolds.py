"""Saddle manifolds, separatrix basins, return maps and loop topology.

The stable manifold of the interior saddle E1 is the separatrix between
the coexistence and pest-free basins.  Near the homoclinic parameter the
unstable and stable manifolds of E1 both loop around E2; their relative
position (measured where they cross a reference ray from E2) flips sign
exactly at the homoclinic connection, which is what the bifurcation
locator bisects on.
"""
from __future__ import annotations

import enum
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .equilibria import Equilibrium, interior_equilibria
from .errors import NoReturnError, PreconditionError
from .integrate import (
    AttractorId,
    AttractorKind,
    IntegratorSettings,
    Termination,
    UNKNOWN,
    attractor_catalog,
    classify_batch,
    integrate,
)
from .model import ModelParams, jacobian, vector_field

__all__ = [
    "Branch",
    "Manifold",
    "GridSpec",
    "BasinEstimate",
    "Section",
    "CycleStability",
    "LimitCycleResult",
    "Topology",
    "TopologyReport",
    "trace_manifold",
    "basin_fraction",
    "find_limit_cycle",
    "manifold_topology",
    "manifold_to_csv",
    "cycle_to_csv",
    "basin_to_json",
    "BASIN_SETTINGS",
]

SEED_OFFSET_SCALE = 1e-6     # offset = scale * (1 + |saddle|)
MAX_SEGMENT = 0.05           # polyline resampling pitch, state units
COINCIDENCE_TOL = 1e-3       # |gap| below which the loops count as merged
_EIGVEC_MIN_ANGLE = 1e-3     # radians

# looser capture tolerances for grids of trajectories
BASIN_SETTINGS = IntegratorSettings(
    rel_tol=1e-6, abs_tol=1e-9, convergence_radius=1e-3
)


class Branch(enum.Enum):
    STABLE_PLUS = "stable_plus"
    STABLE_MINUS = "stable_minus"
    UNSTABLE_PLUS = "unstable_plus"
    UNSTABLE_MINUS = "unstable_minus"

    @property
    def stable(self) -> bool:
        return self in (Branch.STABLE_PLUS, Branch.STABLE_MINUS)

    @property
    def positive(self) -> bool:
        return self in (Branch.STABLE_PLUS, Branch.UNSTABLE_PLUS)


@dataclass(frozen=True)
class Manifold:
    origin: Equilibrium
    branch: Branch
    points: np.ndarray  # (n, 2) polyline, spacing <= MAX_SEGMENT
    arclength: float


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    def nodes(self) -> np.ndarray:
        xs = np.linspace(self.x_min, self.x_max, self.nx)
        ys = np.linspace(self.y_min, self.y_max, self.ny)
        gx, gy = np.meshgrid(xs, ys)
        return np.column_stack([gx.ravel(), gy.ravel()])


@dataclass(frozen=True)
class BasinEstimate:
    grid: GridSpec
    counts: dict[str, int]
    fraction_prey_free: float
    unresolved: int

    @property
    def resolved(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class Section:
    """Half-line Poincare section: anchor + r * direction, r > 0."""

    anchor: np.ndarray
    direction: np.ndarray  # unit vector

    @classmethod
    def through(cls, anchor, toward) -> "Section":
        anchor = np.asarray(anchor, dtype=float)
        d = np.asarray(toward, dtype=float) - anchor
        n = np.linalg.norm(d)
        if n == 0.0:
            raise ValueError("section direction is degenerate")
        return cls(anchor=anchor, direction=d / n)

    def radius(self, point: np.ndarray) -> float:
        return float(np.dot(point - self.anchor, self.direction))

    def offset(self, point: np.ndarray) -> float:
        d = point - self.anchor
        return float(self.direction[0] * d[1] - self.direction[1] * d[0])

    def point_at(self, r: float) -> np.ndarray:
        return self.anchor + r * self.direction


class CycleStability(enum.Enum):
    STABLE = "stable_cycle"
    UNSTABLE = "unstable_cycle"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class LimitCycleResult:
    section: Section
    fixed_point: np.ndarray
    period: float
    floquet_slope: float
    stability: CycleStability
    orbit: np.ndarray  # (n, 3) columns t, x, y over one period


class Topology(enum.Enum):
    UNSTABLE_INSIDE_STABLE = "unstable_inside_stable"
    STABLE_INSIDE_UNSTABLE = "stable_inside_unstable"
    NEAR_COINCIDENT = "near_coincident"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class TopologyReport:
    topology: Topology
    gap: float  # stable crossing radius minus unstable crossing radius


def _saddle_directions(p: ModelParams, saddle: Equilibrium) -> dict[str, np.ndarray]:
    """Unit eigenvectors of the saddle, sign-fixed to positive x (then y)."""
    j = jacobian(p, saddle.x, saddle.y)
    w, v = np.linalg.eig(j)
    if np.iscomplexobj(w) and np.any(np.abs(w.imag) > 0):
        raise PreconditionError("complex eigenvalues: not a saddle")
    w = w.real
    v = v.real
    if not (w.min() < 0.0 < w.max()):
        raise PreconditionError(f"eigenvalues {w} do not straddle zero")
    vs = v[:, np.argmin(w)]
    vu = v[:, np.argmax(w)]
    angle = math.acos(min(1.0, abs(float(np.dot(vs, vu)))))
    if angle < _EIGVEC_MIN_ANGLE:
        raise PreconditionError("eigenvector directions nearly parallel")

    def fix(vec: np.ndarray) -> np.ndarray:
        vec = vec / np.linalg.norm(vec)
        if vec[0] < 0.0 or (vec[0] == 0.0 and vec[1] < 0.0):
            vec = -vec
        return vec

    return {"stable": fix(vs), "unstable": fix(vu)}


def _resample(points: np.ndarray, pitch: float) -> np.ndarray:
    """Even arclength resampling of a polyline to the given pitch."""
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total == 0.0:
        return points[:1]
    n = max(2, int(math.ceil(total / pitch)) + 1)
    targets = np.linspace(0.0, total, n)
    out = np.column_stack([
        np.interp(targets, cum, points[:, 0]),
        np.interp(targets, cum, points[:, 1]),
    ])
    return out


def trace_manifold(
    p: ModelParams,
    saddle: Equilibrium,
    branch: Branch,
    budget: float = 80.0,
    settings: IntegratorSettings | None = None,
) -> Manifold:
    """Trace one manifold branch of a saddle as an arclength polyline.

    Unstable branches run forward in time, stable branches backward.
    Tracing stops at the arclength budget, on leaving the working box,
    or on capture by an attractor of the (possibly reversed) flow.
    """
    if not saddle.is_saddle:
        raise PreconditionError(f"{saddle.kind} at {saddle.location} is not a saddle")
    settings = settings or IntegratorSettings(
        rel_tol=1e-9, abs_tol=1e-12, max_time=5000.0
    )
    dirs = _saddle_directions(p, saddle)
    vec = dirs["stable"] if branch.stable else dirs["unstable"]
    if not branch.positive:
        vec = -vec
    offset = SEED_OFFSET_SCALE * (1.0 + float(np.linalg.norm(saddle.location)))
    seed = saddle.location + offset * vec
    direction = -1.0 if branch.stable else 1.0

    state = {"last": seed.copy(), "length": 0.0}
    x_cap, y_cap = 3.0 * p.k, 10.0 * p.k

    def stop(t: float, s: np.ndarray) -> bool:
        state["length"] += float(np.linalg.norm(s - state["last"]))
        state["last"] = s.copy()
        return (state["length"] >= budget) or s[0] > x_cap or s[1] > y_cap

    attractors, ids = attractor_catalog(p)
    # do not capture at the saddle itself
    keep = [i for i in range(len(ids))
            if np.linalg.norm(attractors[i] - saddle.location) > 1e-9]
    attractors = attractors[keep] if keep else np.empty((0, 2))

    traj = integrate(
        p, seed, settings, attractors=attractors,
        attractor_ids=None, direction=direction, stop_fn=stop,
    )
    pts = _resample(traj.states, MAX_SEGMENT)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    return Manifold(
        origin=saddle, branch=branch, points=pts, arclength=float(seg.sum())
    )


def _basin_chunk(args) -> list[str]:
    p, nodes, settings = args
    return [str(a) for a in classify_batch(p, nodes, settings)]


def basin_fraction(
    p: ModelParams,
    grid: GridSpec,
    settings: IntegratorSettings | None = None,
    workers: int | None = None,
) -> BasinEstimate:
    """Classify every grid node and tally basin fractions.

    ``workers`` defaults to the AFMI_THREADS environment variable
    (0 or unset = single process; batches are vectorised anyway).
    """
    settings = settings or BASIN_SETTINGS
    nodes = grid.nodes()
    if workers is None:
        workers = int(os.environ.get("AFMI_THREADS", "0") or 0)
        if workers == 0:
            workers = 1
    if workers > 1:
        from multiprocessing import Pool

        chunks = np.array_split(nodes, workers)
        with Pool(workers) as pool:
            parts = pool.map(_basin_chunk, [(p, c, settings) for c in chunks])
        labels = [lab for part in parts for lab in part]
    else:
        labels = _basin_chunk((p, nodes, settings))
    counts: dict[str, int] = {}
    unresolved = 0
    for lab in labels:
        if lab == str(UNKNOWN):
            unresolved += 1
        else:
            counts[lab] = counts.get(lab, 0) + 1
    resolved = sum(counts.values())
    prey_free = counts.get(AttractorKind.PREY_FREE_EQ.value, 0)
    frac = prey_free / resolved if resolved else 0.0
    return BasinEstimate(
        grid=grid, counts=counts, fraction_prey_free=frac, unresolved=unresolved
    )


def _first_return(
    p: ModelParams,
    start: np.ndarray,
    section: Section,
    settings: IntegratorSettings,
    direction: float,
) -> tuple[float, float, np.ndarray]:
    """(radius, flight time, crossing state) of the next positive-side
    section crossing after leaving ``start``.

    Crossings are detected by sign change of the transverse offset and
    refined by bisection on the dense output.
    """
    found: dict = {}
    state = {"prev_offset": None, "prev_t": 0.0, "warmup": 0}

    def stop(t: float, s: np.ndarray) -> bool:
        off = section.offset(s)
        prev = state["prev_offset"]
        state["warmup"] += 1
        if prev is not None and state["warmup"] > 2 and prev * off < 0.0:
            if section.radius(s) > 1e-9:
                found["bracket"] = (state["prev_t"], t)
                return True
        state["prev_offset"] = off
        state["prev_t"] = t
        return False

    traj = integrate(
        p, start, settings, attractors=np.empty((0, 2)),
        direction=direction, stop_fn=stop,
    )
    if "bracket" not in found:
        raise NoReturnError(
            f"orbit from {start} never returned to the section "
            f"({traj.termination.value})"
        )
    lo, hi = found["bracket"]
    f_lo = section.offset(traj.at(lo)[0])
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        f_mid = section.offset(traj.at(mid)[0])
        if f_lo * f_mid <= 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
        if hi - lo < 1e-13 * max(1.0, hi):
            break
    t_cross = 0.5 * (lo + hi)
    s_cross = traj.at(t_cross)[0]
    # project exactly onto the section line
    r = section.radius(s_cross)
    return r, t_cross, section.point_at(r)


def _iterate_return_map(
    p: ModelParams,
    r0: float,
    section: Section,
    settings: IntegratorSettings,
    direction: float,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> tuple[float, float] | None:
    """Iterate r -> P(r); return (fixed radius, period) or None."""
    r = r0
    prev_gap = None
    growth = 0
    for _ in range(max_iter):
        try:
            r_next, t_flight, _ = _first_return(
                p, section.point_at(r), section, settings, direction
            )
        except NoReturnError:
            return None
        if r_next < 1e-4:
            return None  # spiralling into the section anchor, not a cycle
        gap = abs(r_next - r)
        if gap < tol:
            return 0.5 * (r + r_next), t_flight
        if prev_gap is not None and gap > prev_gap:
            growth += 1
            if growth >= 8:
                return None
        else:
            growth = 0
        prev_gap = gap
        r = r_next
    return None


def find_limit_cycle(
    p: ModelParams,
    seed,
    section: Section | None = None,
    settings: IntegratorSettings | None = None,
) -> LimitCycleResult | None:
    """Hunt a periodic orbit through the seed's return-map iteration.

    The forward map finds stable cycles; if it diverges, the map of the
    time-reversed field is tried, which converges on unstable cycles.
    Returns None when neither settles (e.g. the seed spirals into an
    equilibrium).
    """
    settings = settings or IntegratorSettings(rel_tol=1e-10, abs_tol=1e-12,
                                              max_time=5000.0)
    seed = np.asarray(seed, dtype=float)
    interiors = interior_equilibria(p)
    anchor = interiors[-1].location if interiors else np.zeros(2)
    if np.linalg.norm(seed - anchor) < 1e-9:
        return None  # degenerate: seed sits on the section anchor
    if section is None:
        section = Section.through(anchor, seed)
    flow = vector_field(p, *seed)
    if abs(section.offset(seed + 1e-9 * flow)) < 1e-18:
        raise PreconditionError("section direction is tangent to the flow")

    r_seed = max(section.radius(seed), 1e-6)
    for direction in (1.0, -1.0):
        hit = _iterate_return_map(p, r_seed, section, settings, direction)
        if hit is None:
            continue
        r_star, period = hit
        # return-map derivative by central finite difference
        h = max(1e-6, 1e-4 * r_star)
        try:
            r_hi, _, _ = _first_return(
                p, section.point_at(r_star + h), section, settings, direction
            )
            r_lo, _, _ = _first_return(
                p, section.point_at(r_star - h), section, settings, direction
            )
        except NoReturnError:
            continue
        slope = (r_hi - r_lo) / (2.0 * h)
        if direction < 0.0 and slope != 0.0:
            slope = 1.0 / slope  # express in forward time
        if abs(abs(slope) - 1.0) <= 1e-3:
            stability = CycleStability.NEUTRAL
        elif abs(slope) < 1.0:
            stability = CycleStability.STABLE
        else:
            stability = CycleStability.UNSTABLE
        orbit = _sample_cycle(p, section.point_at(r_star), period, direction,
                              settings)
        return LimitCycleResult(
            section=section,
            fixed_point=section.point_at(r_star),
            period=period,
            floquet_slope=float(slope),
            stability=stability,
            orbit=orbit,
        )
    return None


def _sample_cycle(p, start, period, direction, settings) -> np.ndarray:
    horizon = IntegratorSettings(
        rel_tol=settings.rel_tol, abs_tol=settings.abs_tol,
        max_time=period, max_steps=settings.max_steps,
        escape_norm=settings.escape_norm,
        convergence_radius=1e-12, convergence_dwell=settings.convergence_dwell,
    )
    traj = integrate(p, start, horizon, attractors=np.empty((0, 2)),
                     direction=direction)
    ts = np.linspace(0.0, traj.t[-1], 400)
    pts = traj.at(ts)
    return np.column_stack([ts, pts])


def _ray_crossing(points: np.ndarray, section: Section) -> float | None:
    """Radius of the first polyline crossing of the half-line, else None."""
    offs = np.array([section.offset(q) for q in points])
    rads = np.array([section.radius(q) for q in points])
    for i in range(len(points) - 1):
        if offs[i] == 0.0 and rads[i] > 0.0:
            return float(rads[i])
        if offs[i] * offs[i + 1] < 0.0:
            w = offs[i] / (offs[i] - offs[i + 1])
            r = rads[i] + w * (rads[i + 1] - rads[i])
            if r > 1e-9:
                return float(r)
    return None


def manifold_topology(
    p: ModelParams,
    budget: float = 80.0,
    settings: IntegratorSettings | None = None,
    ray: Section | None = None,
) -> TopologyReport:
    """Relative position of W^s(E1) and W^u(E1) around E2.

    Both positive branches are traced and intersected with a reference
    ray anchored at E2 (by default pointing away from E1, which stays
    transverse to the loops; a ray toward E1 would pass through the
    saddle where the branches meet).  gap > 0 means the unstable loop
    lies inside the stable one.
    """
    interiors = interior_equilibria(p)
    if len(interiors) != 2:
        raise PreconditionError(
            f"need two distinct interior equilibria, found {len(interiors)}"
        )
    e1, e2 = interiors
    if not e1.is_saddle:
        raise PreconditionError("lower interior point is not a saddle")
    if ray is None:
        away = e2.location + (e2.location - e1.location)
        ray = Section.through(e2.location, away)
    ws = trace_manifold(p, e1, Branch.STABLE_PLUS, budget, settings)
    wu = trace_manifold(p, e1, Branch.UNSTABLE_PLUS, budget, settings)
    r_s = _ray_crossing(ws.points, ray)
    r_u = _ray_crossing(wu.points, ray)
    if r_s is None or r_u is None:
        return TopologyReport(topology=Topology.INDETERMINATE, gap=float("nan"))
    gap = r_s - r_u
    if abs(gap) < COINCIDENCE_TOL:
        topo = Topology.NEAR_COINCIDENT
    elif gap > 0.0:
        topo = Topology.UNSTABLE_INSIDE_STABLE
    else:
        topo = Topology.STABLE_INSIDE_UNSTABLE
    return TopologyReport(topology=topo, gap=float(gap))


def manifold_to_csv(manifolds, path) -> None:
    """Write `branch,x,y` rows for one or several manifolds."""
    if isinstance(manifolds, Manifold):
        manifolds = [manifolds]
    with open(path, "w") as fh:
        fh.write("branch,x,y\n")
        for m in manifolds:
            for x, y in m.points:
                fh.write(f"{m.branch.value},{x:.17g},{y:.17g}\n")


def cycle_to_csv(cycle: LimitCycleResult, path) -> None:
    with open(path, "w") as fh:
        fh.write("t,x,y\n")
        for t, x, y in cycle.orbit:
            fh.write(f"{t:.17g},{x:.17g},{y:.17g}\n")


def basin_to_json(estimate: BasinEstimate, path=None) -> str:
    doc = {
        "grid": {
            "x_min": estimate.grid.x_min, "x_max": estimate.grid.x_max,
            "y_min": estimate.grid.y_min, "y_max": estimate.grid.y_max,
            "nx": estimate.grid.nx, "ny": estimate.grid.ny,
        },
        "counts": dict(sorted(estimate.counts.items())),
        "fraction_prey_free": estimate.fraction_prey_free,
        "unresolved": estimate.unresolved,
    }
    text = json.dumps(doc, indent=2, sort_keys=True)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
