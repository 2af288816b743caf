"""Locators for the four codimension-one bifurcations in xi.

Each locator returns a BifurcationEvent carrying the refined parameter
value, the degenerate state, and kind-specific diagnostics:

- transcritical: closed-form threshold where the interior branch crosses
  the pest-free state (c = 0);
- saddle-node: discriminant root where the two interior points collide,
  verified by the Sotomayor non-degeneracy quantities;
- Hopf: trace zero of the Jacobian at the upper interior point, with the
  transversality derivative and the complex-pair check;
- homoclinic: bisection on the sign of the stable/unstable-loop gap
  computed by manifold_topology.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .equilibria import (
    Equilibrium,
    interior_equilibria,
    quadratic_coefficients,
    transcritical_threshold,
    two_interior_window,
)
from .errors import BracketError, PreconditionError
from .integrate import IntegratorSettings
from .manifolds import Topology, manifold_topology
from .model import (
    ModelParams,
    dfield_dxi,
    hessians,
    is_bounded_regime,
    jacobian,
    predator_nullcline_y,
    vector_field,
)

__all__ = [
    "BifurcationKind",
    "BifurcationEvent",
    "SotomayorRecord",
    "SweepDataset",
    "locate_transcritical",
    "locate_saddle_node",
    "locate_hopf",
    "locate_homoclinic",
    "sotomayor_quantities",
    "saddle_node_sufficient_check",
    "sweep",
    "sweep_to_csv",
    "event_to_json",
]

_BISECT_TOL = 1e-10
_HOMOCLINIC_TOL = 1e-6
_ZERO_EIG_TOL = 1e-6
_FD_REL_TOL = 1e-4


class BifurcationKind(enum.Enum):
    TRANSCRITICAL = "transcritical"
    SADDLE_NODE = "saddle_node"
    HOPF = "hopf"
    HOMOCLINIC = "homoclinic"


@dataclass(frozen=True)
class BifurcationEvent:
    kind: BifurcationKind
    xi_star: float
    location: np.ndarray | None
    diagnostics: dict


@dataclass(frozen=True)
class SotomayorRecord:
    lambda_min: float
    v: np.ndarray
    w: np.ndarray
    wT_F_xi: float
    wT_D2F_vv: float
    wT_F_xi_fd: float
    wT_D2F_vv_fd: float
    fd_consistent: bool

    @property
    def nondegenerate(self) -> bool:
        return abs(self.wT_F_xi) > 1e-6 and abs(self.wT_D2F_vv) > 1e-6


@dataclass(frozen=True)
class SweepDataset:
    xi: np.ndarray
    rows: list[dict]
    events: list[BifurcationEvent] = field(default_factory=list)


def _bisect(f, lo: float, hi: float, tol: float, max_iter: int = 200) -> float:
    f_lo = f(lo)
    f_hi = f(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={f_lo}, {f_hi}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0 or hi - lo < tol:
            return mid
        if f_lo * f_mid < 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


def locate_transcritical(p: ModelParams) -> BifurcationEvent:
    """Threshold where the lower interior branch meets the pest-free state."""
    xi_star = transcritical_threshold(p)
    pc = p.with_xi(xi_star)
    q = quadratic_coefficients(pc)
    y_free = predator_nullcline_y(pc, 0.0)
    location = np.array([0.0, y_free])
    h = 1e-3
    eigs = {}
    for label, xi in (("below", xi_star - h), ("above", xi_star + h)):
        ps = p.with_xi(xi)
        j = jacobian(ps, 0.0, predator_nullcline_y(ps, 0.0))
        eigs[label] = sorted(np.linalg.eigvals(j).real.tolist())
    return BifurcationEvent(
        kind=BifurcationKind.TRANSCRITICAL,
        xi_star=xi_star,
        location=location,
        diagnostics={
            "c_at_threshold": q.c,
            "prey_free_eigs_below": eigs["below"],
            "prey_free_eigs_above": eigs["above"],
        },
    )


def _discriminant(p: ModelParams, xi: float) -> float:
    return quadratic_coefficients(p.with_xi(xi)).discriminant


def locate_saddle_node(
    p: ModelParams, bracket: tuple[float, float] | None = None
) -> BifurcationEvent:
    """Collision of the two interior points: root of the discriminant."""
    if bracket is None:
        window = two_interior_window(p)
        if window is None:
            raise PreconditionError("no two-interior window for these parameters")
        lo, hi = window
        width = hi - lo
        bracket = (hi - 0.5 * width, hi + 0.5 * width)
    xi_star = _bisect(
        lambda xi: _discriminant(p, xi), bracket[0], bracket[1], _BISECT_TOL
    )
    pc = p.with_xi(xi_star)
    q = quadratic_coefficients(pc)
    x_c = -q.b / (2.0 * q.a)
    location = np.array([x_c, predator_nullcline_y(pc, x_c)])
    record = sotomayor_quantities(pc, location)
    return BifurcationEvent(
        kind=BifurcationKind.SADDLE_NODE,
        xi_star=xi_star,
        location=location,
        diagnostics={
            "discriminant": q.discriminant,
            "wT_F_xi": record.wT_F_xi,
            "wT_D2F_vv": record.wT_D2F_vv,
            "lambda_min": record.lambda_min,
            "fd_consistent": record.fd_consistent,
        },
    )


def _sign_fixed(vec: np.ndarray) -> np.ndarray:
    vec = vec / np.linalg.norm(vec)
    for comp in vec:
        if comp != 0.0:
            return vec if comp > 0.0 else -vec
    return vec


def sotomayor_quantities(p: ModelParams, location) -> SotomayorRecord:
    """Non-degeneracy quantities for a zero-eigenvalue equilibrium.

    v and w are the right and left null directions of the Jacobian, each
    normalised with positive first nonzero component.  Both directional
    quantities are cross-checked against finite differences.
    """
    if isinstance(location, Equilibrium):
        location = location.location
    x, y = float(location[0]), float(location[1])
    j = jacobian(p, x, y)
    eigs = np.linalg.eigvals(j)
    lam_min = float(np.min(np.abs(eigs)))
    if lam_min > _ZERO_EIG_TOL:
        raise PreconditionError(
            f"smallest |eigenvalue| {lam_min:.3g} exceeds {_ZERO_EIG_TOL:g}; "
            "not at a fold point"
        )
    wr, vr = np.linalg.eig(j)
    v = _sign_fixed(vr[:, int(np.argmin(np.abs(wr)))].real)
    wl, vl = np.linalg.eig(j.T)
    w = _sign_fixed(vl[:, int(np.argmin(np.abs(wl)))].real)

    f_xi = dfield_dxi(p, x, y)
    w_f_xi = float(w @ f_xi)
    h1, h2 = hessians(p, x, y)
    d2f_vv = np.array([v @ h1 @ v, v @ h2 @ v])
    w_d2f_vv = float(w @ d2f_vv)

    # finite-difference guards
    h = 1e-6 * (1.0 + abs(p.xi))
    fd_xi = (
        vector_field(p.with_xi(p.xi + h), x, y)
        - vector_field(p.with_xi(p.xi - h), x, y)
    ) / (2.0 * h)
    w_f_xi_fd = float(w @ fd_xi)
    hs = 1e-5 * (1.0 + math.hypot(x, y))
    sp = np.array([x, y]) + hs * v
    sm = np.array([x, y]) - hs * v
    fd_vv = (
        vector_field(p, *sp) - 2.0 * vector_field(p, x, y) + vector_field(p, *sm)
    ) / (hs * hs)
    w_d2f_vv_fd = float(w @ fd_vv)

    def close(a, b):
        return abs(a - b) <= _FD_REL_TOL * max(1.0, abs(a), abs(b))

    return SotomayorRecord(
        lambda_min=lam_min, v=v, w=w,
        wT_F_xi=w_f_xi, wT_D2F_vv=w_d2f_vv,
        wT_F_xi_fd=w_f_xi_fd, wT_D2F_vv_fd=w_d2f_vv_fd,
        fd_consistent=close(w_f_xi, w_f_xi_fd) and close(w_d2f_vv, w_d2f_vv_fd),
    )


def saddle_node_sufficient_check(p: ModelParams, location) -> dict:
    """The four published sufficient inequalities for the fold, verbatim.

    Informational only: near the actual collision some bounds fail even
    though the direct Sotomayor quantities are nonzero, so the
    authoritative verdict is sotomayor_quantities.
    """
    if isinstance(location, Equilibrium):
        location = location.location
    x, y = float(location[0]), float(location[1])
    a, b, d, e, xi, k = p.alpha, p.beta, p.delta, p.eps, p.xi, p.k
    line_value = ((b - d) * x + (b - d * a) * xi - d) / (
        (1.0 + a * xi + x) * (b - d * a)
    )
    num = (b - d) * x + b * xi
    b3_lo = num / ((b - d) * (x + xi))
    b3_hi = b * b * (k - 2.0 * x) * (x + xi) ** 2 / (d * k * num)
    b4_lo = ((1.0 + a) * xi - 1.0) / ((2.0 - e) * e)
    b4_hi = (b * e * (x + xi) * (1.0 - d * e) - d * x) / (d * e)
    checks = {
        "line_exclusion": {"value": line_value, "ok": not math.isclose(y, line_value)},
        "geometry": {"k_gt_2x": k > 2.0 * x, "eps_lt_1": e < 1.0,
                     "ok": k > 2.0 * x and e < 1.0},
        "bracket_one": {"lower": b3_lo, "upper": b3_hi, "ok": b3_lo < y < b3_hi},
        "bracket_two": {"lower": b4_lo, "upper": b4_hi, "ok": b4_lo < y < b4_hi},
    }
    checks["all_ok"] = all(c["ok"] for c in checks.values())
    return checks


def _upper_interior(p: ModelParams, xi: float) -> Equilibrium:
    pts = interior_equilibria(p.with_xi(xi))
    if not pts:
        raise PreconditionError(f"no interior equilibrium at xi={xi}")
    return pts[-1]


def _trace_e2(p: ModelParams, xi: float) -> float:
    e = _upper_interior(p, xi)
    j = jacobian(p.with_xi(xi), e.x, e.y)
    return float(j[0, 0] + j[1, 1])


def locate_hopf(
    p: ModelParams, bracket: tuple[float, float]
) -> BifurcationEvent:
    """Trace zero of the upper interior point, with transversality."""
    lo, hi = bracket
    for xi in (lo, hi):
        e = _upper_interior(p, xi)
        j = jacobian(p.with_xi(xi), e.x, e.y)
        if np.linalg.det(j) <= 0.0:
            raise PreconditionError(f"determinant not positive at xi={xi}")
    xi_star = _bisect(lambda xi: _trace_e2(p, xi), lo, hi, _BISECT_TOL)
    pc = p.with_xi(xi_star)
    e2 = _upper_interior(p, xi_star)
    j = jacobian(pc, e2.x, e2.y)
    det = float(np.linalg.det(j))
    h = 1e-6
    transversality = (_trace_e2(p, xi_star + h) - _trace_e2(p, xi_star - h)) / (2.0 * h)
    pair_disc = (j[0, 0] - j[1, 1]) ** 2 + 4.0 * j[0, 1] * j[1, 0]
    # published second condition: xi < 1 + alpha*xi + eps + y2*
    condition_two = 1.0 + p.alpha * xi_star + p.eps + e2.y - xi_star
    return BifurcationEvent(
        kind=BifurcationKind.HOPF,
        xi_star=xi_star,
        location=e2.location,
        diagnostics={
            "det": det,
            "trace_residual": float(j[0, 0] + j[1, 1]),
            "transversality": float(transversality),
            "complex_pair_disc": float(pair_disc),
            "condition_two_margin": float(condition_two),
            "eigenvalues": [complex(l) for l in e2.eigenvalues],
        },
    )


def locate_homoclinic(
    p: ModelParams,
    bracket: tuple[float, float],
    budget: float = 80.0,
    settings: IntegratorSettings | None = None,
) -> BifurcationEvent:
    """Bisection on the sign of the separatrix-loop gap around E2."""
    verdict = is_bounded_regime(p)
    if not verdict.bounded:
        raise PreconditionError(
            f"bounded-regime predicate fails (margin {verdict.margin:.3g})"
        )

    def gap(xi: float) -> float:
        rep = manifold_topology(p.with_xi(xi), budget=budget, settings=settings)
        if rep.topology is Topology.INDETERMINATE:
            raise PreconditionError(f"indeterminate manifold topology at xi={xi}")
        return rep.gap

    lo, hi = bracket
    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo * g_hi > 0.0:
        raise BracketError(
            f"same loop topology at both endpoints (gaps {g_lo:.3g}, {g_hi:.3g})"
        )
    while hi - lo > _HOMOCLINIC_TOL:
        mid = 0.5 * (lo + hi)
        g_mid = gap(mid)
        if g_lo * g_mid <= 0.0:
            hi, g_hi = mid, g_mid
        else:
            lo, g_lo = mid, g_mid
    xi_star = 0.5 * (lo + hi)
    pc = p.with_xi(xi_star)
    pts = interior_equilibria(pc)
    return BifurcationEvent(
        kind=BifurcationKind.HOMOCLINIC,
        xi_star=xi_star,
        location=pts[0].location if pts else None,
        diagnostics={
            "gap_low": g_lo,
            "gap_high": g_hi,
            "bracket": [lo, hi],
        },
    )


def sweep(
    p: ModelParams,
    xi_range: tuple[float, float],
    steps: int,
    locate_events: bool = True,
) -> SweepDataset:
    """Equilibrium branches over a xi grid, with auto-located events.

    Event brackets come from sign changes of c (transcritical), the
    discriminant (saddle-node) and trace(E2) (Hopf) between adjacent
    grid points, each refined by the matching locator.  Homoclinic
    connections are not searched for here (they need manifold tracing;
    use locate_homoclinic).
    """
    xis = np.linspace(xi_range[0], xi_range[1], steps)
    rows = []
    cs, discs, traces = [], [], []
    for xi in xis:
        pc = p.with_xi(float(xi))
        q = quadratic_coefficients(pc)
        pts = interior_equilibria(pc)
        row = {"xi": float(xi)}
        for slot, e in zip((1, 2), pts):
            row[f"x{slot}"] = e.x
            row[f"y{slot}"] = e.y
            row[f"stab{slot}"] = e.stability.value
        tr = math.nan
        if pts:
            j = jacobian(pc, pts[-1].x, pts[-1].y)
            tr = float(j[0, 0] + j[1, 1])
        row["events"] = ""
        rows.append(row)
        cs.append(q.c)
        discs.append(q.discriminant)
        traces.append(tr)

    events: list[BifurcationEvent] = []
    if locate_events:
        for i in range(len(xis) - 1):
            lo, hi = float(xis[i]), float(xis[i + 1])
            if cs[i] * cs[i + 1] < 0.0:
                events.append(locate_transcritical(p))
            if discs[i] * discs[i + 1] < 0.0:
                events.append(locate_saddle_node(p, (lo, hi)))
            if (math.isfinite(traces[i]) and math.isfinite(traces[i + 1])
                    and traces[i] * traces[i + 1] < 0.0):
                events.append(locate_hopf(p, (lo, hi)))
        for ev in events:
            i = int(np.searchsorted(xis, ev.xi_star) - 1)
            i = min(max(i, 0), len(rows) - 1)
            tag = ev.kind.value
            rows[i]["events"] = (
                f"{rows[i]['events']};{tag}" if rows[i]["events"] else tag
            )
    return SweepDataset(xi=xis, rows=rows, events=events)


def sweep_to_csv(dataset: SweepDataset, path) -> None:
    cols = ("xi", "x1", "y1", "stab1", "x2", "y2", "stab2", "events")
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in dataset.rows:
            cells = []
            for c in cols:
                val = row.get(c, "")
                if isinstance(val, float):
                    val = f"{val:.17g}"
                cells.append(str(val))
            fh.write(",".join(cells) + "\n")


def event_to_json(event: BifurcationEvent, path=None) -> str:
    def safe(value):
        if isinstance(value, complex):
            return {"re": value.real, "im": value.imag}
        if isinstance(value, np.ndarray):
            return value.tolist()
        if isinstance(value, (np.floating, np.integer)):
            return value.item()
        if isinstance(value, dict):
            return {k: safe(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [safe(v) for v in value]
        return value

    doc = {
        "kind": event.kind.value,
        "xi_star": event.xi_star,
        "location": safe(event.location),
        "diagnostics": safe(event.diagnostics),
    }
    text = json.dumps(doc, indent=2, sort_keys=True)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
