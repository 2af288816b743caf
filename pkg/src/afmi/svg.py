"""Deterministic SVG 1.1 rendering of portraits, sweeps and regime maps.

All coordinates are written with fixed 6-decimal precision and elements
are emitted in a fixed layer order (nullclines, manifolds, trajectories,
cycle, equilibrium glyphs), so identical inputs produce byte-identical
documents.
"""
from __future__ import annotations

import numpy as np

from .equilibria import StabilityClass, all_equilibria
from .errors import LayoutError
from .model import ModelParams, predator_nullcline_y, prey_nullcline_y

__all__ = [
    "STABILITY_COLORS",
    "emit_portrait",
    "emit_sweep",
    "emit_regime_map",
]

# stability class -> stroke/fill color (documented in the README)
STABILITY_COLORS = {
    StabilityClass.STABLE_NODE: "#1f77b4",
    StabilityClass.STABLE_FOCUS: "#2ca02c",
    StabilityClass.UNSTABLE_NODE: "#d62728",
    StabilityClass.UNSTABLE_FOCUS: "#ff7f0e",
    StabilityClass.SADDLE: "#9467bd",
    StabilityClass.NON_HYPERBOLIC: "#8c564b",
}

_W, _H, _M = 640.0, 480.0, 48.0


def _fmt(v: float) -> str:
    return f"{v:.6f}"


class _Canvas:
    def __init__(self, x_range, y_range):
        self.x0, self.x1 = float(x_range[0]), float(x_range[1])
        self.y0, self.y1 = float(y_range[0]), float(y_range[1])
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise LayoutError(
                f"degenerate axis ranges x={x_range}, y={y_range}"
            )
        self.parts: list[str] = []

    def to_px(self, x, y):
        px = _M + (x - self.x0) / (self.x1 - self.x0) * (_W - 2 * _M)
        py = _H - _M - (y - self.y0) / (self.y1 - self.y0) * (_H - 2 * _M)
        return px, py

    def polyline(self, xs, ys, color, width=1.5, dash=None, layer=""):
        pts = []
        for x, y in zip(xs, ys):
            if not (np.isfinite(x) and np.isfinite(y)):
                continue
            px, py = self.to_px(x, y)
            pts.append(f"{_fmt(px)},{_fmt(py)}")
        if len(pts) < 2:
            return
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        cls = f' class="{layer}"' if layer else ""
        self.parts.append(
            f'<polyline{cls} fill="none" stroke="{color}" '
            f'stroke-width="{_fmt(width)}"{dash_attr} points="{" ".join(pts)}"/>'
        )

    def glyph(self, x, y, stability: StabilityClass, layer="equilibrium"):
        px, py = self.to_px(x, y)
        color = STABILITY_COLORS[stability]
        if stability is StabilityClass.SADDLE:
            # diagonal cross
            d = 5.0
            self.parts.append(
                f'<path class="{layer}" stroke="{color}" stroke-width="2.000000" '
                f'd="M {_fmt(px - d)} {_fmt(py - d)} L {_fmt(px + d)} {_fmt(py + d)} '
                f'M {_fmt(px - d)} {_fmt(py + d)} L {_fmt(px + d)} {_fmt(py - d)}"/>'
            )
            return
        fill = color if stability.attracting else "none"
        self.parts.append(
            f'<circle class="{layer}" cx="{_fmt(px)}" cy="{_fmt(py)}" r="5.000000" '
            f'stroke="{color}" stroke-width="2.000000" fill="{fill}"/>'
        )

    def render(self) -> str:
        axes = (
            f'<rect x="{_fmt(_M)}" y="{_fmt(_M)}" width="{_fmt(_W - 2 * _M)}" '
            f'height="{_fmt(_H - 2 * _M)}" fill="none" stroke="#000000" '
            f'stroke-width="1.000000"/>'
        )
        body = "\n".join([axes] + self.parts)
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{_fmt(_W)}" height="{_fmt(_H)}" '
            f'viewBox="0 0 {_fmt(_W)} {_fmt(_H)}">\n'
            f"{body}\n</svg>\n"
        )


def _nullcline_samples(p: ModelParams, x_max: float, n: int = 400):
    xs = np.linspace(0.0, x_max, n)
    prey = np.full(n, np.nan)
    pred = np.full(n, np.nan)
    for i, x in enumerate(xs):
        try:
            prey[i] = prey_nullcline_y(p, float(x))
        except Exception:
            pass
        try:
            pred[i] = predator_nullcline_y(p, float(x))
        except Exception:
            pass
    return xs, prey, pred


def emit_portrait(
    p: ModelParams,
    manifolds=(),
    trajectories=(),
    cycle=None,
    x_range=None,
    y_range=None,
) -> str:
    """Phase portrait: nullclines, manifold branches, orbits, glyphs."""
    x_range = x_range or (0.0, p.k)
    y_range = y_range or (0.0, 2.0 * p.k / 3.0)
    cv = _Canvas(x_range, y_range)
    xs, prey, pred = _nullcline_samples(p, x_range[1])
    mask = (prey >= y_range[0]) & (prey <= y_range[1])
    prey = np.where(mask, prey, np.nan)
    cv.polyline(xs, prey, "#888888", dash="4,3", layer="nullcline-prey")
    cv.polyline(xs, pred, "#444444", dash="4,3", layer="nullcline-predator")
    for m in manifolds:
        color = "#005f99" if m.branch.stable else "#cc3300"
        cv.polyline(m.points[:, 0], m.points[:, 1], color, width=1.2,
                    layer=f"manifold-{m.branch.value}")
    for traj in trajectories:
        cv.polyline(traj.states[:, 0], traj.states[:, 1], "#2b8a3e",
                    width=1.0, layer="trajectory")
    if cycle is not None:
        cv.polyline(cycle.orbit[:, 1], cycle.orbit[:, 2], "#e8590c",
                    width=1.8, layer="limit-cycle")
    for e in all_equilibria(p):
        cv.glyph(e.x, e.y, e.stability)
    return cv.render()


def emit_sweep(dataset) -> str:
    """Branch diagram: interior x-coordinates against xi, event ticks."""
    xis = dataset.xi
    xs = [row.get("x1") for row in dataset.rows] + \
         [row.get("x2") for row in dataset.rows]
    finite = [v for v in xs if v is not None]
    if not finite:
        raise LayoutError("sweep contains no interior branches to draw")
    cv = _Canvas((float(xis[0]), float(xis[-1])),
                 (0.0, max(finite) * 1.1))
    for slot, color in (("1", "#9467bd"), ("2", "#1f77b4")):
        bx = np.array([row.get(f"x{slot}", np.nan) or np.nan
                       for row in dataset.rows], dtype=float)
        cv.polyline(xis, bx, color, layer=f"branch-{slot}")
    for ev in dataset.events:
        cv.polyline([ev.xi_star, ev.xi_star], [cv.y0, cv.y1], "#d62728",
                    width=0.8, dash="2,2", layer=f"event-{ev.kind.value}")
    return cv.render()


def emit_regime_map(
    p: ModelParams,
    eps_range=(0.05, 0.6),
    xi_range=(0.0, 4.0),
    n: int = 4000,
) -> str:
    """The three regime boundary curves in the (eps, xi) plane.

    For each eps: the xi where the quadratic's linear coefficient
    vanishes (b = 0), where the constant term vanishes (c = 0, the
    transcritical line), and where the two nullcline slopes at the axis
    coincide.
    """
    eps = np.linspace(eps_range[0], eps_range[1], n)
    a, b, d, k = p.alpha, p.beta, p.delta, p.k
    with np.errstate(divide="ignore", invalid="ignore"):
        xi_b = (d - b * (1.0 - eps)) * k / (b * eps)
        xi_c = np.where(b - d * a - b * eps > 0.0,
                        d / (b - d * a - b * eps), np.nan)
        xi_slope = (k * (1.0 - eps) * (d - b * (1.0 - eps)) - d * eps) / (a * d * eps)
    cv = _Canvas(eps_range, xi_range)
    for curve, color, layer in (
        (xi_b, "#1f77b4", "boundary-b-zero"),
        (xi_c, "#d62728", "boundary-c-zero"),
        (xi_slope, "#2ca02c", "boundary-slope-equal"),
    ):
        curve = np.where((curve >= xi_range[0]) & (curve <= xi_range[1]),
                         curve, np.nan)
        cv.polyline(eps, curve, color, layer=layer)
    return cv.render()
