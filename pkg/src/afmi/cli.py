"""Command-line front end.

Subcommands cover the whole toolkit: equilibrium/stability reports,
nullcline and trajectory exports, manifold tracing, basin estimation,
parameter sweeps, bifurcation location, the regime map, and the six
canned demonstration cases.  Configuration comes from a TOML file
(--config) with per-field flag overrides; flags beat the file, the file
beats built-in defaults.

Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .bifurcation import (
    event_to_json,
    locate_homoclinic,
    locate_hopf,
    locate_saddle_node,
    locate_transcritical,
    sweep,
)
from .equilibria import all_equilibria, regime_classify, two_interior_window
from .errors import AfmiError, ConfigError
from .integrate import IntegratorSettings, integrate
from .manifolds import (
    Branch,
    GridSpec,
    basin_fraction,
    basin_to_json,
    trace_manifold,
)
from .model import ModelParams, predator_nullcline_y, prey_nullcline_y
from .stability import stability_report
from .svg import emit_portrait, emit_regime_map, emit_sweep

__all__ = ["main", "build_parser", "load_config", "CASE_PRESETS"]

_DEFAULT_PARAMS = {
    "alpha": 0.1, "beta": 0.319, "delta": 0.3, "eps": 0.322, "k": 15.0,
}

# the six demonstration scenarios, all on the default parameter set
CASE_PRESETS = {
    1: {"xi": 1.6, "note": "single stable interior point"},
    2: {"xi": 1.92, "note": "bi-stability; separatrix between basins"},
    3: {"xi": 2.2, "note": "stable focus with slow spiral at E2"},
    4: {"xi": 2.469, "note": "separatrix winds around both interior points"},
    5: {"xi": 2.4741313, "note": "homoclinic connection of the saddle"},
    6: {"xi": 2.478, "note": "unstable focus at E2; near the fold"},
}

_CONFIG_SCHEMA = {
    "alpha": float, "beta": float, "delta": float, "eps": float,
    "k": float, "xi": (float, dict),
    "integrator": {
        "rel_tol": float, "abs_tol": float, "max_time": float,
        "escape_norm": float, "convergence_radius": float,
        "convergence_dwell": float,
    },
    "grid": {
        "x_min": float, "x_max": float, "y_min": float, "y_max": float,
        "nx": int, "ny": int,
    },
    "bracket": {"low": float, "high": float},
    "output": {"path": str, "format": str},
}
_XI_RANGE_KEYS = {"from", "to", "steps"}


def load_config(path: str) -> dict:
    """Parse and validate a TOML run configuration."""
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    if not doc:
        raise ConfigError(
            "empty config file; expected keys: "
            + ", ".join(sorted(_CONFIG_SCHEMA))
        )
    _check_keys(doc, _CONFIG_SCHEMA, prefix="")
    if isinstance(doc.get("xi"), dict):
        unknown = set(doc["xi"]) - _XI_RANGE_KEYS
        if unknown:
            raise ConfigError(f"unknown keys in xi range: {sorted(unknown)}")
        if set(doc["xi"]) != _XI_RANGE_KEYS:
            raise ConfigError("xi range needs exactly from, to, steps")
    return doc


def _check_keys(doc: dict, schema: dict, prefix: str) -> None:
    for key, value in doc.items():
        if key not in schema:
            raise ConfigError(
                f"unknown config key '{prefix}{key}'; allowed: "
                + ", ".join(sorted(schema))
            )
        want = schema[key]
        if isinstance(want, dict):
            if key == "xi":
                continue
            if not isinstance(value, dict):
                raise ConfigError(f"config key '{prefix}{key}' must be a table")
            _check_keys(value, want, prefix=f"{prefix}{key}.")


def _merged_params(args, config: dict) -> ModelParams:
    values = dict(_DEFAULT_PARAMS)
    for name in values:
        if name in config:
            values[name] = float(config[name])
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    xi = config.get("xi")
    if getattr(args, "xi", None) is not None:
        xi = args.xi
    if xi is None:
        xi = 2.0
    if isinstance(xi, dict):
        raise ConfigError("this command needs a scalar xi, not a range")
    return ModelParams(xi=float(xi), **values)


def _merged_settings(args, config: dict) -> IntegratorSettings:
    fields = {}
    fields.update(config.get("integrator", {}))
    for name in ("rel_tol", "abs_tol", "max_time"):
        flag = getattr(args, name, None)
        if flag is not None:
            fields[name] = flag
    try:
        return IntegratorSettings(**fields)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad integrator settings: {exc}") from exc


def _emit(text: str, args, config: dict) -> None:
    path = getattr(args, "output", None) or config.get("output", {}).get("path")
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _format(args, config: dict, default: str) -> str:
    fmt = getattr(args, "format", None) or config.get("output", {}).get("format")
    fmt = fmt or default
    if fmt not in ("csv", "json", "svg"):
        raise ConfigError(f"unknown output format '{fmt}'")
    return fmt


def _equilibria_doc(p: ModelParams) -> list[dict]:
    out = []
    for e in all_equilibria(p):
        out.append({
            "kind": e.kind.value,
            "x": e.x,
            "y": e.y,
            "eigenvalues": [{"re": l.real, "im": l.imag} for l in e.eigenvalues],
            "stability": e.stability.value,
        })
    return out


def _cmd_equilibria(args, config):
    p = _merged_params(args, config)
    doc = {
        "params": _params_doc(p),
        "regime": regime_classify(p).value,
        "equilibria": _equilibria_doc(p),
    }
    window = two_interior_window(p)
    if window:
        doc["two_interior_window"] = list(window)
    _emit(json.dumps(doc, indent=2), args, config)


def _params_doc(p: ModelParams) -> dict:
    return {"alpha": p.alpha, "beta": p.beta, "delta": p.delta,
            "eps": p.eps, "k": p.k, "xi": p.xi}


def _cmd_stability(args, config):
    p = _merged_params(args, config)
    reports = []
    for e in all_equilibria(p):
        rep = stability_report(p, e)
        entry = {
            "kind": e.kind.value,
            "x": e.x, "y": e.y,
            "stability": e.stability.value,
            "trace": rep.trace, "det": rep.determinant,
            "eigenvalues": [{"re": l.real, "im": l.imag}
                            for l in e.eigenvalues],
        }
        if rep.sufficient_flags is not None:
            entry["sufficient_condition_flags"] = rep.sufficient_flags
        reports.append(entry)
    _emit(json.dumps({"params": _params_doc(p), "reports": reports}, indent=2),
          args, config)


def _cmd_nullclines(args, config):
    p = _merged_params(args, config)
    n = args.samples
    xs = np.linspace(0.0, p.k, n)
    lines = ["curve,x,y"]
    for x in xs:
        try:
            lines.append(f"prey,{x:.17g},{prey_nullcline_y(p, float(x)):.17g}")
        except AfmiError:
            pass
    for x in xs:
        lines.append(f"predator,{x:.17g},{predator_nullcline_y(p, float(x)):.17g}")
    _emit("\n".join(lines) + "\n", args, config)


def _cmd_simulate(args, config):
    p = _merged_params(args, config)
    settings = _merged_settings(args, config)
    traj = integrate(p, np.array([args.x0, args.y0]), settings)
    fmt = _format(args, config, "csv")
    if fmt == "svg":
        _emit(emit_portrait(p, trajectories=[traj]), args, config)
        return
    lines = ["t,x,y"]
    for t, (x, y) in zip(traj.t, traj.states):
        lines.append(f"{t:.17g},{x:.17g},{y:.17g}")
    _emit("\n".join(lines) + "\n", args, config)


_BRANCH_FLAGS = {
    "stable-plus": Branch.STABLE_PLUS,
    "stable-minus": Branch.STABLE_MINUS,
    "unstable-plus": Branch.UNSTABLE_PLUS,
    "unstable-minus": Branch.UNSTABLE_MINUS,
}


def _cmd_manifold(args, config):
    p = _merged_params(args, config)
    saddles = [e for e in all_equilibria(p) if e.is_saddle
               and e.x > 0.0 and e.y > 0.0]
    if not saddles:
        raise AfmiError("no interior saddle at these parameters")
    saddle = saddles[0]
    branches = ([_BRANCH_FLAGS[args.branch]] if args.branch != "all"
                else list(Branch))
    traced = [trace_manifold(p, saddle, b, budget=args.budget)
              for b in branches]
    fmt = _format(args, config, "csv")
    if fmt == "svg":
        _emit(emit_portrait(p, manifolds=traced), args, config)
        return
    lines = ["branch,x,y"]
    for m in traced:
        for x, y in m.points:
            lines.append(f"{m.branch.value},{x:.17g},{y:.17g}")
    _emit("\n".join(lines) + "\n", args, config)


def _cmd_basin(args, config):
    p = _merged_params(args, config)
    gc = dict(config.get("grid", {}))
    for name in ("x_min", "x_max", "y_min", "y_max", "nx", "ny"):
        flag = getattr(args, name, None)
        if flag is not None:
            gc[name] = flag
    grid = GridSpec(
        x_min=float(gc.get("x_min", 0.1)), x_max=float(gc.get("x_max", p.k)),
        y_min=float(gc.get("y_min", 0.1)), y_max=float(gc.get("y_max", 10.0)),
        nx=int(gc.get("nx", 40)), ny=int(gc.get("ny", 40)),
    )
    est = basin_fraction(p, grid, workers=args.threads)
    _emit(basin_to_json(est), args, config)


def _cmd_sweep(args, config):
    xi_cfg = config.get("xi") if isinstance(config.get("xi"), dict) else {}
    lo = args.xi_from if args.xi_from is not None else xi_cfg.get("from")
    hi = args.xi_to if args.xi_to is not None else xi_cfg.get("to")
    steps = args.steps if args.steps is not None else xi_cfg.get("steps")
    if lo is None or hi is None or steps is None:
        raise ConfigError("sweep needs --from/--to/--steps or an [xi] range")
    p = _merged_params(args, dict(config, xi=float(lo)))
    ds = sweep(p, (float(lo), float(hi)), int(steps))
    fmt = _format(args, config, "csv")
    if fmt == "svg":
        _emit(emit_sweep(ds), args, config)
        return
    import io

    buf = io.StringIO()
    _sweep_csv_to(ds, buf)
    _emit(buf.getvalue(), args, config)


def _sweep_csv_to(ds, buf) -> None:
    cols = ("xi", "x1", "y1", "stab1", "x2", "y2", "stab2", "events")
    buf.write(",".join(cols) + "\n")
    for row in ds.rows:
        cells = []
        for c in cols:
            val = row.get(c, "")
            cells.append(f"{val:.17g}" if isinstance(val, float) else str(val))
        buf.write(",".join(cells) + "\n")


def _bracket(args, config, default) -> tuple[float, float]:
    if args.bracket is not None:
        return (args.bracket[0], args.bracket[1])
    bc = config.get("bracket")
    if bc:
        return (float(bc["low"]), float(bc["high"]))
    return default


def _cmd_bifurcate(args, config):
    p = _merged_params(args, config)
    kind = args.kind
    if kind == "transcritical":
        ev = locate_transcritical(p)
    elif kind == "saddle-node":
        ev = locate_saddle_node(p, _bracket(args, config, None))
    elif kind == "hopf":
        window = two_interior_window(p)
        default = None
        if window:
            lo, hi = window
            default = (0.5 * (lo + hi), hi - 1e-4 * (hi - lo))
        br = _bracket(args, config, default)
        if br is None:
            raise ConfigError("hopf needs a --bracket")
        ev = locate_hopf(p, br)
    elif kind == "homoclinic":
        br = _bracket(args, config, None)
        if br is None:
            raise ConfigError("homoclinic needs a --bracket")
        ev = locate_homoclinic(p, br)
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown bifurcation kind {kind}")
    _emit(event_to_json(ev), args, config)


def _cmd_regime_map(args, config):
    p = _merged_params(args, config)
    _emit(
        emit_regime_map(
            p,
            eps_range=(args.eps_from, args.eps_to),
            xi_range=(args.xi_from, args.xi_to),
        ),
        args, config,
    )


def _cmd_case(args, config):
    preset = CASE_PRESETS[args.id]
    config = dict(config, xi=preset["xi"])
    p = _merged_params(args, config)
    fmt = _format(args, config, "json")
    if fmt == "svg":
        _emit(emit_portrait(p), args, config)
        return
    doc = {
        "case": args.id,
        "note": preset["note"],
        "params": _params_doc(p),
        "regime": regime_classify(p).value,
        "equilibria": _equilibria_doc(p),
    }
    _emit(json.dumps(doc, indent=2), args, config)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afmi",
        description="Additional-food predator-prey dynamics toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, xi=True):
        sp.add_argument("--config", help="TOML configuration file")
        sp.add_argument("--output", help="output file (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json", "svg"))
        for name in ("alpha", "beta", "delta", "eps", "k"):
            sp.add_argument(f"--{name}", type=float)
        if xi:
            sp.add_argument("--xi", type=float)

    common(sub.add_parser("equilibria", help="equilibrium report (JSON)"))
    common(sub.add_parser("stability", help="stability report (JSON)"))

    sp = sub.add_parser("nullclines", help="nullcline samples (CSV)")
    common(sp)
    sp.add_argument("--samples", type=int, default=400)

    sp = sub.add_parser("simulate", help="integrate one trajectory (CSV/SVG)")
    common(sp)
    sp.add_argument("--x0", type=float, required=True)
    sp.add_argument("--y0", type=float, required=True)
    sp.add_argument("--rel-tol", dest="rel_tol", type=float)
    sp.add_argument("--abs-tol", dest="abs_tol", type=float)
    sp.add_argument("--t-max", dest="max_time", type=float)

    sp = sub.add_parser("manifold", help="trace saddle manifolds (CSV/SVG)")
    common(sp)
    sp.add_argument("--branch", choices=tuple(_BRANCH_FLAGS) + ("all",),
                    default="all")
    sp.add_argument("--budget", type=float, default=80.0)

    sp = sub.add_parser("basin", help="basin-of-attraction fractions (JSON)")
    common(sp)
    for name in ("x-min", "x-max", "y-min", "y-max"):
        sp.add_argument(f"--{name}", dest=name.replace("-", "_"), type=float)
    sp.add_argument("--nx", type=int)
    sp.add_argument("--ny", type=int)
    sp.add_argument("--threads", type=int)

    sp = sub.add_parser("sweep", help="xi sweep of branches and events")
    common(sp, xi=False)
    sp.add_argument("--from", dest="xi_from", type=float)
    sp.add_argument("--to", dest="xi_to", type=float)
    sp.add_argument("--steps", type=int)

    sp = sub.add_parser("bifurcate", help="locate one bifurcation (JSON)")
    common(sp)
    sp.add_argument("--kind", required=True,
                    choices=("transcritical", "saddle-node", "hopf",
                             "homoclinic"))
    sp.add_argument("--bracket", nargs=2, type=float, metavar=("LO", "HI"))

    sp = sub.add_parser("regime-map", help="regime boundary curves (SVG)")
    common(sp, xi=False)
    sp.add_argument("--eps-from", dest="eps_from", type=float, default=0.05)
    sp.add_argument("--eps-to", dest="eps_to", type=float, default=0.6)
    sp.add_argument("--xi-from", dest="xi_from", type=float, default=0.0)
    sp.add_argument("--xi-to", dest="xi_to", type=float, default=4.0)

    sp = sub.add_parser("case", help="run a canned demonstration scenario")
    common(sp, xi=False)
    sp.add_argument("--id", type=int, required=True, choices=tuple(CASE_PRESETS))

    return parser


_HANDLERS = {
    "equilibria": _cmd_equilibria,
    "stability": _cmd_stability,
    "nullclines": _cmd_nullclines,
    "simulate": _cmd_simulate,
    "manifold": _cmd_manifold,
    "basin": _cmd_basin,
    "sweep": _cmd_sweep,
    "bifurcate": _cmd_bifurcate,
    "regime-map": _cmd_regime_map,
    "case": _cmd_case,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config) if args.config else {}
        _HANDLERS[args.command](args, config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AfmiError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
