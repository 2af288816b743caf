"""Watch the saddle loops trade places through the homoclinic connection.

Just below the critical food level the unstable manifold of the saddle
E1 loops around the focus E2 strictly inside the stable manifold's loop;
just above, the nesting is reversed.  The signed gap between the two
loops, measured where they cross a reference ray from E2, changes sign
exactly at the connection.

Run:  python3 demos/homoclinic_loop.py
Writes demos/out/manifolds_<xi>.csv for three xi values.
"""
import pathlib

from afmi import (
    Branch,
    ModelParams,
    interior_equilibria,
    manifold_to_csv,
    manifold_topology,
    trace_manifold,
)

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

base = dict(alpha=0.1, beta=0.319, delta=0.3, eps=0.322, k=15.0)

for xi in (2.47, 2.4741313, 2.478):
    p = ModelParams(xi=xi, **base)
    rep = manifold_topology(p)
    print(f"xi={xi:<10} {rep.topology.value:<24} gap={rep.gap:+.6f}")
    e1, _ = interior_equilibria(p)
    traced = [trace_manifold(p, e1, b, budget=60.0)
              for b in (Branch.STABLE_PLUS, Branch.UNSTABLE_PLUS)]
    path = OUT / f"manifolds_{xi}.csv"
    manifold_to_csv(traced, path)
    print(f"    wrote {path.name} "
          f"({sum(len(m.points) for m in traced)} polyline points)")
