"""Phase portrait of the bi-stable regime.

At a moderate additional-food level the system has two interior
equilibria: a saddle E1 whose stable manifold separates the plane into
the coexistence basin (spiralling into the focus E2) and the
pest-eradication basin (falling into the prey-free state on the y-axis).

Run:  python3 demos/phase_portrait.py
Writes demos/out/portrait.svg and prints the equilibrium table.
"""
import pathlib

import numpy as np

from afmi import (
    Branch,
    ModelParams,
    all_equilibria,
    emit_portrait,
    integrate,
    trace_manifold,
)

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

p = ModelParams(alpha=0.1, beta=0.319, delta=0.3, eps=0.322, k=15.0, xi=2.2)

print(f"parameters: {p}")
print(f"{'kind':<15}{'x':>10}{'y':>10}  stability        eigenvalues")
saddle = None
for e in all_equilibria(p):
    lam = e.eigenvalues[0]
    print(f"{e.kind.value:<15}{e.x:>10.5f}{e.y:>10.5f}  "
          f"{e.stability.value:<16} {lam:.6f}")
    if e.is_saddle and e.x > 0 and e.y > 0:
        saddle = e

# the separatrix: both stable branches of the interior saddle
manifolds = [trace_manifold(p, saddle, b, budget=40.0)
             for b in (Branch.STABLE_PLUS, Branch.STABLE_MINUS)]

# sample trajectories from either side of the separatrix
starts = [(10.0, 4.0), (2.0, 2.0), (12.0, 8.0), (1.0, 6.0)]
trajectories = [integrate(p, np.array(s)) for s in starts]
for s, traj in zip(starts, trajectories):
    print(f"start {s} -> {traj.attractor} after t={traj.t[-1]:.1f}")

svg = emit_portrait(p, manifolds=manifolds, trajectories=trajectories)
(OUT / "portrait.svg").write_text(svg)
print(f"wrote {OUT / 'portrait.svg'}")
