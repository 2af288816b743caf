"""Pin down the unstable limit cycle with a Poincare return map.

Between the homoclinic connection and the Hopf point an unstable limit
cycle encircles the stable focus E2.  Forward return-map iteration
diverges from it, so the solver automatically retries in reversed time,
where the same cycle is attracting, and reports the forward Floquet
slope (> 1: repelling).

Run:  python3 demos/return_map_cycle.py
Writes demos/out/cycle.csv with one sampled period.
"""
import pathlib

import numpy as np

from afmi import ModelParams, cycle_to_csv, find_limit_cycle, interior_equilibria

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

p = ModelParams(alpha=0.1, beta=0.319, delta=0.3, eps=0.322, k=15.0,
                xi=2.476)
_, e2 = interior_equilibria(p)
print(f"focus E2 = ({e2.x:.5f}, {e2.y:.5f}), {e2.stability.value}")

cycle = find_limit_cycle(p, e2.location + np.array([0.4, 0.0]))
if cycle is None:
    raise SystemExit("no cycle found (unexpected at this xi)")

print(f"{cycle.stability.value}: period {cycle.period:.3f}, "
      f"Floquet slope {cycle.floquet_slope:.4f}")
print(f"section fixed point ({cycle.fixed_point[0]:.6f}, "
      f"{cycle.fixed_point[1]:.6f})")
cycle_to_csv(cycle, OUT / "cycle.csv")
print(f"wrote {OUT / 'cycle.csv'}")
