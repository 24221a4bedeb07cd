"""
Equilibria as the data variance grows
=====================================

Nine players, privacy cost growing linearly with coalition size. As sigma
rises, Nash-stable coalitions appear, vanish, then come back, while the
largest robust-stable coalition only ever grows. Writes a plot-ready CSV.
"""

import sys

from dpcoalition import sweep_sigma, write_csv
from dpcoalition.experiments import NONMONOTONE_COSTS, default_sigma_grid

rows = sweep_sigma(NONMONOTONE_COSTS, alpha=1.0, sigma_grid=default_sigma_grid())

print(" sigma  nash  robust")
for r in rows[::5]:
    print(f"{r.sigma:6.3f}  {r.max_nash_size:4d}  {r.max_robust_size:6d}")

gaps = [r.sigma for r in rows if r.robust_exists and not r.nash_exists]
print(f"{len(gaps)} grid points have a robust but no Nash equilibrium")

out = sys.argv[1] if len(sys.argv) > 1 else "sigma_sweep.csv"
write_csv(rows, out)
print("wrote", out)
