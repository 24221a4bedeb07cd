"""
How the efficiency gap scales with the number of players
========================================================

Identical-cost games of size 16 to 2048. The log-log slope of each quantity
against n is printed next to its expected growth rate.
"""

import numpy as np

from dpcoalition import regime_cost_ratio, sweep_scaling

grid = [16 * 2**i for i in range(8)]
expected = {
    -1.0: {"sc_decentral": 2 / 3, "var_decentral": -1 / 3, "pos_sc": 2 / 3, "pos_var": 2 / 3},
    0.0: {"sc_central": 2 / 3, "var_central": -1 / 3, "pos_sc": 1 / 3, "pos_var": 1 / 3},
    1.0: {"pos_sc": 0.0, "pos_var": 0.0},
}

for alpha, targets in expected.items():
    # pick the cost so the smallest game is already in its large-n regime
    w = regime_cost_ratio(alpha, grid[0])
    c = np.sqrt(2 * w**3)
    result = sweep_scaling(alpha, c, 1.0, grid)
    print(f"alpha = {alpha:+.2f}, c = {c:.4g}")
    for name, target in targets.items():
        fit = result.fits[name]
        print(f"  {name:<14} slope {fit.slope:+.3f}  expected {target:+.3f}  r2 {fit.r2:.4f}")
