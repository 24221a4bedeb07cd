"""
Two stable coalitions in the same game
======================================

Six players with privacy costs spread over an order of magnitude. Under
selfish privacy choices, two different four-player groups are both stable,
and the cheaper of the two outsiders is left out of one of them.
"""

import numpy as np

from dpcoalition import (
    Coalition,
    ProblemInstance,
    best_response_profile,
    decentralized_report,
    enumerate_equilibria,
    solve_centralized,
)

costs = [1.80e-3, 2.15e-3, 2.20e-3, 15e-3, 15.5e-3, 17e-3]
game = ProblemInstance(costs, sigma_sq=0.25, alpha=1.0)

# Players are indexed from 0 in ascending cost order.
for kind in ("nash", "robust"):
    found = enumerate_equilibria(game, kind)
    print(f"{kind:>6}: {[c.members for c in found]}")

for coalition in (Coalition.of(0, 1, 2, 3), Coalition.of(0, 1, 2, 4)):
    eps = best_response_profile(coalition, game).array(coalition)
    rep = decentralized_report(coalition, game)
    print(coalition.members)
    print("  epsilon  ", np.round(eps, 4))
    print("  burdens  ", np.round(rep.per_player_burden, 4))
    print("  variance ", round(rep.variance, 4), " social cost", round(rep.social_cost, 4))

# A central designer would pick privacy levels k^(1/3) times larger.
best = solve_centralized(game)
print("central optimum:", best.coalition.members, "social cost", round(best.social_cost, 4))
