"""
Simulated estimator variance
============================

Each member adds Laplace noise of scale 1/epsilon to a data point; the
pooled mean's variance is compared against the closed form.
"""

from dpcoalition import Coalition, MonteCarloConfig, ProblemInstance, monte_carlo_variance

game = ProblemInstance([1.80e-3, 2.15e-3, 2.20e-3, 15e-3, 15.5e-3, 17e-3], 0.25, 1.0)
coalition = Coalition.of(0, 1, 2, 3)

for dist in ("uniform_01", "bernoulli", "point_mass"):
    cfg = MonteCarloConfig(samples=100_000, seed=7, data_distribution=dist, p=0.3)
    res = monte_carlo_variance(coalition, game, cfg)
    print(f"{dist:<11} simulated {res.empirical_var:.5f}  formula {res.predicted:.5f}  z {res.z_score:+.2f}")
