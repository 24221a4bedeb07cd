import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cases import U1, U2, multiplicity_instance
from dpcoalition import (
    BurdenReport,
    Coalition,
    InstanceError,
    PrivacyProfile,
    ProblemInstance,
    Tolerance,
    burden_report,
    estimator_variance,
    laplace_sample,
    player_burden,
    social_cost,
)
from dpcoalition.model import privacy_scaling

costs_st = st.lists(st.floats(1e-4, 10.0), min_size=2, max_size=7)
alpha_st = st.floats(-1.0, 1.0)
sigma_st = st.floats(1e-3, 10.0)


def test_instance_sorts_costs_and_keeps_labels():
    inst = ProblemInstance([3.0, 1.0, 2.0], 1.0, 0.0)
    assert inst.costs.tolist() == [1.0, 2.0, 3.0]
    assert inst.labels == (1, 2, 0)
    assert inst == ProblemInstance([1.0, 2.0, 3.0], 1.0, 0.0)


@pytest.mark.parametrize("kwargs, code", [
    (dict(costs=[], sigma_sq=1.0, alpha=0.0), "empty_costs"),
    (dict(costs=[1.0, 0.0], sigma_sq=1.0, alpha=0.0), "non_positive_cost"),
    (dict(costs=[1.0, -2.0], sigma_sq=1.0, alpha=0.0), "non_positive_cost"),
    (dict(costs=[1.0], sigma_sq=0.0, alpha=0.0), "sigma_sq_nonpositive"),
    (dict(costs=[1.0], sigma_sq=1.0, alpha=1.5), "alpha_out_of_range"),
    (dict(costs=[1.0], sigma_sq=1.0, alpha=float("nan")), "alpha_out_of_range"),
])
def test_instance_validation_codes(kwargs, code):
    with pytest.raises(InstanceError) as err:
        ProblemInstance(**kwargs)
    assert err.value.code == code


def test_coalition_rejects_singletons_and_duplicates():
    with pytest.raises(ValueError):
        Coalition.of(3)
    with pytest.raises(ValueError):
        Coalition.of(1, 1)
    assert Coalition.of(2, 0).members == (0, 2)
    assert Coalition.from_mask(Coalition.of(0, 3, 5).mask) == Coalition.of(0, 3, 5)
    assert len(Coalition()) == 0


def test_profile_must_match_coalition():
    with pytest.raises(ValueError):
        PrivacyProfile({0: 0.0})
    prof = PrivacyProfile({0: 1.0, 1: 2.0})
    with pytest.raises(ValueError):
        prof.array(Coalition.of(0, 2))


@pytest.mark.parametrize("alpha, k, expected", [(0.0, 17, 1.0), (1.0, 4, 4.0), (-1.0, 8, 0.125)])
def test_privacy_scaling(alpha, k, expected):
    inst = ProblemInstance([1.0], 1.0, alpha)
    assert privacy_scaling(inst, k) == pytest.approx(expected, rel=1e-15)


def test_estimator_variance_small_case():
    inst = ProblemInstance([1.0, 1.0], 1.0, 0.0)
    assert estimator_variance(Coalition.of(0, 1), PrivacyProfile({0: 1.0, 1: 1.0}), inst) == 1.5
    with pytest.raises(ValueError, match="no estimator for empty coalition"):
        estimator_variance(Coalition(), PrivacyProfile({}), inst)


@pytest.mark.parametrize("coalition, eps, expected", [
    (U1, [3.2624, 3.0748, 3.0513, 1.6091], 0.1492),
    (U2, [3.2624, 3.0748, 3.0513, 1.5917], 0.1502),
])
def test_variance_of_reference_profiles(coalition, eps, expected):
    inst = multiplicity_instance()
    prof = PrivacyProfile.from_arrays(coalition, eps)
    assert estimator_variance(coalition, prof, inst) == pytest.approx(expected, abs=1e-3)


def test_player_burden_cases():
    inst = ProblemInstance([1.0, 1.0], 1.0, 0.0)
    prof = PrivacyProfile({0: 1.0, 1: 1.0})
    assert player_burden(0, Coalition.of(0, 1), prof, inst) == 2.5
    six = multiplicity_instance()
    eps = PrivacyProfile.from_arrays(U1, [3.2624, 3.0748, 3.0513, 1.6091])
    assert player_burden(4, U1, eps, six) == 0.25
    assert player_burden(3, U1, eps, six) == pytest.approx(0.2457, abs=1e-3)


def test_social_cost_of_empty_and_reference_coalition():
    inst = multiplicity_instance()
    assert social_cost(Coalition(), None, inst) == 1.5
    eps = PrivacyProfile.from_arrays(U1, [3.2624, 3.0748, 3.0513, 1.6091])
    # four reference burdens plus two outsiders at sigma^2
    assert social_cost(U1, eps, inst) == pytest.approx(0.1727 + 0.1756 + 0.1760 + 0.2457 + 0.5, abs=4e-3)


def test_laplace_sample_points():
    assert laplace_sample(1.0, 0.0) == 0.0
    assert laplace_sample(2.0, 0.25) == pytest.approx(-2 * np.log(0.5), rel=1e-15)
    with pytest.raises(ValueError):
        laplace_sample(1.0, 0.5)
    with pytest.raises(ValueError):
        laplace_sample(0.0, 0.1)


def test_laplace_sample_variance_matches_two_scale_squared():
    rng = np.random.default_rng(3)
    u = rng.uniform(-0.5, 0.5, 100_000)
    u = u[np.abs(u) < 0.5]
    draws = laplace_sample(0.7, u)
    var = draws.var(ddof=1)
    se = np.sqrt((np.mean((draws - draws.mean()) ** 4) - var**2) / draws.size)
    assert abs(var - 2 * 0.7**2) < 3 * se


@settings(max_examples=60, deadline=None)
@given(costs_st, sigma_st, alpha_st, st.data())
def test_social_cost_is_sum_of_burdens(costs, sigma_sq, alpha, data):
    inst = ProblemInstance(costs, sigma_sq, alpha)
    mask = data.draw(st.integers(0, (1 << inst.n) - 1).filter(lambda m: bin(m).count("1") != 1))
    coalition = Coalition.from_mask(mask)
    eps = data.draw(st.lists(st.floats(1e-2, 1e2), min_size=len(coalition), max_size=len(coalition)))
    prof = PrivacyProfile.from_arrays(coalition, eps)
    report = burden_report(coalition, prof, inst)
    assert isinstance(report, BurdenReport)
    assert report.social_cost == pytest.approx(sum(player_burden(i, coalition, prof, inst)
                                                   for i in range(inst.n)), rel=1e-12)
    outsiders = list(coalition.outsiders(inst.n))
    assert np.all(report.per_player_burden[outsiders] == sigma_sq)


@settings(max_examples=40, deadline=None)
@given(costs_st, sigma_st, alpha_st, st.floats(1e-2, 1e2))
def test_variance_decreasing_and_burden_convex_in_own_epsilon(costs, sigma_sq, alpha, eps0):
    inst = ProblemInstance(costs, sigma_sq, alpha)
    coalition = Coalition.downward_closed(inst.n)
    grid = eps0 * np.geomspace(0.5, 2.0, 9)
    var, burden = [], []
    for e in grid:
        prof = PrivacyProfile({i: (e if i == 0 else 1.0) for i in coalition})
        var.append(estimator_variance(coalition, prof, inst))
        burden.append(player_burden(0, coalition, prof, inst))
    assert np.all(np.diff(var) < 0)
    # second differences on a geometric grid: test convexity through the chord rule
    for a, b, c in zip(range(7), range(1, 8), range(2, 9)):
        t = (grid[b] - grid[a]) / (grid[c] - grid[a])
        chord = (1 - t) * burden[a] + t * burden[c]
        assert burden[b] <= chord + 1e-12 * abs(chord)


def test_tolerance_comparisons():
    tol = Tolerance()
    assert tol.geq(1.0 - 1e-13, 1.0) == (True, True)
    assert not tol.geq(0.9, 1.0)[0]
    ok, edge = tol.lt(1.0, 1.0 + 1e-12)
    assert not ok and edge
    with pytest.raises(ValueError):
        Tolerance(abs_tol=-1.0)
