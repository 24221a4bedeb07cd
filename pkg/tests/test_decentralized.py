import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cases import U1, U2, all_subsets, nonmonotone_instance, mixed_instances, multiplicity_instance
from dpcoalition import (
    Coalition,
    PrivacyProfile,
    ProblemInstance,
    best_response_epsilon,
    best_response_profile,
    central_epsilon,
    decentral_social_cost,
    decentral_variance,
    decentralized_report,
    downward_closed_scan,
    enumerate_equilibria,
    grand_coalition_sufficient,
    identical_cost_analysis,
    is_stable,
    nash_stable_closed_form,
    player_burden,
    robust_escalation_sequence,
    robust_intermediate_sizes,
    robust_stable_closed_form,
    stability_by_definition,
)
from dpcoalition.decentralized import CBRT2, entry_burdens, grand_coalition_size_bounds


def test_best_response_epsilon_values():
    assert best_response_epsilon(1.80e-3, 4, 1.0) == pytest.approx(3.2624, abs=1e-3)
    assert best_response_epsilon(15e-3, 4, 1.0) == pytest.approx(1.6091, abs=1e-3)
    assert best_response_epsilon(4.0, 2, 1.0) == pytest.approx(0.5, rel=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-4, 10), st.integers(2, 500), st.floats(-1, 1))
def test_selfish_level_is_central_level_shrunk_by_cube_root_of_size(c, k, alpha):
    assert best_response_epsilon(c, k, alpha) == pytest.approx(
        central_epsilon(c, k, alpha) / k ** (1 / 3), rel=1e-13)


@pytest.mark.parametrize("coalition, eps, var, burdens, outside", [
    (U1, [3.2624, 3.0748, 3.0513, 1.6091], 0.1492, [0.1727, 0.1756, 0.1760, 0.2457],
     {4: 0.2535, 5: 0.2629}),
    (U2, [3.2624, 3.0748, 3.0513, 1.5917], 0.1502, [0.1737, 0.1767, 0.1771, 0.2489],
     {3: 0.2510, 5: 0.2636}),
])
def test_reference_two_equilibria(coalition, eps, var, burdens, outside):
    inst = multiplicity_instance()
    report = decentralized_report(coalition, inst)
    assert np.allclose(best_response_profile(coalition, inst).array(coalition), eps, atol=1e-3)
    assert report.variance == pytest.approx(var, abs=1e-3)
    assert np.allclose(report.per_player_burden[list(coalition)], burdens, atol=1e-3)
    joined = entry_burdens(coalition, inst)
    for j, b in outside.items():
        assert joined[j] == pytest.approx(b, abs=1e-3)
    for kind in ("nash", "robust"):
        assert is_stable(coalition, inst, kind)
        assert stability_by_definition(coalition, inst, kind).stable


def test_reference_social_costs_order():
    inst = multiplicity_instance()
    assert decentral_social_cost(U1, inst) == pytest.approx(1.2700, abs=1e-3)
    assert decentral_social_cost(U2, inst) == pytest.approx(1.2764, abs=1e-3)


def test_multiplicity_instance_equilibria():
    inst = multiplicity_instance()
    nash = enumerate_equilibria(inst, "nash")
    assert U1 in nash and U2 in nash
    # participation is not monotone in cost: U2 skips player 3 but takes player 4
    assert 3 not in U2 and 4 in U2
    assert not nash_stable_closed_form(Coalition.of(0, 1, 2, 3, 4), inst).stable


def test_closed_forms_match_burden_recomputation():
    for inst in mixed_instances(100, seed=31):
        for s in all_subsets(inst.n)[:40]:
            report = decentralized_report(s, inst)
            assert decentral_variance(s, inst) == pytest.approx(report.variance, rel=1e-12)
            assert decentral_social_cost(s, inst) == pytest.approx(report.social_cost, rel=1e-12)


def test_closed_form_predicates_agree_with_definitions():
    disagreements = compared = 0
    for inst in mixed_instances(40, seed=32):
        for s in all_subsets(inst.n):
            for kind, closed in (("nash", nash_stable_closed_form), ("robust", robust_stable_closed_form)):
                a, b = closed(s, inst), stability_by_definition(s, inst, kind)
                if a.boundary_flag or b.boundary_flag:
                    continue
                compared += 1
                disagreements += a.stable != b.stable
    assert compared > 1000 and disagreements == 0


def test_verdict_fields():
    inst = multiplicity_instance()
    big = Coalition.of(0, 1, 2, 3, 4)
    v = nash_stable_closed_form(big, inst)
    assert v.exit_slack < 0
    v = nash_stable_closed_form(Coalition.of(0, 1), inst)
    assert v.entry_witness is not None and v.entry_witness[0] == 2
    assert not v.stable
    with pytest.raises(ValueError):
        nash_stable_closed_form(Coalition(), inst)


def test_best_response_beats_every_nearby_level():
    inst = multiplicity_instance()
    prof = best_response_profile(U1, inst)
    for i in U1:
        own = player_burden(i, U1, prof, inst)
        for factor in np.geomspace(1e-3, 1e3, 61):
            other = PrivacyProfile({**prof.levels, i: prof[i] * factor})
            assert own <= player_burden(i, U1, other, inst) + 1e-15


def test_nonmonotone_nash_disappears_but_robust_survives():
    inst = nonmonotone_instance(0.4)
    assert enumerate_equilibria(inst, "nash") == []
    assert enumerate_equilibria(inst, "robust")


def test_enumeration_order_and_cap():
    inst = multiplicity_instance()
    found = enumerate_equilibria(inst, "robust")
    assert found == sorted(found, key=lambda s: (len(s), s.members))
    with pytest.raises(ValueError, match="downward_closed_scan"):
        enumerate_equilibria(inst, "nash", max_n=5)


def test_nash_equilibria_are_robust():
    for inst in mixed_instances(60, seed=33):
        robust = set(enumerate_equilibria(inst, "robust"))
        assert set(enumerate_equilibria(inst, "nash")) <= robust


def test_scan_requires_separation_for_nash():
    with pytest.raises(ValueError, match="well-separated"):
        downward_closed_scan(multiplicity_instance(), "nash")
    inst = ProblemInstance([1e-3, 2e-3, 4.5e-3, 1e-2], 0.05, 0.0)
    assert downward_closed_scan(inst, "nash") == enumerate_equilibria(inst, "nash")


def test_grand_coalition_checks():
    inst = ProblemInstance.identical(50, 0.05, 1.0, -1.0)
    assert grand_coalition_sufficient(inst)
    grand = Coalition.downward_closed(50)
    assert enumerate_equilibria(ProblemInstance.identical(12, 0.05, 1.0, -1.0), "nash") == \
        [Coalition.downward_closed(12)]
    small = ProblemInstance.identical(8, 0.05, 1.0, -1.0)
    g8 = Coalition.downward_closed(8)
    for kind in ("nash", "robust"):
        assert stability_by_definition(g8, small, kind).stable
    assert not grand_coalition_sufficient(multiplicity_instance())
    assert robust_stable_closed_form(grand, inst).stable
    lo, hi = grand_coalition_size_bounds(inst)
    assert hi == np.inf and lo <= 50


def test_escalation_sequence_tiles_sigma_axis():
    inst = nonmonotone_instance(0.3)
    start = Coalition.of(0, 1)
    steps = robust_escalation_sequence(start, inst)
    assert steps[-1].next_threshold == np.inf
    assert [len(s.coalition) for s in steps] == list(range(2, inst.n + 1))
    for step in steps:
        if not step.feasible:
            continue
        lo, hi = step.sigma_interval
        mid = lo * 1.5 if np.isinf(hi) else 0.5 * (lo + hi)
        assert robust_stable_closed_form(step.coalition, inst.with_sigma_sq(mid**2)).stable
    # every sigma above the start is covered by some feasible step
    for sigma in np.linspace(steps[0].sigma_interval[0], 1.0, 200)[1:]:
        assert any(s.feasible and s.threshold_T <= sigma**2 < s.next_threshold for s in steps)


def test_escalation_rejects_hopeless_start():
    # identical costs at alpha = -1: the pair's exit threshold already exceeds the
    # threshold at which a third player's entry stops being vetoed
    inst = ProblemInstance.identical(4, 1.0, 1.0, -1.0)
    with pytest.raises(ValueError, match="not robust-stable at any sigma"):
        robust_escalation_sequence(Coalition.of(0, 1), inst)


def test_identical_cost_interval_example():
    c, alpha, n = 0.01, 1.0, 10
    sigma_sq = 7.7 * c ** (2 / 3) / CBRT2
    report = identical_cost_analysis(c, sigma_sq, alpha, n)
    assert report.robust_intermediate_size == 3
    assert not report.nash_intermediate_exists
    sizes = {len(s) for s in enumerate_equilibria(ProblemInstance.identical(n, c, sigma_sq, alpha),
                                                   "robust") if len(s) < n}
    assert sizes == {3}


@pytest.mark.parametrize("r", [0.5, 3.0, 10.0, 80.0])
def test_no_intermediate_robust_size_at_alpha_minus_one(r):
    c = 0.02
    sigma_sq = r * c ** (2 / 3) / CBRT2
    assert robust_intermediate_sizes(c, sigma_sq, -1.0, 30) == []
    assert identical_cost_analysis(c, sigma_sq, -1.0, 30).robust_intermediate_size is None


def test_robust_max_size_nondecreasing_in_sigma():
    for inst in mixed_instances(15, seed=34, n_range=(4, 8)):
        base = float(np.mean(inst.weights))
        sizes = [max((len(s) for s in enumerate_equilibria(inst.with_sigma_sq(base * f), "robust")),
                     default=0) for f in np.geomspace(1.0, 100.0, 40)]
        assert all(b >= a for a, b in zip(sizes, sizes[1:]))
