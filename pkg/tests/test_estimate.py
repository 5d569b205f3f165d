"""Exact and Monte Carlo containment, thresholds, and verification checks.

The independent oracle here is a plain 2^n subset loop: no bit tricks, no
numpy, no shared code with the counting route or with inclusion-exclusion.
Monte Carlo assertions are frozen per seed; estimators are deterministic
given (seed, trials), so those tests are exact regressions.
"""

from math import comb, fsum, log2

import numpy as np
import pytest

from threshlab.core import Hypergraph, ResourceLimitError, Rng
from threshlab.estimate import (
    EXACT_GROUND_LIMIT,
    CheckReport,
    ThresholdEstimate,
    constant_check,
    containment_counts,
    containment_probability,
    critical_probability,
    fragment_weight_samples,
    inclusion_exclusion_probability,
    mc_containment_probability,
    mc_critical_probability,
    parallel_map,
    verify_first_moment,
    verify_fragment_weight,
    verify_highprob_bound,
    verify_threshold_bound,
    wilson_interval,
)
from threshlab.families import (
    hamilton_cycles,
    perfect_matchings,
    singletons,
    sunflower,
    triangles,
)


def hg(n, *edges):
    return Hypergraph.from_edge_lists(n, edges)


def brute_containment(h, p):
    """Sum p^|Y| (1-p)^(n-|Y|) over subsets Y containing an edge."""
    n = h.ground_size
    terms = []
    for y in range(1 << n):
        if any(m & ~y == 0 for m in h.masks):
            k = bin(y).count("1")
            terms.append(p**k * (1 - p) ** (n - k))
    return fsum(terms)


# ---------------------------------------------------------------------------
# exact containment


def test_containment_probability_worked_examples():
    assert containment_probability(hg(2, (0, 1)), 0.5) == 0.25
    assert containment_probability(singletons(2), 0.5) == 0.75


def test_containment_probability_degenerate():
    assert containment_probability(Hypergraph(3), 0.7) == 0.0
    assert containment_probability(hg(2, ()), 0.3) == 1.0
    with pytest.raises(ValueError):
        containment_probability(singletons(2), -0.1)
    with pytest.raises(ValueError):
        containment_probability(singletons(2), 1.1)


def test_containment_probability_closed_form_triangles4():
    # four triangles, pairwise sharing one slot: 4p^3 - 6p^5 + 3p^6
    h = triangles(4)
    for p in (0.1, 0.3, 0.5, 0.8):
        expect = 4 * p**3 - 6 * p**5 + 3 * p**6
        assert containment_probability(h, p) == pytest.approx(expect, abs=1e-12)
    assert containment_probability(h, 0.3) == pytest.approx(0.095607, abs=1e-12)


@pytest.mark.parametrize(
    "h",
    [triangles(4), perfect_matchings(4), sunflower(1, 3, 2), singletons(4),
     hg(5, (0, 1, 2), (1, 3), (2, 3, 4), (0, 4))],
    ids=["triangles-4", "matchings-4", "sunflower-1-3-2", "singletons-4", "adhoc"],
)
def test_counting_matches_brute_force_and_inclusion_exclusion(h):
    for p in (0.0, 0.2, 0.5, 0.77, 1.0):
        exact = containment_probability(h, p)
        assert exact == pytest.approx(brute_containment(h, p), abs=1e-12)
        assert exact == pytest.approx(
            inclusion_exclusion_probability(h, p), abs=1e-12
        )


def test_counting_ignores_duplicate_edges():
    a = hg(3, (0, 1), (0, 1), (2,))
    b = hg(3, (0, 1), (2,))
    for p in (0.3, 0.6):
        assert containment_probability(a, p) == containment_probability(b, p)


def test_containment_counts_small_values():
    # subsets of {0,1} containing the full pair: just the pair itself
    assert containment_counts(hg(2, (0, 1))) == (0, 0, 1)
    # subsets containing a singleton edge: {0}, {1}, {0,1}
    assert containment_counts(singletons(2)) == (0, 2, 1)
    assert containment_counts(Hypergraph(2)) == (0, 0, 0)


def test_containment_counts_respects_ground_limit():
    too_big = sunflower(0, 13, 2)  # 26 vertices
    assert too_big.ground_size > EXACT_GROUND_LIMIT
    with pytest.raises(ResourceLimitError):
        containment_counts(too_big)
    with pytest.raises(ResourceLimitError):
        critical_probability(too_big)


def test_inclusion_exclusion_limits():
    assert inclusion_exclusion_probability(Hypergraph(3), 0.4) == 0.0
    with pytest.raises(ResourceLimitError):
        inclusion_exclusion_probability(triangles(6), 0.4)  # 20 edges


# ---------------------------------------------------------------------------
# critical probability


def test_critical_probability_worked_examples():
    assert abs(critical_probability(hg(1, (0,))) - 0.5) <= 1e-9
    assert abs(critical_probability(singletons(2)) - (1 - 2 ** (-1 / 2))) <= 2e-9


@pytest.mark.parametrize(
    "h,expected",
    [
        (singletons(5), 1 - 2 ** (-1 / 5)),
        (perfect_matchings(4), (1 - 2 ** (-1 / 3)) ** 0.5),
        (sunflower(0, 8, 2), (1 - 2 ** (-1 / 8)) ** 0.5),
        (hamilton_cycles(4), 2 ** -0.5),  # root of 3p^4 - 2p^6 = 1/2
        (triangles(4), 0.5795392454833745),  # frozen from the brute oracle
    ],
    ids=["singletons-5", "matchings-4", "sunflower-0-8-2", "hamilton-4",
         "triangles-4"],
)
def test_critical_probability_frozen(h, expected):
    got = critical_probability(h)
    assert abs(got - expected) <= 2e-9
    assert containment_probability(h, got) == pytest.approx(0.5, abs=1e-6)


def test_critical_probability_degenerate():
    with pytest.raises(ValueError):
        critical_probability(Hypergraph(2))
    assert critical_probability(hg(2, ())) == 0.0


# ---------------------------------------------------------------------------
# Wilson intervals and Monte Carlo


def test_wilson_interval_basics():
    lo, hi = wilson_interval(50, 100)
    assert 0.0 <= lo < 0.5 < hi <= 1.0
    lo0, hi0 = wilson_interval(0, 100)
    assert lo0 == pytest.approx(0.0, abs=1e-12) and hi0 > 0.01
    lo1, hi1 = wilson_interval(100, 100)
    assert hi1 == pytest.approx(1.0, abs=1e-12) and lo1 < 0.99
    # z = 0 collapses the interval onto the point estimate
    assert wilson_interval(30, 100, z=0.0) == (0.3, 0.3)


def test_wilson_interval_validation():
    with pytest.raises(ValueError):
        wilson_interval(1, 0)
    with pytest.raises(ValueError):
        wilson_interval(5, 4)
    with pytest.raises(ValueError):
        wilson_interval(-1, 4)


def test_mc_containment_extremes():
    h = triangles(4)
    assert mc_containment_probability(h, 0.0, Rng(1), trials=500).value == 0.0
    assert mc_containment_probability(h, 1.0, Rng(1), trials=500).value == 1.0


def test_mc_containment_is_deterministic():
    h = triangles(4)
    a = mc_containment_probability(h, 0.4, Rng(11), trials=700)
    b = mc_containment_probability(h, 0.4, Rng(11), trials=700)
    assert a == b
    c = mc_containment_probability(h, 0.4, Rng(12), trials=700)
    assert a.value != c.value


def test_mc_containment_brackets_exact_value():
    # frozen seed: the 95% interval around 4000 draws covers the exact value
    h = triangles(4)
    p = critical_probability(h)
    est = mc_containment_probability(h, p, Rng(11), trials=4000)
    assert est.ci_low <= 0.5 <= est.ci_high
    assert est.trials == 4000 and est.seed == 11


def test_mc_containment_validation():
    with pytest.raises(ValueError):
        mc_containment_probability(triangles(4), 1.2, Rng(0))
    with pytest.raises(ValueError):
        mc_containment_probability(triangles(4), 0.5, Rng(0), trials=0)


def test_mc_critical_probability_brackets_exact():
    h = singletons(3)
    est = mc_critical_probability(h, Rng(5), trials=4096, tol=1e-2)
    exact = critical_probability(h)
    assert est.ci_low <= exact <= est.ci_high
    assert est.ci_low <= est.value <= est.ci_high
    assert est.trials % 4096 == 0 and est.trials > 0


def test_mc_critical_probability_degenerate():
    with pytest.raises(ValueError):
        mc_critical_probability(Hypergraph(2), Rng(0))
    est = mc_critical_probability(hg(2, ()), Rng(0))
    assert est.value == 0.0 and est.trials == 0


# ---------------------------------------------------------------------------
# verification checks


def test_threshold_bound_non_vacuous_case():
    r = verify_threshold_bound(singletons(5), instance="singletons-5")
    assert r.passed and not r.vacuous
    assert r.rhs == pytest.approx(0.8, abs=1e-7)  # 8 * (1/10) * log2(2)
    assert r.lhs == pytest.approx(1 - 2 ** (-1 / 5), abs=1e-7)
    assert r.details["first_moment_ok"]


def test_threshold_bound_vacuous_case():
    r = verify_threshold_bound(triangles(4), instance="triangles-4")
    assert r.passed and r.vacuous
    assert r.rhs == 1.0
    assert r.details["rhs_unclamped"] > 1.0


def test_threshold_bound_uses_injected_values():
    r = verify_threshold_bound(singletons(5), q=0.1, pc=0.13)
    assert r.lhs == 0.13
    assert r.details["q"] == 0.1


def test_highprob_bound_vacuous_shortcut():
    # the derived rate clamps at 1, so containment is certain by definition
    r = verify_highprob_bound(singletons(2), 0.25, Rng(3))
    assert r.passed and r.vacuous
    assert r.lhs == 1.0 and r.trials == 0


def test_highprob_bound_exact_route():
    h = sunflower(0, 8, 2)
    r = verify_highprob_bound(h, 0.5, Rng(3), q=0.004)
    assert not r.vacuous and r.trials == 0
    p = 48.0 * 0.004 * log2(2 / 0.5)
    assert r.details["p"] == pytest.approx(p)
    assert r.lhs == pytest.approx(1 - (1 - p * p) ** 8, abs=1e-12)
    assert r.passed


def test_highprob_bound_mc_route_frozen():
    h = sunflower(0, 50, 2)  # 100 vertices forces the sampled route
    r = verify_highprob_bound(h, 0.5, Rng(4), q=0.01, trials=2000)
    assert r.passed and not r.vacuous
    assert r.trials == 2000
    assert r.details["p"] == pytest.approx(0.96)
    assert r.lhs == 1.0  # every one of the 2000 draws contained an edge


def test_highprob_bound_validation():
    with pytest.raises(ValueError):
        verify_highprob_bound(singletons(2), 0.0, Rng(0))
    with pytest.raises(ValueError):
        verify_highprob_bound(singletons(2), 1.0, Rng(0))


def test_fragment_weight_samples_shape_and_determinism():
    h = triangles(5)
    a = fragment_weight_samples(h, 1 / 16, Rng(6), trials=50)
    assert a.shape == (50, 3)
    assert (a >= 0.0).all()
    b = fragment_weight_samples(h, 1 / 16, Rng(6), trials=50)
    assert (a == b).all()


def test_fragment_weight_samples_validation():
    with pytest.raises(ValueError):
        fragment_weight_samples(triangles(5), 0.0, Rng(0))
    with pytest.raises(ValueError):
        fragment_weight_samples(triangles(5), 0.1, Rng(0), trials=0)
    with pytest.raises(ValueError):
        fragment_weight_samples(Hypergraph(3), 0.1, Rng(0))


def test_verify_fragment_weight_frozen():
    reports = verify_fragment_weight(triangles(5), 1 / 16, Rng(6), trials=400)
    assert [r.operation for r in reports] == [
        "fragment_weight_t1", "fragment_weight_t2", "fragment_weight_t3",
    ]
    assert all(r.passed for r in reports)
    for t, r in enumerate(reports, start=1):
        assert r.rhs == 8.0 ** (-t) * comb(3, t)
        assert r.trials == 400
        assert r.tolerance >= 0.0


def test_verify_fragment_weight_accepts_precomputed_samples():
    samples = fragment_weight_samples(triangles(5), 1 / 16, Rng(6), trials=400)
    fresh = verify_fragment_weight(triangles(5), 1 / 16, Rng(6), trials=400)
    reused = verify_fragment_weight(triangles(5), 1 / 16, Rng(6), samples=samples)
    assert [r.lhs for r in fresh] == [r.lhs for r in reused]


def test_verify_first_moment():
    r = verify_first_moment(singletons(4), instance="singletons-4")
    assert r.passed
    assert r.lhs == pytest.approx(0.125, abs=1e-7)
    assert r.rhs == pytest.approx(1 - 2 ** (-1 / 4), abs=1e-7)


def test_constant_check_frozen_fractions():
    r = constant_check()
    assert r.passed
    assert r.details["partial"] == "819/4096"
    assert r.details["tail_bound"] == "1/32"
    assert r.details["total"] == "947/4096"
    assert r.lhs == 947 / 4096
    assert r.rhs == 0.25
    assert r.details["domination_ok"]


def test_constant_check_more_terms_still_passes():
    r = constant_check(terms=6)
    assert r.passed
    assert r.details["tail_bound"] == "1/128"
    with pytest.raises(ValueError):
        constant_check(terms=0)


# ---------------------------------------------------------------------------
# report plumbing


def test_parallel_map_preserves_order():
    items = list(range(25))
    assert parallel_map(lambda x: x * x, items) == [x * x for x in items]
    assert parallel_map(lambda x: x * x, items, workers=4) == [
        x * x for x in items
    ]
    assert parallel_map(lambda x: x, []) == []


def test_check_report_as_dict_keys_are_stable():
    r = CheckReport("i", "op", 1.0, 2.0, 0.1, True)
    assert list(r.as_dict()) == [
        "instance", "operation", "lhs", "rhs", "tolerance",
        "passed", "vacuous", "seed", "trials", "details",
    ]


def test_threshold_estimate_is_a_plain_record():
    est = ThresholdEstimate(0.5, 0.4, 0.6, 100, 7)
    assert (est.value, est.ci_low, est.ci_high, est.trials, est.seed) == (
        0.5, 0.4, 0.6, 100, 7,
    )
