import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blogcascades.ingest import Post, parse_timestamp
from blogcascades.stats import (DAY, EmpiricalDistribution, FitError, degree_distributions, fit_power_law,
                                latency_distribution, pearson, rank_correlation, weekday_activity)

from builders import corpus_from_arcs
from oracles import discrete_power_law, spearman_closed_form

MONDAY = parse_timestamp("2010-02-01T00:00:00Z")


def posts_per_day(counts_by_day):
    posts = []
    for day, k in enumerate(counts_by_day):
        for j in range(k):
            posts.append(Post(f"d{day}-{j}", "B", MONDAY + day * DAY + 3600 * (j % 24)))
    return posts


class TestWeekday:
    def test_constant(self):
        act = weekday_activity(posts_per_day([10] * 28), (MONDAY, MONDAY + 28 * DAY - 1))
        assert act.averages == (10.0,) * 7 and act.weekend_dip == 0

    def test_weekend_dip(self):
        # ten weeks; 73 posts spread over the ten Saturdays and ten over Sundays likewise
        weekend = iter([8, 7, 7, 8, 7, 7, 8, 7, 7, 7] * 2)
        counts = []
        for week in range(10):
            counts += [10] * 5 + [next(weekend), next(weekend)]
        act = weekday_activity(posts_per_day(counts), (MONDAY, MONDAY + 70 * DAY - 1))
        assert act.averages[:5] == (10.0,) * 5
        assert act.averages[5] + act.averages[6] == pytest.approx(14.6)
        assert act.weekend_dip == pytest.approx(0.27, abs=1e-12)

    def test_mondays_only(self):
        counts = [5 if d % 7 == 0 else 0 for d in range(21)]
        act = weekday_activity(posts_per_day(counts), (MONDAY, MONDAY + 21 * DAY - 1))
        assert act.weekend_dip == 1
        assert act.averages[0] == 5

    def test_empty(self):
        with pytest.raises(ValueError):
            weekday_activity([])


class TestLatency:
    def test_bins(self):
        corpus = corpus_from_arcs([("a", "o"), ("b", "o")], times={"o": MONDAY, "a": MONDAY + 36 * 3600,
                                                                   "b": MONDAY + 5})
        dist = latency_distribution(corpus)
        assert dist.as_dict() == {0: 1, 1: 1}
        assert dist.total == 2

    def test_empty(self):
        dist = latency_distribution(corpus_from_arcs([]))
        assert dist.total == 0 and len(dist) == 0

    def test_csv(self):
        buf = io.StringIO()
        EmpiricalDistribution.from_samples([0, 0, 3]).to_csv(buf)
        assert buf.getvalue().splitlines() == ["value,count,pdf", "0,2,0.6666666666666666", "3,1,0.3333333333333333"]


class TestDegrees:
    def test_multiplicity(self):
        blogs = {"a1": "A", "a2": "A", "a3": "A", "b1": "B", "b2": "B", "c": "C"}
        corpus = corpus_from_arcs([("a1", "b1"), ("a2", "b1"), ("a3", "b2")], blogs=blogs, extra_posts=["c"])
        deg = degree_distributions(corpus)
        assert deg.pairs == {"A": (3, 0), "B": (0, 3), "C": (0, 0)}
        assert deg.in_degree.as_dict() == {0: 2, 3: 1}
        assert degree_distributions(corpus, active_only=True).pairs == {"A": (3, 0), "B": (0, 3)}

    def test_empty(self):
        deg = degree_distributions(corpus_from_arcs([]))
        assert deg.pairs == {} and deg.in_degree.total == 0

    def test_totals(self):
        corpus = corpus_from_arcs([("a", "o"), ("b", "o"), ("c", "a")])
        deg = degree_distributions(corpus)
        assert sum(o for o, _ in deg.pairs.values()) == sum(i for _, i in deg.pairs.values()) == 3


class TestCorrelation:
    def test_pearson_closed_forms(self):
        assert pearson([(1, 1), (2, 2), (3, 3)]) == pytest.approx(1.0, abs=1e-12)
        assert pearson([(1, 3), (2, 2), (3, 1)]) == pytest.approx(-1.0, abs=1e-12)
        # means (2, 2); cov 1, variances 2 and 2
        assert pearson([(1, 2), (2, 1), (3, 3)]) == pytest.approx(0.5, abs=1e-12)

    def test_pearson_undefined(self):
        assert pearson([(1, 5), (2, 5), (3, 5)]) is None

    def test_rank(self):
        assert rank_correlation([1, 2, 3, 4], [10, 20, 30, 40]) == pytest.approx(1.0, abs=1e-12)
        assert rank_correlation([1, 2, 3, 4], [4, 3, 2, 1]) == pytest.approx(-1.0, abs=1e-12)
        assert rank_correlation([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-12)

    def test_rank_ties_average(self):
        # ranks (1.5, 1.5, 3) vs (1, 2, 3): pearson of those
        expected = pearson([(1.5, 1), (1.5, 2), (3, 3)])
        assert rank_correlation([7, 7, 9], [1, 2, 3]) == pytest.approx(expected, abs=1e-12)

    def test_rank_undefined(self):
        assert rank_correlation([1, 1, 1], [1, 2, 3]) is None

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.integers(-50, 50), st.integers(-50, 50)), min_size=3, max_size=30, unique_by=(
        lambda t: t[0], lambda t: t[1])))
    def test_rank_matches_closed_form_without_ties(self, pairs):
        xs, ys = [p[0] for p in pairs], [p[1] for p in pairs]
        assert rank_correlation(xs, ys) == pytest.approx(spearman_closed_form(xs, ys), abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), min_size=3, max_size=30),
           st.floats(0.1, 10), st.floats(-100, 100))
    def test_affine_invariance(self, pairs, scale, shift):
        r = pearson(pairs)
        moved = pearson([(scale * x + shift, y) for x, y in pairs])
        if r is None or moved is None:
            return
        assert moved == pytest.approx(r, abs=1e-6)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.integers(-1000, 1000), st.integers(-1000, 1000)), min_size=3, max_size=30))
    def test_rank_monotone_invariance(self, pairs):
        xs, ys = [p[0] for p in pairs], [p[1] for p in pairs]
        rho = rank_correlation(xs, ys)
        if rho is not None:
            assert rank_correlation([x ** 3 + 5 * x for x in xs], [math.exp(y / 100) for y in ys]) == pytest.approx(
                rho, abs=1e-9)


class TestPowerLaw:
    def test_recovers_exponent(self):
        rng = np.random.default_rng(3)
        x = discrete_power_law(2.1, 100_000, rng)
        fit = fit_power_law(EmpiricalDistribution.from_samples(x), xmin=1)
        assert fit.exponent == pytest.approx(-2.1, abs=0.05)
        assert 0 <= fit.ks_statistic < 0.01
        assert fit.method == "mle" and fit.n_samples == 100_000
        assert fit.secondary.method == "logbin-lsq"
        assert fit.secondary.exponent == pytest.approx(-2.1, abs=0.3)

    def test_degenerate(self):
        with pytest.raises(FitError, match="degenerate"):
            fit_power_law(EmpiricalDistribution.from_samples([4] * 500), xmin=1)

    def test_too_few(self):
        with pytest.raises(FitError, match="too few"):
            fit_power_law(EmpiricalDistribution.from_samples(list(range(1, 50))), xmin=1)

    def test_truncated(self):
        rng = np.random.default_rng(5)
        x = discrete_power_law(1.5, 50_000, rng)
        fit = fit_power_law(EmpiricalDistribution.from_samples(x), xmin=1, xmax=1000)
        assert fit.exponent == pytest.approx(-1.5, abs=0.05)
        assert fit.xmax == 1000

    def test_ks_of_exact_pmf_is_small(self):
        # a histogram proportional to the model pmf gives a KS distance near zero
        from scipy.special import zeta
        values = np.arange(1, 2001)
        pmf = values ** -2.5 / zeta(2.5, 1)
        counts = np.round(pmf * 1e7).astype(int)
        keep = counts > 0
        fit = fit_power_law(EmpiricalDistribution(values[keep], counts[keep]), xmin=1)
        assert fit.exponent == pytest.approx(-2.5, abs=0.01)
        assert fit.ks_statistic < 1e-3

    def test_consistency_with_sample_size(self):
        errors = []
        for n in (10**3, 10**4, 10**5):
            errs = []
            for seed in range(10):
                x = discrete_power_law(2.1, n, np.random.default_rng(1000 + seed))
                errs.append(abs(fit_power_law(EmpiricalDistribution.from_samples(x)).exponent + 2.1))
            errors.append(np.mean(errs))
        assert errors[0] > errors[1] > errors[2]

    def test_oracle_sampler_matches_pmf(self):
        from scipy.special import zeta
        x = discrete_power_law(2.1, 200_000, np.random.default_rng(0))
        for k in (1, 2, 3, 10):
            assert np.mean(x == k) == pytest.approx(k ** -2.1 / zeta(2.1, 1), rel=0.05)

    def test_to_dict_json_safe(self):
        import json
        x = discrete_power_law(2.1, 1000, np.random.default_rng(1))
        json.dumps(fit_power_law(EmpiricalDistribution.from_samples(x)).to_dict(), allow_nan=False)
