import json
import math
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blogcascades.ingest import Citation, Corpus, Post, filter_corpus
from blogcascades.motifs import canonical_code
from blogcascades.nullmodel import (RewireConfig, aggregate, cascade_stats, compare, fit_theta, read_config_file,
                                    realization_rng, rewire_citations, run_realization, run_realizations, z_score)
from blogcascades.stats import DAY
from blogcascades.synthetic import generate_corpus

from builders import HOUR, T0, corpus_from_arcs, random_time_consistent
from oracles import discrete_power_law


def direct_latency_corpus(n, exponent, seed):
    """Every citation joins two fresh posts whose gap is a power-law draw (seconds)."""
    rng = np.random.default_rng(seed)
    gaps = discrete_power_law(exponent, n, rng, xmin=DAY)
    posts, cits = [], []
    for i, g in enumerate(gaps):
        t = T0 + int(rng.integers(0, 150 * DAY))
        posts += [Post(f"d{i}", f"B{i % 40}", t), Post(f"s{i}", f"A{i % 37}", t + int(g))]
        cits.append(Citation(f"s{i}", f"d{i}"))
    return Corpus(posts, cits)


class TestConfig:
    def test_defaults(self):
        cfg = RewireConfig()
        assert (cfg.theta, cfg.epsilon, cfg.realizations, cfg.z_threshold, cfg.cap) == (1.5, 3600.0, 100, 3.0, 8)

    @pytest.mark.parametrize("kw", [{"theta": 0}, {"epsilon": -1}, {"realizations": 0}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            RewireConfig(**kw)

    def test_file(self, tmp_path):
        path = tmp_path / "model.cfg"
        path.write_text("# model\ntheta = 1.7\nrealizations=5 # short run\nbase_seed = 42\n\ncap = 6\n")
        cfg = RewireConfig.from_mapping(read_config_file(path))
        assert (cfg.theta, cfg.realizations, cfg.base_seed, cfg.cap) == (1.7, 5, 42, 6)

    def test_file_unknown_key(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("gamma = 2\n")
        with pytest.raises(ValueError, match="gamma"):
            read_config_file(path)

    def test_seed_is_pure_function(self):
        a = realization_rng(7, 3).random(4)
        assert np.array_equal(a, realization_rng(7, 3).random(4))
        assert not np.array_equal(a, realization_rng(7, 4).random(4))
        assert not np.array_equal(a, realization_rng(8, 3).random(4))


class TestFitTheta:
    def test_recovers_latency_exponent(self):
        assert fit_theta(direct_latency_corpus(5000, 1.5, 0)) == pytest.approx(1.5, abs=0.05)

    def test_fallback(self):
        corpus = corpus_from_arcs([("a", "o")])
        with pytest.warns(RuntimeWarning, match="theta=1.5"):
            assert fit_theta(corpus) == 1.5

    def test_disabled(self):
        assert fit_theta(direct_latency_corpus(200, 2.0, 1), enabled=False) == 1.5


class TestRewire:
    def test_single_post_blog_unchanged(self):
        corpus = corpus_from_arcs([("a", "o"), ("b", "o")])
        assert rewire_citations(corpus, RewireConfig(), 0) == corpus.citations

    def test_strong_bias_picks_recent(self):
        posts = [Post("old", "B", T0), Post("new", "B", T0 + 30 * DAY - 1800)]
        posts += [Post(f"s{i}", f"A{i}", T0 + 30 * DAY) for i in range(200)]
        cits = [Citation(f"s{i}", "old") for i in range(200)]
        corpus = Corpus(posts, cits)
        for idx in range(5):
            out = rewire_citations(corpus, RewireConfig(theta=20.0), idx)
            assert {c.dst_post_id for c in out} == {"new"}

    def test_selection_law(self):
        # three candidates with gaps 1 h (clamped), 1 day and 10 days; theta = 1
        src_t = T0 + 20 * DAY
        posts = [Post("p10", "B", src_t - 10 * DAY), Post("p1", "B", src_t - DAY), Post("p0", "B", src_t - 600)]
        posts += [Post(f"s{i}", "A", src_t) for i in range(20000)]
        corpus = Corpus(posts, [Citation(f"s{i}", "p10") for i in range(20000)])
        counts = Counter(c.dst_post_id for c in rewire_citations(corpus, RewireConfig(theta=1.0), 0))
        w = {"p0": 1 / 3600, "p1": 1 / DAY, "p10": 1 / (10 * DAY)}
        total = sum(w.values())
        for k, wk in w.items():
            p = wk / total
            sd = math.sqrt(p * (1 - p) / 20000)
            assert abs(counts[k] / 20000 - p) < 5 * sd

    def test_future_posts_never_chosen(self):
        posts = [Post("d", "B", T0), Post("future", "B", T0 + 2 * HOUR), Post("s", "A", T0 + HOUR)]
        corpus = Corpus(posts, [Citation("s", "d")])
        for idx in range(50):
            assert rewire_citations(corpus, RewireConfig(), idx) == [Citation("s", "d")]

    def test_deterministic(self):
        posts, cits, win = generate_corpus(n_blogs=30, n_posts=600, n_citations=300, seed=4)
        corpus = Corpus.from_raw(posts, cits, win)
        cfg = RewireConfig(base_seed=11)
        assert rewire_citations(corpus, cfg, 2) == rewire_citations(corpus, cfg, 2)
        assert rewire_citations(corpus, cfg, 2) != rewire_citations(corpus, cfg, 3)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_rewire_conservation(seed):
    posts, cits = random_time_consistent(random.Random(seed), max_posts=40, max_blogs=5)
    kept, _ = filter_corpus(posts, cits)
    corpus = Corpus(posts, kept)
    out = rewire_citations(corpus, RewireConfig(base_seed=seed), seed % 7)
    assert len(out) == len(kept)
    blog = {p.post_id: p.blog_id for p in posts}
    t = {p.post_id: p.published_at for p in posts}
    assert Counter((c.src_post_id, blog[c.dst_post_id]) for c in out) == \
        Counter((c.src_post_id, blog[c.dst_post_id]) for c in kept)
    for c in out:
        assert t[c.dst_post_id] <= t[c.src_post_id]


@pytest.fixture(scope="module")
def mid_corpus():
    posts, cits, win = generate_corpus(n_blogs=60, n_posts=3000, n_citations=800, seed=2)
    return Corpus.from_raw(posts, cits, win)


class TestRealizations:
    def test_single_realization(self, mid_corpus):
        cfg = RewireConfig(realizations=1, base_seed=5)
        agg = run_realizations(mid_corpus, cfg)
        one = run_realization(mid_corpus, cfg, 0)
        assert agg.realizations == 1
        assert agg.shape_stats() == {code: (float(f), 0.0) for code, f in one.census.entries}
        assert agg.size_mean == {k: float(v) for k, v in sorted(one.sizes.items())}

    def test_dispersion(self, mid_corpus):
        agg = run_realizations(mid_corpus, RewireConfig(realizations=100, base_seed=1))
        top = agg.top_shapes(3)
        stats = agg.shape_stats()
        assert all(stats[s][1] > 0 for s in top)

    def test_parallel_matches_serial(self, mid_corpus):
        cfg = RewireConfig(realizations=4, base_seed=9)
        a = run_realizations(mid_corpus, cfg, workers=1)
        b = run_realizations(mid_corpus, cfg, workers=2)
        assert a.shapes == b.shapes
        assert np.array_equal(a.shape_mean, b.shape_mean) and np.array_equal(a.shape_std, b.shape_std)
        assert a.size_mean == b.size_mean and a.depth_mean == b.depth_mean

    def test_conservation_of_realization_totals(self, mid_corpus):
        r = run_realization(mid_corpus, RewireConfig(), 0)
        assert r.census.total == sum(r.sizes.values()) == sum(r.depths.values())


class TestCompare:
    def test_equal_census_consistent(self, mid_corpus):
        r = run_realization(mid_corpus, RewireConfig(), 0)
        agg = aggregate([r, r, r], cap=8)
        report = compare(r.census, (r.sizes, r.depths), agg)
        assert report.shapes and all(row["flag"] == "consistent" for row in report.shapes)
        assert all(row["z"] is None for row in report.shapes)

    def test_absent_from_model_is_over_infinite(self):
        star = corpus_from_arcs([("a", "o"), ("b", "o"), ("c", "o")])
        chain = corpus_from_arcs([("a", "b"), ("b", "o")])
        real, model = cascade_stats(star), cascade_stats(chain)
        report = compare(real.census, (real.sizes, real.depths), aggregate([model, model], cap=8))
        flags = {row["code"]: (row["flag"], row["z"]) for row in report.shapes}
        star_code = canonical_code(next(iter(real.census.examples.values()))).hex()
        assert flags[star_code] == ("over", math.inf)
        doc = json.loads(report.to_json())
        assert {row["z"] for row in doc["shapes"]} == {"inf", "-inf"}

    def test_threshold_flags(self):
        assert z_score(10, 4, 2) == 3
        from blogcascades.nullmodel import flag_for
        assert flag_for(3.0, 3) == "consistent" and flag_for(3.01, 3) == "over" and flag_for(-3.5, 3) == "under"

    def test_sc_annotation_and_overlay(self, mid_corpus):
        real = cascade_stats(mid_corpus)
        agg = run_realizations(mid_corpus, RewireConfig(realizations=3))
        report = compare(real.census, (real.sizes, real.depths), agg)
        for row in report.shapes:
            assert row["sc"] is None or 0 <= row["sc"] <= 1
            if row["arc_count"] == 1:
                assert row["sc"] is None
        sizes = {r["value"]: r for r in report.size_overlay}
        assert sum(r["real"] for r in sizes.values()) == sum(real.sizes.values())
        assert report.z_threshold == 3.0

    def test_cap_mismatch(self, mid_corpus):
        real = cascade_stats(mid_corpus, cap=6)
        agg = aggregate([run_realization(mid_corpus, RewireConfig(), 0)], cap=8)
        with pytest.raises(ValueError, match="cap"):
            compare(real.census, (real.sizes, real.depths), agg)

    def test_above_cap_buckets_compared(self):
        leaves = [(f"l{i}", "o") for i in range(9)]
        real = cascade_stats(corpus_from_arcs(leaves))
        model = cascade_stats(corpus_from_arcs(leaves[:2]))
        report = compare(real.census, (real.sizes, real.depths), aggregate([model], cap=8))
        assert report.buckets == [{"size": 9, "depth": 1, "real": 1, "model_mean": 0.0, "model_std": 0.0,
                                   "z": math.inf, "flag": "over"}]


def test_star_heavy_corpus_flags_stars():
    posts, cits, win = generate_corpus(n_blogs=60, n_posts=4000, n_citations=600, n_stars=60, star_sizes=(3, 4),
                                       seed=12)
    corpus = Corpus.from_raw(posts, cits, win)
    real = cascade_stats(corpus)
    agg = run_realizations(corpus, RewireConfig(realizations=30, base_seed=3))
    report = compare(real.census, (real.sizes, real.depths), agg)
    stars = {row["code"]: row for row in report.shapes if row["sc"] == 1.0 and row["node_count"] in (4, 5)}
    assert stars and all(row["flag"] == "over" for row in stars.values())
