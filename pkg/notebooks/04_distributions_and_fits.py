"""
Latencies, degrees and power-law fits
=====================================
"""

# %%
import numpy as np

from blogcascades.cascades import extract_all_cascades
from blogcascades.ingest import Corpus
from blogcascades.stats import (DAY, EmpiricalDistribution, degree_distributions, fit_power_law,
                                latencies_seconds, latency_distribution, pearson, rank_correlation,
                                weekday_activity)
from blogcascades.synthetic import generate_corpus

posts, citations, window = generate_corpus(seed=3)
corpus = Corpus.from_raw(posts, citations, window)
print(corpus.summary.to_dict())

# %%
# Day-binned latencies, and the exponent fitted on second-resolution latencies above one day.
lat = latency_distribution(corpus)
print({d: n for d, n in list(lat.as_dict().items())[:8]})
fit = fit_power_law(EmpiricalDistribution.from_samples(latencies_seconds(corpus)), xmin=DAY)
print("latency exponent", round(fit.exponent, 3), "KS", round(fit.ks_statistic, 4))

# %%
# Blog in- and out-degrees, and how they correlate.
deg = degree_distributions(corpus)
print("r(all blogs) =", pearson(list(deg.pairs.values())))
print("r(active blogs) =", pearson(list(degree_distributions(corpus, active_only=True).pairs.values())))
print("in-degree fit:", fit_power_law(deg.in_degree, xmin=1, min_samples=50).to_dict())

# %%
sizes = EmpiricalDistribution.from_samples([c.size for c in extract_all_cascades(corpus)])
print("cascade size fit:", fit_power_law(sizes, xmin=1).to_dict())

# %%
# Synthetic posts are spread uniformly over the week, so there is no weekend dip here.
print(weekday_activity(corpus.posts.values(), window))

# %%
# Spearman correlation with average ranks for ties.
rng = np.random.default_rng(0)
x = rng.random(50)
print(rank_correlation(x, x ** 3), rank_correlation([1, 2, 3, 4], [1, 3, 2, 4]))
