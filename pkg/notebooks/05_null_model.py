"""
Comparing a corpus with the rewired null model
==============================================

Each realization sends every citation to a random post of the same cited
blog, favouring recent ones. Shapes much more frequent in the real corpus
than across realizations are flagged "over".
"""

# %%
from blogcascades.ingest import Corpus
from blogcascades.nullmodel import RewireConfig, cascade_stats, compare, fit_theta, run_realizations
from blogcascades.synthetic import generate_corpus

posts, citations, window = generate_corpus(n_blogs=80, n_posts=5000, n_citations=1200, n_stars=60,
                                           star_sizes=(3, 4), seed=12)
corpus = Corpus.from_raw(posts, citations, window)
theta = fit_theta(corpus)
print("fitted theta", round(theta, 3))

# %%
config = RewireConfig(theta=theta, realizations=30, base_seed=3)
model = run_realizations(corpus, config)
real = cascade_stats(corpus, cap=config.cap)
report = compare(real.census, (real.sizes, real.depths), model, z_threshold=config.z_threshold)

# %%
for row in report.shapes[:12]:
    z = row["z"] if row["z"] is None else round(row["z"], 2)
    print(f"{row['flag']:>10}  real={row['real']:4d}  model={row['model_mean']:7.2f}  z={z}  arcs={row['arcs']}")
