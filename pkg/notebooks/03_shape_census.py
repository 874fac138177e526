"""
Counting cascade shapes
=======================

Cascades with the same shape up to relabeling get the same canonical code,
so a census is a frequency table over codes.
"""

# %%
from blogcascades.cascades import extract_all_cascades
from blogcascades.ingest import Corpus
from blogcascades.motifs import shape_census, shape_sc
from blogcascades.synthetic import generate_corpus

posts, citations, window = generate_corpus(n_blogs=100, n_posts=6000, n_citations=2000, n_stars=40, seed=1)
corpus = Corpus.from_raw(posts, citations, window)
census = shape_census(extract_all_cascades(corpus))
print(len(census.entries), "shapes,", census.above_cap, "cascades above the size cap")

# %%
# The most frequent shapes are small; stars stand out because of the injected events.
for code, freq in census.entries[:10]:
    print(f"{freq:5d}  nodes={code.n}  arcs={code.arcs()}  sc={shape_sc(code)}")
