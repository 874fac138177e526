"""
Cascades, depth and the sc coefficient
======================================

Every post that is cited but cites nothing roots a cascade: the posts that
reach it through citations, and the citations among them.
"""

# %%
from blogcascades.cascades import cascade_metrics, extract_all_cascades
from blogcascades.ingest import Citation, Corpus, Post

T0 = 1265000000
arcs = {
    "o1": [("a", "o1"), ("b", "o1"), ("c", "o1")],           # star
    "o2": [("d", "o2"), ("e", "d"), ("f", "e")],             # chain
    "o3": [("g", "o3"), ("h", "o3"), ("i", "g")],            # mixed
    "o4": [("j", "o4")],                                     # single citation
}
order = ["o1", "o2", "o3", "o4", "a", "b", "c", "d", "e", "f", "g", "h", "i", "j"]
posts = [Post(p, f"blog-{p}", T0 + 3600 * k) for k, p in enumerate(order)]
corpus = Corpus(posts, [Citation(s, d) for group in arcs.values() for s, d in group])

# %%
# sc is 1 for stars, 0 for chains and undefined (None) with a single citation.
for c in extract_all_cascades(corpus):
    m = cascade_metrics(c)
    print(c.origin, "size", m.size, "depth", m.depth, "sc", m.sc)
