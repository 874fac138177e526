"""
Loading a citation log and cleaning it
======================================

Raw crawls contain citations to posts that were never crawled, links between
posts of the same blog, links to posts published later, and repeats. The
filter drops each of these and keeps a count per reason.
"""

# %%
import io

from blogcascades.ingest import Corpus, filter_corpus, parse_citations, parse_posts, parse_timestamp

posts = parse_posts(io.StringIO("""\
{"post_id": "o1", "blog_id": "A", "published_at": "2010-02-01T10:00:00Z"}
{"post_id": "a", "blog_id": "B", "published_at": "2010-02-01T12:00:00Z"}
{"post_id": "b", "blog_id": "C", "published_at": "2010-02-02T09:00:00Z"}
{"post_id": "a2", "blog_id": "B", "published_at": "2010-02-05T10:00:00Z"}
"""))
citations = parse_citations(io.StringIO("""\
src_post_id,dst_post_id
a,o1
b,o1
a,o1
o1,a
ghost,o1
a2,a
"""))

# %%
# Each dropped citation is counted under the first rule it breaks.
kept, summary = filter_corpus(posts, citations)
print(kept)
print(summary.to_dict())

# %%
# A window restricts both posts and citations; the bounds are inclusive.
window = (parse_timestamp("2010-02-01T00:00:00Z"), parse_timestamp("2010-02-01T23:59:59Z"))
corpus = Corpus.from_raw(posts, citations, window)
print(corpus.summary.to_dict())
print(sorted(corpus.posts))
