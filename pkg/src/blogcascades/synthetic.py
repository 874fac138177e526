"""Synthetic blog corpora with heavy-tailed activity and latency-biased citations.

Useful for exercising the pipeline at a realistic scale when no crawl is at
hand. Citation latencies follow the same ``max(dt, epsilon) ** -theta`` bias
as the null model, and optional "star" events add groups of posts from
distinct blogs that all cite one fresh post within a short time.
"""
from __future__ import annotations

import numpy as np

from .ingest import Citation, Post, parse_timestamp

WINDOW_START = parse_timestamp("2010-02-01T00:00:00Z")


def _zipf_weights(n, exponent, rng):
    w = np.arange(1, n + 1, dtype=float) ** -exponent
    rng.shuffle(w)
    return w / w.sum()


def generate_corpus(
    n_blogs=300,
    n_posts=30000,
    n_citations=10000,
    days=151,
    theta=1.5,
    epsilon=3600.0,
    activity_exponent=0.8,
    popularity_exponent=1.0,
    citing_exponent=0.8,
    n_stars=0,
    star_sizes=(3, 6),
    star_spread=2 * 86400,
    seed=0,
    start=WINDOW_START,
):
    """Return ``(posts, citations, window)`` for a random corpus.

    Citations are generated clean (distinct blogs, cited post not newer), but
    a pair may repeat; run them through ``filter_corpus`` as with real logs.
    """
    rng = np.random.default_rng(seed)
    span = days * 86400
    activity = _zipf_weights(n_blogs, activity_exponent, rng)
    popularity = _zipf_weights(n_blogs, popularity_exponent, rng)
    citing = _zipf_weights(n_blogs, citing_exponent, rng)

    post_blog = rng.choice(n_blogs, size=n_posts, p=activity)
    post_time = start + rng.integers(0, span, size=n_posts)
    order = np.lexsort((np.arange(n_posts), post_time, post_blog))
    post_blog, post_time = post_blog[order], post_time[order]
    # posts of blog b occupy [first[b], first[b + 1]) sorted by time
    first = np.searchsorted(post_blog, np.arange(n_blogs + 1))
    posts = [Post(f"p{i:07d}", f"b{post_blog[i]:04d}", int(post_time[i])) for i in range(n_posts)]

    src_weight = citing[post_blog]
    src_weight = src_weight / src_weight.sum()
    citations = []
    while len(citations) < n_citations:
        batch = 2 * (n_citations - len(citations)) + 16
        srcs = rng.choice(n_posts, size=batch, p=src_weight)
        dsts = rng.choice(n_blogs, size=batch, p=popularity)
        draws = rng.random(batch)
        for s, b, u in zip(srcs, dsts, draws):
            if b == post_blog[s]:
                continue
            lo, hi = first[b], first[b + 1]
            k = int(np.searchsorted(post_time[lo:hi], post_time[s], side="right"))
            if k == 0:
                continue
            dt = (post_time[s] - post_time[lo:lo + k]).astype(float)
            cum = np.cumsum(np.maximum(dt, epsilon) ** -theta)
            j = lo + min(int(np.searchsorted(cum, u * cum[-1], side="right")), k - 1)
            citations.append(Citation(posts[s].post_id, posts[j].post_id))
            if len(citations) == n_citations:
                break

    next_id = n_posts
    for _ in range(n_stars):
        k = int(rng.integers(star_sizes[0], star_sizes[1] + 1))
        blogs = rng.choice(n_blogs, size=k + 1, replace=False, p=activity)
        t0 = start + int(rng.integers(0, max(1, span - star_spread)))
        origin = Post(f"s{next_id:07d}", f"b{blogs[0]:04d}", t0)
        next_id += 1
        posts.append(origin)
        for b in blogs[1:]:
            leaf = Post(f"s{next_id:07d}", f"b{b:04d}", t0 + int(rng.integers(0, star_spread)))
            next_id += 1
            posts.append(leaf)
            citations.append(Citation(leaf.post_id, origin.post_id))
    return posts, citations, (start, start + span)
