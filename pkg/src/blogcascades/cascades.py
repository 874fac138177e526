"""Per-origin citation cascades and their structural metrics."""
from __future__ import annotations

import json
from collections import Counter, defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction


class CascadeError(ValueError):
    pass


@dataclass(frozen=True)
class Cascade:
    origin: str
    nodes: frozenset
    arcs: frozenset  # (src_post_id, dst_post_id)

    @property
    def size(self) -> int:
        """Number of posts excluding the origin."""
        return len(self.nodes) - 1

    def out_degree(self):
        deg = Counter({n: 0 for n in self.nodes})
        deg.update(s for s, _ in self.arcs)
        return deg

    def in_degree(self):
        deg = Counter({n: 0 for n in self.nodes})
        deg.update(d for _, d in self.arcs)
        return deg


@dataclass(frozen=True)
class CascadeMetrics:
    size: int
    depth: int
    sc: Fraction | None
    topic: str | None = None
    topic_unity: Fraction | None = None


def find_origins(corpus) -> set:
    """Posts that are cited but cite nothing themselves."""
    return {p for p, srcs in corpus.in_arcs.items() if srcs and not corpus.out_arcs.get(p)}


def extract_cascade(corpus, origin) -> Cascade:
    """Collect every post from which ``origin`` is reachable, with the induced arcs."""
    if not corpus.in_arcs.get(origin) or corpus.out_arcs.get(origin):
        raise CascadeError(f"{origin!r} is not a cascade origin")
    nodes = {origin}
    queue = deque([origin])
    while queue:
        cur = queue.popleft()
        for src in corpus.in_arcs.get(cur, ()):
            if src not in nodes:
                nodes.add(src)
                queue.append(src)
    arcs = frozenset((s, d) for s in nodes if s != origin for d in corpus.out_arcs.get(s, ()) if d in nodes)
    return Cascade(origin, frozenset(nodes), arcs)


def extract_all_cascades(corpus) -> list[Cascade]:
    return [extract_cascade(corpus, o) for o in sorted(find_origins(corpus))]


def distances_to_origin(c: Cascade) -> dict:
    """Shortest directed path length (in arcs) from each node to the origin."""
    preds = defaultdict(list)
    for s, d in c.arcs:
        preds[d].append(s)
    dist = {c.origin: 0}
    queue = deque([c.origin])
    while queue:
        cur = queue.popleft()
        for s in preds[cur]:
            if s not in dist:
                dist[s] = dist[cur] + 1
                queue.append(s)
    return dist


def cascade_depth(c: Cascade) -> int:
    return max(distances_to_origin(c).values())


def sc_coefficient(c: Cascade) -> Fraction | None:
    """Star/chain coefficient: 0 for a chain, 1 for a star.

    ``(sum of out-degrees over nodes without in-arcs - 1) / (number of arcs - 1)``.
    Undefined (``None``) for single-arc cascades, where the ratio is 0/0.
    """
    total = len(c.arcs)
    if total < 2:
        return None
    indeg = c.in_degree()
    outdeg = c.out_degree()
    roots = sum(outdeg[x] for x in c.nodes if indeg[x] == 0)
    return Fraction(roots - 1, total - 1)


def assign_topic(c: Cascade, labels) -> str | None:
    """Topic carried by the most cascade nodes; ties go to the smallest string."""
    counts = Counter()
    for n in c.nodes:
        counts.update(labels.labels.get(n, ()))
    if not counts:
        return None
    return min(counts, key=lambda t: (-counts[t], t))


def topic_unity(c: Cascade, labels, topic: str | None = None) -> Fraction | None:
    """Share of content-available nodes that deal with the cascade topic."""
    if topic is None:
        topic = assign_topic(c, labels)
    if topic is None:
        return None
    available = [n for n in c.nodes if n not in labels.unavailable]
    if not available:
        return None
    hits = sum(1 for n in available if topic in labels.labels.get(n, ()))
    return Fraction(hits, len(available))


def cascade_metrics(c: Cascade, labels=None) -> CascadeMetrics:
    topic = unity = None
    if labels is not None:
        topic = assign_topic(c, labels)
        unity = topic_unity(c, labels, topic)
    return CascadeMetrics(c.size, cascade_depth(c), sc_coefficient(c), topic, unity)


def _as_float(x):
    return None if x is None else float(x)


def cascade_record(c: Cascade, m: CascadeMetrics) -> dict:
    return {
        "origin": c.origin,
        "nodes": sorted(c.nodes),
        "arcs": sorted(list(a) for a in c.arcs),
        "size": m.size,
        "depth": m.depth,
        "sc": _as_float(m.sc),
        "topic": m.topic,
        "topic_unity": _as_float(m.topic_unity),
    }


def write_cascades(cascades, metrics, fh):
    """One JSON object per line, in the order given."""
    for c, m in zip(cascades, metrics):
        fh.write(json.dumps(cascade_record(c, m), sort_keys=True) + "\n")
