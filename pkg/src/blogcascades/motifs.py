"""Canonical codes for small cascade shapes and the frequency census.

A shape code is the smallest row-major adjacency bit string over the node
orderings that respect a structural colouring of the nodes. Colours start from
the (in-degree, out-degree) pair and are refined by the colours of
neighbours, so an ordering only ever maps a node onto a node of the same
degree signature. Nodes with identical in- and out-neighbourhoods can be
swapped without changing the matrix, so only one ordering per such group is
tried.
"""
from __future__ import annotations

import csv
import itertools
import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import total_ordering

DEFAULT_CAP = 8


@total_ordering
@dataclass(frozen=True)
class ShapeCode:
    n: int
    code: bytes

    def __lt__(self, other):
        return (self.n, self.code) < (other.n, other.code)

    @property
    def bits(self) -> int:
        return int.from_bytes(self.code, "big")

    def arcs(self) -> list[tuple[int, int]]:
        """Arcs of the canonical representative, nodes numbered 0..n-1."""
        value = self.bits
        n = self.n
        out = []
        for i in range(n):
            for j in range(n):
                if value >> (n * n - 1 - (i * n + j)) & 1:
                    out.append((i, j))
        return out

    @property
    def arc_count(self) -> int:
        return bin(self.bits).count("1")

    def hex(self) -> str:
        return self.code.hex()


def _colour_classes(n, succ, pred):
    colour = [(len(pred[v]), len(succ[v])) for v in range(n)]
    # relabel with ranks so colours stay small and comparable across graphs
    ranks = {c: i for i, c in enumerate(sorted(set(colour)))}
    colour = [ranks[c] for c in colour]
    while True:
        sig = [(colour[v], tuple(sorted(colour[u] for u in succ[v])), tuple(sorted(colour[u] for u in pred[v])))
               for v in range(n)]
        ranks = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [ranks[s] for s in sig]
        if len(ranks) == len(set(colour)):
            return new
        colour = new


def _ordered_blocks(n, succ, pred, colour):
    """Per colour (ascending), the list of twin-group labels of its nodes."""
    twin_key = {}
    twin_of = []
    for v in range(n):
        key = (frozenset(succ[v]), frozenset(pred[v]))
        twin_of.append(twin_key.setdefault(key, len(twin_key)))
    blocks = defaultdict(list)
    for v in range(n):
        blocks[colour[v]].append(v)
    return [blocks[c] for c in sorted(blocks)], twin_of


def _distinct_orders(nodes, twin_of):
    """Orderings of ``nodes`` up to permutations inside twin groups."""
    groups = defaultdict(list)
    for v in nodes:
        groups[twin_of[v]].append(v)
    labels = sorted(groups)
    counts = {g: len(groups[g]) for g in labels}
    seq = []

    def rec(k):
        if k == len(nodes):
            pools = {g: iter(groups[g]) for g in labels}
            yield [next(pools[g]) for g in seq]
            return
        for g in labels:
            if counts[g]:
                counts[g] -= 1
                seq.append(g)
                yield from rec(k + 1)
                seq.pop()
                counts[g] += 1

    yield from rec(0)


def canonical_form(n, arcs) -> ShapeCode:
    """Canonical code of a digraph on nodes ``0..n-1``."""
    succ = [set() for _ in range(n)]
    pred = [set() for _ in range(n)]
    for s, d in arcs:
        succ[s].add(d)
        pred[d].add(s)
    colour = _colour_classes(n, succ, pred)
    blocks, twin_of = _ordered_blocks(n, succ, pred, colour)
    adj = [[1 if j in succ[i] else 0 for j in range(n)] for i in range(n)]
    best = None
    for parts in itertools.product(*(list(_distinct_orders(b, twin_of)) for b in blocks)):
        order = [v for part in parts for v in part]
        value = 0
        for i in order:
            row = adj[i]
            for j in order:
                value = (value << 1) | row[j]
        if best is None or value < best:
            best = value
    nbytes = max(1, (n * n + 7) // 8)
    return ShapeCode(n, best.to_bytes(nbytes, "big"))


def canonical_code(c, cap: int = DEFAULT_CAP) -> ShapeCode | None:
    """Canonical shape of a cascade, or ``None`` when it has more than ``cap`` nodes."""
    n = len(c.nodes)
    if n > cap:
        return None
    index = {v: i for i, v in enumerate(sorted(c.nodes))}
    return canonical_form(n, [(index[s], index[d]) for s, d in c.arcs])


@dataclass
class ShapeCensus:
    entries: list  # [(ShapeCode, frequency)], most frequent first
    cap: int = DEFAULT_CAP
    above_cap: int = 0
    above_cap_buckets: Counter = field(default_factory=Counter)  # (size, depth) -> count
    examples: dict = field(default_factory=dict)  # ShapeCode -> first Cascade seen

    def frequencies(self) -> dict:
        return dict(self.entries)

    @property
    def total(self) -> int:
        return sum(f for _, f in self.entries) + self.above_cap


def shape_census(cascades, cap: int = DEFAULT_CAP, depths=None) -> ShapeCensus:
    """Group cascades by shape and rank by frequency (ties by code).

    Cascades above ``cap`` nodes are not canonicalised; they are tallied by
    (size, depth). ``depths`` may supply precomputed depths for them.
    """
    from .cascades import cascade_depth

    counts = Counter()
    examples = {}
    buckets = Counter()
    for k, c in enumerate(cascades):
        code = canonical_code(c, cap)
        if code is None:
            depth = depths[k] if depths is not None else cascade_depth(c)
            buckets[(c.size, depth)] += 1
            continue
        counts[code] += 1
        examples.setdefault(code, c)
    entries = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0].n, kv[0].code))
    return ShapeCensus(entries, cap, sum(buckets.values()), buckets, examples)


def shape_sc(code: ShapeCode):
    """sc coefficient of a shape (``None`` for single-arc or origin-less shapes)."""
    from .cascades import Cascade, sc_coefficient

    arcs = code.arcs()
    srcs = {s for s, _ in arcs}
    sinks = [v for v in range(code.n) if v not in srcs]
    if len(sinks) != 1:
        return None
    return sc_coefficient(Cascade(sinks[0], frozenset(range(code.n)), frozenset(arcs)))


def write_census_csv(census: ShapeCensus, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["rank", "node_count", "arc_count", "code", "frequency"])
    for rank, (code, freq) in enumerate(census.entries, start=1):
        writer.writerow([rank, code.n, code.arc_count, code.hex(), freq])


def write_census_examples(census: ShapeCensus, fh):
    """Sidecar with one concrete cascade per shape, in census order."""
    for rank, (code, _) in enumerate(census.entries, start=1):
        c = census.examples.get(code)
        rec = {"rank": rank, "code": code.hex(), "node_count": code.n, "canonical_arcs": code.arcs()}
        if c is not None:
            rec["origin"] = c.origin
            rec["arcs"] = sorted(list(a) for a in c.arcs)
        fh.write(json.dumps(rec, sort_keys=True) + "\n")
