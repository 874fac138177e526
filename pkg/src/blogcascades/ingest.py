"""Reading and cleaning blog post / citation logs.

Posts come as JSON lines (``post_id``, ``blog_id``, ``published_at``), citations
as a two-column CSV. Filtering is kept apart from parsing so that every dropped
citation is accounted for in :class:`CorpusSummary`.
"""
from __future__ import annotations

import csv
import json
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Mapping

REASONS = ("out-of-corpus", "self-citation", "anterior-post", "duplicate")
UNAVAILABLE = "__UNAVAILABLE__"


class IngestError(ValueError):
    """Malformed input record; ``lineno`` is 1-based when known."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


def parse_timestamp(value: str) -> int:
    """ISO-8601 string to UTC epoch seconds. Naive values are taken as UTC."""
    if not isinstance(value, str):
        raise ValueError(f"timestamp must be a string, got {value!r}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def format_timestamp(seconds: int) -> str:
    return datetime.fromtimestamp(seconds, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class Post:
    post_id: str
    blog_id: str
    published_at: int  # UTC epoch seconds


@dataclass(frozen=True)
class Citation:
    src_post_id: str
    dst_post_id: str


@dataclass
class CorpusSummary:
    B: int
    N: int
    L: int
    window_start: int
    window_end: int
    raw_citations: int
    removed: dict = field(default_factory=lambda: dict.fromkeys(REASONS, 0))

    def to_dict(self):
        return {
            "B": self.B,
            "N": self.N,
            "L": self.L,
            "window_start": format_timestamp(self.window_start),
            "window_end": format_timestamp(self.window_end),
            "raw_citations": self.raw_citations,
            "removed": {k: self.removed[k] for k in REASONS},
        }


@dataclass
class TopicLabels:
    labels: dict = field(default_factory=dict)  # post_id -> frozenset of topics
    unavailable: frozenset = frozenset()

    def __post_init__(self):
        both = set(self.labels) & set(self.unavailable)
        if both:
            raise IngestError(f"posts both labeled and unavailable: {sorted(both)[:5]}")


def parse_posts(stream: Iterable[str]) -> list[Post]:
    """Parse one JSON record per line into :class:`Post` objects.

    Blank lines are skipped. Raises :class:`IngestError` on malformed lines,
    missing fields, bad timestamps and duplicate ``post_id`` values.
    """
    posts = []
    seen = {}
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(f"malformed record ({exc.msg})", lineno) from None
        if not isinstance(rec, dict):
            raise IngestError("record is not an object", lineno)
        missing = [k for k in ("post_id", "blog_id", "published_at") if k not in rec]
        if missing:
            raise IngestError(f"missing field(s) {', '.join(missing)}", lineno)
        try:
            ts = parse_timestamp(rec["published_at"])
        except ValueError:
            raise IngestError(f"unparseable timestamp {rec['published_at']!r}", lineno) from None
        pid = str(rec["post_id"])
        if pid in seen:
            raise IngestError(f"duplicate post_id {pid!r} (first seen on line {seen[pid]})", lineno)
        seen[pid] = lineno
        posts.append(Post(pid, str(rec["blog_id"]), ts))
    return posts


def parse_citations(stream: Iterable[str]) -> list[Citation]:
    """Parse ``src_post_id,dst_post_id`` CSV rows, keeping every row as-is."""
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["src_post_id", "dst_post_id"]:
        raise IngestError("missing header 'src_post_id,dst_post_id'", 1)
    out = []
    for row in reader:
        if not row:
            continue
        if len(row) != 2:
            raise IngestError(f"expected 2 columns, got {len(row)}", reader.line_num)
        out.append(Citation(row[0].strip(), row[1].strip()))
    return out


def parse_topics(stream: Iterable[str]) -> TopicLabels:
    """Parse ``post_id<TAB>topic`` lines. ``__UNAVAILABLE__`` marks missing content."""
    labels = defaultdict(set)
    unavailable = set()
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0]:
            raise IngestError("expected 'post_id<TAB>topic'", lineno)
        pid, topic = parts
        if topic == UNAVAILABLE:
            unavailable.add(pid)
        else:
            labels[pid].add(topic)
    return TopicLabels({k: frozenset(v) for k, v in labels.items()}, frozenset(unavailable))


def _window_of(posts, window):
    if window is not None:
        start, end = (parse_timestamp(w) if isinstance(w, str) else int(w) for w in window)
        if not start < end:
            raise ValueError("window start must precede window end")
        return start, end
    if not posts:
        return 0, 0
    times = [p.published_at for p in posts]
    return min(times), max(times)


def filter_corpus(posts, citations, window=None):
    """Drop citations that cannot be part of a cascade.

    Reasons are checked in a fixed order and each citation is counted under the
    first one that applies: ``out-of-corpus`` (unknown post or outside the closed
    window), ``self-citation`` (same blog), ``anterior-post`` (cited post strictly
    newer than the citing one), ``duplicate`` (repeated pair).

    Returns the surviving citations (input order) and a :class:`CorpusSummary`.
    Posts outside the window are excluded from ``N`` and ``B``.
    """
    start, end = _window_of(posts, window)
    by_id = {p.post_id: p for p in posts if start <= p.published_at <= end}
    removed = dict.fromkeys(REASONS, 0)
    seen = set()
    kept = []
    for c in citations:
        src = by_id.get(c.src_post_id)
        dst = by_id.get(c.dst_post_id)
        if src is None or dst is None:
            removed["out-of-corpus"] += 1
        elif src.blog_id == dst.blog_id:
            removed["self-citation"] += 1
        elif dst.published_at > src.published_at:
            removed["anterior-post"] += 1
        elif (c.src_post_id, c.dst_post_id) in seen:
            removed["duplicate"] += 1
        else:
            seen.add((c.src_post_id, c.dst_post_id))
            kept.append(c)
    summary = CorpusSummary(
        B=len({p.blog_id for p in by_id.values()}),
        N=len(by_id),
        L=len(kept),
        window_start=start,
        window_end=end,
        raw_citations=len(citations),
        removed=removed,
    )
    return kept, summary


class Corpus:
    """Posts plus citations with the lookups the analyses need.

    Nothing is filtered here; build it from the output of :func:`filter_corpus`
    (or use :meth:`from_raw`).
    """

    def __init__(self, posts, citations, summary: CorpusSummary | None = None):
        self.posts = {p.post_id: p for p in posts}
        self.citations = list(citations)
        self.summary = summary
        self.out_arcs = defaultdict(list)
        self.in_arcs = defaultdict(list)
        for c in self.citations:
            self.out_arcs[c.src_post_id].append(c.dst_post_id)
            self.in_arcs[c.dst_post_id].append(c.src_post_id)
        self._blog_index = None

    @classmethod
    def from_raw(cls, posts, citations, window=None):
        kept, summary = filter_corpus(posts, citations, window)
        start, end = summary.window_start, summary.window_end
        inside = [p for p in posts if start <= p.published_at <= end]
        return cls(inside, kept, summary)

    def with_citations(self, citations) -> "Corpus":
        """Same posts, different citation set (used by the null model)."""
        new = Corpus.__new__(Corpus)
        new.posts = self.posts
        new.citations = list(citations)
        new.summary = None
        new.out_arcs = defaultdict(list)
        new.in_arcs = defaultdict(list)
        for c in new.citations:
            new.out_arcs[c.src_post_id].append(c.dst_post_id)
            new.in_arcs[c.dst_post_id].append(c.src_post_id)
        new._blog_index = self._blog_index
        return new

    @property
    def blog_index(self) -> Mapping[str, tuple]:
        """blog_id -> (post ids, timestamps) sorted by time then id."""
        if self._blog_index is None:
            groups = defaultdict(list)
            for p in self.posts.values():
                groups[p.blog_id].append((p.published_at, p.post_id))
            index = {}
            for blog, items in groups.items():
                items.sort()
                index[blog] = (tuple(pid for _, pid in items), tuple(t for t, _ in items))
            self._blog_index = index
        return self._blog_index

    def blogs(self):
        return sorted({p.blog_id for p in self.posts.values()})

    def __repr__(self):
        return f"Corpus(posts={len(self.posts)}, citations={len(self.citations)})"


def load_corpus(posts_path, citations_path, window=None) -> Corpus:
    with open(posts_path, encoding="utf-8") as fh:
        posts = parse_posts(fh)
    with open(citations_path, encoding="utf-8", newline="") as fh:
        citations = parse_citations(fh)
    return Corpus.from_raw(posts, citations, window)


def write_posts(posts, fh):
    for p in sorted(posts, key=lambda p: p.post_id):
        rec = {"post_id": p.post_id, "blog_id": p.blog_id, "published_at": format_timestamp(p.published_at)}
        fh.write(json.dumps(rec) + "\n")


def write_citations(citations, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["src_post_id", "dst_post_id"])
    for c in citations:
        writer.writerow([c.src_post_id, c.dst_post_id])
