"""Item-free citation model and real-vs-model shape comparison.

Each citation keeps its citing post and its cited blog, but the cited post is
redrawn among the posts that blog had published by then, with weight
``max(dt, epsilon) ** -theta`` on the publication gap ``dt`` in seconds.
Realizations are seeded from ``(base_seed, realization_index)`` alone, so they
can run in any order or in parallel and still aggregate to the same numbers.
"""
from __future__ import annotations

import json
import math
import warnings
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .cascades import cascade_depth, extract_all_cascades
from .ingest import Citation
from .motifs import DEFAULT_CAP, shape_census, shape_sc
from .stats import DAY, EmpiricalDistribution, FitError, fit_power_law, latencies_seconds

DEFAULT_THETA = 1.5
SEED_MASK = (1 << 64) - 1
CONFIG_KEYS = ("theta", "epsilon", "realizations", "base_seed", "z_threshold", "cap")


@dataclass(frozen=True)
class RewireConfig:
    theta: float = DEFAULT_THETA
    epsilon: float = 3600.0
    realizations: int = 100
    base_seed: int = 0
    z_threshold: float = 3.0
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError("theta must be positive")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.realizations < 1:
            raise ValueError("realizations must be at least 1")
        if self.z_threshold < 0:
            raise ValueError("z_threshold must be non-negative")
        if self.cap < 2:
            raise ValueError("cap must be at least 2")

    @classmethod
    def from_mapping(cls, values) -> "RewireConfig":
        unknown = set(values) - set(CONFIG_KEYS)
        if unknown:
            raise ValueError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        casts = {"theta": float, "epsilon": float, "z_threshold": float,
                 "realizations": int, "base_seed": int, "cap": int}
        return cls(**{k: casts[k](v) for k, v in values.items()})


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def realization_rng(base_seed: int, realization_index: int) -> np.random.Generator:
    """Generator for one realization: a SeedSequence keyed by both integers."""
    seq = np.random.SeedSequence(entropy=base_seed & SEED_MASK, spawn_key=(int(realization_index),))
    return np.random.default_rng(seq)


def fit_theta(corpus, xmin=DAY, xmax=None, min_samples=100, enabled=True, default=DEFAULT_THETA) -> float:
    """Latency-bias exponent: MLE power-law exponent of the citation latencies.

    Latencies are taken at second resolution; ``xmin`` and ``xmax`` (seconds)
    bound the fitted range. Falls back to ``default`` with a warning when
    there are too few latencies to fit.
    """
    if not enabled:
        return default
    dist = EmpiricalDistribution.from_samples(latencies_seconds(corpus))
    try:
        fit = fit_power_law(dist, xmin=xmin, xmax=xmax, min_samples=min_samples)
    except FitError as exc:
        warnings.warn(f"latency fit unavailable ({exc}); using theta={default}", RuntimeWarning, stacklevel=2)
        return default
    return -fit.exponent


def _blog_arrays(corpus):
    cached = getattr(corpus, "_rewire_index", None)
    if cached is None:
        cached = {b: (ids, np.asarray(times, dtype=np.int64)) for b, (ids, times) in corpus.blog_index.items()}
        corpus._rewire_index = cached
    return cached


def rewire_citations(corpus, config: RewireConfig, realization_index: int, chunk: int = 256) -> list[Citation]:
    """Redraw every cited post inside its own blog; returns citations in input order."""
    rng = realization_rng(config.base_seed, realization_index)
    citations = corpus.citations
    u = rng.random(len(citations))
    posts = corpus.posts
    index = _blog_arrays(corpus)
    by_blog = defaultdict(list)
    for i, c in enumerate(citations):
        by_blog[posts[c.dst_post_id].blog_id].append(i)

    new_dst = [None] * len(citations)
    for blog in sorted(by_blog):
        ids, times = index[blog]
        rows = np.asarray(by_blog[blog])
        src_t = np.array([posts[citations[i].src_post_id].published_at for i in rows], dtype=np.int64)
        ncand = np.searchsorted(times, src_t, side="right")
        for lo in range(0, len(rows), chunk):
            sl = slice(lo, lo + chunk)
            k = ncand[sl]
            width = int(k.max())
            dt = (src_t[sl, None] - times[None, :width]).astype(float)
            logw = -config.theta * np.log(np.maximum(dt, config.epsilon))
            valid = np.arange(width)[None, :] < k[:, None]
            logw = np.where(valid, logw, -np.inf)
            w = np.exp(logw - logw.max(axis=1, keepdims=True))
            cum = np.cumsum(w, axis=1)
            target = u[rows[sl]] * cum[:, -1]
            pick = np.minimum((cum < target[:, None]).sum(axis=1), k - 1)
            for i, j in zip(rows[sl], pick):
                new_dst[i] = ids[j]
    return [Citation(c.src_post_id, d) for c, d in zip(citations, new_dst)]


@dataclass
class CascadeStats:
    """Cascade-level summary of one corpus (real or synthetic)."""

    census: object
    sizes: Counter
    depths: Counter
    duplicates: int = 0


def cascade_stats(corpus, cap: int = DEFAULT_CAP, duplicates: int = 0) -> CascadeStats:
    cascades = extract_all_cascades(corpus)
    depths = [cascade_depth(c) for c in cascades]
    census = shape_census(cascades, cap=cap, depths=depths)
    return CascadeStats(census, Counter(c.size for c in cascades), Counter(depths), duplicates)


def run_realization(corpus, config: RewireConfig, realization_index: int) -> CascadeStats:
    rewired = rewire_citations(corpus, config, realization_index)
    dups = len(rewired) - len({(c.src_post_id, c.dst_post_id) for c in rewired})
    return cascade_stats(corpus.with_citations(rewired), cap=config.cap, duplicates=dups)


@dataclass
class ModelAggregate:
    realizations: int
    cap: int
    shapes: list  # ShapeCode, sorted
    shape_mean: np.ndarray
    shape_std: np.ndarray
    buckets: list  # (size, depth) of above-cap cascades, sorted
    bucket_mean: np.ndarray
    bucket_std: np.ndarray
    size_mean: dict
    depth_mean: dict
    duplicates_mean: float

    def shape_stats(self) -> dict:
        return {s: (float(m), float(d)) for s, m, d in zip(self.shapes, self.shape_mean, self.shape_std)}

    def top_shapes(self, k: int = 10) -> list:
        order = sorted(range(len(self.shapes)), key=lambda i: (-self.shape_mean[i], self.shapes[i]))
        return [self.shapes[i] for i in order[:k]]


def _mean_std(matrix):
    mean = matrix.mean(axis=0)
    std = matrix.std(axis=0, ddof=1) if matrix.shape[0] > 1 else np.zeros(matrix.shape[1])
    return mean, std


def aggregate(results, cap: int) -> ModelAggregate:
    """Fold realization results (in the order given) into means and standard deviations."""
    results = list(results)
    if not results:
        raise ValueError("nothing to aggregate")
    shapes = sorted({code for r in results for code in r.census.frequencies()})
    col = {s: j for j, s in enumerate(shapes)}
    m = np.zeros((len(results), len(shapes)))
    for i, r in enumerate(results):
        for code, f in r.census.entries:
            m[i, col[code]] = f
    buckets = sorted({b for r in results for b in r.census.above_cap_buckets})
    bcol = {b: j for j, b in enumerate(buckets)}
    bm = np.zeros((len(results), len(buckets)))
    for i, r in enumerate(results):
        for b, f in r.census.above_cap_buckets.items():
            bm[i, bcol[b]] = f
    shape_mean, shape_std = _mean_std(m)
    bucket_mean, bucket_std = _mean_std(bm)
    n = len(results)
    size_mean = {s: sum(r.sizes.get(s, 0) for r in results) / n for s in sorted({s for r in results for s in r.sizes})}
    depth_mean = {d: sum(r.depths.get(d, 0) for r in results) / n
                  for d in sorted({d for r in results for d in r.depths})}
    return ModelAggregate(n, cap, shapes, shape_mean, shape_std, buckets, bucket_mean, bucket_std,
                          size_mean, depth_mean, sum(r.duplicates for r in results) / n)


_WORKER = {}


def _init_worker(corpus, config):
    _WORKER["corpus"] = corpus
    _WORKER["config"] = config


def _work(index):
    return run_realization(_WORKER["corpus"], _WORKER["config"], index)


def run_realizations(corpus, config: RewireConfig, workers: int = 1, start: int = 0) -> ModelAggregate:
    """Run realizations ``start .. start + R - 1`` and aggregate them in index order."""
    indices = range(start, start + config.realizations)
    if workers <= 1:
        results = [run_realization(corpus, config, i) for i in indices]
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(corpus, config)) as pool:
            results = list(pool.map(_work, indices))
    return aggregate(results, config.cap)


@dataclass
class ComparisonReport:
    z_threshold: float
    realizations: int
    cap: int
    shapes: list = field(default_factory=list)  # dicts
    buckets: list = field(default_factory=list)
    size_overlay: list = field(default_factory=list)
    depth_overlay: list = field(default_factory=list)
    model_duplicates_mean: float = 0.0

    def flags(self) -> dict:
        return {row["code"]: row["flag"] for row in self.shapes}

    def to_dict(self) -> dict:
        return {
            "z_threshold": self.z_threshold,
            "realizations": self.realizations,
            "cap": self.cap,
            "model_duplicates_mean": self.model_duplicates_mean,
            "shapes": [_jsonable(r) for r in self.shapes],
            "buckets": [_jsonable(r) for r in self.buckets],
            "size_overlay": self.size_overlay,
            "depth_overlay": self.depth_overlay,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    def overlay_csv(self, fh):
        fh.write("quantity,value,real,model_mean\n")
        for name, rows in (("size", self.size_overlay), ("depth", self.depth_overlay)):
            for r in rows:
                fh.write(f"{name},{r['value']},{r['real']},{r['model_mean']!r}\n")


def _jsonable(row):
    z = row["z"]
    if z is not None and math.isinf(z):
        row = dict(row, z="inf" if z > 0 else "-inf")
    return row


def z_score(real, mean, std):
    """``(real - mean) / std``; infinite when the model never varies but disagrees, ``None`` when it agrees."""
    if std > 0:
        return (real - mean) / std
    if real == mean:
        return None
    return math.inf if real > mean else -math.inf


def flag_for(z, threshold):
    if z is None:
        return "consistent"
    if z > threshold:
        return "over"
    if z < -threshold:
        return "under"
    return "consistent"


def compare(real_census, real_distributions, model: ModelAggregate, z_threshold: float = 3.0) -> ComparisonReport:
    """Per-shape real-vs-model report.

    ``real_distributions`` is a ``(sizes, depths)`` pair of value -> count
    mappings. Shapes are flagged ``over``/``under`` when their z-score lies
    beyond ``z_threshold``; each row carries the shape's sc value.
    """
    if real_census.cap != model.cap:
        raise ValueError(f"census cap {real_census.cap} differs from model cap {model.cap}")
    real = real_census.frequencies()
    stats = model.shape_stats()
    codes = set(real) | set(stats)
    rows = []
    for code in codes:
        r = real.get(code, 0)
        mean, std = stats.get(code, (0.0, 0.0))
        z = z_score(r, mean, std)
        sc = shape_sc(code)
        rows.append({
            "code": code.hex(),
            "node_count": code.n,
            "arc_count": code.arc_count,
            "arcs": code.arcs(),
            "sc": None if sc is None else float(sc),
            "real": r,
            "model_mean": float(mean),
            "model_std": float(std),
            "z": z,
            "flag": flag_for(z, z_threshold),
            "_key": (-r, -float(mean), code.n, code.code),
        })
    rows.sort(key=lambda row: row["_key"])
    for rank, row in enumerate(rows, start=1):
        del row["_key"]
        row["rank"] = rank

    bstats = {b: (float(m), float(s)) for b, m, s in zip(model.buckets, model.bucket_mean, model.bucket_std)}
    brows = []
    for b in sorted(set(real_census.above_cap_buckets) | set(bstats)):
        r = real_census.above_cap_buckets.get(b, 0)
        mean, std = bstats.get(b, (0.0, 0.0))
        z = z_score(r, mean, std)
        brows.append({"size": b[0], "depth": b[1], "real": r, "model_mean": mean, "model_std": std,
                      "z": z, "flag": flag_for(z, z_threshold)})

    sizes, depths = real_distributions

    def overlay(real_counts, model_mean):
        keys = sorted(set(real_counts) | set(model_mean))
        return [{"value": int(k), "real": int(real_counts.get(k, 0)), "model_mean": float(model_mean.get(k, 0.0))}
                for k in keys]

    return ComparisonReport(
        z_threshold=float(z_threshold),
        realizations=model.realizations,
        cap=model.cap,
        shapes=rows,
        buckets=brows,
        size_overlay=overlay(sizes, model.size_mean),
        depth_overlay=overlay(depths, model.depth_mean),
        model_duplicates_mean=float(model.duplicates_mean),
    )


def config_dict(config: RewireConfig) -> dict:
    return asdict(config)

