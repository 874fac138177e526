"""Distributions, correlations and power-law fits for blog corpora."""
from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special, stats as sps

DAY = 86400


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Histogram of non-negative integer samples, ``values`` strictly increasing."""

    values: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_samples(cls, samples) -> "EmpiricalDistribution":
        samples = np.asarray(list(samples) if not isinstance(samples, np.ndarray) else samples, dtype=np.int64)
        if samples.size == 0:
            return cls(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))
        values, counts = np.unique(samples, return_counts=True)
        return cls(values, counts)

    @classmethod
    def from_counts(cls, mapping) -> "EmpiricalDistribution":
        items = sorted((int(v), int(c)) for v, c in dict(mapping).items() if c > 0)
        return cls(np.array([v for v, _ in items], dtype=np.int64), np.array([c for _, c in items], dtype=np.int64))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def pdf(self) -> np.ndarray:
        return self.counts / self.total if self.total else self.counts.astype(float)

    def as_dict(self) -> dict:
        return {int(v): int(c) for v, c in zip(self.values, self.counts)}

    def samples(self) -> np.ndarray:
        return np.repeat(self.values, self.counts)

    def to_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["value", "count", "pdf"])
        for v, c, p in zip(self.values, self.counts, self.pdf()):
            writer.writerow([int(v), int(c), repr(float(p))])

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class WeekdayActivity:
    averages: tuple  # Mon..Sun
    weekend_dip: float


def weekday_activity(posts, window=None) -> WeekdayActivity:
    """Mean number of posts per calendar day, by day of week (UTC).

    Days of the window with no posts count as zero-post occurrences.
    ``weekend_dip`` is ``1 - mean(Sat, Sun) / mean(Mon..Fri)``.
    """
    times = [p.published_at for p in posts]
    if not times:
        raise ValueError("weekday activity needs at least one post")
    start, end = window if window is not None else (min(times), max(times))
    first, last = start // DAY, end // DAY
    days = np.bincount(np.array(times, dtype=np.int64) // DAY - first, minlength=last - first + 1)
    # 1970-01-01 was a Thursday (weekday index 3 with Monday = 0)
    weekday = (np.arange(first, last + 1) + 3) % 7
    averages = tuple(float(days[weekday == d].mean()) if np.any(weekday == d) else 0.0 for d in range(7))
    workdays = np.mean(averages[:5])
    dip = 1.0 - np.mean(averages[5:]) / workdays if workdays > 0 else float("nan")
    return WeekdayActivity(averages, float(dip))


def latencies_seconds(corpus) -> np.ndarray:
    """Citing minus cited publication time, per citation, clamped at zero."""
    posts = corpus.posts
    lat = np.fromiter(
        (posts[c.src_post_id].published_at - posts[c.dst_post_id].published_at for c in corpus.citations),
        dtype=np.int64,
        count=len(corpus.citations),
    )
    return np.maximum(lat, 0)


def latency_distribution(corpus) -> EmpiricalDistribution:
    """Latencies binned in whole days (floor)."""
    return EmpiricalDistribution.from_samples(latencies_seconds(corpus) // DAY)


@dataclass(frozen=True)
class DegreeDistributions:
    in_degree: EmpiricalDistribution
    out_degree: EmpiricalDistribution
    pairs: dict  # blog_id -> (out, in)


def degree_distributions(corpus, active_only: bool = False) -> DegreeDistributions:
    """Blog-level in/out citation counts, counting every citation.

    All blogs owning a post are listed unless ``active_only``, which keeps only
    blogs with at least one citation in either direction.
    """
    posts = corpus.posts
    out, inn = Counter(), Counter()
    for c in corpus.citations:
        out[posts[c.src_post_id].blog_id] += 1
        inn[posts[c.dst_post_id].blog_id] += 1
    blogs = sorted({p.blog_id for p in posts.values()})
    if active_only:
        blogs = [b for b in blogs if out[b] or inn[b]]
    pairs = {b: (out[b], inn[b]) for b in blogs}
    return DegreeDistributions(
        EmpiricalDistribution.from_samples([inn[b] for b in blogs]),
        EmpiricalDistribution.from_samples([out[b] for b in blogs]),
        pairs,
    )


def pearson(pairs) -> float | None:
    """Sample Pearson coefficient; ``None`` when a coordinate has no variance."""
    arr = np.asarray(list(pairs), dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise ValueError("pearson needs at least two (x, y) pairs")
    dx = arr[:, 0] - arr[:, 0].mean()
    dy = arr[:, 1] - arr[:, 1].mean()
    sxx, syy = math.fsum(dx * dx), math.fsum(dy * dy)
    if sxx == 0 or syy == 0:
        return None
    r = math.fsum(dx * dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def rank_correlation(xs, ys) -> float | None:
    """Pearson coefficient of the average ranks (Spearman's rho)."""
    if len(xs) != len(ys):
        raise ValueError("rank_correlation needs sequences of equal length")
    if len(xs) < 2:
        raise ValueError("rank_correlation needs at least two observations")
    return pearson(zip(sps.rankdata(xs), sps.rankdata(ys)))


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float  # negative slope, e.g. -1.5
    xmin: float
    ks_statistic: float
    method: str  # "mle" or "logbin-lsq"
    n_samples: int
    xmax: float | None = None
    secondary: "PowerLawFit | None" = None

    def to_dict(self) -> dict:
        def num(x):
            return None if x is None or math.isnan(x) else float(x)

        d = {
            "method": self.method,
            "exponent": num(self.exponent),
            "xmin": self.xmin,
            "xmax": self.xmax,
            "ks_statistic": num(self.ks_statistic),
            "n_samples": self.n_samples,
        }
        if self.secondary is not None:
            d["secondary"] = self.secondary.to_dict()
        return d


def _norm(a, xmin, xmax):
    z = special.zeta(a, xmin)
    if xmax is not None:
        z -= special.zeta(a, xmax + 1)
    return z


def _discrete_cdf(a, xmin, xmax, x):
    """P(X <= x) for the discrete power law on [xmin, xmax]."""
    z = _norm(a, xmin, xmax)
    return 1.0 - (special.zeta(a, x + 1) - (special.zeta(a, xmax + 1) if xmax is not None else 0.0)) / z


def _ks(values, counts, cdf_fn):
    n = counts.sum()
    emp_hi = np.cumsum(counts) / n
    emp_lo = emp_hi - counts / n
    model = cdf_fn(values.astype(float))
    # between observed values the empirical CDF is flat while the model keeps rising
    model_lo = cdf_fn(values.astype(float) - 1.0)
    return float(max(np.max(np.abs(emp_hi - model)), np.max(np.abs(emp_lo - model_lo))))


def _mle_exponent(values, counts, xmin, xmax):
    n = counts.sum()
    slog = float(np.dot(counts, np.log(values)))

    def nll(a):
        return a * slog + n * math.log(_norm(a, xmin, xmax))

    lo = 1.0 + 1e-6 if xmax is None else 1e-3
    res = optimize.minimize_scalar(nll, bounds=(lo, 20.0), method="bounded", options={"xatol": 1e-7})
    return float(res.x)


def _logbin_exponent(values, counts, xmin, xmax):
    top = values.max() if xmax is None else min(values.max(), xmax)
    edges = np.unique(np.floor(np.logspace(np.log10(xmin), np.log10(top + 1), 25)).astype(np.int64))
    if len(edges) < 3:
        return float("nan")
    hist = np.zeros(len(edges) - 1)
    idx = np.searchsorted(edges, values, side="right") - 1
    ok = (idx >= 0) & (idx < len(hist))
    np.add.at(hist, idx[ok], counts[ok])
    widths = np.diff(edges).astype(float)
    lo_edge = edges[:-1].astype(float)
    centres = np.sqrt(lo_edge * np.maximum(edges[1:] - 1.0, lo_edge))
    keep = hist > 0
    if keep.sum() < 2:
        return float("nan")
    dens = hist[keep] / widths[keep] / counts.sum()
    slope, _ = np.polyfit(np.log(centres[keep]), np.log(dens), 1)
    return float(-slope)


def fit_power_law(dist: EmpiricalDistribution, xmin=1, xmax=None, min_samples: int = 100) -> PowerLawFit:
    """Fit ``p(x) ~ x**-a`` on ``xmin <= x (<= xmax)``.

    The primary estimate is the discrete maximum-likelihood exponent (Hurwitz
    zeta normalisation, truncated when ``xmax`` is given), with the KS distance
    between the fitted and empirical CDFs. A least-squares slope on a
    log-binned histogram is attached as ``secondary``.
    """
    if xmin <= 0:
        raise FitError("xmin must be positive")
    mask = dist.values >= xmin
    if xmax is not None:
        mask &= dist.values <= xmax
    values = dist.values[mask].astype(float)
    counts = dist.counts[mask].astype(float)
    n = int(counts.sum())
    if len(values) == 1 or len(dist.values) == 1:
        raise FitError("degenerate sample: a single distinct value")
    if n < min_samples:
        raise FitError(f"too few samples at or above xmin ({n} < {min_samples})")
    a = _mle_exponent(values, counts, xmin, xmax)
    ks = _ks(values, counts, lambda x: _discrete_cdf(a, xmin, xmax, x))
    b = _logbin_exponent(values, counts, xmin, xmax)
    secondary = PowerLawFit(-b, float(xmin), float("nan"), "logbin-lsq", n, xmax)
    if not math.isnan(b) and (b > 1 or xmax is not None):
        secondary = PowerLawFit(-b, float(xmin), _ks(values, counts, lambda x: _discrete_cdf(b, xmin, xmax, x)),
                                "logbin-lsq", n, xmax)
    return PowerLawFit(-a, float(xmin), ks, "mle", n, xmax, secondary)
