"""Command-line front end: ``blogcascades {ingest,analyze,compare,fit}``."""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import asdict

from . import __version__
from .cascades import cascade_metrics, extract_all_cascades, write_cascades
from .ingest import Corpus, IngestError, parse_citations, parse_posts, parse_topics, write_citations, write_posts
from .motifs import DEFAULT_CAP, shape_census, write_census_csv, write_census_examples
from .nullmodel import (RewireConfig, cascade_stats, compare, fit_theta, read_config_file, run_realizations)
from .stats import (DAY, EmpiricalDistribution, FitError, degree_distributions, fit_power_law, latencies_seconds,
                    latency_distribution, pearson, rank_correlation, weekday_activity)

log = logging.getLogger("blogcascades")


class UsageError(Exception):
    """Bad invocation; exit status 2."""


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _require(path, what):
    if path is None:
        raise UsageError(f"--{what} is required")
    if not os.path.isfile(path):
        raise UsageError(f"{what} file not found: {path}")
    return path


def _window(args):
    if args.window_start is None and args.window_end is None:
        return None
    if args.window_start is None or args.window_end is None:
        raise UsageError("--window-start and --window-end go together")
    return args.window_start, args.window_end


def _load(args):
    posts_path = _require(args.posts, "posts")
    cits_path = _require(args.citations, "citations")
    with open(posts_path, encoding="utf-8") as fh:
        posts = parse_posts(fh)
    with open(cits_path, encoding="utf-8", newline="") as fh:
        citations = parse_citations(fh)
    corpus = Corpus.from_raw(posts, citations, _window(args))
    if corpus.summary.N == 0:
        log.warning("window excludes every post; the corpus is empty")
    return corpus


def _dump_json(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def _write_manifest(args, command, outputs, config=None):
    inputs = {}
    for name in ("posts", "citations", "topics", "config"):
        path = getattr(args, name, None)
        if path:
            inputs[name] = {"path": path, "sha256": _sha256(path)}
    manifest = {
        "tool": "blogcascades",
        "version": __version__,
        "command": command,
        "inputs": inputs,
        "window": list(_window(args)) if _window(args) else None,
        "config": config,
        "base_seed": config.get("base_seed") if config else None,
        "out_dir": args.out_dir,
        "outputs": {name: _sha256(os.path.join(args.out_dir, name)) for name in sorted(outputs)},
    }
    _dump_json(manifest, os.path.join(args.out_dir, "manifest.json"))


def _safe_fit(dist, **kw):
    try:
        return fit_power_law(dist, **kw).to_dict()
    except FitError as exc:
        return {"error": str(exc)}


def _clean(x):
    return None if x is None or x != x else x


def _fits(corpus, cascades_sizes, metrics=None):
    deg = degree_distributions(corpus)
    active = degree_distributions(corpus, active_only=True)
    pairs = list(deg.pairs.values())
    apairs = list(active.pairs.values())
    out = {
        "B": corpus.summary.B if corpus.summary else len({p.blog_id for p in corpus.posts.values()}),
        "N": len(corpus.posts),
        "L": len(corpus.citations),
        "r_all_blogs": pearson(pairs) if len(pairs) >= 2 else None,
        "r_active_blogs": pearson(apairs) if len(apairs) >= 2 else None,
        "alpha_in_degree": _safe_fit(deg.in_degree, xmin=1),
        "beta_out_degree": _safe_fit(deg.out_degree, xmin=1),
        "tau_latency_seconds": _safe_fit(EmpiricalDistribution.from_samples(latencies_seconds(corpus)), xmin=DAY),
        "gamma_cascade_size": _safe_fit(EmpiricalDistribution.from_samples(cascades_sizes), xmin=1),
    }
    if metrics is not None:
        ranked = [(m.sc, m.topic_unity) for m in metrics if m.sc is not None and m.topic_unity is not None]
        r = None
        if len(ranked) >= 2:
            r = rank_correlation([float(a) for a, _ in ranked], [float(b) for _, b in ranked])
        out["sc_topic_unity_rank_correlation"] = {"value": r, "cascades": len(ranked)}
    return out


def cmd_ingest(args):
    corpus = _load(args)
    os.makedirs(args.out_dir, exist_ok=True)
    with open(os.path.join(args.out_dir, "posts.jsonl"), "w", encoding="utf-8") as fh:
        write_posts(corpus.posts.values(), fh)
    with open(os.path.join(args.out_dir, "citations.csv"), "w", encoding="utf-8", newline="") as fh:
        write_citations(corpus.citations, fh)
    _dump_json(corpus.summary.to_dict(), os.path.join(args.out_dir, "summary.json"))
    _write_manifest(args, "ingest", ["posts.jsonl", "citations.csv", "summary.json"])
    return 0


def cmd_analyze(args):
    corpus = _load(args)
    labels = None
    if args.topics:
        with open(_require(args.topics, "topics"), encoding="utf-8") as fh:
            labels = parse_topics(fh)
    os.makedirs(args.out_dir, exist_ok=True)
    cascades = extract_all_cascades(corpus)
    metrics = [cascade_metrics(c, labels) for c in cascades]
    census = shape_census(cascades, cap=args.cap, depths=[m.depth for m in metrics])
    outputs = ["summary.json", "cascades.jsonl", "census.csv", "census_examples.jsonl", "latency.csv",
               "degrees.csv", "sizes.csv", "depths.csv", "weekday.csv", "fits.json"]
    d = args.out_dir
    _dump_json(corpus.summary.to_dict(), os.path.join(d, "summary.json"))
    with open(os.path.join(d, "cascades.jsonl"), "w", encoding="utf-8") as fh:
        write_cascades(cascades, metrics, fh)
    with open(os.path.join(d, "census.csv"), "w", encoding="utf-8", newline="") as fh:
        write_census_csv(census, fh)
    with open(os.path.join(d, "census_examples.jsonl"), "w", encoding="utf-8") as fh:
        write_census_examples(census, fh)
    with open(os.path.join(d, "latency.csv"), "w", encoding="utf-8", newline="") as fh:
        latency_distribution(corpus).to_csv(fh)
    with open(os.path.join(d, "degrees.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write("blog_id,out_degree,in_degree\n")
        for blog, (o, i) in degree_distributions(corpus).pairs.items():
            fh.write(f"{blog},{o},{i}\n")
    with open(os.path.join(d, "sizes.csv"), "w", encoding="utf-8", newline="") as fh:
        EmpiricalDistribution.from_samples([m.size for m in metrics]).to_csv(fh)
    with open(os.path.join(d, "depths.csv"), "w", encoding="utf-8", newline="") as fh:
        EmpiricalDistribution.from_samples([m.depth for m in metrics]).to_csv(fh)
    with open(os.path.join(d, "weekday.csv"), "w", encoding="utf-8", newline="") as fh:
        fh.write("weekday,mean_posts\n")
        if corpus.posts:
            s = corpus.summary
            act = weekday_activity(corpus.posts.values(), (s.window_start, s.window_end))
            for name, v in zip(("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"), act.averages):
                fh.write(f"{name},{v!r}\n")
            fh.write(f"weekend_dip,{_clean(act.weekend_dip)!r}\n")
    _dump_json(_fits(corpus, [m.size for m in metrics], metrics if labels else None), os.path.join(d, "fits.json"))
    _write_manifest(args, "analyze", outputs, {"cap": args.cap})
    return 0


def _config(args):
    values = read_config_file(_require(args.config, "config")) if args.config else {}
    overrides = {"theta": args.theta, "epsilon": args.epsilon_seconds, "realizations": args.realizations,
                 "base_seed": args.seed, "z_threshold": args.z_threshold, "cap": args.cap}
    values.update({k: v for k, v in overrides.items() if v is not None})
    return values


def cmd_compare(args):
    values = _config(args)
    corpus = _load(args)
    theta_fitted = "theta" not in values
    if theta_fitted:
        values["theta"] = fit_theta(corpus)
    config = RewireConfig.from_mapping(values)
    os.makedirs(args.out_dir, exist_ok=True)
    real = cascade_stats(corpus, cap=config.cap)
    model = run_realizations(corpus, config, workers=args.workers)
    report = compare(real.census, (real.sizes, real.depths), model, config.z_threshold)
    payload = report.to_dict()
    payload["config"] = asdict(config)
    payload["theta_fitted"] = theta_fitted
    with open(os.path.join(args.out_dir, "comparison.json"), "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n")
    with open(os.path.join(args.out_dir, "overlays.csv"), "w", encoding="utf-8", newline="") as fh:
        report.overlay_csv(fh)
    _write_manifest(args, "compare", ["comparison.json", "overlays.csv"], asdict(config))
    return 0


def cmd_fit(args):
    corpus = _load(args)
    os.makedirs(args.out_dir, exist_ok=True)
    sizes = [c.size for c in extract_all_cascades(corpus)]
    fits = _fits(corpus, sizes)
    fits["theta"] = fit_theta(corpus)
    _dump_json(fits, os.path.join(args.out_dir, "fits.json"))
    _write_manifest(args, "fit", ["fits.json"])
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="blogcascades", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--posts", help="posts file, one JSON record per line (post_id, blog_id, published_at)")
        p.add_argument("--citations", help="citations CSV with header src_post_id,dst_post_id")
        p.add_argument("--window-start", help="crawl window start, ISO-8601 UTC (default: earliest post)")
        p.add_argument("--window-end", help="crawl window end, ISO-8601 UTC, inclusive (default: latest post)")
        p.add_argument("--out-dir", required=True, help="directory receiving the output files")
        p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    p = sub.add_parser("ingest", help="filter raw logs and write a normalized corpus with summary.json")
    common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("analyze", help="cascades, shape census, distributions and power-law fits")
    common(p)
    p.add_argument("--topics", help="optional topic labels, post_id<TAB>topic per line")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest cascade (nodes) given a shape code")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", help="run the null model and compare shape frequencies")
    common(p)
    p.add_argument("--config", help="key = value file (theta, epsilon, realizations, base_seed, z_threshold, cap)")
    p.add_argument("--seed", type=int, help="base seed for every realization (default 0)")
    p.add_argument("--realizations", type=int, help="number of model realizations (default 100)")
    p.add_argument("--theta", type=float, help="latency-bias exponent (default: fitted from the corpus)")
    p.add_argument("--epsilon-seconds", type=float, help="minimum latency used in weights (default 3600)")
    p.add_argument("--z-threshold", type=float, help="|z| above which a shape is flagged (default 3)")
    p.add_argument("--cap", type=int, help="largest cascade (nodes) given a shape code (default 8)")
    p.add_argument("--workers", type=int, default=1, help="processes for realizations; output is unchanged")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("fit", help="power-law fits, Pearson r and the latency exponent only")
    common(p)
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"blogcascades: error: {exc}", file=sys.stderr)
        return 2
    except (IngestError, ValueError, OSError) as exc:
        print(f"blogcascades: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
