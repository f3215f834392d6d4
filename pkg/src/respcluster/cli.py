"""Command line interface: respcluster stats|cluster|evaluate|topics|grid.

Exit codes: 0 success, 1 partial grid failure, 2 invalid input or config.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .cluster import ConvergenceError
from .pipeline import (
    DEFAULT_GRID_VARIANTS,
    METHODS,
    RunConfig,
    cmd_cluster,
    cmd_evaluate,
    cmd_grid,
    cmd_stats,
    cmd_topics,
)
from .preprocess import VARIANTS


def _k_value(value: str) -> int | None:
    if value == "auto":
        return None
    k = int(value)
    if k < 2:
        raise argparse.ArgumentTypeError("k must be >= 2 or 'auto'")
    return k


def _seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("RESPCLUSTER_SEED")
    return int(env) if env else 0


def _csv(choices: tuple[str, ...]):
    def parse(value: str) -> tuple[str, ...]:
        items = tuple(x.strip() for x in value.split(",") if x.strip())
        for item in items:
            if item not in choices:
                raise argparse.ArgumentTypeError(f"{item!r} not one of {choices}")
        if not items:
            raise argparse.ArgumentTypeError("empty list")
        return items

    return parse


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        corpus_path=args.corpus,
        labels_path=getattr(args, "labels", None),
        stoplist_path=getattr(args, "stoplist", None),
        methods=getattr(args, "methods", METHODS),
        variants=getattr(args, "variants", DEFAULT_GRID_VARIANTS),
        k=getattr(args, "k", None),
        seed=_seed(args),
        min_cluster_size=getattr(args, "min_cluster_size", 4),
        damping=getattr(args, "damping", 0.5),
        preference=getattr(args, "preference", None),
        stemmer=getattr(args, "stemmer", "en-suffix"),
        out_dir=getattr(args, "out", "out"),
        jobs=getattr(args, "jobs", 1),
        emphasize_best=getattr(args, "emphasize_best", False),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="respcluster",
        description="Cluster short questionnaire answers and evaluate against human classes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, labels_required: bool = False) -> None:
        p.add_argument("--corpus", required=True, help="corpus JSONL ({'id','text'} per line)")
        p.add_argument(
            "--labels",
            required=labels_required,
            help="labels JSONL ({'id','classes'} per line)",
        )
        p.add_argument("--stoplist", help="stop word file (one word per line)")
        p.add_argument("--stemmer", default="en-suffix", help="stemmer id (default en-suffix)")
        p.add_argument("--seed", type=int, help="RNG seed (default $RESPCLUSTER_SEED or 0)")

    p_stats = sub.add_parser("stats", help="summarize a corpus (and its classification)")
    common(p_stats)
    p_stats.set_defaults(func=_run_stats)

    p_cluster = sub.add_parser("cluster", help="run one clustering method on one variant")
    common(p_cluster)
    p_cluster.add_argument("--method", required=True, choices=METHODS)
    p_cluster.add_argument("--variant", required=True, choices=VARIANTS)
    p_cluster.add_argument("--k", type=_k_value, default=None, help="cluster count or 'auto'")
    p_cluster.add_argument("--damping", type=float, default=0.5)
    p_cluster.add_argument("--preference", type=float, default=None)
    p_cluster.add_argument("--out", default="out", help="output directory")
    p_cluster.set_defaults(func=_run_cluster)

    p_eval = sub.add_parser("evaluate", help="score stored clusterings against labels")
    common(p_eval, labels_required=True)
    p_eval.add_argument("--clusterings", required=True, nargs="+", help="clustering JSONL files")
    p_eval.add_argument("--emphasize-best", action="store_true", dest="emphasize_best")
    p_eval.add_argument("--out", default="out")
    p_eval.set_defaults(func=_run_evaluate)

    p_topics = sub.add_parser("topics", help="extract cluster representatives (raw variant)")
    common(p_topics)
    p_topics.add_argument("--clustering", required=True, help="clustering JSONL file")
    p_topics.add_argument("--min-cluster-size", type=int, default=4, dest="min_cluster_size")
    p_topics.add_argument("--out", default="out")
    p_topics.set_defaults(func=_run_topics)

    p_grid = sub.add_parser("grid", help="run the full method x variant grid")
    common(p_grid, labels_required=True)
    p_grid.add_argument("--methods", type=_csv(METHODS), default=METHODS)
    p_grid.add_argument("--variants", type=_csv(VARIANTS), default=DEFAULT_GRID_VARIANTS)
    p_grid.add_argument("--k", type=_k_value, default=None, help="cluster count or 'auto'")
    p_grid.add_argument("--damping", type=float, default=0.5)
    p_grid.add_argument("--preference", type=float, default=None)
    p_grid.add_argument("--min-cluster-size", type=int, default=4, dest="min_cluster_size")
    p_grid.add_argument("--jobs", type=int, default=1)
    p_grid.add_argument("--emphasize-best", action="store_true", dest="emphasize_best")
    p_grid.add_argument("--out", default="out")
    p_grid.set_defaults(func=_run_grid)

    return parser


def _run_stats(args) -> int:
    sys.stdout.write(cmd_stats(_config(args)))
    return 0


def _run_cluster(args) -> int:
    path = cmd_cluster(_config(args), args.method, args.variant)
    print(path)
    return 0


def _run_evaluate(args) -> int:
    path = cmd_evaluate(_config(args), [Path(p) for p in args.clusterings])
    print(path)
    return 0


def _run_topics(args) -> int:
    path = cmd_topics(_config(args), Path(args.clustering))
    print(path)
    return 0


def _run_grid(args) -> int:
    return cmd_grid(_config(args))


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
