"""Command-line front end: embed datasets, compute metrics, generate fixtures.

Heavy imports happen inside the subcommands so that --threads can cap the
BLAS worker pools before numpy loads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="scml",
        description="Scalable landmark-based manifold learning")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="embed a CSV dataset")
    p.add_argument("--input", required=True, help="input CSV path")
    p.add_argument("--output", required=True, help="output coordinates CSV path")
    p.add_argument("--dim", type=int, default=2, help="embedding dimension (default 2)")
    p.add_argument("--k1", type=int, default=20,
                   help="first-round neighbor count; 0 keeps every point (default 20)")
    p.add_argument("--k2", type=int, default=None,
                   help="second-round neighbor count (default: landmark-count heuristic)")
    p.add_argument("--gamma", type=float, default=1.2,
                   help="early-aggregation coefficient (default 1.2)")
    p.add_argument("--epochs", type=int, default=50, help="training epochs (default 50)")
    p.add_argument("--warmup", type=int, default=10, help="warm-up epochs (default 10)")
    p.add_argument("--eta-max", type=float, default=None,
                   help="max learning rate (default 2.5x landmark count)")
    p.add_argument("--eta-min", type=float, default=None,
                   help="min learning rate (default 2x landmark count)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--label-col", type=int, default=None,
                   help="column index holding class labels, copied to the output")
    p.add_argument("--diagnostics", action="store_true",
                   help="write stage timings and loss history next to the output")
    p.add_argument("--threads", type=int, default=None,
                   help="cap BLAS worker threads (default: library choice)")

    p = sub.add_parser("metrics", help="evaluate an embedding")
    p.add_argument("--metrics", required=True,
                   help="comma list from: cc, odoc, knn-acc, kmeans-acc")
    p.add_argument("--high", required=True, help="high-dimensional data CSV")
    p.add_argument("--low", default=None, help="embedding CSV (needed by cc)")
    p.add_argument("--labels", default=None, help="single-column CSV of class labels")
    p.add_argument("--sample", default=None,
                   help="single-column CSV of sampled row indices (needed by odoc)")
    p.add_argument("--k", type=int, default=5, help="KNN-classifier k (default 5)")
    p.add_argument("--repeats", type=int, default=5,
                   help="KNN-classifier train/test splits (default 5)")
    p.add_argument("--iterations", type=int, default=200,
                   help="K-means iteration cap (default 200)")
    p.add_argument("--pair-budget", type=int, default=None,
                   help="max pairs for cc before sampling kicks in")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--threads", type=int, default=None,
                   help="cap BLAS worker threads (default: library choice)")

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--kind", required=True, choices=["cuboids3", "blobs", "grid2d"])
    p.add_argument("--output", required=True, help="output CSV path")
    p.add_argument("--n", type=int, default=1600, help="total points (default 1600)")
    p.add_argument("--classes", type=int, default=3, help="blob count (default 3)")
    p.add_argument("--dims", type=int, default=2, help="blob dimensionality (default 2)")
    p.add_argument("--spread", type=float, default=1.0, help="blob spread (default 1.0)")
    p.add_argument("--rows", type=int, default=20, help="grid rows (default 20)")
    p.add_argument("--cols", type=int, default=20, help="grid cols (default 20)")
    p.add_argument("--jitter", type=float, default=0.0, help="grid jitter (default 0)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    return parser


def _cap_threads(threads):
    if threads is None:
        return
    if threads < 1:
        raise ValueError("--threads must be >= 1")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ[var] = str(threads)


def _load_labels(path):
    import numpy as np
    from .dataio import load_dataset
    return load_dataset(path).points[:, 0].astype(np.int64) if path else None


def run_embed(args):
    _cap_threads(args.threads)
    from .dataio import DedupMap, load_dataset, write_embedding
    from .embedder import OptimizerConfig
    from .pipeline import ScmlConfig, embed

    cfg = ScmlConfig(
        k1=args.k1, k2=args.k2, dim=args.dim, gamma=args.gamma,
        optimizer=OptimizerConfig(eta_max=args.eta_max, eta_min=args.eta_min,
                                  warmup=args.warmup, epochs=args.epochs,
                                  seed=args.seed),
        seed=args.seed)
    data = load_dataset(args.input, label_column=args.label_col)
    started = time.perf_counter()
    coords, diag = embed(data, cfg)
    total_ms = (time.perf_counter() - started) * 1000.0
    write_embedding(args.output, coords, labels=data.labels, dedup=DedupMap())
    if args.diagnostics:
        diag_path = os.path.splitext(args.output)[0] + ".diag"
        with open(diag_path, "w", encoding="utf-8") as fh:
            for stage in diag.stages:
                fh.write(json.dumps({"stage": stage.stage,
                                     "wall_ms": stage.wall_ms,
                                     "detail": stage.detail}) + "\n")
            fh.write(json.dumps({"stage": "total", "wall_ms": total_ms,
                                 "detail": {"landmark_count": diag.landmark_count,
                                            "sample_rate": diag.sample_rate,
                                            "k2": diag.k2,
                                            "loss_history": diag.loss_history}}) + "\n")
    return 0


def run_metrics(args):
    _cap_threads(args.threads)
    from .dataio import Dataset, load_dataset
    from .metrics import (MetricReport, congruence_coefficient,
                          kmeans_cluster_acc, knn_classifier_acc, odoc)

    names = [m.strip() for m in args.metrics.split(",") if m.strip()]
    known = {"cc", "odoc", "knn-acc", "kmeans-acc"}
    unknown = [m for m in names if m not in known]
    if unknown:
        raise ValueError(f"unknown metrics: {', '.join(unknown)}")
    labels = _load_labels(args.labels)
    need_labels = {"odoc", "knn-acc", "kmeans-acc"}
    missing = [m for m in names if m in need_labels and labels is None]
    if missing:
        raise ValueError(f"--labels required for: {', '.join(missing)}")

    high = load_dataset(args.high)
    low = load_dataset(args.low) if args.low else None
    reports = []
    for name in names:
        if name == "cc":
            if low is None:
                raise ValueError("--low required for cc")
            value = congruence_coefficient(high.points, low.points,
                                           pair_budget=args.pair_budget,
                                           seed=args.seed)
            reports.append(MetricReport("cc", value, {"seed": args.seed}))
        elif name == "odoc":
            if args.sample is None:
                raise ValueError("--sample required for odoc")
            import numpy as np
            sampled = load_dataset(args.sample).points[:, 0].astype(np.int64)
            value = odoc(Dataset(high.points, labels), sampled)
            reports.append(MetricReport("odoc", value,
                                        {"sampled": len(sampled)}))
        elif name == "knn-acc":
            base = low.points if low is not None else high.points
            value = knn_classifier_acc(base, labels, k=args.k,
                                       repeats=args.repeats, seed=args.seed)
            reports.append(MetricReport("knn-acc", value,
                                        {"k": args.k, "splits": args.repeats,
                                         "seed": args.seed}))
        elif name == "kmeans-acc":
            base = low.points if low is not None else high.points
            value = kmeans_cluster_acc(base, labels,
                                       iterations=args.iterations, seed=args.seed)
            reports.append(MetricReport("kmeans-acc", value,
                                        {"iterations": args.iterations,
                                         "seed": args.seed}))
    for report in reports:
        print(report.to_csv_row())
    return 0


def run_synth(args):
    from .dataio import write_embedding
    from .synth import gen_blobs, gen_cuboids3, gen_grid2d

    if args.kind == "cuboids3":
        data = gen_cuboids3(args.n, seed=args.seed)
    elif args.kind == "blobs":
        data = gen_blobs(args.n, c=args.classes, dims=args.dims,
                         spread=args.spread, seed=args.seed)
    else:
        data = gen_grid2d(args.rows, args.cols, jitter=args.jitter,
                          seed=args.seed)
    write_embedding(args.output, data.points, labels=data.labels)
    return 0


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "embed":
            return run_embed(args)
        if args.command == "metrics":
            return run_metrics(args)
        return run_synth(args)
    except (OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        from .dataio import EmptyDatasetError, ParseError
        if isinstance(exc, (ParseError, EmptyDatasetError)):
            print(f"error: bad input data: {exc}", file=sys.stderr)
            return 1
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
