"""Command-line entry point: data generation, training, retrieval,
evaluation, the numerical invariant suite, and the order/dimension ablation
harness.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure
(solver breakdown, model/data dimension mismatch, failed invariant).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .checks import FAULT_MODES, run_all
from .errors import InvalidGraphError, SizeMismatchError, SolverError
from .fileio import (
    atomic_write_text,
    load_embeddings,
    load_manifest_graphs,
    load_model,
    read_manifest,
    save_graph,
    save_model,
    write_manifest,
    write_pair_dataset,
    write_results,
)
from .retrieval import DISTANCE_MODES, evaluate, recall_at_k
from .solver import accumulate, solve
from .synth import EmbeddingGraphConfig, SynthConfig, build_embedding_graph, generate_pairs

DEFAULTS_NOTE = (
    "Defaults (order 2 with fusion, up to 240 channels) follow the retrieval "
    "ablation optima on the MovieGraphs benchmark; re-tune them for other data."
)


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("GWCA_THREADS", "1")))
    except ValueError:
        return 1


def _parse_nodes(text: str) -> tuple[int, int]:
    if ".." in text:
        lo, hi = text.split("..", 1)
        return int(lo), int(hi)
    n = int(text)
    return n, n


def _parse_int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _require_files(*paths: str) -> None:
    for p in paths:
        if not Path(p).is_file():
            raise ValueError(f"input file not found: {p}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gwca",
        description="Graph correlation analysis with polynomial spectral "
        "filters and a Gaussian transport metric.",
        epilog=DEFAULTS_NOTE,
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("synth", help="generate correlated cross-view graph pairs")
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--nodes", type=_parse_nodes, default=(10, 30), metavar="LO..HI")
    p.add_argument("--d1", type=int, default=8)
    p.add_argument("--d2", type=int, default=8)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--density", type=float, default=0.3)
    p.add_argument("--mixing", choices=("orthogonal", "gaussian"), default="orthogonal")
    p.add_argument("--edge-noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split-test", type=int, default=0, metavar="N",
                   help="also write train.jsonl/test.jsonl manifests with the "
                        "last N pairs held out")
    p.add_argument("--out", required=True, metavar="DIR")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="fit the projection model on a pairs manifest")
    p.add_argument("--pairs", required=True, metavar="MANIFEST")
    p.add_argument("--out", required=True, metavar="MODEL_JSON")
    p.add_argument("--order", type=int, default=2,
                   help="number of polynomial filter terms (powers 0..order-1)")
    p.add_argument("--fusion", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--reg", type=float, default=None,
                   help="ridge for both views (default: 1e-6 * trace/dim per view)")
    p.add_argument("--channels", type=int, default=None,
                   help="projection channels (default: min(D1, D2, 240))")
    p.add_argument("--threads", type=int, default=_default_threads())
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("retrieve", help="rank a corpus against queries and report recall")
    p.add_argument("--model", required=True)
    p.add_argument("--queries", required=True, metavar="MANIFEST",
                   help="pairs manifest; view-1 graphs are the queries")
    p.add_argument("--corpus", required=True, metavar="MANIFEST",
                   help="pairs manifest; view-2 graphs are the corpus")
    p.add_argument("--out", required=True, metavar="RESULTS_JSONL")
    p.add_argument("--distance", choices=DISTANCE_MODES, default="w2")
    p.add_argument("--topk", type=_parse_int_list, default=[1, 5, 10], metavar="K1,K2,...")
    p.add_argument("--threads", type=int, default=_default_threads())
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("check", help="run the numerical invariant suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=None,
                   help="override every property's trial count")
    p.add_argument("--inject-fault", choices=FAULT_MODES, default=None,
                   help="test-only: corrupt one kernel to prove the suite detects it")
    p.add_argument("--failure-out", default="gwca-check-failure.json",
                   help="where to serialize the first failing instance")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("ablate", help="sweep filter order and channel count, tabulate recall")
    p.add_argument("--train", required=True, metavar="MANIFEST")
    p.add_argument("--test", required=True, metavar="MANIFEST")
    p.add_argument("--orders", type=_parse_int_list, default=[1, 2, 3, 4])
    p.add_argument("--channels-grid", type=_parse_int_list, default=None,
                   help="channel counts to sweep (default: powers of two up to the max)")
    p.add_argument("--order", type=int, default=2, help="order used for the channel sweep")
    p.add_argument("--fusion", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--reg", type=float, default=None)
    p.add_argument("--distance", choices=DISTANCE_MODES, default="w2")
    p.add_argument("--topk", type=_parse_int_list, default=[1, 5, 10])
    p.add_argument("--out", default=None, metavar="REPORT_JSON")
    p.add_argument("--plot", default=None, metavar="PNG")
    p.add_argument("--threads", type=int, default=_default_threads())
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("embed-graph", help="build a similarity graph from per-node embeddings")
    p.add_argument("--embeddings", required=True, metavar="JSON_OR_CSV")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--threshold", type=float, default=None)
    group.add_argument("--top-m", type=int, default=None)
    p.add_argument("--out", required=True, metavar="GRAPH_JSON")
    p.set_defaults(func=cmd_embed_graph)

    return parser


def cmd_synth(args) -> int:
    cfg = SynthConfig(
        pairs=args.pairs,
        nodes=args.nodes,
        d1=args.d1,
        d2=args.d2,
        noise=args.noise,
        density=args.density,
        mixing=args.mixing,
        edge_noise=args.edge_noise,
        seed=args.seed,
    )
    if not 0 <= args.split_test <= cfg.pairs:
        raise ValueError(f"--split-test must be in [0, {cfg.pairs}], got {args.split_test}")
    pairs = generate_pairs(cfg)
    manifest = write_pair_dataset(pairs, args.out)
    print(f"wrote {len(pairs)} pairs ({2 * len(pairs)} graph files), manifest {manifest}")
    if args.split_test:
        rows = read_manifest(manifest)
        cut = len(rows) - args.split_test
        write_manifest(rows[:cut], Path(args.out) / "train.jsonl")
        write_manifest(rows[cut:], Path(args.out) / "test.jsonl")
        print(f"split manifests: train.jsonl ({cut} pairs), test.jsonl ({args.split_test} pairs)")
    return 0


def cmd_train(args) -> int:
    _require_files(args.pairs)
    if args.order < 1:
        raise ValueError(f"--order must be >= 1, got {args.order}")
    _ids, view1, view2 = load_manifest_graphs(args.pairs)
    cm = accumulate(list(zip(view1, view2)), args.order - 1, args.fusion,
                    threads=args.threads)
    model = solve(cm, args.reg, args.channels)
    save_model(model, args.out)
    rho = model.rho
    head = " ".join(f"{r:.6f}" for r in rho[:5])
    print(
        f"trained on {cm.pair_count} pairs: order={model.order} "
        f"fusion={'on' if model.fusion else 'off'} channels={model.channels}"
    )
    print(f"rho spectrum: {head}{' ...' if model.channels > 5 else ''} "
          f"(min {rho[-1]:.6f})")
    print(f"model written to {args.out}")
    return 0


def cmd_retrieve(args) -> int:
    _require_files(args.model, args.queries, args.corpus)
    if not args.topk or any(k < 1 for k in args.topk):
        raise ValueError("--topk needs positive integers")
    model = load_model(args.model)
    query_ids, queries, _ = load_manifest_graphs(args.queries)
    corpus_ids, _, corpus = load_manifest_graphs(args.corpus)
    results = evaluate(
        model,
        queries,
        corpus,
        mode=args.distance,
        query_ids=query_ids,
        corpus_ids=corpus_ids,
        truth_ids=query_ids,
        threads=args.threads,
    )
    write_results(results, args.out)
    report = recall_at_k(results, args.topk)
    for k in sorted(report.r_at):
        print(f"R@{k:<4d} {report.r_at[k]:.4f}")
    print(f"queries: {report.query_count}, corpus: {len(corpus)}, distance: {args.distance}")
    print(f"results written to {args.out}")
    return 0


def cmd_check(args) -> int:
    results = run_all(seed=args.seed, trials=args.trials, fault=args.inject_fault)
    for res in results:
        print(res.line())
    failures = [res for res in results if not res.passed]
    if not failures:
        print(f"all {len(results)} properties passed")
        return 0
    first = failures[0]
    payload = {
        "property": first.name,
        "seed": args.seed,
        "trials": first.trials,
        "worst": first.worst,
        "tolerance": first.tolerance,
        "case": first.failing_case,
    }
    atomic_write_text(args.failure_out, json.dumps(payload, indent=2, default=float) + "\n")
    print(
        f"{len(failures)} propert{'y' if len(failures) == 1 else 'ies'} failed; "
        f"first failing instance written to {args.failure_out}",
        file=sys.stderr,
    )
    return 3


def _recall_row(model, queries, corpus, args) -> dict:
    results = evaluate(model, queries, corpus, mode=args.distance, threads=args.threads)
    report = recall_at_k(results, args.topk)
    return {str(k): report.r_at[k] for k in sorted(report.r_at)}


def cmd_ablate(args) -> int:
    _require_files(args.train, args.test)
    _ids, train1, train2 = load_manifest_graphs(args.train)
    _tids, queries, corpus = load_manifest_graphs(args.test)
    train_pairs = list(zip(train1, train2))

    order_sweep = []
    for order in args.orders:
        cm = accumulate(train_pairs, order - 1, args.fusion, threads=args.threads)
        model = solve(cm, args.reg)
        order_sweep.append(
            {"order": order, "channels": model.channels, "rho1": float(model.rho[0]),
             "recall": _recall_row(model, queries, corpus, args)}
        )

    cm = accumulate(train_pairs, args.order - 1, args.fusion, threads=args.threads)
    max_channels = min(cm.c1.shape[0], cm.c2.shape[0])
    grid = args.channels_grid
    if grid is None:
        grid = sorted({min(2**i, max_channels) for i in range(1, 12) if 2**i // 2 < max_channels})
    channel_sweep = []
    for r in grid:
        if not 1 <= r <= max_channels:
            raise ValueError(f"channel count {r} outside [1, {max_channels}]")
        model = solve(cm, args.reg, r)
        channel_sweep.append(
            {"channels": r, "rho1": float(model.rho[0]),
             "recall": _recall_row(model, queries, corpus, args)}
        )

    ks = sorted(set(args.topk))
    header = "   ".join(f"R@{k}" for k in ks)
    print(f"order sweep (fusion={'on' if args.fusion else 'off'}):")
    print(f"  order  channels  {header}")
    for row in order_sweep:
        vals = "  ".join(f"{row['recall'][str(k)]:.4f}" for k in ks)
        print(f"  {row['order']:<6d} {row['channels']:<9d} {vals}")
    print(f"channel sweep (order={args.order}):")
    print(f"  channels  {header}")
    for row in channel_sweep:
        vals = "  ".join(f"{row['recall'][str(k)]:.4f}" for k in ks)
        print(f"  {row['channels']:<9d} {vals}")

    report = {"topk": ks, "distance": args.distance, "fusion": args.fusion,
              "order_sweep": order_sweep, "channel_sweep": channel_sweep}
    if args.out:
        atomic_write_text(args.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
        print(f"report written to {args.out}")
    if args.plot:
        _plot_ablation(report, args.plot)
        print(f"plot written to {args.plot}")
    return 0


def _plot_ablation(report: dict, path: str) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ks = report["topk"]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    for k in ks:
        ax1.plot(
            [row["order"] for row in report["order_sweep"]],
            [row["recall"][str(k)] for row in report["order_sweep"]],
            marker="o", label=f"R@{k}",
        )
        ax2.plot(
            [row["channels"] for row in report["channel_sweep"]],
            [row["recall"][str(k)] for row in report["channel_sweep"]],
            marker="o", label=f"R@{k}",
        )
    ax1.set_xlabel("filter order (terms)")
    ax2.set_xlabel("projection channels")
    for ax in (ax1, ax2):
        ax.set_ylabel("recall")
        ax.set_ylim(0, 1.05)
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def cmd_embed_graph(args) -> int:
    _require_files(args.embeddings)
    cfg = EmbeddingGraphConfig(threshold=args.threshold, top_m=args.top_m)
    graph = build_embedding_graph(load_embeddings(args.embeddings), cfg)
    save_graph(graph, args.out)
    edges = int(np.count_nonzero(graph.adjacency) // 2)
    print(f"wrote graph with {graph.n} nodes, {edges} edges to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except (SolverError, SizeMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InvalidGraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    main_entry()
