"""End-to-end experiment driver.

Subcommands: ``generate`` (instances + manifest), ``benchmark`` (features,
per-strategy optimization runs, metadata CSV; resumable), ``median-table``
(rebuild the class-median parameter table), and ``report`` (summary tables,
instance-space scatter, optional landscape heatmaps).

The output directory comes from ``--out``, overridden by the environment
variable ``QAOA_LAB_OUT`` when set.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from statistics import median

import numpy as np

from .evalharness import (
    METADATA_COLUMNS,
    EvalConfig,
    MetaDataRow,
    assemble_metadata,
    read_metadata_csv,
    score_instance,
    write_metadata_csv,
)
from .features import compute_features, write_features_csv
from .graphs import (
    GenConfig,
    Graph,
    InstanceClass,
    ManifestEntry,
    derive_seed,
    generate_instance,
    parse_graph,
    read_manifest,
    serialize_graph,
    write_manifest,
)
from .isaproj import project_batch, export_scatter
from .optim import AdamConfig, RunRecord, adam_optimize
from .qsim import landscape_grid
from .render import svg_heatmap
from .strategies import (
    DEFAULT_MEDIAN_TABLE,
    DEFAULT_TROTTER_STEP,
    MedianParamTable,
    StrategyTag,
    build_median_table,
    initial_params,
)

__all__ = ["main", "build_parser"]

ALL_CLASSES = tuple(InstanceClass)
ALL_STRATEGIES = tuple(StrategyTag)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qaoa-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", default="out", help="output directory (env QAOA_LAB_OUT wins)")
        p.add_argument("--seed", type=int, default=0, help="base seed for derived per-item seeds")

    gen = sub.add_parser("generate", help="generate instances and a manifest")
    add_common(gen)
    gen.add_argument("--classes", default="all", help="'all' or comma-separated class tags")
    gen.add_argument("--per-class", type=int, default=10)
    gen.add_argument("--nodes", type=int, default=8)

    bench = sub.add_parser("benchmark", help="run all strategies over the generated instances")
    add_common(bench)
    bench.add_argument("--layers", type=int, default=3)
    bench.add_argument("--strategies", default="all", help="'all' or comma-separated strategy tags")
    bench.add_argument("--budget", type=int, default=20_000, help="energy evaluations per run")
    bench.add_argument("--workers", type=int, default=1)
    bench.add_argument("--dt", type=float, default=DEFAULT_TROTTER_STEP)
    bench.add_argument("--tau", type=float, default=0.95)
    bench.add_argument("--penalty", type=int, default=100_000)
    bench.add_argument("--epsilon", type=float, default=0.1)
    bench.add_argument("--table", default=None, help="median-table JSON (default: embedded table)")

    med = sub.add_parser("median-table", help="rebuild the class-median parameter table")
    add_common(med)
    med.add_argument("--classes", default="all")
    med.add_argument("--per-class", type=int, default=100)
    med.add_argument("--nodes", type=int, default=8)
    med.add_argument("--layers", type=int, default=10, help="build cells for p = 1..layers")
    med.add_argument("--budget", type=int, default=20_000)

    rep = sub.add_parser("report", help="summarize a metadata CSV and export the instance space")
    add_common(rep)
    rep.add_argument("--metadata", default=None, help="metadata CSV (default <out>/metadata.csv)")
    rep.add_argument("--landscapes", action="store_true", help="render one p=1 landscape per class")
    rep.add_argument("--resolution", type=int, default=48)
    rep.add_argument("--nodes", type=int, default=12, help="exemplar size for --landscapes")

    return parser


def _parse_classes(text: str) -> list[InstanceClass]:
    if text.strip() == "all":
        return list(ALL_CLASSES)
    try:
        return [InstanceClass(tag.strip()) for tag in text.split(",") if tag.strip()]
    except ValueError as exc:
        raise SystemExit(f"error: unknown instance class in --classes: {exc}")


def _parse_strategies(text: str) -> list[StrategyTag]:
    if text.strip() == "all":
        return list(ALL_STRATEGIES)
    try:
        return [StrategyTag(tag.strip()) for tag in text.split(",") if tag.strip()]
    except ValueError as exc:
        raise SystemExit(f"error: unknown strategy in --strategies: {exc}")


def _out_dir(args: argparse.Namespace) -> Path:
    out = os.environ.get("QAOA_LAB_OUT") or args.out
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _atomic_write(path: Path, writer) -> None:
    tmp = path.with_name(path.name + ".tmp")
    writer(tmp)
    tmp.replace(path)


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------


def cmd_generate(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    classes = _parse_classes(args.classes)
    if args.per_class < 1:
        raise SystemExit("error: --per-class must be >= 1")
    instances_dir = out / "instances"
    instances_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for cls in classes:
        for index in range(args.per_class):
            seed = derive_seed(args.seed, cls.value, index)
            config = GenConfig(instance_class=cls, n=args.nodes, seed=seed)
            graph = generate_instance(config)
            instance_id = f"{cls.value}-{index:04d}"
            rel_path = f"instances/{instance_id}.edgelist"
            (out / rel_path).write_text(serialize_graph(graph), encoding="utf-8")
            entries.append(
                ManifestEntry(
                    instance_id=instance_id,
                    instance_class=cls,
                    n=args.nodes,
                    seed=seed,
                    path=rel_path,
                )
            )
    _atomic_write(out / "manifest.jsonl", lambda p: write_manifest(entries, p))
    print(f"generated {len(entries)} instances in {out}")
    return 0


# ---------------------------------------------------------------------------
# benchmark
# ---------------------------------------------------------------------------


def _run_cell(payload: tuple) -> str:
    """Worker entry: one (instance, strategy) optimization run -> JSON line."""
    (edgelist, instance_id, class_value, strategy_value, cell_seed, p, budget, dt, table_json) = payload
    graph = parse_graph(edgelist)
    strategy = StrategyTag(strategy_value)
    table = MedianParamTable.from_json(table_json) if table_json else DEFAULT_MEDIAN_TABLE
    rng = np.random.default_rng(cell_seed)
    init = initial_params(strategy, InstanceClass(class_value), p, rng, table=table, dt=dt)
    cfg = AdamConfig(max_evaluations=budget)
    record = adam_optimize(
        graph, init, cfg, instance_id=instance_id, strategy=strategy.value, seed=cell_seed
    )
    return record.to_json()


def cmd_benchmark(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    manifest_path = out / "manifest.jsonl"
    if not manifest_path.exists():
        raise SystemExit(f"error: no manifest at {manifest_path}; run 'generate' first")
    entries = read_manifest(manifest_path)
    strategies = _parse_strategies(args.strategies)
    eval_cfg = EvalConfig(tau=args.tau, penalty=args.penalty, epsilon=args.epsilon)
    eval_cfg.validate()
    table_json = None
    if args.table is not None:
        table_json = Path(args.table).read_text(encoding="utf-8")

    graphs: dict[str, Graph] = {}
    for entry in entries:
        graphs[entry.instance_id] = parse_graph((out / entry.path).read_text(encoding="utf-8"))

    feature_rows = [(entry.instance_id, compute_features(graphs[entry.instance_id])) for entry in entries]
    _atomic_write(out / "features.csv", lambda p: write_features_csv(feature_rows, p))

    runs_path = out / "runs.jsonl"
    records: dict[tuple[str, str], RunRecord] = {}
    if runs_path.exists():
        for line in runs_path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                record = RunRecord.from_json(line)
                records[(record.instance_id, record.strategy)] = record

    pending = []
    for entry in entries:
        for strategy in strategies:
            if (entry.instance_id, strategy.value) in records:
                continue
            cell_seed = derive_seed(args.seed, entry.instance_id, strategy.value)
            pending.append(
                (
                    serialize_graph(graphs[entry.instance_id]),
                    entry.instance_id,
                    entry.instance_class.value,
                    strategy.value,
                    cell_seed,
                    args.layers,
                    args.budget,
                    args.dt,
                    table_json,
                )
            )

    failures: list[str] = []
    new_lines: list[str] = []
    if pending:
        outcomes: list[str | None] = []
        if args.workers > 1:
            with ProcessPoolExecutor(max_workers=args.workers) as pool:
                futures = [pool.submit(_run_cell, payload) for payload in pending]
                for payload, future in zip(pending, futures):
                    try:
                        outcomes.append(future.result())
                    except Exception as exc:  # noqa: BLE001 - per-cell isolation
                        failures.append(f"{payload[1]}/{payload[3]}: {exc}")
                        outcomes.append(None)
        else:
            for payload in pending:
                try:
                    outcomes.append(_run_cell(payload))
                except Exception as exc:  # noqa: BLE001 - per-cell isolation
                    failures.append(f"{payload[1]}/{payload[3]}: {exc}")
                    outcomes.append(None)
        for line in outcomes:
            if line is None:
                continue
            record = RunRecord.from_json(line)
            records[(record.instance_id, record.strategy)] = record
            new_lines.append(line)
        with open(runs_path, "a", encoding="utf-8") as fh:
            for line in new_lines:
                fh.write(line + "\n")

    results = {}
    feature_map = dict(feature_rows)
    class_map = {entry.instance_id: entry.instance_class for entry in entries}
    for entry in entries:
        traces = {}
        c_max = None
        for strategy in strategies:
            record = records.get((entry.instance_id, strategy.value))
            if record is None:
                continue  # already in `failures` from the run phase
            traces[strategy] = record.trace
            c_max = record.c_max
        if len(traces) == len(strategies) and c_max is not None:
            results[entry.instance_id] = score_instance(entry.instance_id, traces, c_max, eval_cfg)

    if set(strategies) != set(ALL_STRATEGIES):
        print("metadata.csv skipped: it requires results for all four strategies")
    elif len(results) == len(entries):
        rows = assemble_metadata(results, feature_map, class_map)
        ordered = {entry.instance_id: i for i, entry in enumerate(entries)}
        rows.sort(key=lambda row: ordered[row.instance_id])
        _atomic_write(out / "metadata.csv", lambda p: write_metadata_csv(rows, p))
        print(f"benchmark complete: {len(rows)} instances x {len(strategies)} strategies")
    else:
        print(f"benchmark incomplete: {len(results)}/{len(entries)} instances scored")

    if failures:
        print("failed cells:", file=sys.stderr)
        for failure in failures:
            print(f"  {failure}", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# median-table
# ---------------------------------------------------------------------------


def cmd_median_table(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    classes = _parse_classes(args.classes)
    table = build_median_table(
        classes,
        n=args.nodes,
        max_layers=args.layers,
        instances_per_class=args.per_class,
        optimizer_cfg=AdamConfig(max_evaluations=args.budget),
        base_seed=args.seed,
    )
    path = out / "median_table.json"
    _atomic_write(path, lambda p: table.save(p))
    print(f"wrote {path} with {len(table.entries)} cells")
    return 0


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def cmd_report(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    metadata_path = Path(args.metadata) if args.metadata else out / "metadata.csv"
    if not metadata_path.exists():
        raise SystemExit(f"error: no metadata CSV at {metadata_path}")
    rows = read_metadata_csv(metadata_path)
    report_dir = out / "report"
    report_dir.mkdir(parents=True, exist_ok=True)

    by_class: dict[InstanceClass, list[MetaDataRow]] = {}
    for row in rows:
        by_class.setdefault(row.instance_class, []).append(row)

    summary = [f"instances: {len(rows)}", ""]
    summary.append("median kappa per class and strategy:")
    header = "class".ljust(28) + "".join(s.value.rjust(16) for s in ALL_STRATEGIES)
    summary.append(header)
    for cls in sorted(by_class, key=lambda c: c.value):
        cells = by_class[cls]
        line = cls.value.ljust(28)
        for strategy in ALL_STRATEGIES:
            line += str(round(median(row.kappa[strategy] for row in cells))).rjust(16)
        summary.append(line)
    summary.append("")

    counts = {strategy: 0 for strategy in ALL_STRATEGIES}
    for row in rows:
        counts[row.best] += 1
    summary.append("best-strategy counts:")
    for strategy in ALL_STRATEGIES:
        summary.append(f"  {strategy.value}: {counts[strategy]}")

    # A scored run always yields one non-penalty kappa (the strategy setting
    # alpha_max reaches its own threshold), so this only fires on external
    # or truncated metadata; 100000 is the default penalty value.
    all_penalized = [row.instance_id for row in rows if min(row.kappa.values()) >= 100_000]
    if all_penalized:
        summary.append("")
        summary.append(
            f"warning: no strategy reached threshold on {len(all_penalized)} instances: "
            + ", ".join(all_penalized)
        )

    (report_dir / "summary.txt").write_text("\n".join(summary) + "\n", encoding="utf-8")

    counts_lines = ["strategy,best_count"]
    counts_lines += [f"{s.value},{counts[s]}" for s in ALL_STRATEGIES]
    (report_dir / "best_counts.csv").write_text("\n".join(counts_lines) + "\n", encoding="utf-8")

    items = [(row.instance_id, row.instance_class, row.features) for row in rows]
    if len(items) >= 2:
        points = project_batch(items)
        export_scatter(points, report_dir / "scatter")

    if args.landscapes:
        for cls in sorted(by_class, key=lambda c: c.value):
            seed = derive_seed(args.seed, cls.value, "landscape")
            graph = generate_instance(GenConfig(instance_class=cls, n=args.nodes, seed=seed))
            grid = landscape_grid(graph, args.resolution)
            np.savetxt(report_dir / f"landscape_{cls.value}.csv", grid, delimiter=",", fmt="%.9g")
            svg_heatmap(
                grid,
                report_dir / f"landscape_{cls.value}.svg",
                title=f"p=1 landscape: {cls.value}",
            )

    print(f"report written to {report_dir}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "generate": cmd_generate,
        "benchmark": cmd_benchmark,
        "median-table": cmd_median_table,
        "report": cmd_report,
    }
    try:
        return handlers[args.command](args)
    except SystemExit:
        raise
    except (ValueError, KeyError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
