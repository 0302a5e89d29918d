"""Command-line entry point: the pipeline as composable subcommands.

Stages communicate only through documented file formats (compressed corpus
trees, VPRD descriptor files, CSV/JSON reports), so externally produced
descriptor files join at `match` exactly like the built-in extractor's
output. Every artifact gets a <name>.meta.json sidecar with tool and encoder
versions, parameters, and input digests.

Exit codes: 0 ok, 2 bad configuration, 3 data error, 4 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, reports
from .bandwidth import ChannelModel, accuracy_bytes_pareto, make_plan, min_compression_for_budget
from .dataset import load_manifest, validate_dataset
from .descriptor import DescriptorSet, HogParams, hog_descriptor_set
from .errors import ConfigError, DataError
from .fixtures import generate_flat_corpus, generate_photo_corpus, generate_shifted_corpus
from .jpeg_codec import DEFAULT_LEVELS, corpus_dir, read_image, sweep_compress
from .matcher import match_all, similarity_matrix
from .metrics import average_entropy, degradation_curve, nonuniform_grid
from .vprd import load_descriptor_file, write_descriptor_file

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4

WORKERS_ENV = "VPRJPEG_WORKERS"


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _parse_levels(spec: str) -> list[int]:
    try:
        levels = sorted({int(tok) for tok in spec.split(",") if tok.strip() != ""})
    except ValueError as exc:
        raise ConfigError(f"bad level list {spec!r}: {exc}") from exc
    if not levels:
        raise ConfigError("level list is empty")
    for p in levels:
        if not 0 <= p <= 99:
            raise ConfigError(f"compression percent {p} outside [0, 99]")
    return levels


def _hog_params(args: argparse.Namespace) -> HogParams:
    try:
        return HogParams(
            resize=args.hog_resize,
            cell=args.hog_cell,
            block=args.hog_block,
            stride=args.hog_stride,
            bins=args.hog_bins,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _add_hog_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("hog parameters")
    group.add_argument("--hog-resize", type=int, default=128, help="working resolution (square)")
    group.add_argument("--hog-cell", type=int, default=8, help="cell side in pixels")
    group.add_argument("--hog-block", type=int, default=2, help="block side in cells")
    group.add_argument("--hog-stride", type=int, default=1, help="block stride in cells")
    group.add_argument("--hog-bins", type=int, default=9, help="orientation bins over [0, 180)")


def _add_workers_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--workers", type=int, default=_default_workers(),
        help=f"worker threads (default from ${WORKERS_ENV} or 1)",
    )


def _corpus_paths(manifest, role: str, sweep: Path | None, percent: int | None) -> list[Path]:
    records = manifest.queries if role == "query" else manifest.references
    if sweep is None:
        base = manifest.query_dir if role == "query" else manifest.reference_dir
        return [base / rec.filename for rec in records]
    directory = corpus_dir(sweep, percent, role)
    if not directory.is_dir():
        raise DataError(f"missing compressed corpus {directory} (run `compress` first)")
    return [directory / (Path(rec.filename).stem + ".jpg") for rec in records]


def _default_vprd_path(desc_dir: Path, technique: str, role: str, percent: int | None) -> Path:
    tag = "source" if percent is None else str(percent)
    return desc_dir / technique / f"{role}_{tag}.vprd"


def _load_level_sets(desc_dir: Path, technique: str, role: str, levels: list[int]) -> dict[int, DescriptorSet]:
    sets = {}
    for p in levels:
        path = _default_vprd_path(desc_dir, technique, role, p)
        if not path.is_file():
            raise DataError(f"missing descriptor file {path} (run `extract` first)")
        dset = load_descriptor_file(path)
        dset.source_percent = p
        sets[p] = dset
    return sets


def cmd_fixtures(args: argparse.Namespace) -> int:
    out = Path(args.out)
    size = (args.width, args.height)
    if args.kind == "photo":
        manifest = generate_photo_corpus(out, count=args.count, seed=args.seed, size=size)
    elif args.kind == "flat":
        manifest = generate_flat_corpus(out, count=args.count, seed=args.seed, size=size)
    else:
        manifest = generate_shifted_corpus(
            out, count=args.count, seed=args.seed, size=size, shift=args.shift
        )
    print(f"wrote {args.kind} corpus with manifest {manifest}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    report = validate_dataset(manifest)
    for issue in report.issues:
        suffix = f" [{issue.filename}]" if issue.filename else ""
        print(f"{issue.severity}: {issue.message}{suffix}")
    if report.empty:
        print(f"{manifest.name}: ok ({len(manifest.queries)} queries, {len(manifest.references)} references)")
    return 0 if report.ok else EXIT_DATA


def cmd_compress(args: argparse.Namespace) -> int:
    levels = _parse_levels(args.levels)
    manifest = load_manifest(args.manifest)
    result = sweep_compress(manifest, levels, args.out, workers=args.workers)
    out_csv = Path(args.out) / "sizes.csv"
    reports.write_sizes_csv(result, out_csv)
    reports.write_sidecar(
        out_csv, "compress",
        {"levels": levels, "workers": args.workers, "out": str(args.out)},
        [args.manifest],
    )
    for failure in result.failures:
        print(f"encode failed: {failure.role}/{failure.filename} at {failure.percent}%: {failure.reason}",
              file=sys.stderr)
    totals = result.totals_by_level()
    for p in levels:
        print(f"level {p:2d}%: {totals[p]:>12d} bytes total")
    print(f"wrote {out_csv}")
    return 0 if not result.failures else EXIT_DATA


def cmd_extract(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    params = _hog_params(args)
    sweep = Path(args.sweep) if args.sweep else None
    percent = args.percent
    if sweep is not None and percent is None:
        raise ConfigError("--sweep requires --percent")
    if sweep is None and percent is not None:
        raise ConfigError("--percent requires --sweep")

    paths = _corpus_paths(manifest, args.role, sweep, percent)
    images = [read_image(p) for p in paths]
    dset = hog_descriptor_set(
        images,
        [p.name for p in paths],
        params=params,
        technique=args.descriptor,
        source_percent=percent,
        workers=args.workers,
    )
    if args.out:
        out = Path(args.out)
    elif args.desc_dir:
        out = _default_vprd_path(Path(args.desc_dir), args.descriptor, args.role, percent)
    else:
        raise ConfigError("give --out or --desc-dir")
    out.parent.mkdir(parents=True, exist_ok=True)
    written = write_descriptor_file(dset, out)
    reports.write_sidecar(
        out, "extract",
        {
            "role": args.role, "percent": percent, "descriptor": args.descriptor,
            "hog": vars(params), "workers": args.workers,
        },
        [args.manifest],
    )
    print(f"wrote {out} ({dset.count} x {dset.dim}, {written} bytes)")
    return 0


def cmd_match(args: argparse.Namespace) -> int:
    queries = load_descriptor_file(args.queries)
    refs = load_descriptor_file(args.refs)
    records = match_all(queries, refs)
    reports.write_matches_csv(records, args.out)
    reports.write_sidecar(
        args.out, "match",
        {"queries": str(args.queries), "refs": str(args.refs)},
        [args.queries, args.refs],
    )
    if args.matrix_out:
        matrix = similarity_matrix(queries, refs)
        write_descriptor_file(
            DescriptorSet(
                technique=f"similarity:{queries.technique}",
                vectors=matrix.astype(np.float32),
                filenames=list(queries.filenames),
            ),
            args.matrix_out,
        )
        print(f"wrote {args.matrix_out}")
    print(f"wrote {args.out} ({len(records)} matches)")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    levels = _parse_levels(args.levels)
    desc_dir = Path(args.desc_dir)
    query_sets = _load_level_sets(desc_dir, args.technique, "query", levels)
    ref_sets = _load_level_sets(desc_dir, args.technique, "reference", levels)
    curve = degradation_curve(
        {p: (query_sets[p], ref_sets[p]) for p in levels}, manifest, levels
    )
    reports.write_curve_csv(curve, args.out)
    reports.write_sidecar(
        args.out, "evaluate",
        {"technique": args.technique, "levels": levels, "desc_dir": str(desc_dir)},
        [args.manifest],
    )
    if args.json:
        reports.write_json(reports.curve_to_json(curve), args.json)
    for p, res in curve.points:
        print(f"level {p:2d}%: accuracy {res.accuracy:.4f} ({res.n_correct}/{res.n_refs})")
    print(f"wrote {args.out}")
    return 0


def cmd_entropy(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    levels = _parse_levels(args.levels)
    level_reports = [
        average_entropy(manifest, p, args.sweep, workers=args.workers) for p in levels
    ]
    reports.write_entropy_csv(level_reports, args.out)
    reports.write_sidecar(
        args.out, "entropy",
        {"levels": levels, "sweep": str(args.sweep), "workers": args.workers},
        [args.manifest],
    )
    if args.json:
        reports.write_json(reports.entropy_to_json(level_reports), args.json)
    for rep in level_reports:
        print(f"level {rep.percent:2d}%: mean entropy {rep.mean:.4f} bits")
    print(f"wrote {args.out}")
    return 0


def cmd_nonuniform(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest)
    q_levels = _parse_levels(args.q_levels)
    r_levels = _parse_levels(args.r_levels)
    desc_dir = Path(args.desc_dir)
    query_sets = _load_level_sets(desc_dir, args.technique, "query", q_levels)
    ref_sets = _load_level_sets(desc_dir, args.technique, "reference", r_levels)
    grid = nonuniform_grid(query_sets, ref_sets, manifest, q_levels, r_levels)
    reports.write_grid_csv(grid, args.out)
    reports.write_sidecar(
        args.out, "nonuniform",
        {"technique": args.technique, "q_levels": q_levels, "r_levels": r_levels},
        [args.manifest],
    )
    if args.json:
        reports.write_json(reports.grid_to_json(grid), args.json)
    for (a, b), res in sorted(grid.cells.items()):
        print(f"q={a:2d}% r={b:2d}%: accuracy {res.accuracy:.4f}")
    print(f"wrote {args.out}")
    return 0


def cmd_bandwidth(args: argparse.Namespace) -> int:
    if args.pareto_out and not args.curve:
        raise ConfigError("--pareto-out requires --curve")
    try:
        channel = ChannelModel(rate_bytes_per_s=args.rate_bytes, overhead_fraction=args.overhead)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if not Path(args.sweep).is_file():
        raise DataError(f"missing size sweep {args.sweep} (run `compress` first)")
    totals = reports.load_sweep_totals(args.sweep)
    counts = reports.load_sweep_counts(args.sweep)
    curve = reports.load_curve_csv(args.curve) if args.curve else None

    if args.budget_bytes is not None:
        chosen = min_compression_for_budget(totals, args.budget_bytes)
        if chosen is None:
            payload = {"budget_bytes": args.budget_bytes, "chosen": None,
                       "note": "no level fits the budget"}
        else:
            plan = make_plan(chosen, totals, counts[chosen], channel, curve)
            payload = {"budget_bytes": args.budget_bytes, "chosen": reports.plans_to_json([plan])[0]}
    else:
        plans = [make_plan(p, totals, counts[p], channel, curve) for p in sorted(totals)]
        payload = {"plans": reports.plans_to_json(plans)}
    reports.write_json(payload, args.out)
    reports.write_sidecar(
        args.out, "bandwidth",
        {"rate_bytes": args.rate_bytes, "overhead": args.overhead,
         "budget_bytes": args.budget_bytes},
        [args.sweep] + ([args.curve] if args.curve else []),
    )

    if args.pareto_out:
        points = accuracy_bytes_pareto(curve, totals)
        reports.write_pareto_csv(points, args.pareto_out)
        print(f"wrote {args.pareto_out}")
    print(f"wrote {args.out}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    out = reports.merge_results_csvs(args.inputs, args.out)
    reports.write_sidecar(out, "report", {"inputs": [str(p) for p in args.inputs]}, args.inputs)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vprjpeg",
        description="Place-recognition retrieval under JPEG compression sweeps",
    )
    parser.add_argument("--version", action="version", version=f"vprjpeg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fixtures", help="synthesize a deterministic demo corpus")
    p.add_argument("--kind", choices=["photo", "flat", "shifted"], required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--width", type=int, default=320)
    p.add_argument("--height", type=int, default=240)
    p.add_argument("--shift", type=int, default=4, help="crop offset for shifted pairs")
    p.set_defaults(func=cmd_fixtures)

    p = sub.add_parser("validate", help="check a manifest and its corpora")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compress", help="write compressed corpora and a size report")
    p.add_argument("--manifest", required=True)
    p.add_argument("--levels", default=",".join(str(p) for p in DEFAULT_LEVELS))
    p.add_argument("--out", required=True)
    _add_workers_flag(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("extract", help="compute descriptors over a corpus into a VPRD file")
    p.add_argument("--manifest", required=True)
    p.add_argument("--role", choices=["query", "reference"], required=True)
    p.add_argument("--sweep", help="compressed corpus root (omit to use original images)")
    p.add_argument("--percent", type=int, help="compression level inside --sweep")
    p.add_argument("--descriptor", default="hog", choices=["hog"])
    p.add_argument("--out", help="explicit VPRD output path")
    p.add_argument("--desc-dir", help="derive output path <dir>/<technique>/<role>_<level>.vprd")
    _add_hog_flags(p)
    _add_workers_flag(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("match", help="retrieve the best reference for every query")
    p.add_argument("--queries", required=True)
    p.add_argument("--refs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--matrix-out", help="also write the full similarity matrix (VPRD float block)")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("evaluate", help="uniform-compression degradation curve")
    p.add_argument("--manifest", required=True)
    p.add_argument("--desc-dir", required=True)
    p.add_argument("--technique", default="hog")
    p.add_argument("--levels", default=",".join(str(p) for p in DEFAULT_LEVELS))
    p.add_argument("--out", required=True)
    p.add_argument("--json", help="also write a JSON curve")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("entropy", help="per-level query-set entropy report")
    p.add_argument("--manifest", required=True)
    p.add_argument("--sweep", required=True)
    p.add_argument("--levels", default=",".join(str(p) for p in DEFAULT_LEVELS))
    p.add_argument("--out", required=True)
    p.add_argument("--json", help="also write JSON means")
    _add_workers_flag(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("nonuniform", help="accuracy grid over (query level, reference level)")
    p.add_argument("--manifest", required=True)
    p.add_argument("--desc-dir", required=True)
    p.add_argument("--technique", default="hog")
    p.add_argument("--q-levels", default="0,97")
    p.add_argument("--r-levels", default="0,97")
    p.add_argument("--out", required=True)
    p.add_argument("--json", help="also write a JSON grid")
    p.set_defaults(func=cmd_nonuniform)

    p = sub.add_parser("bandwidth", help="transmission plans and Pareto table from a size sweep")
    p.add_argument("--sweep", required=True, help="sizes.csv from `compress`")
    p.add_argument("--rate-bytes", type=float, required=True, help="channel rate, bytes/second")
    p.add_argument("--overhead", type=float, default=0.0, help="protocol overhead fraction")
    p.add_argument("--budget-bytes", type=float, help="corpus byte budget for level selection")
    p.add_argument("--curve", help="curve CSV from `evaluate` to attach accuracies")
    p.add_argument("--out", required=True, help="transmission plan JSON")
    p.add_argument("--pareto-out", help="Pareto table CSV (needs --curve)")
    p.set_defaults(func=cmd_bandwidth)

    p = sub.add_parser("report", help="merge long-format result CSVs into one table")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
