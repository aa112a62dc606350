"""Command-line front end: ``blockmatch estimate|bench|stats|ideal``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import idealsim, mvstats
from .core import CostKind, SearchConfig, TilingError, check_tiling, crop_to_blocks
from .evaluation import run_benchmark
from .ingest import IngestError, SourceFormat, open_sequence, parse_synth, synth_sequence
from .patterns import PatternKind, offsets_of
from .search import Algorithm, UnknownAlgorithm, estimate_frame, parse_algorithm

DEFAULTS = {"block": 16, "range": 7, "cost": "mad", "threads": 1}

NAMED_SETS = {
    "cds-step1": PatternKind.CROSS5,
    "hcsp": PatternKind.HCSP,
    "ds-step1": PatternKind.DIAMOND_LARGE,
    "hexbs-step1": PatternKind.HEX_H,
    "bbgds-step1": PatternKind.SQUARE3,
}

ETA_PATTERNS = (
    ("3x3 square (BBGDS)", PatternKind.SQUARE3),
    ("large diamond (DS)", PatternKind.DIAMOND_LARGE),
    ("5x5 cross (CDS)", PatternKind.CROSS5),
    ("hexagon (HEXBS)", PatternKind.HEX_H),
    ("horizontal cross (DCDS)", PatternKind.HCSP),
)


class CliError(Exception):
    pass


def _alg_list(text: str) -> list[Algorithm]:
    try:
        return [parse_algorithm(a.strip()) for a in text.split(",") if a.strip()]
    except UnknownAlgorithm as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size {text!r}, expected WxH") from None
    return w, h


def _point(text: str) -> tuple[int, int]:
    try:
        x, y = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad point {text!r}, expected X,Y") from None
    return x, y


def _offset_set(text: str, search_range: int) -> list[tuple[int, int]]:
    if text in NAMED_SETS:
        return list(offsets_of(NAMED_SETS[text]))
    if text == "square5":
        return [(x, y) for y in range(-2, 3) for x in range(-2, 3)]
    try:
        return [_point(p) for p in text.split(";") if p]
    except argparse.ArgumentTypeError:
        raise CliError(f"unknown set {text!r}: use a name ({', '.join(NAMED_SETS)}, square5) "
                       "or 'x,y;x,y;...'") from None


def _region(text: str) -> list[tuple[int, int]]:
    """``x0:x1,y0:y1`` inclusive ranges, or a single ``x,y`` point."""
    try:
        xs, ys = text.split(",")
        x0, x1 = (int(v) for v in (xs.split(":") * 2)[:2])
        y0, y1 = (int(v) for v in (ys.split(":") * 2)[:2])
    except ValueError:
        raise CliError(f"bad region {text!r}, expected x0:x1,y0:y1") from None
    return [(x, y) for y in range(y0, y1 + 1) for x in range(x0, x1 + 1)]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file with default option values")
    common.add_argument("--block", type=int, help="block size in pixels (default 16)")
    common.add_argument("--range", type=int, help="search range, +-N pixels (default 7)")
    common.add_argument("--cost", choices=[c.value for c in CostKind], help="block distortion measure")
    common.add_argument("--threads", type=int, help="worker threads (output is identical for any N)")
    common.add_argument("--out", type=Path, help="output file or directory")

    source = argparse.ArgumentParser(add_help=False)
    src = source.add_mutually_exclusive_group()
    src.add_argument("--y4m", type=Path, metavar="PATH")
    src.add_argument("--raw", type=Path, metavar="PATH")
    src.add_argument("--synth", metavar="KIND", help="static | translate:DX,DY | noise")
    source.add_argument("--size", type=_size, metavar="WxH", help="frame size for --raw/--synth")
    source.add_argument("--fmt", choices=["420", "y"], default="420", help="raw layout")
    source.add_argument("--frames", type=int, default=10, help="synthetic sequence length")
    source.add_argument("--seed", type=int, default=0, help="seed for --synth noise")
    source.add_argument("--crop", action="store_true", help="crop frames to whole blocks")

    p = argparse.ArgumentParser(prog="blockmatch", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", parents=[common, source], help="motion field of one frame pair")
    est.add_argument("--alg", type=_alg_list, default=[Algorithm.DCDS])
    est.add_argument("--frame", type=int, default=1, help="current frame index (reference = previous)")
    est.add_argument("--all", action="store_true", help="estimate every frame pair")
    est.add_argument("--dump-trace", type=Path, metavar="PATH", help="write step traces as JSON lines")

    bench = sub.add_parser("bench", parents=[common, source], help="frame-wise algorithm comparison")
    bench.add_argument("--alg", type=_alg_list, help="comma-separated list (default: all)")
    bench.add_argument("--summary", type=Path, metavar="PATH", help="write sequence averages CSV")

    stats = sub.add_parser("stats", parents=[common, source], help="motion-vector distributions")
    stats.add_argument("--interior", action="store_true", help="only blocks whose window is inside the frame")
    stats.add_argument("--conditional", choices=["prior", "posterior"])
    stats.add_argument("--S", dest="covered", default="cds-step1", help="covered set: name or 'x,y;...'")
    stats.add_argument("--at", type=_point, help="prior: condition BMP; posterior: global BMP")
    stats.add_argument("--region", help="posterior condition region x0:x1,y0:y1")

    ideal = sub.add_parser("ideal", parents=[common], help="NSP on the ideal unimodal surface")
    ideal.add_argument("--alg", type=_alg_list, default=[Algorithm.DCDS])
    ideal.add_argument("--full", action="store_true", help="whole window instead of one quadrant")
    ideal.add_argument("--weights", default="fixture",
                       help="uniform | fixture | rings | table:PATH | regions:PATH")
    ideal.add_argument("--eta", action="store_true", help="print first-step search efficiency")
    ideal.add_argument("--table", default="fixture", help="distribution for --eta: fixture or PATH")
    return p


def resolve_config(args) -> SearchConfig:
    conf = dict(DEFAULTS)
    if args.config:
        try:
            conf.update(json.loads(args.config.read_text()))
        except (OSError, json.JSONDecodeError) as e:
            raise CliError(f"cannot read config {args.config}: {e}") from None
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            conf[key] = v
    args.threads = int(conf["threads"])
    try:
        return SearchConfig(int(conf["block"]), int(conf["range"]), CostKind(conf["cost"]))
    except ValueError as e:
        raise CliError(str(e)) from None


def load_frames(args, cfg: SearchConfig):
    if args.y4m:
        frames = open_sequence(args.y4m, fmt=SourceFormat.Y4M)
    elif args.raw:
        if not args.size:
            raise CliError("--raw needs --size WxH")
        frames = open_sequence(args.raw, *args.size, fmt=SourceFormat(args.fmt))
    elif args.synth:
        spec = parse_synth(args.synth)
        w, h = args.size or (64, 64)
        kind = spec.pop("kind")
        frames = synth_sequence(kind, w, h, args.frames, seed=args.seed, **spec)
    else:
        raise CliError("no input: give --y4m, --raw or --synth")
    for f in frames:
        if args.crop:
            f = crop_to_blocks(f, cfg.block_size)
        else:
            check_tiling(f, cfg.block_size)
        yield f


def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _pairs(frames):
    prev = None
    for t, f in enumerate(frames):
        if prev is not None:
            yield t, f, prev
        prev = f


def cmd_estimate(args) -> int:
    cfg = resolve_config(args)
    if len(args.alg) != 1:
        raise CliError("estimate takes exactly one --alg")
    alg = args.alg[0]
    rows = ["frame,block,col,row,x,y,dx,dy,cost,nsp"]
    traces = []
    summaries = []
    found = False
    for t, cur, ref in _pairs(load_frames(args, cfg)):
        if not args.all and t != args.frame:
            continue
        found = True
        mf = estimate_frame(alg, cur, ref, cfg, workers=args.threads, keep_traces=args.dump_trace is not None)
        area = cfg.block_size ** 2
        for i, (mv, cost, nsp) in enumerate(zip(mf.vectors, mf.per_block_cost, mf.per_block_nsp)):
            col, row = i % mf.cols, i // mf.cols
            rows.append(
                f"{t},{i},{col},{row},{col * cfg.block_size},{row * cfg.block_size},"
                f"{mv.dx},{mv.dy},{cost / area:.6f},{nsp}"
            )
            if mf.traces is not None:
                traces.append(json.dumps(
                    {"frame": t, "block": i, "trace": [s.to_dict() for s in mf.traces[i]]}
                ))
        summaries.append(
            f"alg={alg.value} frame={t} blocks={len(mf.vectors)} mean_nsp={mf.mean_nsp:.6f} "
            f"mean_{cfg.cost_kind.value}={np.mean(mf.per_block_cost) / area:.6f}"
        )
        if not args.all:
            break
    if not found:
        raise CliError(f"sequence has no frame {args.frame} with a reference")
    _emit("\n".join(rows) + "\n", args.out)
    if args.dump_trace:
        args.dump_trace.write_text("\n".join(traces) + "\n")
    stream = sys.stdout if args.out else sys.stderr
    for s in summaries:
        print(s, file=stream)
    return 0


def cmd_bench(args) -> int:
    cfg = resolve_config(args)
    algs = args.alg or list(Algorithm)
    if Algorithm.FS not in algs:
        algs = [Algorithm.FS] + algs
    result = run_benchmark(load_frames(args, cfg), algs, cfg, workers=args.threads)
    _emit(result.to_csv(), args.out)
    if args.out:
        sys.stdout.write(result.summary())
    if args.summary:
        from .evaluation import FrameReport, reports_csv

        text = reports_csv([FrameReport(-1, result.averages)]).replace("\n-1,", "\nmean,")
        args.summary.write_text(text)
    avg = result.averages
    if "dcds" in avg and "cds" in avg:
        full = (2 * cfg.search_range + 1) ** 2
        if not avg["dcds"].nsp < avg["cds"].nsp < full:
            print(
                f"warning: expected mean NSP dcds < cds < {full}, got "
                f"{avg['dcds'].nsp:.3f}, {avg['cds'].nsp:.3f}",
                file=sys.stderr,
            )
    return 0


def _interior_origins(frame, cfg):
    r, n = cfg.search_range, cfg.block_size
    return [
        (x, y)
        for y in range(0, frame.height, n)
        for x in range(0, frame.width, n)
        if x >= r and y >= r and x + n + r <= frame.width and y + n + r <= frame.height
    ]


def cmd_stats(args) -> int:
    cfg = resolve_config(args)
    records = []
    for _, cur, ref in _pairs(load_frames(args, cfg)):
        origins = _interior_origins(cur, cfg) if args.interior else None
        records.extend(mvstats.collect_block_records(cur, ref, cfg, origins))
    if not records:
        raise CliError("no blocks to analyse (need at least two frames)")
    r = cfg.search_range
    counts = np.zeros((2 * r + 1, 2 * r + 1))
    for b in records:
        mv = b.true_mv
        counts[mv.dy + r, mv.dx + r] += 1
    table = mvstats.ProbabilityTable(r, counts / counts.sum())
    outputs = {
        "mv_table.csv": table.to_csv(),
        "mv_table.json": table.to_json() + "\n",
        "quarter.csv": mvstats.quarter_csv(mvstats.quarter_fold(table)),
        "marginals.csv": mvstats.marginals(table).to_csv(),
        "regional.csv": "region,probability\n" + "".join(
            f"{k},{v:.6f}\n" for k, v in mvstats.regional_probs(table).items()
        ),
    }
    if args.conditional:
        covered = _offset_set(args.covered, r)
        try:
            if args.conditional == "prior":
                if args.at is None:
                    raise CliError("--conditional prior needs --at X,Y")
                cond = mvstats.prior_conditional(records, covered, args.at)
            else:
                if args.region:
                    region = _region(args.region)
                elif args.at is not None:
                    region = [args.at]
                else:
                    raise CliError("--conditional posterior needs --region or --at")
                cond = mvstats.posterior_conditional(records, covered, region)
            outputs["conditional.csv"] = cond.to_csv()
        except mvstats.EmptyConditionError as e:
            print(f"warning: {e}; conditional table is empty", file=sys.stderr)
            outputs["conditional.csv"] = "# empty: condition never attained\n" + (
                mvstats.ProbabilityTable.zeros(r).to_csv()
            )
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        for name, text in outputs.items():
            (args.out / name).write_text(text)
    else:
        for name, text in outputs.items():
            if name.endswith(".json"):
                continue
            sys.stdout.write(f"# {name}\n{text}")
    return 0


def _weights(spec: str, search_range: int):
    if spec == "uniform":
        return mvstats.ProbabilityTable.uniform(search_range)
    if spec == "fixture":
        return _fixture(search_range)
    if spec == "rings":
        return idealsim.concentric_regions(search_range)
    kind, _, path = spec.partition(":")
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e}") from None
    try:
        if kind == "table":
            return _load_table(path, text)
        if kind == "regions":
            return idealsim.RegionWeights.from_json(text)
    except (ValueError, KeyError, TypeError) as e:
        raise CliError(f"malformed weights file {path}: {e}") from None
    raise CliError(f"unknown weights {spec!r}")


def _fixture(search_range: int):
    table = mvstats.published_table()
    if table.range != search_range:
        raise CliError(f"the published table covers +-{table.range}, not +-{search_range}")
    return table


def _load_table(path, text):
    if str(path).endswith(".json"):
        return mvstats.ProbabilityTable.from_json(text)
    return mvstats.ProbabilityTable.from_csv(text)


def cmd_ideal(args) -> int:
    cfg = resolve_config(args)
    r = cfg.search_range
    weights = _weights(args.weights, r)
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
    for alg in args.alg:
        m = idealsim.nsp_map(alg, r, full=args.full)
        if args.out is None:
            sys.stdout.write(f"# {alg.value}\n{m.to_csv()}")
        else:
            (args.out / f"nsp_{alg.value}.csv").write_text(m.to_csv())
        try:
            value = idealsim.ansp(m, weights)
        except ValueError as e:
            raise CliError(str(e)) from None
        print(f"ansp alg={alg.value} weights={args.weights} value={value:.4f}")
        fails = m.failures()
        if fails:
            print(f"missed alg={alg.value} count={len(fails)} at={fails}")
    if args.eta:
        table = _fixture(r) if args.table == "fixture" else _load_table(args.table, Path(args.table).read_text())
        for label, kind in ETA_PATTERNS:
            pts = offsets_of(kind)
            print(f"eta pattern={kind.value} points={len(pts)} mass={table.mass(pts):.4f} "
                  f"eta={mvstats.search_efficiency(table, pts):.4f}  # {label}")
    return 0


COMMANDS = {"estimate": cmd_estimate, "bench": cmd_bench, "stats": cmd_stats, "ideal": cmd_ideal}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (CliError, IngestError, TilingError, ValueError, IndexError, OSError) as e:
        print(f"blockmatch: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
