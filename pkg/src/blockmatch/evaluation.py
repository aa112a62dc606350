"""Motion compensation, quality metrics and the frame-wise benchmark."""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .core import Frame, MotionField, SearchConfig, block_fits, check_tiling
from .search import Algorithm, estimate_frame, parse_algorithm

INF = math.inf
CSV_HEADER = "frame,algorithm,mad,mse,nsp,psnr_db,dist,prob"


def compensate(reference: Frame, field: MotionField, cfg: SearchConfig) -> Frame:
    """Rebuild a frame by copying each block from ``reference`` displaced by its vector."""
    n = cfg.block_size
    if (field.cols * n, field.rows * n) != (reference.width, reference.height):
        raise ValueError("motion field does not tile the reference frame")
    out = np.empty_like(reference.luma)
    for row in range(field.rows):
        for col in range(field.cols):
            dx, dy = field.vector_at(col, row)
            x, y = col * n, row * n
            if not block_fits(reference, x + dx, y + dy, n):
                raise IndexError(f"vector {(dx, dy)} moves block {(x, y)} outside the reference")
            out[y:y + n, x:x + n] = reference.luma[y + dy:y + dy + n, x + dx:x + dx + n]
    return Frame(out)


def _same_shape(a: Frame, b: Frame) -> None:
    if (a.width, a.height) != (b.width, b.height):
        raise ValueError(f"frame size mismatch: {a.width}x{a.height} vs {b.width}x{b.height}")


def frame_mad(a: Frame, b: Frame) -> float:
    _same_shape(a, b)
    return float(np.abs(a.luma.astype(np.int32) - b.luma.astype(np.int32)).mean())


def frame_mse(a: Frame, b: Frame) -> float:
    _same_shape(a, b)
    d = a.luma.astype(np.int64) - b.luma.astype(np.int64)
    return float((d * d).mean())


def psnr(a: Frame, b: Frame) -> float:
    """Peak signal-to-noise ratio in dB for 8-bit frames; ``inf`` for identical frames."""
    mse = frame_mse(a, b)
    if mse == 0:
        return INF
    return 10.0 * math.log10(255.0 ** 2 / mse)


def oracle_compare(field: MotionField, oracle: MotionField) -> tuple[float, float]:
    """Mean Euclidean distance to the oracle vectors and the exact-hit fraction."""
    if (field.cols, field.rows) != (oracle.cols, oracle.rows):
        raise ValueError("motion fields have different grid shapes")
    a = np.asarray(field.vectors, dtype=float)
    b = np.asarray(oracle.vectors, dtype=float)
    dist = np.hypot(*(a - b).T)
    return float(dist.mean()), float(np.mean(dist == 0))


@dataclass
class Metrics:
    mad: float
    mse: float
    nsp: float
    psnr_db: float
    dist: float
    prob: float


@dataclass
class FrameReport:
    frame: int
    records: dict[str, Metrics] = field(default_factory=dict)


@dataclass
class BenchmarkResult:
    frames: list[FrameReport]
    averages: dict[str, Metrics]

    def to_csv(self) -> str:
        return reports_csv(self.frames)

    def summary(self) -> str:
        out = io.StringIO()
        out.write(f"{'algorithm':<10}{'MAD':>10}{'MSE':>11}{'NSP':>9}{'PSNR':>9}{'dist':>9}{'prob':>9}\n")
        for alg, m in self.averages.items():
            out.write(
                f"{alg:<10}{m.mad:>10.4f}{m.mse:>11.3f}{m.nsp:>9.3f}{_fmt(m.psnr_db, 3):>9}"
                f"{m.dist:>9.5f}{m.prob:>9.5f}\n"
            )
        return out.getvalue()


def _fmt(v: float, digits: int = 6) -> str:
    return "inf" if math.isinf(v) else f"{v:.{digits}f}"


def reports_csv(reports: Iterable[FrameReport]) -> str:
    out = io.StringIO()
    out.write(CSV_HEADER + "\n")
    for rep in reports:
        for alg, m in rep.records.items():
            out.write(
                f"{rep.frame},{alg},{_fmt(m.mad)},{_fmt(m.mse)},{_fmt(m.nsp)},"
                f"{_fmt(m.psnr_db)},{_fmt(m.dist)},{_fmt(m.prob)}\n"
            )
    return out.getvalue()


def evaluate_frame(
    index: int,
    current: Frame,
    reference: Frame,
    algorithms,
    cfg: SearchConfig,
    workers: int = 1,
) -> tuple[FrameReport, dict[str, MotionField]]:
    """Run the full-search oracle plus ``algorithms`` on one frame pair."""
    oracle = estimate_frame(Algorithm.FS, current, reference, cfg, workers=workers)
    report = FrameReport(index)
    fields = {}
    for alg in algorithms:
        alg = parse_algorithm(alg)
        mf = oracle if alg is Algorithm.FS else estimate_frame(alg, current, reference, cfg, workers=workers)
        comp = compensate(reference, mf, cfg)
        dist, prob = oracle_compare(mf, oracle)
        report.records[alg.value] = Metrics(
            mad=frame_mad(current, comp),
            mse=frame_mse(current, comp),
            nsp=mf.mean_nsp,
            psnr_db=psnr(current, comp),
            dist=dist,
            prob=prob,
        )
        fields[alg.value] = mf
    return report, fields


def run_benchmark(frames: Iterable[Frame], algorithms, cfg: SearchConfig, workers: int = 1) -> BenchmarkResult:
    """Frame-wise comparison; frame t is matched against the original frame t-1.

    Frame 0 has no reference and produces no report. ``workers`` > 1 fans the
    frame pairs out to a thread pool; results are merged by frame index.
    """
    algorithms = [parse_algorithm(a) for a in algorithms]
    if not algorithms:
        raise ValueError("no algorithms requested")

    def run(pair):
        t, cur, ref = pair
        return evaluate_frame(t, cur, ref, algorithms, cfg)[0]

    reports: list[FrameReport] = []
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    # frames are consumed in chunks so long sequences never sit in memory at once
    chunk: list = []

    def flush():
        reports.extend(pool.map(run, chunk) if pool else map(run, chunk))
        chunk.clear()

    try:
        prev = None
        for t, frame in enumerate(frames):
            check_tiling(frame, cfg.block_size)
            if prev is not None:
                _same_shape(frame, prev)
                chunk.append((t, frame, prev))
                if len(chunk) >= max(workers, 1):
                    flush()
            prev = frame
        flush()
    finally:
        if pool:
            pool.shutdown()
    if not reports:
        raise ValueError("a benchmark needs at least two frames")
    return BenchmarkResult(reports, sequence_averages(reports))


def sequence_averages(reports: list[FrameReport]) -> dict[str, Metrics]:
    out = {}
    if not reports:
        return out
    for alg in reports[0].records:
        rows = [r.records[alg] for r in reports]
        out[alg] = Metrics(
            **{k: float(np.mean([getattr(m, k) for m in rows])) for k in Metrics.__dataclass_fields__}
        )
    return out
