"""Block-matching search algorithms with exact search-point accounting.

All searches run against a *cost oracle*: a callable ``cost(dx, dy)`` returning
the distortion of a candidate, or ``None`` when the candidate is infeasible.
:class:`~blockmatch.core.BlockMatcher` is the pixel oracle; the ideal-surface
simulator plugs in a distance oracle and reuses the same code.

Shared rules:

* every absolute candidate is evaluated at most once per block (memoized),
  and only evaluated candidates count toward NSP;
* the best-matched point (BMP) is replaced only on a strictly smaller cost,
  with points visited in canonical pattern order;
* infeasible pattern points are skipped, never substituted.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .core import BlockMatcher, Frame, MotionField, MotionVector, SearchConfig, check_tiling
from .patterns import (
    PatternKind,
    canonical_order,
    middle_points,
    offsets_of,
    role_of,
    switch_one,
    switch_two,
)

CostOracle = Callable[[int, int], "float | None"]


class Algorithm(str, Enum):
    FS = "fs"
    TSS = "tss"
    NTSS = "ntss"
    FOURSS = "4ss"
    BBGDS = "bbgds"
    DS = "ds"
    HEXBS_H = "hexbs-h"
    HEXBS_V = "hexbs-v"
    CDS = "cds"
    DCDS = "dcds"
    DCDS_S = "dcds-s"


FAST_ALGORITHMS = tuple(a for a in Algorithm if a is not Algorithm.FS)
CLASSIC_ALGORITHMS = (
    Algorithm.TSS,
    Algorithm.NTSS,
    Algorithm.FOURSS,
    Algorithm.BBGDS,
    Algorithm.DS,
    Algorithm.HEXBS_H,
    Algorithm.HEXBS_V,
    Algorithm.CDS,
)


class UnknownAlgorithm(ValueError):
    pass


def parse_algorithm(name) -> Algorithm:
    if isinstance(name, Algorithm):
        return name
    try:
        return Algorithm(str(name).lower())
    except ValueError:
        valid = ", ".join(a.value for a in Algorithm)
        raise UnknownAlgorithm(f"unknown algorithm {name!r} (expected one of: {valid})") from None


@dataclass(frozen=True)
class TraceStep:
    step: int
    pattern: str
    center: tuple[int, int]
    evaluated: tuple[tuple[int, int], ...]

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "pattern": self.pattern,
            "center": list(self.center),
            "evaluated": [list(p) for p in self.evaluated],
        }


@dataclass
class SearchOutcome:
    mv: MotionVector
    final_cost: float
    nsp: int
    trace: list[TraceStep] = field(default_factory=list)


class _Session:
    """Memoized evaluation state for a single block search."""

    def __init__(self, cost: CostOracle):
        self.cost = cost
        self.memo: dict[tuple[int, int], float] = {}
        self.trace: list[TraceStep] = []
        self.best = (0, 0)
        self.step = 0

    def evaluate(self, pos):
        if pos in self.memo:
            return self.memo[pos], False
        c = self.cost(*pos)
        if c is None:
            return None, False
        self.memo[pos] = c
        return c, True

    def probe(self, label: str, center, offsets) -> tuple[int, int]:
        """Evaluate ``offsets`` around ``center``; return the BMP's offset within the pattern."""
        self.step += 1
        cx, cy = center
        new = []
        best_off, best_cost = None, None
        for dx, dy in offsets:
            pos = (cx + dx, cy + dy)
            c, fresh = self.evaluate(pos)
            if fresh:
                new.append(pos)
            if c is None:
                continue
            if best_cost is None or c < best_cost:
                best_off, best_cost = (dx, dy), c
        self.trace.append(TraceStep(self.step, label, (cx, cy), tuple(new)))
        if best_off is None:
            # only reachable when the pattern center itself is infeasible
            return (0, 0)
        bx, by = cx + best_off[0], cy + best_off[1]
        if best_cost < self.memo[self.best] or (bx, by) == self.best:
            self.best = (bx, by)
        return best_off

    def outcome(self) -> SearchOutcome:
        return SearchOutcome(
            MotionVector(*self.best), self.memo[self.best], len(self.memo), self.trace
        )


def _add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _initial_step(search_range: int) -> int:
    return 1 << (search_range.bit_length() - 1)


def _start(cost: CostOracle) -> _Session:
    s = _Session(cost)
    if cost(0, 0) is None:
        raise ValueError("the zero displacement must be feasible")
    return s


def _full(s: _Session, search_range: int) -> None:
    r = search_range
    offsets = [(dx, dy) for dy in range(-r, r + 1) for dx in range(-r, r + 1)]
    # raster order, so the first strict minimum wins
    s.step += 1
    new = []
    best, best_cost = None, None
    for pos in offsets:
        c, fresh = s.evaluate(pos)
        if fresh:
            new.append(pos)
        if c is not None and (best_cost is None or c < best_cost):
            best, best_cost = pos, c
    s.trace.append(TraceStep(s.step, "full", (0, 0), tuple(new)))
    s.best = best


def _dcds(s: _Session, simplified: bool) -> None:
    off = s.probe(PatternKind.HCSP.value, (0, 0), offsets_of(PatternKind.HCSP))
    if off == (0, 0):
        return
    kind = switch_one(off)
    center = off
    while True:
        off = s.probe(kind.value, center, offsets_of(kind))
        if off == (0, 0):
            break
        kind = switch_two(kind, role_of(kind, off))
        center = _add(center, off)
    mids = middle_points(kind)
    if simplified:
        mids = (_simplified_middle(s, kind, center),)
    s.probe("middle", center, ((0, 0),) + tuple(mids))


def _simplified_middle(s: _Session, kind: PatternKind, center) -> tuple[int, int]:
    low, high = middle_points(kind)
    # distant points sit at twice the middle offsets
    c_low = s.memo.get(_add(center, (2 * low[0], 2 * low[1])))
    c_high = s.memo.get(_add(center, (2 * high[0], 2 * high[1])))
    if c_low is None and c_high is None:
        return low
    if c_low is None:
        return high
    if c_high is None:
        return low
    return high if c_high < c_low else low


def _tss(s: _Session, search_range: int) -> None:
    step = _initial_step(search_range)
    center = (0, 0)
    while step >= 1:
        off = s.probe(f"square_tss:{step}", center, offsets_of(PatternKind.SQUARE_TSS, step))
        center = _add(center, off)
        step //= 2


def _ntss(s: _Session, search_range: int) -> None:
    step = _initial_step(search_range)
    off = s.probe("ntss_augment", (0, 0), offsets_of(PatternKind.NTSS_AUGMENT, step))
    if off == (0, 0):
        return
    if max(abs(off[0]), abs(off[1])) == 1:
        s.probe(PatternKind.SQUARE3.value, off, offsets_of(PatternKind.SQUARE3))
        return
    center = off
    step //= 2
    while step >= 1:
        off = s.probe(f"square_tss:{step}", center, offsets_of(PatternKind.SQUARE_TSS, step))
        center = _add(center, off)
        step //= 2


def _fourss(s: _Session) -> None:
    pattern = offsets_of(PatternKind.FOURSS_STEP, 2)
    center = (0, 0)
    off = s.probe("fourss_step", center, pattern)
    steps = 1
    while off != (0, 0) and steps < 3:
        center = _add(center, off)
        off = s.probe("fourss_step", center, pattern)
        steps += 1
    center = _add(center, off)
    s.probe(PatternKind.SQUARE3.value, center, offsets_of(PatternKind.SQUARE3))


def _descend(s: _Session, kind: PatternKind, center) -> tuple[int, int]:
    """Repeat ``kind`` until its center is the BMP; return that center."""
    pattern = offsets_of(kind)
    while True:
        off = s.probe(kind.value, center, pattern)
        if off == (0, 0):
            return center
        center = _add(center, off)


def _bbgds(s: _Session) -> None:
    _descend(s, PatternKind.SQUARE3, (0, 0))


def _ds(s: _Session) -> None:
    center = _descend(s, PatternKind.DIAMOND_LARGE, (0, 0))
    s.probe(PatternKind.DIAMOND_SMALL.value, center, offsets_of(PatternKind.DIAMOND_SMALL))


def _hexbs(s: _Session, kind: PatternKind) -> None:
    center = _descend(s, kind, (0, 0))
    s.probe(PatternKind.DIAMOND_SMALL.value, center, offsets_of(PatternKind.DIAMOND_SMALL))


def _cds(s: _Session) -> None:
    small = offsets_of(PatternKind.DIAMOND_SMALL)
    off = s.probe(PatternKind.CROSS5.value, (0, 0), offsets_of(PatternKind.CROSS5))
    if off == (0, 0):
        return
    center = off
    if max(abs(off[0]), abs(off[1])) == 1:
        off = s.probe(PatternKind.DIAMOND_SMALL.value, center, small)
        if off == (0, 0):
            return
        center = _add(center, off)
    center = _descend(s, PatternKind.DIAMOND_LARGE, center)
    s.probe(PatternKind.DIAMOND_SMALL.value, center, small)


def search(alg, cost: CostOracle, search_range: int) -> SearchOutcome:
    """Run algorithm ``alg`` against an arbitrary cost oracle."""
    alg = parse_algorithm(alg)
    s = _start(cost)
    if alg is Algorithm.FS:
        _full(s, search_range)
    elif alg is Algorithm.DCDS:
        _dcds(s, simplified=False)
    elif alg is Algorithm.DCDS_S:
        _dcds(s, simplified=True)
    elif alg is Algorithm.TSS:
        _tss(s, search_range)
    elif alg is Algorithm.NTSS:
        _ntss(s, search_range)
    elif alg is Algorithm.FOURSS:
        _fourss(s)
    elif alg is Algorithm.BBGDS:
        _bbgds(s)
    elif alg is Algorithm.DS:
        _ds(s)
    elif alg is Algorithm.HEXBS_H:
        _hexbs(s, PatternKind.HEX_H)
    elif alg is Algorithm.HEXBS_V:
        _hexbs(s, PatternKind.HEX_V)
    elif alg is Algorithm.CDS:
        _cds(s)
    return s.outcome()


def full_search(current: Frame, reference: Frame, block_origin, cfg: SearchConfig) -> SearchOutcome:
    """Exhaustive search over the window; the first raster-order minimum wins."""
    matcher = BlockMatcher(current, reference, block_origin, cfg)
    grid = matcher.cost_grid()
    r = cfg.search_range
    feasible = np.isfinite(grid)
    iy, ix = np.unravel_index(int(np.argmin(grid)), grid.shape)
    ys, xs = np.nonzero(feasible)
    evaluated = tuple((int(x) - r, int(y) - r) for y, x in zip(ys, xs))
    trace = [TraceStep(1, "full", (0, 0), evaluated)]
    return SearchOutcome(
        MotionVector(int(ix) - r, int(iy) - r), int(grid[iy, ix]), len(evaluated), trace
    )


def dcds_search(current: Frame, reference: Frame, block_origin, cfg: SearchConfig) -> SearchOutcome:
    return search(Algorithm.DCDS, BlockMatcher(current, reference, block_origin, cfg), cfg.search_range)


def dcds_simplified(current: Frame, reference: Frame, block_origin, cfg: SearchConfig) -> SearchOutcome:
    return search(Algorithm.DCDS_S, BlockMatcher(current, reference, block_origin, cfg), cfg.search_range)


def classic_search(alg, current: Frame, reference: Frame, block_origin, cfg: SearchConfig) -> SearchOutcome:
    alg = parse_algorithm(alg)
    if alg not in CLASSIC_ALGORITHMS:
        raise UnknownAlgorithm(f"{alg.value} is not a classic fast search")
    return search(alg, BlockMatcher(current, reference, block_origin, cfg), cfg.search_range)


def search_block(alg, current: Frame, reference: Frame, block_origin, cfg: SearchConfig) -> SearchOutcome:
    alg = parse_algorithm(alg)
    if alg is Algorithm.FS:
        return full_search(current, reference, block_origin, cfg)
    return search(alg, BlockMatcher(current, reference, block_origin, cfg), cfg.search_range)


def block_origins(frame: Frame, block_size: int) -> list[tuple[int, int]]:
    return [
        (x, y)
        for y in range(0, frame.height, block_size)
        for x in range(0, frame.width, block_size)
    ]


def estimate_frame(
    alg,
    current: Frame,
    reference: Frame,
    cfg: SearchConfig,
    workers: int = 1,
    keep_traces: bool = False,
) -> MotionField:
    """Search every block of ``current`` in raster order and collect a motion field."""
    alg = parse_algorithm(alg)
    if (current.width, current.height) != (reference.width, reference.height):
        raise ValueError(
            f"frame size mismatch: {current.width}x{current.height}"
            f" vs {reference.width}x{reference.height}"
        )
    check_tiling(current, cfg.block_size)
    origins = block_origins(current, cfg.block_size)

    def run(origin):
        return search_block(alg, current, reference, origin, cfg)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, origins))
    else:
        outcomes = [run(o) for o in origins]
    return MotionField(
        cols=current.width // cfg.block_size,
        rows=current.height // cfg.block_size,
        vectors=[o.mv for o in outcomes],
        per_block_cost=[o.final_cost for o in outcomes],
        per_block_nsp=[o.nsp for o in outcomes],
        traces=[o.trace for o in outcomes] if keep_traces else None,
    )
