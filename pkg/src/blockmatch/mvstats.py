"""Motion-vector probability statistics.

Tables are indexed by displacement: ``table.cells[dy + r, dx + r]``.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import norm

from .core import BlockMatcher, Frame, MotionField, MotionVector, SearchConfig
from .patterns import canonical_order
from .reference_data import RANGE as FIXTURE_RANGE, fixture_cells


class EmptyConditionError(ValueError):
    """No block satisfied a conditioning event."""


@dataclass
class ProbabilityTable:
    range: int
    cells: np.ndarray

    def __post_init__(self):
        self.cells = np.asarray(self.cells, dtype=float)
        n = 2 * self.range + 1
        if self.cells.shape != (n, n):
            raise ValueError(f"cells must have shape {(n, n)}, got {self.cells.shape}")
        if (self.cells < 0).any():
            raise ValueError("probabilities must be non-negative")

    @classmethod
    def zeros(cls, search_range: int) -> ProbabilityTable:
        n = 2 * search_range + 1
        return cls(search_range, np.zeros((n, n)))

    @classmethod
    def uniform(cls, search_range: int) -> ProbabilityTable:
        n = 2 * search_range + 1
        return cls(search_range, np.full((n, n), 1.0 / (n * n)))

    @classmethod
    def delta(cls, search_range: int, at=(0, 0)) -> ProbabilityTable:
        t = cls.zeros(search_range)
        t.cells[at[1] + search_range, at[0] + search_range] = 1.0
        return t

    def __getitem__(self, offset) -> float:
        dx, dy = offset
        return float(self.cells[dy + self.range, dx + self.range])

    @property
    def total(self) -> float:
        return float(self.cells.sum())

    def normalized(self) -> ProbabilityTable:
        s = self.total
        if s <= 0:
            raise ValueError("cannot normalise an empty table")
        return ProbabilityTable(self.range, self.cells / s)

    def mass(self, offsets: Iterable) -> float:
        return float(sum(self[o] for o in offsets))

    def to_csv(self) -> str:
        return _grid_csv(self.cells, range(-self.range, self.range + 1))

    def to_json(self) -> str:
        return json.dumps(
            {"range": self.range, "cells": [float(f"{v:.6f}") for v in self.cells.ravel()]}
        )

    @classmethod
    def from_json(cls, text: str) -> ProbabilityTable:
        obj = json.loads(text)
        r = int(obj["range"])
        return cls(r, np.asarray(obj["cells"], dtype=float).reshape(2 * r + 1, 2 * r + 1))

    @classmethod
    def from_csv(cls, text: str) -> ProbabilityTable:
        rows = [line.split(",") for line in text.strip().splitlines()]
        data = np.array([[float(v) for v in row[1:]] for row in rows[1:]])
        return cls((data.shape[0] - 1) // 2, data)


def _grid_csv(grid, labels, fmt="{:.6f}") -> str:
    out = io.StringIO()
    labels = list(labels)
    out.write("dy," + ",".join(str(v) for v in labels) + "\n")
    for dy, row in zip(labels, grid):
        out.write(f"{dy}," + ",".join(fmt.format(v) for v in row) + "\n")
    return out.getvalue()


def published_table() -> ProbabilityTable:
    """The published range-7 distribution (see :mod:`blockmatch.reference_data`)."""
    return ProbabilityTable(FIXTURE_RANGE, fixture_cells())


def mv_histogram(fields: Iterable[MotionField], search_range: int, blocks=None) -> ProbabilityTable:
    """Normalised frequency table of all motion vectors in ``fields``.

    ``blocks`` optionally restricts counting to a set of block indices.
    """
    counts = np.zeros((2 * search_range + 1, 2 * search_range + 1))
    for f in fields:
        for i, (dx, dy) in enumerate(f.vectors):
            if blocks is not None and i not in blocks:
                continue
            if abs(dx) > search_range or abs(dy) > search_range:
                raise ValueError(f"vector {(dx, dy)} lies outside the +-{search_range} window")
            counts[dy + search_range, dx + search_range] += 1
    if counts.sum() == 0:
        raise ValueError("no motion vectors to histogram")
    return ProbabilityTable(search_range, counts / counts.sum())


def quarter_fold(table: ProbabilityTable) -> np.ndarray:
    """Fold onto ``(|dy|, |dx|)``; result is indexed ``[|dy|, |dx|]``."""
    r = table.range
    c = table.cells
    q = c[r:, r:].copy()
    q[:, 1:] += c[r:, r - 1::-1]
    q[1:, :] += c[r - 1::-1, r:]
    q[1:, 1:] += c[r - 1::-1, r - 1::-1]
    return q


def quarter_csv(quarter: np.ndarray) -> str:
    return _grid_csv(quarter, range(quarter.shape[0]))


@dataclass
class Marginals:
    range: int
    ax: np.ndarray
    ay: np.ndarray
    bx: np.ndarray
    by: np.ndarray

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("d,ax,ay,bx,by\n")
        for i, d in enumerate(range(-self.range, self.range + 1)):
            out.write(f"{d},{self.ax[i]:.6f},{self.ay[i]:.6f},{self.bx[i]:.6f},{self.by[i]:.6f}\n")
        return out.getvalue()


def marginals(table: ProbabilityTable) -> Marginals:
    r = table.range
    c = table.cells
    return Marginals(r, c.sum(axis=0), c.sum(axis=1), c[r, :].copy(), c[:, r].copy())


# window regions used for regional probabilities; offsets are (dx, dy)
def _region(search_range: int, predicate) -> list[tuple[int, int]]:
    r = search_range
    return [(dx, dy) for dy in range(-r, r + 1) for dx in range(-r, r + 1) if predicate(dx, dy)]


REGIONS = {
    "square5": lambda dx, dy: abs(dx) <= 2 and abs(dy) <= 2,
    "diamond5": lambda dx, dy: abs(dx) + abs(dy) <= 2,
    "cross5": lambda dx, dy: (dy == 0 and abs(dx) <= 2) or (dx == 0 and abs(dy) <= 2),
    "square3": lambda dx, dy: abs(dx) <= 1 and abs(dy) <= 1,
    # the seven horizontal-cross offsets
    "flat": lambda dx, dy: (dy == 0 and abs(dx) <= 2) or (dx == 0 and abs(dy) <= 1),
}


def regional_probs(table: ProbabilityTable) -> dict[str, float]:
    if table.range < 2:
        raise ValueError("regional probabilities need a window of at least +-2")
    return {name: table.mass(_region(table.range, pred)) for name, pred in REGIONS.items()}


def search_efficiency(table: ProbabilityTable, offsets) -> float:
    """Probability mass covered by a first-step pattern, per search point."""
    offsets = {tuple(o) for o in offsets}
    if not offsets:
        raise ValueError("pattern is empty")
    for dx, dy in offsets:
        if abs(dx) > table.range or abs(dy) > table.range:
            raise ValueError(f"offset {(dx, dy)} lies outside the table")
    return table.mass(offsets) / len(offsets)


class NormalFit(NamedTuple):
    mu: float
    sigma: float
    residual: float


def _sampled_normal(d: np.ndarray, mu: float, sigma: float) -> np.ndarray:
    logp = norm.logpdf(d, mu, sigma)
    p = np.exp(logp - logp.max())
    return p / p.sum()


def normal_fit(marginal, support=None) -> NormalFit:
    """Least-squares fit of a normal density sampled on the integer support.

    The model is the density evaluated at each integer displacement and
    renormalised over the support; ``residual`` is the sum of squared errors.
    A coarse-to-fine scalar search over sigma (profiling out mu) locates the
    optimum, which a Gauss-Newton pass then polishes.
    """
    y = np.asarray(marginal, dtype=float)
    if support is None:
        r = (len(y) - 1) // 2
        support = np.arange(-r, r + 1)
    d = np.asarray(support, dtype=float)
    nz = np.flatnonzero(y > 0)
    if len(nz) == 0:
        raise ValueError("distribution has no mass")
    if len(nz) == 1:
        return NormalFit(float(d[nz[0]]), 0.0, float(np.sum((y - (y > 0)) ** 2)))

    lo, hi = float(d.min()), float(d.max())

    def sse(mu, sigma):
        return float(np.sum((_sampled_normal(d, mu, sigma) - y) ** 2))

    mu_grid = np.linspace(lo, hi, 8 * len(d) + 1)
    mu_step = mu_grid[1] - mu_grid[0]

    def best_mu(sigma):
        k = int(np.argmin([sse(m, sigma) for m in mu_grid]))
        res = minimize_scalar(
            lambda m: sse(m, sigma),
            bounds=(max(lo, mu_grid[k] - mu_step), min(hi, mu_grid[k] + mu_step)),
            method="bounded", options={"xatol": 1e-12},
        )
        return res.x, res.fun

    def profile(log_sigma):
        return best_mu(np.exp(log_sigma))[1]

    # coarse scan guards against local minima, then refine
    grid = np.linspace(np.log(0.02), np.log(hi - lo + 1.0), 60)
    vals = [profile(g) for g in grid]
    k = int(np.argmin(vals))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = minimize_scalar(profile, bounds=(a, b), method="bounded", options={"xatol": 1e-12})
    mu, _ = best_mu(np.exp(res.x))
    # Gauss-Newton polish: the scalar searches stall near sqrt(machine eps)
    p = np.array([mu, res.x])
    h = 1e-5
    for _ in range(8):
        resid = _sampled_normal(d, p[0], np.exp(p[1])) - y
        jac = np.empty((len(d), 2))
        for j, e in enumerate(np.eye(2) * h):
            up = _sampled_normal(d, p[0] + e[0], np.exp(p[1] + e[1]))
            down = _sampled_normal(d, p[0] - e[0], np.exp(p[1] - e[1]))
            jac[:, j] = (up - down) / (2 * h)
        step = np.linalg.lstsq(jac, -resid, rcond=None)[0]
        p = p + step
        if np.abs(step).max() < 1e-15:
            break
    mu, sigma = float(p[0]), float(np.exp(p[1]))
    return NormalFit(mu, sigma, sse(mu, sigma))


# conditional distributions


@dataclass
class BlockRecord:
    """Full-search cost grid for one block, indexed ``[dy + r, dx + r]`` (inf = infeasible)."""

    range: int
    costs: np.ndarray

    @property
    def true_mv(self) -> MotionVector:
        iy, ix = np.unravel_index(int(np.argmin(self.costs)), self.costs.shape)
        return MotionVector(int(ix) - self.range, int(iy) - self.range)

    def step_bmp(self, covered) -> MotionVector | None:
        """Strict-minimum over the covered set in canonical order."""
        best, best_cost = None, None
        for dx, dy in canonical_order(covered):
            c = self.costs[dy + self.range, dx + self.range]
            if not np.isfinite(c):
                continue
            if best_cost is None or c < best_cost:
                best, best_cost = (dx, dy), c
        return None if best is None else MotionVector(*best)


def collect_block_records(current: Frame, reference: Frame, cfg: SearchConfig, origins=None) -> list[BlockRecord]:
    from .search import block_origins

    if origins is None:
        origins = block_origins(current, cfg.block_size)
    return [
        BlockRecord(cfg.search_range, BlockMatcher(current, reference, o, cfg).cost_grid())
        for o in origins
    ]


def _check_set(covered, search_range):
    covered = [tuple(o) for o in covered]
    if not covered:
        raise ValueError("covered set S is empty")
    for dx, dy in covered:
        if abs(dx) > search_range or abs(dy) > search_range:
            raise ValueError(f"{(dx, dy)} lies outside the window")
    return covered


def prior_conditional(blocks: list[BlockRecord], covered, condition) -> ProbabilityTable:
    """Distribution of the true MV over the window given the BMP over ``covered``."""
    if not blocks:
        raise EmptyConditionError("no blocks")
    r = blocks[0].range
    covered = _check_set(covered, r)
    condition = tuple(condition)
    if condition not in covered:
        raise ValueError(f"condition {condition} is not in the covered set")
    t = ProbabilityTable.zeros(r)
    for b in blocks:
        if b.step_bmp(covered) == condition:
            dx, dy = b.true_mv
            t.cells[dy + r, dx + r] += 1
    if t.total == 0:
        raise EmptyConditionError(f"no block has its first-step BMP at {condition}")
    return t.normalized()


def posterior_conditional(blocks: list[BlockRecord], covered, region) -> ProbabilityTable:
    """Distribution of the BMP over ``covered`` given the true MV lies in ``region``."""
    if not blocks:
        raise EmptyConditionError("no blocks")
    r = blocks[0].range
    covered = _check_set(covered, r)
    region = {tuple(o) for o in region}
    if not region:
        raise ValueError("condition region is empty")
    t = ProbabilityTable.zeros(r)
    for b in blocks:
        if tuple(b.true_mv) in region:
            bmp = b.step_bmp(covered)
            if bmp is not None:
                t.cells[bmp.dy + r, bmp.dx + r] += 1
    if t.total == 0:
        raise EmptyConditionError("no block has its true motion vector in the condition region")
    return t.normalized()
