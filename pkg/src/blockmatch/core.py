"""Frames, search configuration and block distortion measures."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np


class CostKind(str, Enum):
    MAD = "mad"
    MSE = "mse"


class MotionVector(NamedTuple):
    dx: int
    dy: int


@dataclass(frozen=True)
class Frame:
    """An 8-bit luma plane, stored as a ``(height, width)`` uint8 array."""

    luma: np.ndarray

    def __post_init__(self):
        luma = np.asarray(self.luma)
        if luma.ndim != 2 or luma.shape[0] < 1 or luma.shape[1] < 1:
            raise ValueError(f"luma must be a non-empty 2-D array, got shape {luma.shape}")
        if luma.dtype != np.uint8:
            if luma.size and (luma.min() < 0 or luma.max() > 255):
                raise ValueError("luma samples must lie in [0, 255]")
            luma = luma.astype(np.uint8)
        luma = np.ascontiguousarray(luma)
        luma.setflags(write=False)
        object.__setattr__(self, "luma", luma)

    @classmethod
    def from_samples(cls, width: int, height: int, samples) -> Frame:
        data = np.asarray(samples)
        if data.size != width * height:
            raise ValueError(f"expected {width * height} samples, got {data.size}")
        return cls(data.reshape(height, width))

    @property
    def width(self) -> int:
        return self.luma.shape[1]

    @property
    def height(self) -> int:
        return self.luma.shape[0]

    def crop(self, width: int, height: int) -> Frame:
        return Frame(self.luma[:height, :width])


@dataclass(frozen=True)
class SearchConfig:
    block_size: int = 16
    search_range: int = 7
    cost_kind: CostKind = CostKind.MAD

    def __post_init__(self):
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")
        if self.search_range < 1:
            raise ValueError("search_range must be >= 1")
        object.__setattr__(self, "cost_kind", CostKind(self.cost_kind))


@dataclass
class MotionField:
    cols: int
    rows: int
    vectors: list[MotionVector]
    per_block_cost: list[float]
    per_block_nsp: list[int]
    traces: list | None = field(default=None, repr=False)

    def __post_init__(self):
        n = self.cols * self.rows
        if not (len(self.vectors) == len(self.per_block_cost) == len(self.per_block_nsp) == n):
            raise ValueError("motion field sequences must all have cols * rows entries")

    def vector_at(self, col: int, row: int) -> MotionVector:
        return self.vectors[row * self.cols + col]

    @property
    def mean_nsp(self) -> float:
        return float(np.mean(self.per_block_nsp))


class TilingError(ValueError):
    pass


def check_tiling(frame: Frame, block_size: int) -> None:
    if frame.width % block_size or frame.height % block_size:
        raise TilingError(
            f"frame {frame.width}x{frame.height} is not a multiple of block size {block_size}"
            " (use cropping)"
        )


def crop_to_blocks(frame: Frame, block_size: int) -> Frame:
    w = frame.width - frame.width % block_size
    h = frame.height - frame.height % block_size
    if w == 0 or h == 0:
        raise TilingError(f"frame {frame.width}x{frame.height} is smaller than one block")
    if (w, h) == (frame.width, frame.height):
        return frame
    return frame.crop(w, h)


def in_window(candidate, search_range: int) -> bool:
    dx, dy = candidate
    return abs(dx) <= search_range and abs(dy) <= search_range


def block_fits(frame: Frame, x: int, y: int, block_size: int) -> bool:
    return 0 <= x and 0 <= y and x + block_size <= frame.width and y + block_size <= frame.height


def _block_pair(current: Frame, reference: Frame, block_origin, candidate, block_size):
    x, y = block_origin
    dx, dy = candidate
    if not block_fits(current, x, y, block_size):
        raise IndexError(f"block at {(x, y)} does not fit in the current frame")
    if not block_fits(reference, x + dx, y + dy, block_size):
        raise IndexError(f"candidate {(dx, dy)} displaces block {(x, y)} outside the reference frame")
    a = current.luma[y:y + block_size, x:x + block_size].astype(np.int64)
    b = reference.luma[y + dy:y + dy + block_size, x + dx:x + dx + block_size].astype(np.int64)
    return a, b


def sad(current: Frame, reference: Frame, block_origin, candidate, block_size: int) -> int:
    """Sum of absolute differences between a block and its displaced reference block.

    ``block_origin`` is the (x, y) pixel position of the block's top-left corner and
    ``candidate`` the (dx, dy) displacement into ``reference``. Raises ``IndexError``
    when either block leaves its frame.
    """
    a, b = _block_pair(current, reference, block_origin, candidate, block_size)
    return int(np.abs(a - b).sum())


def mad(sad_value, block_size: int) -> float:
    return sad_value / (block_size * block_size)


def mse_block(current: Frame, reference: Frame, block_origin, candidate, block_size: int) -> float:
    a, b = _block_pair(current, reference, block_origin, candidate, block_size)
    d = a - b
    return float((d * d).sum()) / (block_size * block_size)


class BlockMatcher:
    """Cost oracle for one block: maps a candidate (dx, dy) to its BDM.

    Returns ``None`` for infeasible candidates (outside the search window or
    displacing the block outside the reference frame). MAD configurations
    compare raw integer SAD; MSE configurations compare the summed squared error.
    """

    def __init__(self, current: Frame, reference: Frame, block_origin, cfg: SearchConfig):
        x, y = block_origin
        n = cfg.block_size
        if not block_fits(current, x, y, n):
            raise IndexError(f"block at {(x, y)} does not fit in the current frame")
        self.x, self.y = x, y
        self.cfg = cfg
        self.block = current.luma[y:y + n, x:x + n].astype(np.int32)
        self.ref = reference.luma
        self.ref_w, self.ref_h = reference.width, reference.height
        self.squared = cfg.cost_kind is CostKind.MSE

    def feasible(self, dx: int, dy: int) -> bool:
        r = self.cfg.search_range
        if abs(dx) > r or abs(dy) > r:
            return False
        n = self.cfg.block_size
        rx, ry = self.x + dx, self.y + dy
        return 0 <= rx and 0 <= ry and rx + n <= self.ref_w and ry + n <= self.ref_h

    def __call__(self, dx: int, dy: int):
        if not self.feasible(dx, dy):
            return None
        n = self.cfg.block_size
        rx, ry = self.x + dx, self.y + dy
        d = self.block - self.ref[ry:ry + n, rx:rx + n]
        if self.squared:
            return int((d * d).sum())
        return int(np.abs(d).sum())

    def cost_grid(self) -> np.ndarray:
        """Costs of the whole window, indexed ``[dy + r, dx + r]``; infeasible cells are inf."""
        r = self.cfg.search_range
        n = self.cfg.block_size
        grid = np.full((2 * r + 1, 2 * r + 1), np.inf)
        x0, x1 = max(-r, -self.x), min(r, self.ref_w - n - self.x)
        y0, y1 = max(-r, -self.y), min(r, self.ref_h - n - self.y)
        if x0 > x1 or y0 > y1:
            return grid
        region = self.ref[self.y + y0:self.y + y1 + n, self.x + x0:self.x + x1 + n].astype(np.int32)
        windows = np.lib.stride_tricks.sliding_window_view(region, (n, n))
        d = windows - self.block
        if self.squared:
            costs = np.einsum("ijkl,ijkl->ij", d, d)
        else:
            costs = np.abs(d).sum(axis=(2, 3))
        grid[y0 + r:y1 + r + 1, x0 + r:x1 + r + 1] = costs
        return grid

    def to_metric(self, cost) -> float:
        """Normalise a raw summed cost to MAD or MSE."""
        return cost / (self.cfg.block_size * self.cfg.block_size)
