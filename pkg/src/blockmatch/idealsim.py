"""Search-point counts on an ideal unimodal error surface.

The distortion of a candidate is its Euclidean distance to the true motion
vector, so the true vector is the unique zero. The real search code is run
against this oracle, so the resulting maps certify the production searches.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import MotionVector, in_window
from .mvstats import ProbabilityTable, quarter_fold
from .search import SearchOutcome, parse_algorithm, search


@dataclass(frozen=True)
class IdealSurface:
    true_mv: MotionVector
    range: int

    def __post_init__(self):
        if not in_window(self.true_mv, self.range):
            raise ValueError(f"true vector {tuple(self.true_mv)} lies outside +-{self.range}")

    def __call__(self, dx: int, dy: int):
        if abs(dx) > self.range or abs(dy) > self.range:
            return None
        return ideal_cost(self, (dx, dy))


def ideal_cost(surface: IdealSurface, candidate) -> float:
    return math.hypot(candidate[0] - surface.true_mv[0], candidate[1] - surface.true_mv[1])


def ideal_search(alg, true_mv, search_range: int = 7) -> SearchOutcome:
    return search(alg, IdealSurface(MotionVector(*true_mv), search_range), search_range)


@dataclass
class NspMap:
    """NSP per true-vector placement.

    ``counts`` and ``found`` are indexed ``[dy, dx]`` over ``0..range`` for a
    quarter map and ``[dy + range, dx + range]`` for a full map.
    """

    algorithm: str
    range: int
    full: bool
    counts: np.ndarray
    found: np.ndarray

    def at(self, dx: int, dy: int) -> int:
        o = self.range if self.full else 0
        return int(self.counts[dy + o, dx + o])

    def coords(self) -> range:
        return range(-self.range, self.range + 1) if self.full else range(self.range + 1)

    def failures(self) -> list[tuple[int, int]]:
        """Placements where the search did not land on the true vector."""
        c = list(self.coords())
        return [(c[j], c[i]) for i, j in zip(*np.nonzero(~self.found))]

    def to_csv(self) -> str:
        out = io.StringIO()
        labels = list(self.coords())
        out.write("dy," + ",".join(str(v) for v in labels) + "\n")
        for dy, row in zip(labels, self.counts):
            out.write(f"{dy}," + ",".join(str(int(v)) for v in row) + "\n")
        return out.getvalue()


def nsp_map(alg, search_range: int = 7, full: bool = False) -> NspMap:
    alg = parse_algorithm(alg)
    coords = list(range(-search_range, search_range + 1) if full else range(search_range + 1))
    n = len(coords)
    counts = np.zeros((n, n), dtype=int)
    found = np.zeros((n, n), dtype=bool)
    for i, dy in enumerate(coords):
        for j, dx in enumerate(coords):
            out = ideal_search(alg, (dx, dy), search_range)
            counts[i, j] = out.nsp
            found[i, j] = out.mv == (dx, dy)
    return NspMap(alg.value, search_range, full, counts, found)


@dataclass
class RegionWeights:
    """A labelled partition of the full window plus a probability mass per label."""

    range: int
    labels: np.ndarray
    masses: dict

    def __post_init__(self):
        self.labels = np.asarray(self.labels)
        n = 2 * self.range + 1
        if self.labels.shape != (n, n):
            raise ValueError(f"region labels must have shape {(n, n)}, got {self.labels.shape}")
        self.masses = {str(k): float(v) for k, v in self.masses.items()}
        present = {str(v) for v in np.unique(self.labels)}
        missing = set(self.masses) - present
        if missing:
            raise ValueError(f"regions {sorted(missing)} have mass but no cells")

    def to_table(self) -> ProbabilityTable:
        cells = np.zeros(self.labels.shape)
        str_labels = self.labels.astype(str)
        for label, m in self.masses.items():
            mask = str_labels == label
            cells[mask] = m / mask.sum()
        return ProbabilityTable(self.range, cells)

    @classmethod
    def from_json(cls, text: str) -> RegionWeights:
        obj = json.loads(text)
        return cls(int(obj["range"]), np.asarray(obj["labels"]), obj["masses"])

    @classmethod
    def load(cls, path) -> RegionWeights:
        return cls.from_json(Path(path).read_text())

    def to_json(self) -> str:
        return json.dumps(
            {"range": self.range, "labels": self.labels.tolist(), "masses": self.masses}
        )


# Non-normative six-way partition by Chebyshev ring: {0}, {1}, {2}, {3,4}, {5,6}, {7+}.
_RING_LABELS = (1, 2, 3, 4, 4, 5, 5, 6)


def concentric_regions(search_range: int = 7, masses=None) -> RegionWeights:
    """Default six-region ring partition; not the published region geometry."""
    r = search_range
    ring = np.maximum.outer(np.abs(np.arange(-r, r + 1)), np.abs(np.arange(-r, r + 1)))
    labels = np.vectorize(lambda k: _RING_LABELS[min(k, len(_RING_LABELS) - 1)])(ring)
    if masses is None:
        masses = {1: 0.4, 2: 0.2, 3: 0.2, 4: 0.1, 5: 0.1, 6: 0.0}
    return RegionWeights(r, labels, masses)


def ansp(nsp: NspMap, weights) -> float:
    """Average NSP under a weighting of true-vector placements.

    ``weights`` is a :class:`ProbabilityTable` over the full window or a
    :class:`RegionWeights`. A quarter map is paired with the quarter-folded
    weights, i.e. placements are assumed symmetric in sign.
    """
    if isinstance(weights, RegionWeights):
        weights = weights.to_table()
    if weights.range != nsp.range:
        raise ValueError(f"weights cover +-{weights.range}, map covers +-{nsp.range}")
    w = weights.cells if nsp.full else quarter_fold(weights)
    return float((w * nsp.counts).sum() / w.sum())
