"""Block-matching motion estimation with directional cross diamond search."""

from .core import (
    BlockMatcher,
    CostKind,
    Frame,
    MotionField,
    MotionVector,
    SearchConfig,
    TilingError,
    mad,
    sad,
)
from .search import Algorithm, SearchOutcome, estimate_frame, search, search_block

__all__ = [
    "Algorithm",
    "BlockMatcher",
    "CostKind",
    "Frame",
    "MotionField",
    "MotionVector",
    "SearchConfig",
    "SearchOutcome",
    "TilingError",
    "estimate_frame",
    "mad",
    "sad",
    "search",
    "search_block",
]
