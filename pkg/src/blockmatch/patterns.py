"""Search pattern catalog.

Every pattern is an ordered tuple of :class:`PatternPoint`. The order is part
of the contract: the center comes first and the remaining points are sorted by
``(|dy|, |dx|, dy, dx)``. Searches replace the best-matched point only on a
strictly smaller cost, so this order decides every tie.
"""

from __future__ import annotations

from enum import Enum
from functools import lru_cache
from typing import NamedTuple


class PatternKind(str, Enum):
    HCSP = "hcsp"
    HDSP = "hdsp"
    VDSP = "vdsp"
    CROSS5 = "cross5"
    DIAMOND_LARGE = "diamond_large"
    DIAMOND_SMALL = "diamond_small"
    HEX_H = "hex_h"
    HEX_V = "hex_v"
    SQUARE3 = "square3"
    SQUARE_TSS = "square_tss"
    NTSS_AUGMENT = "ntss_augment"
    FOURSS_STEP = "fourss_step"


class Role(str, Enum):
    CENTER = "center"
    NEAR = "near"
    DISTANT = "distant"
    OTHER = "other"


class PatternPoint(NamedTuple):
    offset: tuple[int, int]
    role: Role


def canonical_key(offset) -> tuple[int, int, int, int]:
    dx, dy = offset
    return (abs(dy), abs(dx), dy, dx)


def canonical_order(offsets) -> list[tuple[int, int]]:
    return sorted({(int(dx), int(dy)) for dx, dy in offsets}, key=canonical_key)


def _square(step: int) -> list[tuple[int, int]]:
    return [(dx, dy) for dy in (-step, 0, step) for dx in (-step, 0, step)]


def _raw_offsets(kind: PatternKind, step: int) -> list[tuple[int, int]]:
    if kind is PatternKind.HCSP:
        return [(0, 0), (1, 0), (-1, 0), (2, 0), (-2, 0), (0, 1), (0, -1)]
    if kind is PatternKind.HDSP:
        return [(0, 0), (2, 0), (-2, 0), (0, 1), (0, -1)]
    if kind is PatternKind.VDSP:
        return [(0, 0), (0, 2), (0, -2), (1, 0), (-1, 0)]
    if kind is PatternKind.CROSS5:
        return [(0, 0)] + [(s * d, 0) for d in (1, 2) for s in (1, -1)] + [
            (0, s * d) for d in (1, 2) for s in (1, -1)
        ]
    if kind is PatternKind.DIAMOND_LARGE:
        return [(0, 0), (2, 0), (-2, 0), (0, 2), (0, -2), (1, 1), (1, -1), (-1, 1), (-1, -1)]
    if kind is PatternKind.DIAMOND_SMALL:
        return [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]
    if kind is PatternKind.HEX_H:
        return [(0, 0), (2, 0), (-2, 0), (1, 2), (-1, 2), (1, -2), (-1, -2)]
    if kind is PatternKind.HEX_V:
        return [(0, 0), (0, 2), (0, -2), (2, 1), (2, -1), (-2, 1), (-2, -1)]
    if kind is PatternKind.SQUARE3:
        return _square(1)
    if kind in (PatternKind.SQUARE_TSS, PatternKind.FOURSS_STEP):
        return _square(step)
    if kind is PatternKind.NTSS_AUGMENT:
        return _square(step) + _square(1)
    raise ValueError(f"unknown pattern kind {kind!r}")


def _role(kind: PatternKind, offset) -> Role:
    dx, dy = offset
    if offset == (0, 0):
        return Role.CENTER
    if kind in (PatternKind.HDSP, PatternKind.VDSP):
        return Role.DISTANT if abs(dx) + abs(dy) == 2 else Role.NEAR
    return Role.OTHER


@lru_cache(maxsize=None)
def pattern_offsets(kind: PatternKind, step: int = 0) -> tuple[PatternPoint, ...]:
    """Ordered points of a pattern.

    ``step`` is the square spacing for ``SQUARE_TSS`` and ``FOURSS_STEP`` (default 4
    and 2) and the outer-ring spacing for ``NTSS_AUGMENT`` (default 4). It is ignored
    for fixed-shape kinds.
    """
    kind = PatternKind(kind)
    if not step:
        step = 2 if kind is PatternKind.FOURSS_STEP else 4
    return tuple(PatternPoint(o, _role(kind, o)) for o in canonical_order(_raw_offsets(kind, step)))


def offsets_of(kind: PatternKind, step: int = 0) -> tuple[tuple[int, int], ...]:
    return tuple(p.offset for p in pattern_offsets(kind, step))


def role_of(kind: PatternKind, offset) -> Role:
    for point in pattern_offsets(kind):
        if point.offset == tuple(offset):
            return point.role
    raise ValueError(f"{tuple(offset)} is not a point of {PatternKind(kind).name}")


def middle_points(kind: PatternKind) -> tuple[tuple[int, int], tuple[int, int]]:
    """Distance-1 positions on the long wing of a directional diamond."""
    kind = PatternKind(kind)
    if kind is PatternKind.HDSP:
        return ((-1, 0), (1, 0))
    if kind is PatternKind.VDSP:
        return ((0, -1), (0, 1))
    raise ValueError(f"middle points are only defined for HDSP and VDSP, not {kind.name}")


def switch_one(bmp_offset) -> PatternKind:
    """Pick the directional diamond after the horizontal cross step."""
    dx, dy = bmp_offset
    if (dx, dy) == (0, 0):
        raise ValueError("center is the best match; the search stops after the first step")
    if dy == 0:
        return PatternKind.HDSP
    if dx == 0:
        return PatternKind.VDSP
    raise ValueError(f"{(dx, dy)} is not on an axis of the horizontal cross")


def switch_two(current: PatternKind, bmp_role: Role) -> PatternKind:
    current = PatternKind(current)
    if current not in (PatternKind.HDSP, PatternKind.VDSP):
        raise ValueError(f"switch_two applies to HDSP/VDSP, not {current.name}")
    bmp_role = Role(bmp_role)
    if bmp_role is Role.NEAR:
        return PatternKind.VDSP if current is PatternKind.HDSP else PatternKind.HDSP
    if bmp_role is Role.DISTANT:
        return current
    raise ValueError(f"switch_two is undefined for role {bmp_role.value}")
