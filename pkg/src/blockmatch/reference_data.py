"""Published motion-vector statistics for a range-7 window, shipped as fixtures.

``QUARTER_2D`` is the quarter-folded 2-D distribution, indexed ``[|dy|][|dx|]``.
``CENTRAL_5X5`` is the full-sign distribution of the central 5x5 region, indexed
``[dy + 2][dx + 2]``. ``AXIS_X`` / ``AXIS_Y`` are the on-axis slices and
``ACCUM_X`` / ``ACCUM_Y`` the accumulated marginals, each over d = -7..7.
"""

from __future__ import annotations

import numpy as np

RANGE = 7

QUARTER_2D = np.array([
    [0.5805, 0.1280, 0.0591, 0.0170, 0.0072, 0.0054, 0.0026, 0.0076],
    [0.0572, 0.0242, 0.0092, 0.0051, 0.0041, 0.0029, 0.0020, 0.0049],
    [0.0067, 0.0062, 0.0034, 0.0031, 0.0017, 0.0011, 0.0010, 0.0027],
    [0.0031, 0.0029, 0.0019, 0.0022, 0.0012, 0.0009, 0.0008, 0.0021],
    [0.0022, 0.0018, 0.0014, 0.0012, 0.0010, 0.0006, 0.0007, 0.0018],
    [0.0012, 0.0016, 0.0009, 0.0011, 0.0007, 0.0005, 0.0005, 0.0018],
    [0.0024, 0.0012, 0.0008, 0.0009, 0.0010, 0.0005, 0.0007, 0.0016],
    [0.0015, 0.0014, 0.0010, 0.0016, 0.0012, 0.0011, 0.0012, 0.0052],
])

ACCUM_X = np.array([0.0117, 0.0042, 0.0060, 0.0083, 0.0114, 0.0241, 0.0909, 0.6547,
                    0.0762, 0.0536, 0.0208, 0.0099, 0.0069, 0.0052, 0.0160])
ACCUM_Y = np.array([0.0065, 0.0049, 0.0035, 0.0048, 0.0070, 0.0122, 0.0549, 0.8074,
                    0.0548, 0.0137, 0.0082, 0.0058, 0.0048, 0.0039, 0.0078])
AXIS_X = np.array([0.0042, 0.0013, 0.0028, 0.0037, 0.0049, 0.0151, 0.0718, 0.5805,
                   0.0562, 0.0440, 0.0121, 0.0035, 0.0026, 0.0013, 0.0034])
AXIS_Y = np.array([0.0010, 0.0015, 0.0006, 0.0011, 0.0016, 0.0031, 0.0295, 0.5805,
                   0.0277, 0.0035, 0.0015, 0.0011, 0.0006, 0.0008, 0.0006])

CENTRAL_5X5 = np.array([
    [0.0008, 0.0013, 0.0031, 0.0014, 0.0008],
    [0.0025, 0.0056, 0.0295, 0.0048, 0.0021],
    [0.0151, 0.0718, 0.5805, 0.0562, 0.0440],
    [0.0024, 0.0068, 0.0277, 0.0070, 0.0021],
    [0.0008, 0.0018, 0.0035, 0.0017, 0.0010],
])

REGIONAL = {
    "square5": 0.8745,
    "diamond5": 0.8557,
    "cross5": 0.8315,
    "square3": 0.7899,
    "flat": 0.8248,
}

FIRST_STEP_EFFICIENCY = {
    "square3": 0.0878,
    "diamond_large": 0.0745,
    "cross5": 0.0924,
    "hex_h": 0.0922,
    "hcsp": 0.1178,
}


def fixture_cells() -> np.ndarray:
    """Full-window cells ``[dy + 7, dx + 7]`` assembled from the published tables.

    The central 5x5 comes verbatim from ``CENTRAL_5X5``; remaining axis cells come
    from ``AXIS_X`` / ``AXIS_Y``; remaining off-axis cells split the quarter-folded
    value evenly over their four sign combinations. Totals are the published
    four-decimal values and are not renormalised.
    """
    r = RANGE
    cells = np.zeros((2 * r + 1, 2 * r + 1))
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            if abs(dx) <= 2 and abs(dy) <= 2:
                v = CENTRAL_5X5[dy + 2, dx + 2]
            elif dy == 0:
                v = AXIS_X[dx + r]
            elif dx == 0:
                v = AXIS_Y[dy + r]
            else:
                v = QUARTER_2D[abs(dy), abs(dx)] / 4
            cells[dy + r, dx + r] = v
    return cells
