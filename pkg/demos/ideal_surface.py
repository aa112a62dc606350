"""Search cost on an ideal error surface.

On a surface whose cost is the Euclidean distance to the true vector every
sensible search converges, so the only thing left to compare is how many
points each algorithm pays to get there. Run with ``python3 demos/ideal_surface.py``.
"""

import numpy as np

from blockmatch.idealsim import ansp, concentric_regions, ideal_search, nsp_map
from blockmatch.mvstats import ProbabilityTable, published_table
from blockmatch.search import Algorithm

np.set_printoptions(linewidth=120)

# A single search, step by step. The true vector (3, 1) sits right of center,
# so the horizontal cross picks the horizontal diamond and walks along x.
out = ideal_search(Algorithm.DCDS, (3, 1))
print(f"dcds on true vector (3, 1): found {tuple(out.mv)} with {out.nsp} points")
for step in out.trace:
    print(f"  step {step.step} {step.pattern:<6} center {step.center} new points {list(step.evaluated)}")

# Quarter maps: entry [dy, dx] is the point count when the true vector is (dx, dy).
print("\ndcds quarter map")
print(nsp_map(Algorithm.DCDS).counts)

# Average cost depends on where motion usually lands. Three weightings:
weights = {
    "uniform": ProbabilityTable.uniform(7),
    "measured": published_table(),
    "rings": concentric_regions(7),
}
print(f"\n{'algorithm':<10}" + "".join(f"{k:>10}" for k in weights))
for alg in (Algorithm.TSS, Algorithm.NTSS, Algorithm.FOURSS, Algorithm.BBGDS, Algorithm.DS,
            Algorithm.CDS, Algorithm.HEXBS_H, Algorithm.DCDS, Algorithm.DCDS_S):
    m = nsp_map(alg)
    print(f"{alg.value:<10}" + "".join(f"{ansp(m, w):>10.2f}" for w in weights.values()))

# Hexagon search cannot reach the far corners along its short axis.
hexagon = nsp_map(Algorithm.HEXBS_H, full=True)
print(f"\nhexbs-h misses {len(hexagon.failures())} of 225 placements, e.g. {hexagon.failures()[:4]}")
