"""Motion-vector statistics from full search.

Collect the full-search cost grid of every block, then look at where the best
match tends to fall: the 2-D table, its quarter fold, axis marginals with a
normal fit, and the conditional tables used to motivate a first search pattern.
"""

import numpy as np

from blockmatch.core import SearchConfig
from blockmatch.ingest import synth_sequence
from blockmatch.mvstats import (
    ProbabilityTable,
    collect_block_records,
    marginals,
    normal_fit,
    posterior_conditional,
    prior_conditional,
    published_table,
    quarter_fold,
    regional_probs,
)
from blockmatch.patterns import PatternKind, offsets_of

np.set_printoptions(precision=3, suppress=True, linewidth=120)
cfg = SearchConfig()

frames = list(synth_sequence("noise", 128, 128, 12, seed=11))
records = []
for ref, cur in zip(frames, frames[1:]):
    records += collect_block_records(cur, ref, cfg)
print(f"{len(records)} blocks")

counts = np.zeros((15, 15))
for b in records:
    counts[b.true_mv.dy + 7, b.true_mv.dx + 7] += 1
table = ProbabilityTable(7, counts / counts.sum())

print("\nquarter fold, rows |dy|, columns |dx|")
print(quarter_fold(table))

for name, t in (("synthetic", table), ("measured", published_table())):
    m = marginals(t)
    fx, fy = normal_fit(m.ax), normal_fit(m.ay)
    probs = ", ".join(f"{k} {v:.3f}" for k, v in regional_probs(t).items())
    print(f"\n{name}: x ~ N({fx.mu:.3f}, {fx.sigma:.3f}), y ~ N({fy.mu:.3f}, {fy.sigma:.3f})")
    print(f"  {probs}")

# Which true vectors lie behind a first-step cross winner at (2, 0)?
cross = offsets_of(PatternKind.CROSS5)
try:
    prior = prior_conditional(records, cross, (2, 0))
    print("\ntrue vector given the cross picks (2, 0), rows dy = -2..2, columns dx = 0..4")
    print(prior.cells[5:10, 7:12])
except ValueError as e:
    print(f"\n{e}")

# And conversely: where does a 5x5 square first land when the motion is far right?
square5 = [(x, y) for y in range(-2, 3) for x in range(-2, 3)]
far_right = [(x, y) for y in range(-7, 8) for x in range(3, 8)]
try:
    post = posterior_conditional(records, square5, far_right)
    print("\nfirst-step square winner given dx >= 3")
    print(post.cells[5:10, 5:10])
except ValueError as e:
    print(f"\n{e}")
