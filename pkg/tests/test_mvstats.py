import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import norm

from blockmatch import reference_data as ref
from blockmatch.core import MotionField, MotionVector, SearchConfig
from blockmatch.idealsim import IdealSurface
from blockmatch.ingest import synth_sequence
from blockmatch.mvstats import (
    BlockRecord,
    EmptyConditionError,
    ProbabilityTable,
    collect_block_records,
    marginals,
    mv_histogram,
    normal_fit,
    posterior_conditional,
    prior_conditional,
    published_table,
    quarter_fold,
    regional_probs,
    search_efficiency,
)
from blockmatch.patterns import PatternKind, offsets_of

from conftest import interior_origins


def field_of(*mvs):
    return MotionField(len(mvs), 1, [MotionVector(*m) for m in mvs], [0] * len(mvs), [1] * len(mvs))


def central_table():
    t = ProbabilityTable.zeros(7)
    t.cells[5:10, 5:10] = ref.CENTRAL_5X5
    return t


def test_histogram_delta_and_split():
    t = mv_histogram([field_of((3, -2))], 7)
    assert t[(3, -2)] == 1.0 and t.total == 1.0
    t = mv_histogram([field_of((0, 0), (2, 0))], 7)
    assert t[(0, 0)] == t[(2, 0)] == 0.5


def test_histogram_block_subset_and_errors():
    t = mv_histogram([field_of((0, 0), (2, 0))], 7, blocks={1})
    assert t[(2, 0)] == 1.0
    with pytest.raises(ValueError):
        mv_histogram([field_of((8, 0))], 7)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(-7, 7), st.integers(-7, 7)), min_size=1, max_size=40))
def test_histogram_and_fold_sum_to_one(mvs):
    t = mv_histogram([field_of(*mvs)], 7)
    assert t.total == pytest.approx(1.0, abs=1e-9)
    assert quarter_fold(t).sum() == pytest.approx(1.0, abs=1e-9)
    m = marginals(t)
    assert m.ax.sum() == pytest.approx(1.0, abs=1e-9) and m.ay.sum() == pytest.approx(1.0, abs=1e-9)
    assert m.bx[7] == m.by[7] == t[(0, 0)]


def test_quarter_fold():
    t = ProbabilityTable.zeros(7)
    for p in [(1, 1), (-1, 1), (1, -1), (-1, -1)]:
        t.cells[p[1] + 7, p[0] + 7] = 0.25
    assert quarter_fold(t)[1, 1] == 1.0
    assert quarter_fold(ProbabilityTable.delta(7))[0, 0] == 1.0
    t = ProbabilityTable.zeros(7)
    t.cells[7, 7], t.cells[7, 5], t.cells[7, 9] = 0.6, 0.3, 0.1
    q = quarter_fold(t)
    assert q[0, 2] == pytest.approx(0.4) and q[0, 0] == pytest.approx(0.6)


def test_marginals_delta():
    m = marginals(ProbabilityTable.delta(7))
    for arr in (m.ax, m.ay, m.bx, m.by):
        assert arr[7] == 1.0 and arr.sum() == 1.0


def test_marginal_row_matches_published_cross_section():
    m = marginals(central_table())
    np.testing.assert_allclose(m.bx[5:10], [0.0151, 0.0718, 0.5805, 0.0562, 0.0440], atol=1e-12)
    assert m.bx[7] == m.by[7] == 0.5805


def test_regional_probs_published():
    got = regional_probs(published_table())
    expected = {"square5": 0.8745, "diamond5": 0.8557, "cross5": 0.8315, "square3": 0.7899, "flat": 0.8248}
    for k, v in expected.items():
        assert got[k] == pytest.approx(v, abs=1e-3)


def test_regional_probs_uniform_and_delta():
    got = regional_probs(ProbabilityTable.uniform(7))
    counts = {"square5": 25, "diamond5": 13, "cross5": 9, "square3": 9, "flat": 7}
    for k, n in counts.items():
        assert got[k] == pytest.approx(n / 225)
    assert all(v == 1.0 for v in regional_probs(ProbabilityTable.delta(7)).values())


def test_search_efficiency():
    t = published_table()
    assert search_efficiency(t, offsets_of(PatternKind.HCSP)) == pytest.approx(0.1178, abs=1e-4)
    assert search_efficiency(t, offsets_of(PatternKind.CROSS5)) == pytest.approx(0.0924, abs=1e-4)
    u = ProbabilityTable.uniform(7)
    assert search_efficiency(u, offsets_of(PatternKind.SQUARE3)) == pytest.approx(1 / 225)
    with pytest.raises(ValueError):
        search_efficiency(u, [(8, 0)])


def test_table_serialisation_round_trip():
    t = published_table()
    back = ProbabilityTable.from_json(t.to_json())
    np.testing.assert_array_equal(back.cells, t.cells)
    assert json.loads(t.to_json())["range"] == 7
    csv = t.to_csv()
    assert csv.splitlines()[0].startswith("dy,-7,")
    np.testing.assert_allclose(ProbabilityTable.from_csv(csv).cells, t.cells, atol=5e-7)


def test_table_rejects_bad_cells():
    with pytest.raises(ValueError):
        ProbabilityTable(7, np.zeros((3, 3)))
    with pytest.raises(ValueError):
        ProbabilityTable(1, -np.ones((3, 3)))


def test_normal_fit_delta():
    y = np.zeros(15)
    y[7] = 1.0
    f = normal_fit(y)
    assert f.mu == 0 and f.sigma == 0


def test_normal_fit_symmetric():
    d = np.arange(-7, 8)
    y = np.exp(-np.abs(d))
    y /= y.sum()
    assert abs(normal_fit(y).mu) < 1e-9


@pytest.mark.parametrize("mu, sigma", [(0.0667, 0.206), (0.3, 1.5), (-1.2, 0.8)])
def test_normal_fit_round_trip(mu, sigma):
    d = np.arange(-7, 8)
    y = norm.pdf(d, mu, sigma)
    y /= y.sum()
    f = normal_fit(y)
    assert f.mu == pytest.approx(mu, abs=1e-3)
    assert f.sigma == pytest.approx(sigma, abs=1e-3)
    assert f.residual < 1e-12


def ideal_records(true_mvs, r=7):
    records = []
    for mv in true_mvs:
        s = IdealSurface(MotionVector(*mv), r)
        grid = np.array([[s(dx, dy) for dx in range(-r, r + 1)] for dy in range(-r, r + 1)])
        records.append(BlockRecord(r, grid))
    return records


def test_prior_conditional_delta():
    blocks = ideal_records([(2, 0)] * 5)
    t = prior_conditional(blocks, offsets_of(PatternKind.CROSS5), (2, 0))
    assert t[(2, 0)] == 1.0
    with pytest.raises(EmptyConditionError):
        prior_conditional(blocks, offsets_of(PatternKind.CROSS5), (0, 1))
    with pytest.raises(ValueError):
        prior_conditional(blocks, offsets_of(PatternKind.CROSS5), (1, 1))


def test_prior_conditional_zeros_on_costlier_covered_cells():
    cfg = SearchConfig()
    frames = list(synth_sequence("noise", 64, 64, 6, seed=2))
    blocks = []
    for a, b in zip(frames, frames[1:]):
        blocks += collect_block_records(b, a, cfg)
    cross = offsets_of(PatternKind.CROSS5)
    for cond in cross:
        try:
            t = prior_conditional(blocks, cross, cond)
        except EmptyConditionError:
            continue
        # any block whose true MV sits on S at a position other than P would have
        # made that position the step-1 minimum instead of P
        for p in cross:
            if p != cond:
                assert t[p] == 0.0


def test_posterior_conditional():
    square5 = [(x, y) for y in range(-2, 3) for x in range(-2, 3)]
    t = posterior_conditional(ideal_records([(5, 0)] * 3), square5, [(5, 0)])
    assert t[(2, 0)] == 1.0
    inside = ideal_records([(1, -1)])
    assert posterior_conditional(inside, square5, [(1, -1)])[(1, -1)] == 1.0
    mixed = ideal_records([(0, 0), (3, 3), (-6, 2), (1, 0)])
    window = [(x, y) for y in range(-7, 8) for x in range(-7, 8)]
    assert posterior_conditional(mixed, square5, window).total == pytest.approx(1.0)
    with pytest.raises(EmptyConditionError):
        posterior_conditional(mixed, square5, [(7, 7)])


def test_collect_records_interior_translation():
    cfg = SearchConfig()
    frames = list(synth_sequence("translate", 96, 96, 2, dx=2, dy=0))
    blocks = collect_block_records(frames[1], frames[0], cfg, interior_origins(frames[0], cfg))
    assert blocks and all(b.true_mv == (2, 0) for b in blocks)
    t = mv_histogram([field_of(*[b.true_mv for b in blocks])], 7)
    assert marginals(t).bx[9] == pytest.approx(1.0)
