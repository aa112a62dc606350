import json

import numpy as np
import pytest

from blockmatch.core import MotionVector
from blockmatch.idealsim import (
    IdealSurface,
    RegionWeights,
    ansp,
    concentric_regions,
    ideal_cost,
    ideal_search,
    nsp_map,
)
from blockmatch.mvstats import ProbabilityTable, published_table
from blockmatch.search import Algorithm


def test_ideal_cost():
    s = IdealSurface(MotionVector(3, 4), 7)
    assert ideal_cost(s, (3, 4)) == 0
    assert ideal_cost(s, (0, 0)) == 5.0
    t = IdealSurface(MotionVector(2, 0), 7)
    assert ideal_cost(t, (1, 0)) == ideal_cost(t, (3, 0)) == 1.0
    assert t(8, 0) is None
    with pytest.raises(ValueError):
        IdealSurface(MotionVector(8, 0), 7)


def test_dcds_map_row_zero():
    m = nsp_map(Algorithm.DCDS, 7)
    assert m.counts[0].tolist() == [7, 10, 11, 11, 15, 15, 17, 17]
    assert m.at(2, 1) == 14
    assert not m.failures()


def test_fs_map_constant():
    m = nsp_map(Algorithm.FS, 7)
    assert (m.counts == 225).all() and m.found.all()


def test_cds_center():
    assert nsp_map(Algorithm.CDS, 7).at(0, 0) == 9


def test_full_map_symmetry_of_dcds():
    # reflecting the true vector horizontally mirrors the search exactly
    full = nsp_map(Algorithm.DCDS, 7, full=True)
    quarter = nsp_map(Algorithm.DCDS, 7)
    for dy in range(8):
        for dx in range(8):
            assert full.at(dx, dy) == quarter.at(dx, dy)


def test_map_csv():
    lines = nsp_map(Algorithm.TSS, 7).to_csv().splitlines()
    assert lines[0] == "dy,0,1,2,3,4,5,6,7"
    assert lines[1] == "0," + ",".join(["25"] * 8)
    assert len(lines) == 9


def test_ansp_delta_and_uniform():
    m = nsp_map(Algorithm.DCDS, 7)
    assert ansp(m, ProbabilityTable.delta(7)) == 7
    full = nsp_map(Algorithm.DCDS, 7, full=True)
    assert ansp(full, ProbabilityTable.uniform(7)) == pytest.approx(full.counts.mean())


def test_ansp_published_distribution():
    assert ansp(nsp_map(Algorithm.DCDS, 7), published_table()) == pytest.approx(9.7, abs=0.5)


def test_ansp_range_mismatch():
    with pytest.raises(ValueError):
        ansp(nsp_map(Algorithm.DCDS, 3), published_table())


def test_region_weights_round_trip():
    rw = concentric_regions(7)
    back = RegionWeights.from_json(rw.to_json())
    np.testing.assert_array_equal(back.to_table().cells, rw.to_table().cells)
    assert rw.to_table().total == pytest.approx(1.0)
    assert rw.to_table()[(0, 0)] == pytest.approx(0.4)


def test_region_weights_malformed():
    with pytest.raises(ValueError):
        RegionWeights(7, np.zeros((3, 3)), {"0": 1.0})
    with pytest.raises(ValueError):
        RegionWeights(1, np.zeros((3, 3), dtype=int), {"0": 0.5, "9": 0.5})
    with pytest.raises((KeyError, json.JSONDecodeError)):
        RegionWeights.from_json('{"range": 7}')


def test_ring_ansp_ordering():
    rings = concentric_regions(7)
    dcds = ansp(nsp_map(Algorithm.DCDS, 7), rings)
    assert dcds < ansp(nsp_map(Algorithm.TSS, 7), rings) == 25


def test_ideal_search_finds_every_placement():
    for dy in range(-7, 8):
        for dx in range(-7, 8):
            out = ideal_search(Algorithm.DCDS, (dx, dy))
            assert out.mv == (dx, dy) and out.final_cost == 0
