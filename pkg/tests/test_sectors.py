import numpy as np
import pytest

from spinstar.bath import BathSpec
from spinstar.dynamics import exact_curve
from spinstar.oracle import oracle_f
from spinstar.sectors import sector_curve

TS = np.arange(0, 10.0001, 0.05)


@pytest.mark.parametrize("pairs", [[(1, 1.0), (1, 0.5)], [(3, 0.1), (2, 1.0)], [(4, 0.5), (4, 1.0)],
                                   [(2, 0.3), (2, 0.6), (1, 1.0)]])
def test_sector_matches_oracle(pairs):
    bath = BathSpec.from_pairs(pairs)
    s, o = sector_curve(bath, TS), oracle_f(bath, TS, blocked=True)
    assert np.max(np.abs(s.f_z - o.f_z)) <= 1e-10
    assert np.max(np.abs(s.f_perp - o.f_perp)) <= 1e-10


def test_sector_single_layer_equals_closed_form():
    bath = BathSpec.from_pairs([(12, 0.2)])
    s, e = sector_curve(bath, TS), exact_curve(bath, TS)
    assert np.max(np.abs(s.f_z - e.f_z)) <= 1e-11
    assert np.max(np.abs(s.f_perp - e.f_perp)) <= 1e-11


def test_sector_bounded_large_bath():
    s = sector_curve(BathSpec.from_pairs([(12, 0.1), (12, 0.1)]), np.linspace(0, 20, 81))
    assert s.f_z[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.abs(s.f_z) <= 1 + 1e-12) and np.all(np.abs(s.f_perp) <= 1 + 1e-12)
