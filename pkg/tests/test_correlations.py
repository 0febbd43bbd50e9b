import math

import numpy as np
import pytest

from spinstar.bath import BathSpec, joint_distribution
from spinstar.correlations import (CorrelationTable, bruteforce_table, gamma_bruteforce, gamma_infinite,
                                   gamma_moment, infinite_table, moment_table, omega_bruteforce,
                                   omega_infinite, omega_moment, series_f_perp, series_f_z, xi_plus)
from spinstar.dynamics import exact_curve
from spinstar.errors import AccuracyError, DomainError, ResourceError, UnsupportedError
from spinstar.oracle import oracle_f


def test_omega1_is_half_delta():
    rng = np.random.default_rng(1)
    for _ in range(10):
        pairs = [(int(rng.integers(1, 8)), float(rng.uniform(0, 1.5))) for _ in range(rng.integers(1, 4))]
        d = joint_distribution(BathSpec.from_pairs(pairs))
        assert omega_moment(1, d) == pytest.approx(0.5 * sum(a * a * n for n, a in pairs), abs=1e-14)


def test_frozen_bruteforce_values(two_single_spins):
    assert gamma_bruteforce(2, 1, two_single_spins) == pytest.approx(1.0, abs=1e-14)
    assert omega_bruteforce(2, two_single_spins) == pytest.approx(2.0, abs=1e-14)
    assert omega_bruteforce(1, BathSpec.from_pairs([(2, 1.0)])) == pytest.approx(1.0, abs=1e-14)


def test_product_measure_differs_across_layers(two_single_spins):
    # the per-layer product measure misses cross-layer coherence
    d = joint_distribution(two_single_spins)
    assert omega_moment(2, d) == pytest.approx(1.5, abs=1e-14)
    assert gamma_moment(2, 1, d) == pytest.approx(0.5, abs=1e-14)


@pytest.mark.parametrize("n", range(1, 9))
def test_single_layer_moments_equal_bruteforce(n):
    bath = BathSpec.from_pairs([(n, 0.7)])
    m = moment_table(joint_distribution(bath), 4)
    b = bruteforce_table(bath, 4)
    np.testing.assert_allclose(m.omegas, b.omegas, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(m.gammas, b.gammas, rtol=1e-12, atol=1e-12)


def test_gamma_symmetry_bruteforce():
    bath = BathSpec.from_pairs([(3, 0.5), (2, 1.0)])
    for l in range(5):
        for n in range(l + 1):
            assert gamma_bruteforce(l, n, bath) == pytest.approx(gamma_bruteforce(l, l - n, bath), abs=1e-12)


def test_xi_plus_cap():
    with pytest.raises(ResourceError):
        xi_plus(BathSpec.from_pairs([(13, 0.1)]))
    with pytest.raises(DomainError):
        gamma_moment(2, 3, joint_distribution(BathSpec.from_pairs([(1, 1.0)])))


def test_infinite_closed_forms():
    a = (0.7, 1.3)
    # Omega_l = E[(X1+X2)^l], X_i ~ Exp(a_i^2 / 2)
    for l in range(7):
        m1, m2 = a[0] ** 2 / 2, a[1] ** 2 / 2
        ref = sum(math.comb(l, k) * math.factorial(k) * m1**k * math.factorial(l - k) * m2 ** (l - k)
                  for k in range(l + 1))
        assert omega_infinite(l, a) == pytest.approx(ref, rel=1e-14)
        for n in range(l + 1):
            assert gamma_infinite(l, n, a) == pytest.approx(omega_infinite(n, a) * omega_infinite(l - n, a),
                                                            rel=1e-13)
    with pytest.raises(UnsupportedError):
        omega_infinite(2, (1.0,))


def test_finite_moments_converge_to_infinite_limit():
    a = 1.0
    errs = []
    for n in (25, 100, 400):
        s = a / math.sqrt(n)
        d = joint_distribution(BathSpec.from_pairs([(n, s)]))
        errs.append(abs(omega_moment(4, d) - math.factorial(4) * (a * a / 2) ** 4))
        # second moment already agrees at finite N
        assert omega_moment(2, d) == pytest.approx(0.5, abs=1e-14)
    assert errs[0] > errs[1] > errs[2] and errs[2] < 0.011


def test_series_matches_dynamics_with_bruteforce_table():
    bath = BathSpec.from_pairs([(2, 0.5), (2, 1.0)])
    table = bruteforce_table(bath, 41)
    o = oracle_f(bath, [0.4, 0.8])
    for i, t in enumerate([0.4, 0.8]):
        sz, sp = series_f_z(t, table, 40, 1e-8), series_f_perp(t, table, 40, 1e-8)
        assert abs(sz.value - o.f_z[i]) <= 1e-9 + sz.tail
        assert abs(sp.value - o.f_perp[i]) <= 1e-9 + sp.tail


def test_series_matches_closed_form_with_moment_table():
    bath = BathSpec.from_pairs([(5, 0.4), (3, 0.9)])
    d = joint_distribution(bath)
    table = moment_table(d, 41)
    c = exact_curve(bath, [0.5], d)
    assert series_f_z(0.5, table, 40).value == pytest.approx(c.f_z[0], abs=1e-10)
    assert series_f_perp(0.5, table, 40).value == pytest.approx(c.f_perp[0], abs=1e-10)


def test_series_tail_and_errors():
    table = moment_table(joint_distribution(BathSpec.from_pairs([(4, 1.0)])), 6)
    with pytest.raises(AccuracyError) as exc:
        series_f_z(3.0, table, 5, tol=1e-8)
    assert exc.value.bound > 1e-8
    with pytest.raises(DomainError):
        series_f_z(0.1, table, 6)
    small = series_f_z(0.01, table, 5)
    large = series_f_z(0.5, table, 5)
    assert small.tail < large.tail
    with pytest.raises(DomainError):
        CorrelationTable(np.zeros(3), np.zeros((2, 2)), "moment")
