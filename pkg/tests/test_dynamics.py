import math

import numpy as np
import pytest

from spinstar.bath import BathSpec, joint_distribution
from spinstar.dynamics import (BlochVector, DecoherenceCurve, bloch_of_state, entropy, evolve,
                               exact_curve, f_perp, f_z, reduced_state)
from spinstar.errors import DomainError

TS = np.linspace(0, 5, 101)


def test_single_spin_closed_form():
    d = joint_distribution(BathSpec.from_pairs([(1, 1.0)]))
    np.testing.assert_allclose(f_z(TS, d), np.cos(2 * TS) ** 2, atol=1e-15)
    np.testing.assert_allclose(f_perp(TS, d), np.cos(2 * TS), atol=1e-15)


def test_two_layer_product_measure_by_hand():
    a, b = 0.3, 0.7
    d = joint_distribution(BathSpec.from_pairs([(1, a), (1, b)]))
    r = math.hypot(a, b)
    fz = 0.25 * (np.cos(4 * TS * r) + np.cos(4 * TS * a) + np.cos(4 * TS * b) + 1)
    fp = 0.5 * (np.cos(2 * TS * r) + np.cos(2 * TS * a) * np.cos(2 * TS * b))
    np.testing.assert_allclose(f_z(TS, d), fz, atol=1e-14)
    np.testing.assert_allclose(f_perp(TS, d), fp, atol=1e-14)


def test_scalar_and_initial_value():
    d = joint_distribution(BathSpec.from_pairs([(6, 0.4), (3, 0.2)]))
    assert f_z(0.0, d) == pytest.approx(1.0, abs=1e-15)
    assert f_perp(0.0, d) == pytest.approx(1.0, abs=1e-15)
    assert isinstance(f_z(0.3, d), float)
    c = exact_curve(d.bath, TS, d)
    assert np.all(np.abs(c.f_z) <= 1 + 1e-12) and np.all(np.abs(c.f_perp) <= 1 + 1e-12)


def test_even_in_time():
    d = joint_distribution(BathSpec.from_pairs([(5, 0.5)]))
    np.testing.assert_allclose(f_z(-TS, d), f_z(TS, d), atol=1e-15)
    np.testing.assert_allclose(f_perp(-TS, d), f_perp(TS, d), atol=1e-15)


def test_evolve_scales_components():
    d = joint_distribution(BathSpec.from_pairs([(4, 0.5)]))
    b0 = BlochVector(0.6, -0.3, 0.5)
    b = evolve(b0, 0.7, d)
    fp, fz = f_perp(0.7, d), f_z(0.7, d)
    assert (b.w1, b.w2, b.w3) == pytest.approx((0.6 * fp, -0.3 * fp, 0.5 * fz), abs=1e-15)
    curve = exact_curve(d.bath, [0.7], d)
    np.testing.assert_allclose(curve.bloch(b0)[0], b.as_array(), atol=1e-15)


def test_reduced_state_round_trip():
    rng = np.random.default_rng(5)
    for _ in range(50):
        v = rng.normal(size=3)
        v *= rng.uniform() / np.linalg.norm(v)
        b = BlochVector(*v)
        rho = reduced_state(b)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-15)
        np.testing.assert_allclose(rho, rho.conj().T, atol=0)
        assert np.min(np.linalg.eigvalsh(rho)) >= -1e-15
        np.testing.assert_allclose(bloch_of_state(rho).as_array(), v, atol=1e-15)
        assert b.w_plus == pytest.approx(complex(v[0], v[1]) / 2)


def test_bloch_of_state_rejects_non_hermitian():
    with pytest.raises(DomainError):
        bloch_of_state(np.array([[0.5, 0.1], [0.3, 0.5]]))
    with pytest.raises(DomainError):
        bloch_of_state(np.eye(3))


def test_entropy_values():
    assert entropy(1.0) == 0.0
    assert entropy(0.0) == pytest.approx(math.log(2), abs=1e-15)
    assert entropy(0.5) == pytest.approx(0.5623351446188083, abs=1e-13)
    with pytest.raises(DomainError):
        entropy(1.1)
    with pytest.raises(DomainError):
        entropy(-0.1)


def test_curve_method_tag():
    with pytest.raises(DomainError):
        DecoherenceCurve(TS, TS, TS, "bogus")
