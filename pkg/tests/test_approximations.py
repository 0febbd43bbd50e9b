import math

import numpy as np
import pytest

from spinstar.approximations import (ApproxParams, markov_kernel_check, nz2_closed, nz2_curve, nz2_numeric,
                                     tcl2, tcl2_closed)
from spinstar.bath import BathSpec
from spinstar.dynamics import exact_curve
from spinstar.errors import DomainError


def test_params():
    assert ApproxParams.from_bath(BathSpec.from_pairs([(4, 0.5), (2, 1.0)])).delta == pytest.approx(3.0)
    assert ApproxParams(2.0).omega1 == 1.0
    with pytest.raises(DomainError):
        ApproxParams(-1.0)


@pytest.mark.parametrize("delta", [0.0, 0.5, 1.0, 2.0])
def test_nz2_numeric_matches_closed(delta):
    ts = np.linspace(0, 10, 201)
    p = ApproxParams(delta)
    c = nz2_numeric(ts, p)
    fp, fz = nz2_closed(ts, p)
    assert np.max(np.abs(c.f_perp - fp)) <= 1e-6
    assert np.max(np.abs(c.f_z - fz)) <= 1e-6
    np.testing.assert_array_equal(nz2_curve(ts, p).f_z, fz)


def test_nz2_grid_checks():
    with pytest.raises(DomainError):
        nz2_numeric(np.array([0.0, 0.1, 0.3]), ApproxParams(1.0))
    with pytest.raises(DomainError):
        nz2_numeric(np.linspace(1, 2, 5), ApproxParams(1.0))


def test_tcl2_integrator_matches_gaussian():
    ts = np.linspace(0, 3, 61)
    p = ApproxParams(1.5)
    c = tcl2(ts, p)
    fp, fz = tcl2_closed(ts, p)
    np.testing.assert_allclose(c.f_perp, fp, atol=1e-11)
    np.testing.assert_allclose(c.f_z, fz, atol=1e-11)
    # the literal exponential is not a solution of the time-local equation
    lp, _ = tcl2_closed(ts, p, literal=True)
    assert np.max(np.abs(c.f_perp - lp)) > 0.1


def test_short_time_agreement_order_four():
    # all three share the t^2 coefficient, so errors scale as t^4
    bath = BathSpec.from_pairs([(4, math.sqrt(1.0 / 4))])
    ts = np.geomspace(1e-3, 1e-1, 15)
    e = exact_curve(bath, ts)
    p = ApproxParams.from_bath(bath)
    for approx in (nz2_closed(ts, p), tcl2_closed(ts, p)):
        for got, ref in zip(approx, (e.f_perp, e.f_z)):
            slope = np.polyfit(np.log(ts), np.log(np.abs(got - ref)), 1)[0]
            assert slope == pytest.approx(4.0, abs=0.2)


def test_markov_report():
    ts = np.linspace(0, 50, 501)
    r = markov_kernel_check(ApproxParams(0.7), ts)
    assert r.constant and r.diverges and not r.markov_limit_exists
    np.testing.assert_allclose(r.running_integral, 4 * 0.7 * ts, rtol=1e-12, atol=1e-12)
    z = markov_kernel_check(ApproxParams(0.0), ts)
    assert z.markov_limit_exists and not z.diverges
