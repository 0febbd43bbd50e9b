import numpy as np
import pytest

from spinstar.approximations import ApproxParams, tcl2_closed
from spinstar.bath import BathSpec
from spinstar.dynamics import BlochVector, exact_curve, reduced_state
from spinstar.errors import ResourceError
from spinstar.oracle import (build_hamiltonian, hamiltonian_sparse, magnetization, oracle_f,
                             reconstruction_error, verify_state_properties)

T3 = np.array([0.1, 0.5, 1.0])


def test_frozen_single_spin():
    c = oracle_f(BathSpec.from_pairs([(1, 1.0)]), T3)
    np.testing.assert_allclose(c.f_z, [0.9605304970014423, 0.29192658172642894, 0.1731781895681942],
                               atol=1e-14)
    np.testing.assert_allclose(c.f_perp, [0.9800665778412414, 0.5403023058681397, -0.4161468365471423],
                               atol=1e-14)


def test_hamiltonian_structure():
    bath = BathSpec.from_pairs([(2, 0.3), (2, 0.8)])
    h = build_hamiltonian(bath)
    np.testing.assert_array_equal(h, h.T)
    m = np.diag(magnetization(bath.total_spins + 1))
    # flip-flop coupling conserves total magnetization
    assert np.max(np.abs(h @ m - m @ h)) == 0.0
    np.testing.assert_array_equal(hamiltonian_sparse(bath).toarray(), h)


def test_reconstruction():
    assert reconstruction_error(BathSpec.from_pairs([(3, 0.5), (3, 1.0)])) <= 1e-11


@pytest.mark.parametrize("pairs", [[(1, 0.5)], [(3, 1.0)], [(6, 0.1)], [(2, 0.5), (3, 1.0)]])
def test_oracle_even_and_bounded(pairs):
    bath = BathSpec.from_pairs(pairs)
    ts = np.linspace(0, 4, 41)
    c, cm = oracle_f(bath, ts), oracle_f(bath, -ts)
    np.testing.assert_allclose(c.f_z, cm.f_z, atol=1e-13)
    np.testing.assert_allclose(c.f_perp, cm.f_perp, atol=1e-13)
    assert c.f_z[0] == pytest.approx(1, abs=1e-13) and c.f_perp[0] == pytest.approx(1, abs=1e-13)
    assert np.all(np.abs(c.f_z) <= 1 + 1e-12)


@pytest.mark.parametrize("pairs", [[(5, 0.5)], [(2, 0.1), (3, 1.0)], [(4, 0.5), (4, 1.0)]])
def test_blocked_matches_dense(pairs):
    bath = BathSpec.from_pairs(pairs)
    ts = np.linspace(0, 5, 51)
    a, b = oracle_f(bath, ts), oracle_f(bath, ts, blocked=True)
    np.testing.assert_allclose(a.f_z, b.f_z, atol=1e-12)
    np.testing.assert_allclose(a.f_perp, b.f_perp, atol=1e-12)


@pytest.mark.parametrize("n,a", [(2, 0.5), (4, 1.0), (7, 0.1)])
def test_single_layer_closed_form_equals_oracle(n, a):
    bath = BathSpec.from_pairs([(n, a)])
    ts = np.arange(0, 10.0001, 0.05)
    o, e = oracle_f(bath, ts), exact_curve(bath, ts)
    assert np.max(np.abs(o.f_z - e.f_z)) <= 1e-11
    assert np.max(np.abs(o.f_perp - e.f_perp)) <= 1e-11


def test_size_cap():
    with pytest.raises(ResourceError):
        build_hamiltonian(BathSpec.from_pairs([(15, 0.1)]))
    with pytest.raises(ResourceError):
        oracle_f(BathSpec.from_pairs([(21, 0.1)]), [0.0], blocked=True)


def test_state_properties_along_oracle_trajectory():
    bath = BathSpec.from_pairs([(3, 0.5), (2, 1.0)])
    ts = np.linspace(0, 10, 101)
    c = oracle_f(bath, ts)
    b0 = BlochVector(0.6, 0.0, 0.8)
    rhos = [reduced_state(BlochVector(*w)) for w in c.bloch(b0)]
    assert verify_state_properties(rhos, ts)


def test_state_properties_flags_literal_tcl_control():
    # the Gaussian solution stays a state; a deliberately broken one is caught
    p = ApproxParams(1.0)
    ts = np.linspace(0, 3, 31)
    fp, fz = tcl2_closed(ts, p)
    ok = [reduced_state(BlochVector(0.6 * x, 0, 0.8 * z)) for x, z in zip(fp, fz)]
    assert verify_state_properties(ok, ts)
    bad = [reduced_state(BlochVector(0.9 * x, 0, 0.8 * z)) for x, z in zip(fp, fz)]
    rep = verify_state_properties(bad, ts)
    assert not rep and rep.failures[0][1] == "eigenvalue"
    skew = np.array([[0.5, 0.2], [0.0, 0.5]])
    assert verify_state_properties([skew]).failures[0][1] == "hermiticity"
