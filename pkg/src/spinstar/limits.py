"""Infinite-bath limits: Dawson function, mixed finite/infinite layers and
the two-layer both-infinite limit.

With couplings rescaled as alpha -> alpha/sqrt(N), the per-layer quantity
alpha^2 h(j, m)/N becomes exponentially distributed with mean alpha^2/2.
Averages of cos(c sqrt(X)) over such laws reduce to the Dawson function:

    E[cos(c sqrt X)] = 1 - c sqrt(mu) D(c sqrt(mu) / 2),   X ~ Exp(mean mu)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate

from .bath import BathSpec, zeta_marginal, joint_distribution
from .errors import AccuracyError, DomainError, UnsupportedError

# below: e^{-x^2} sum x^{2n+1}/(n!(2n+1)), all terms positive, no cancellation;
# above: asymptotic series, whose smallest term is ~e^{-x^2} < 1e-15 there
DAWSON_CROSSOVER = 6.0
_ASYM_TERMS = 40
_QUAD = dict(limit=1000, epsabs=1e-13, epsrel=1e-12)


def _dawson_series(x):
    x2 = x * x
    term = x.copy()
    total = x.copy()
    n = 0
    while True:
        n += 1
        term = term * x2 / n
        inc = term / (2 * n + 1)
        total += inc
        if np.all(inc <= 1e-17 * total):
            break
    return np.exp(-x2) * total


def _dawson_asymptotic(x):
    # D(x) ~ 1/(2x) sum_k (2k-1)!! / (2x^2)^k
    y = 1.0 / (2.0 * x * x)
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, _ASYM_TERMS):
        nxt = term * (2 * k - 1) * y
        # stop each point once terms start growing (optimal truncation)
        keep = np.abs(nxt) < np.abs(term)
        term = np.where(keep, nxt, 0.0)
        total += term
        if not np.any(term):
            break
    return total / (2.0 * x)


def dawson(x):
    """D(x) = exp(-x^2) int_0^x exp(s^2) ds, odd in x."""
    xa = np.asarray(x, dtype=float)
    ax = np.abs(np.atleast_1d(xa))
    out = np.zeros_like(ax)
    small = (ax < DAWSON_CROSSOVER) & (ax > 0)
    big = ax >= DAWSON_CROSSOVER
    if np.any(small):
        out[small] = _dawson_series(ax[small])
    if np.any(big):
        out[big] = _dawson_asymptotic(ax[big])
    out = np.sign(np.atleast_1d(xa)) * out
    return float(out[0]) if xa.ndim == 0 else out


def exp_cos_average(c, mean):
    """E[cos(c sqrt X)] for X exponential with the given mean."""
    s = np.asarray(c, dtype=float) * math.sqrt(mean)
    return 1.0 - s * dawson(s / 2.0)


def g_z(t, alpha_inf):
    """1 - 2 sqrt(2) t alpha D(sqrt(2) t alpha): f_z of a single infinite layer."""
    return exp_cos_average(4.0 * np.asarray(t, dtype=float), alpha_inf**2 / 2.0)


def g_perp_branch(t, alpha_inf):
    """1 - sqrt(2) t alpha D(t alpha / sqrt(2)): one cos(2t sqrt(.)) branch."""
    return exp_cos_average(2.0 * np.asarray(t, dtype=float), alpha_inf**2 / 2.0)


# -- mixed finite / infinite ----------------------------------------------

@dataclass(frozen=True)
class MixedLimitSpec:
    """Finite layers kept exactly plus one layer taken to N -> infinity.

    ``infinite_coupling`` is already rescaled by 1/sqrt(N).
    """

    finite_layers: BathSpec | None
    infinite_coupling: float

    def __post_init__(self):
        if not math.isfinite(self.infinite_coupling):
            raise DomainError("infinite_coupling must be finite")


def _finite_z(spec):
    if spec.finite_layers is None:
        return np.zeros(1), np.ones(1)
    return zeta_marginal(spec.finite_layers)


def _finite_joint(spec):
    if spec.finite_layers is None:
        return np.zeros(1), np.zeros(1), np.ones(1)
    d = joint_distribution(spec.finite_layers)
    return d.zeta, d.eta, d.weight


def f_z_mixed(t, spec: MixedLimitSpec):
    """Finite average of cos(4t sqrt(zeta_fin)) times the Dawson envelope g_z(t)."""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    zeta, w = _finite_z(spec)
    out = (np.cos(4.0 * np.outer(ts, np.sqrt(zeta))) @ w) * g_z(ts, spec.infinite_coupling)
    return float(out[0]) if np.ndim(t) == 0 else out


def f_perp_mixed(t, spec: MixedLimitSpec):
    """Finite average of cos(2t sqrt zeta) cos(2t sqrt eta) times the resummed
    infinite-layer factor, one Dawson branch per cosine."""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    zeta, eta, w = _finite_joint(spec)
    fin = (np.cos(2.0 * np.outer(ts, np.sqrt(zeta))) * np.cos(2.0 * np.outer(ts, np.sqrt(eta)))) @ w
    out = fin * g_perp_branch(ts, spec.infinite_coupling) ** 2
    return float(out[0]) if np.ndim(t) == 0 else out


def perp_branch_series(t: float, alpha_inf: float, order: int):
    """Truncated sum_n (-2)^n t^{2n} n!/(2n)! alpha^{2n}; returns (value, first omitted term)."""
    x = -2.0 * (t * alpha_inf) ** 2

    def term(n):
        return x**n * math.factorial(n) / math.factorial(2 * n)

    return math.fsum(term(n) for n in range(order + 1)), abs(term(order + 1))


def f_perp_mixed_series(t: float, spec: MixedLimitSpec, order: int, tol: float | None = None):
    """Literal double (n, k) series over the infinite layer, truncated at n, k <= order.

    Returns ``(value, tail)``; raises AccuracyError when the tail exceeds ``tol``.
    """
    s, first = perp_branch_series(t, spec.infinite_coupling, order)
    zeta, eta, w = _finite_joint(spec)
    fin = float(np.dot(w, np.cos(2 * t * np.sqrt(zeta)) * np.cos(2 * t * np.sqrt(eta))))
    # truncating both sums: |s^2 - S^2| <= |S - s| (|S| + |s|)
    tail = abs(fin) * first * (2 * abs(s) + first)
    if tol is not None and tail > tol:
        raise AccuracyError(f"double-series tail {tail:.3g} above tolerance {tol:.3g}", bound=tail)
    return fin * s * s, tail


def f_z_convolved(t, spec: MixedLimitSpec):
    """Finite-N-consistent limit: E[cos(4t sqrt(zeta_fin + X))] with X ~ Exp(alpha^2/2).

    This is what the layer-factorized finite model converges to when one
    layer grows; it does not factor into finite part times envelope.
    """
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    zeta, w = _finite_z(spec)
    mean = spec.infinite_coupling**2 / 2.0
    out = np.array([sum(wk * _shifted_exp_cos(4.0 * tt, z, mean) for z, wk in zip(zeta, w))
                    for tt in ts])
    return float(out[0]) if np.ndim(t) == 0 else out


def _shifted_exp_cos(c, shift, mean, tol=1e-12):
    """E[cos(c sqrt(shift + X))], X ~ Exp(mean)."""
    if mean == 0.0 or c == 0.0:
        return math.cos(c * math.sqrt(shift))
    # substitute u = sqrt(shift + x): density 2u/mean exp(-(u^2 - shift)/mean)
    u0 = math.sqrt(shift)
    umax = math.sqrt(shift + mean * (-math.log(tol) + 5.0))
    val, err = integrate.quad(lambda u: 2.0 * u / mean * math.exp(-(u * u - shift) / mean),
                              u0, umax, weight="cos", wvar=c, **_QUAD)
    if err > 1e-9:
        raise AccuracyError(f"quadrature error {err:.3g} too large", bound=err)
    return val


# -- both layers infinite --------------------------------------------------

def _two(alphas):
    if len(alphas) != 2:
        raise UnsupportedError("the both-infinite limit is defined for exactly two layers")
    return float(alphas[0]), float(alphas[1])


def hypoexp_density(x, alphas):
    """Density of X1 + X2 with X_i ~ Exp(mean alpha_i^2 / 2)."""
    a1, a2 = _two(alphas)
    m1, m2 = a1 * a1 / 2, a2 * a2 / 2
    x = np.asarray(x, dtype=float)
    if m1 == 0.0 and m2 == 0.0:
        raise DomainError("degenerate law: both couplings vanish")
    if m1 == 0.0 or m2 == 0.0:
        m = max(m1, m2)
        return np.exp(-x / m) / m
    if math.isclose(m1, m2, rel_tol=1e-9):
        # equal means: Erlang(2) branch, the general form is 0/0 there
        m = (m1 + m2) / 2
        return x * np.exp(-x / m) / (m * m)
    return (np.exp(-x / m1) - np.exp(-x / m2)) / (m1 - m2)


def hypoexp_survival(x, alphas):
    a1, a2 = _two(alphas)
    m1, m2 = a1 * a1 / 2, a2 * a2 / 2
    if m1 == 0.0 or m2 == 0.0:
        return math.exp(-x / max(m1, m2))
    if math.isclose(m1, m2, rel_tol=1e-9):
        m = (m1 + m2) / 2
        return math.exp(-x / m) * (1 + x / m)
    return (m1 * math.exp(-x / m1) - m2 * math.exp(-x / m2)) / (m1 - m2)


def hypoexp_xmax(alphas, tail: float = 1e-12) -> float:
    """Smallest power-of-two multiple of the larger mean whose survival is <= tail."""
    a1, a2 = _two(alphas)
    m = max(a1 * a1, a2 * a2) / 2
    x = m
    while hypoexp_survival(x, alphas) > tail:
        x *= 2
    return x


def hypoexp_moment(l: int, alphas) -> float:
    """E[(X1 + X2)^l] by quadrature of the density."""
    xmax = hypoexp_xmax(alphas, 1e-16)
    val, _ = integrate.quad(lambda x: x**l * float(hypoexp_density(x, alphas)), 0, xmax,
                            limit=400, epsabs=0, epsrel=1e-13)
    return val


def both_infinite_cos(c: float, alphas, tail: float = 1e-12) -> float:
    """E[cos(c sqrt(X1 + X2))] by adaptive oscillatory quadrature on [0, sqrt(x_max)]."""
    a1, a2 = _two(alphas)
    if a1 == 0.0 and a2 == 0.0:
        return 1.0
    if c == 0.0:
        return 1.0
    umax = math.sqrt(hypoexp_xmax(alphas, tail))
    val, err = integrate.quad(lambda u: 2.0 * u * float(hypoexp_density(u * u, alphas)),
                              0.0, umax, weight="cos", wvar=c, **_QUAD)
    if not math.isfinite(val) or err > 1e-9:
        raise AccuracyError(f"quadrature did not converge (error estimate {err:.3g})", bound=err)
    return val


def both_infinite_series(t: float, alphas, order: int):
    """Truncated limit series with Omega_l, Gamma from the two-layer closed forms.

    Returns ``(f_perp, f_z, tail)`` where tail is the larger first-omitted term.
    """
    from .correlations import infinite_table, series_f_perp, series_f_z

    table = infinite_table(alphas, order + 1)
    sp = series_f_perp(t, table, order)
    sz = series_f_z(t, table, order)
    return sp.value, sz.value, max(sp.tail, sz.tail)


COHERENCE_LAWS = ("independent", "locked")


@dataclass(frozen=True)
class BothInfinite:
    f_perp: float
    f_z: float
    series_f_perp: float | None = None
    series_f_z: float | None = None
    series_tail: float | None = None
    consistent: bool | None = field(default=None)


def f_both_infinite(t: float, alphas: Sequence[float], law: str = "independent",
                    series_order: int = 30, series_tol: float = 1e-8) -> BothInfinite:
    """Both layers infinite. Quadrature is the primary value; the literal series
    is added whenever its tail is below ``series_tol``.

    ``law`` fixes how zeta and eta are joined in the limit: ``independent``
    treats them as independent copies (the closed-form Gamma limit);
    ``locked`` sets zeta = eta, which is what the finite layer-factorized
    model approaches as N grows.
    """
    _two(alphas)
    if law not in COHERENCE_LAWS:
        raise DomainError(f"unknown coherence law {law!r}")
    t = float(t)
    fz = both_infinite_cos(4.0 * t, alphas)
    if law == "locked":
        fp = 0.5 * (1.0 + fz)
    else:
        fp = both_infinite_cos(2.0 * t, alphas) ** 2
    sp, sz, tail = both_infinite_series(t, alphas, series_order)
    if tail > series_tol or not math.isfinite(tail):
        return BothInfinite(fp, fz)
    ok = abs(sz - fz) <= tail + 1e-9
    if law == "independent":
        ok = ok and abs(sp - fp) <= tail + 1e-9
    return BothInfinite(fp, fz, sp, sz, tail, ok)


def f_both_infinite_grid(times, alphas, law: str = "independent"):
    """Quadrature-only evaluation on a grid; returns (f_perp, f_z) arrays."""
    ts = np.atleast_1d(np.asarray(times, dtype=float))
    fz = np.array([both_infinite_cos(4.0 * t, alphas) for t in ts])
    if law == "locked":
        fp = 0.5 * (1.0 + fz)
    elif law == "independent":
        fp = np.array([both_infinite_cos(2.0 * t, alphas) for t in ts]) ** 2
    else:
        raise DomainError(f"unknown coherence law {law!r}")
    return fp, fz


def both_infinite_closed(c, alphas):
    """E[cos(c sqrt(X1+X2))] through Dawson functions (unequal means only).

    For the hypoexponential law the average is the mean-weighted difference
    of the two exponential averages; used to cross-check the quadrature.
    """
    a1, a2 = _two(alphas)
    m1, m2 = a1 * a1 / 2, a2 * a2 / 2
    if math.isclose(m1, m2, rel_tol=1e-9):
        raise DomainError("closed form needs distinct couplings")
    return (m1 * exp_cos_average(c, m1) - m2 * exp_cos_average(c, m2)) / (m1 - m2)
