"""Bath correlation functions and the short-time series built from them.

    Omega_l        = 2^-N tr (Xi_+ Xi_-)^l
    Gamma_n^{l-n}  = 2^-N tr (Xi_+ Xi_-)^{l-n} (Xi_- Xi_+)^n

None of these carries a time argument. Three sources are available: moments
of the layer-factorized (zeta, eta) measure, dense brute-force traces, and the
two-layer N -> infinity closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import sparse

from .bath import BathSpec, JointDistribution
from .errors import AccuracyError, DomainError, ResourceError, UnsupportedError

BRUTEFORCE_CAP = 12
SOURCES = ("moment", "bruteforce", "infinite")


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    """``omegas[l]`` is Omega_l and ``gammas[l, n]`` is Gamma_n^{l-n} (zero for n > l)."""

    omegas: np.ndarray
    gammas: np.ndarray
    source: str

    def __post_init__(self):
        if self.source not in SOURCES:
            raise DomainError(f"unknown correlation source {self.source!r}")
        k = len(self.omegas)
        if np.shape(self.gammas) != (k, k):
            raise DomainError(f"gammas must have shape ({k}, {k}), got {np.shape(self.gammas)}")

    @property
    def max_order(self) -> int:
        return len(self.omegas) - 1


# -- moments of the factorized measure ------------------------------------

def omega_moment(l: int, dist: JointDistribution) -> float:
    """<zeta^l> under the joint distribution."""
    zeta, w = dist.zeta_marginal
    return float(np.dot(w, zeta**l))


def gamma_moment(l: int, n: int, dist: JointDistribution) -> float:
    """<zeta^(l-n) eta^n>."""
    _check_ln(l, n)
    return float(np.dot(dist.weight, dist.zeta ** (l - n) * dist.eta**n))


def moment_table(dist: JointDistribution, max_order: int) -> CorrelationTable:
    omegas = np.array([omega_moment(l, dist) for l in range(max_order + 1)])
    gammas = np.zeros((max_order + 1, max_order + 1))
    for l in range(max_order + 1):
        for n in range(l + 1):
            gammas[l, n] = gamma_moment(l, n, dist)
    return CorrelationTable(omegas, gammas, "moment")


def _check_ln(l, n):
    if l < 0 or n < 0 or n > l:
        raise DomainError(f"need 0 <= n <= l, got l={l}, n={n}")


# -- brute force -----------------------------------------------------------

def xi_plus(bath: BathSpec) -> sparse.csr_matrix:
    """sum_mu alpha_mu J_+^mu on the 2^N bath space (bit k = bath spin k up)."""
    n = bath.total_spins
    if n > BRUTEFORCE_CAP:
        raise ResourceError(f"brute-force traces limited to N <= {BRUTEFORCE_CAP} (got {n})")
    dim = 2**n
    alphas = np.concatenate([np.full(l.spin_count, l.coupling) for l in bath.layers])
    states = np.arange(dim)
    rows, cols, vals = [], [], []
    for k, a in enumerate(alphas):
        src = states[(states >> k) & 1 == 0]
        rows.append(src | (1 << k))
        cols.append(src)
        vals.append(np.full(len(src), a))
    return sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim))


def _blocks(bath):
    """Dense (Xi_+ Xi_-, Xi_- Xi_+) restricted to each magnetization sector."""
    xp = xi_plus(bath)
    xm = xp.T.tocsr()
    pm = (xp @ xm).tocsr()
    mp = (xm @ xp).tocsr()
    n = bath.total_spins
    ups = np.array([bin(s).count("1") for s in range(2**n)])
    for k in range(n + 1):
        idx = np.nonzero(ups == k)[0]
        yield pm[idx][:, idx].toarray(), mp[idx][:, idx].toarray()


def gamma_bruteforce(l: int, n: int, bath: BathSpec) -> float:
    _check_ln(l, n)
    total = 0.0
    for pm, mp in _blocks(bath):
        total += np.trace(np.linalg.matrix_power(pm, l - n) @ np.linalg.matrix_power(mp, n))
    return float(total / 2**bath.total_spins)


def omega_bruteforce(l: int, bath: BathSpec) -> float:
    return gamma_bruteforce(l, 0, bath)


def bruteforce_table(bath: BathSpec, max_order: int) -> CorrelationTable:
    blocks = list(_blocks(bath))
    norm = 2.0**bath.total_spins
    gammas = np.zeros((max_order + 1, max_order + 1))
    for pm, mp in blocks:
        pp = [np.eye(len(pm))]
        qq = [np.eye(len(mp))]
        for _ in range(max_order):
            pp.append(pp[-1] @ pm)
            qq.append(qq[-1] @ mp)
        for l in range(max_order + 1):
            for n in range(l + 1):
                gammas[l, n] += np.einsum("ij,ji->", pp[l - n], qq[n])
    gammas /= norm
    return CorrelationTable(gammas[:, 0].copy(), gammas, "bruteforce")


# -- two-layer infinite-N limit -------------------------------------------

def _two(alphas):
    if len(alphas) != 2:
        raise UnsupportedError("infinite-N correlation functions are only known for two layers")
    return float(alphas[0]), float(alphas[1])


def omega_infinite(l: int, alphas: Sequence[float]) -> float:
    """sum_k C(l,k) (l-k)! k! a1^{2(l-k)} a2^{2k} / 2^l for rescaled couplings."""
    a1, a2 = _two(alphas)
    return math.fsum(math.comb(l, k) * math.factorial(l - k) * math.factorial(k)
                     * a1 ** (2 * (l - k)) * a2 ** (2 * k) for k in range(l + 1)) / 2**l


def gamma_infinite(l: int, n: int, alphas: Sequence[float]) -> float:
    """Double sum over k <= n, k' <= l-n; equals Omega_n * Omega_{l-n} of the limit."""
    _check_ln(l, n)
    a1, a2 = _two(alphas)
    terms = []
    for k in range(n + 1):
        for kp in range(l - n + 1):
            terms.append(math.comb(n, k) * math.comb(l - n, kp)
                         * math.factorial(n - k) * math.factorial(l - n - kp)
                         * math.factorial(k) * math.factorial(kp)
                         * a1 ** (2 * (n - k) + 2 * (l - n - kp)) * a2 ** (2 * (k + kp)))
    return math.fsum(terms) / 2**l


def infinite_table(alphas: Sequence[float], max_order: int) -> CorrelationTable:
    omegas = np.array([omega_infinite(l, alphas) for l in range(max_order + 1)])
    gammas = np.zeros((max_order + 1, max_order + 1))
    for l in range(max_order + 1):
        for n in range(l + 1):
            gammas[l, n] = gamma_infinite(l, n, alphas)
    return CorrelationTable(omegas, gammas, "infinite")


# -- series ----------------------------------------------------------------

@dataclass(frozen=True)
class SeriesValue:
    value: float
    tail: float

    def __float__(self):
        return self.value


def _z_term(l, t, table):
    return (-16.0) ** l * t ** (2 * l) / math.factorial(2 * l) * table.omegas[l]


def _perp_term(l, t, table):
    inner = math.fsum(math.comb(2 * l, 2 * n) * table.gammas[l, n] for n in range(l + 1))
    return (-4.0) ** l * t ** (2 * l) / math.factorial(2 * l) * inner


def _series(term, t, table, order, tol):
    if order < 0:
        raise DomainError("series order must be non-negative")
    if table.max_order < order + 1:
        raise DomainError(f"table of order {table.max_order} cannot bound a series of order {order}")
    terms = [term(l, t, table) for l in range(order + 1)]
    value = math.fsum(terms)
    tail = abs(term(order + 1, t, table)) + np.finfo(float).eps * math.fsum(abs(x) for x in terms)
    if tol is not None and tail > tol:
        raise AccuracyError(f"series tail {tail:.3g} exceeds tolerance {tol:.3g} at t={t}", bound=tail)
    return SeriesValue(value, tail)


def series_f_z(t: float, table: CorrelationTable, order: int, tol: float | None = None) -> SeriesValue:
    """sum_{l<=order} (-16)^l t^{2l} Omega_l / (2l)!, with the first omitted term as tail."""
    return _series(_z_term, float(t), table, order, tol)


def series_f_perp(t: float, table: CorrelationTable, order: int, tol: float | None = None) -> SeriesValue:
    """sum_l (-4)^l t^{2l}/(2l)! sum_n C(2l, 2n) Gamma_n^{l-n}."""
    return _series(_perp_term, float(t), table, order, tol)
