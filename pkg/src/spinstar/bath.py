"""Angular-momentum sectors of a layered spin-1/2 bath and the joint
distribution of the effective frequencies (zeta, eta).

Quantum numbers are stored doubled (``j2 = 2j``, ``m2 = 2m``) so that
half-integer values stay exact integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.signal import fftconvolve

from .errors import DomainError, ResourceError

DEFAULT_ENTRY_CAP = 50_000_000
# Largest integer lattice (in units of the common coupling quantum) on which
# the zeta marginal is convolved densely with FFTs.
LATTICE_CAP = 20_000_000
_INT64_SAFE = 2**62


@dataclass(frozen=True)
class LayerSpec:
    spin_count: int
    coupling: float

    def __post_init__(self):
        if int(self.spin_count) != self.spin_count or self.spin_count < 1:
            raise DomainError(f"spin_count must be a positive integer, got {self.spin_count!r}")
        if not math.isfinite(self.coupling):
            raise DomainError(f"coupling must be finite, got {self.coupling!r}")
        object.__setattr__(self, "spin_count", int(self.spin_count))
        object.__setattr__(self, "coupling", float(self.coupling))


@dataclass(frozen=True)
class BathSpec:
    layers: tuple[LayerSpec, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise DomainError("a bath needs at least one layer")
        object.__setattr__(self, "layers", layers)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, float]]) -> "BathSpec":
        """Build from ``(spin_count, coupling)`` pairs."""
        return cls(tuple(LayerSpec(n, a) for n, a in pairs))

    @property
    def total_spins(self) -> int:
        return sum(layer.spin_count for layer in self.layers)

    @property
    def spin_counts(self) -> tuple[int, ...]:
        return tuple(layer.spin_count for layer in self.layers)

    @property
    def couplings(self) -> tuple[float, ...]:
        return tuple(layer.coupling for layer in self.layers)

    @property
    def delta(self) -> float:
        """Sum of alpha_mu^2 N_mu, the only bath parameter seen at second order."""
        return math.fsum(l.coupling**2 * l.spin_count for l in self.layers)


@dataclass(frozen=True)
class SectorEntry:
    j2: int
    m2: int
    degeneracy: int

    @property
    def j(self) -> float:
        return self.j2 / 2

    @property
    def m(self) -> float:
        return self.m2 / 2


@dataclass(frozen=True)
class JointWeight:
    zeta: float
    eta: float
    weight: float


def _check_j(j2, n):
    if n < 0 or j2 < 0 or j2 > n or (n - j2) % 2:
        raise DomainError(f"invalid sector 2j={j2} for N={n}")


def _check_jm(j2, m2):
    if j2 < 0 or abs(m2) > j2 or (j2 - m2) % 2:
        raise DomainError(f"invalid sector 2j={j2}, 2m={m2}")


def degeneracy(j2: int, n: int) -> int:
    """Number of spin-j multiplets in the N-fold product of spin-1/2.

    C(N, N/2 - j) - C(N, N/2 - j - 1), in exact integer arithmetic.
    """
    _check_j(j2, n)
    k = (n - j2) // 2
    return math.comb(n, k) - (math.comb(n, k - 1) if k >= 1 else 0)


def h_int4(j2: int, m2: int, sign: int = +1) -> int:
    """4 h(j, sign*m) as an exact integer (h itself is an integer for
    j - m integral, but the doubled representation needs the factor 4)."""
    _check_jm(j2, m2)
    s = 1 if sign >= 0 else -1
    return (j2 + s * m2) * (j2 - s * m2 + 2)


def h_value(j2: int, m2: int, sign: int = +1) -> float:
    """h(j, +m) = (j+m)(j-m+1) for sign=+1, h(j, -m) = (j-m)(j+m+1) for sign=-1."""
    return float(h_int4(j2, m2, sign) // 4)


def enumerate_layer(layer: LayerSpec | int) -> list[SectorEntry]:
    """All (j, m) sectors of a layer, each with its exact degeneracy."""
    n = layer.spin_count if isinstance(layer, LayerSpec) else int(layer)
    out = []
    for j2 in range(n % 2, n + 1, 2):
        deg = degeneracy(j2, n)
        for m2 in range(-j2, j2 + 1, 2):
            out.append(SectorEntry(j2, m2, deg))
    return out


def _layer_arrays(n):
    """Per-sector integer h(j,+m), h(j,-m) and float probability of one layer."""
    hp, hm, w = [], [], []
    norm = 2**n
    for j2 in range(n % 2, n + 1, 2):
        p = degeneracy(j2, n) / norm
        for m2 in range(-j2, j2 + 1, 2):
            hp.append(h_int4(j2, m2, +1) // 4)
            hm.append(h_int4(j2, m2, -1) // 4)
            w.append(p)
    return hp, hm, w


def coupling_quanta(couplings: Sequence[float]) -> tuple[list[int], Fraction]:
    """Write alpha_mu^2 = a_mu * scale with coprime non-negative integers a_mu.

    Every double is an exact rational, so this decomposition always exists and
    makes zeta = scale * sum(a_mu h_mu) an exact integer key.
    """
    sq = [Fraction(a) ** 2 for a in couplings]
    den = 1
    for q in sq:
        den = den * q.denominator // math.gcd(den, q.denominator)
    ints = [int(q * den) for q in sq]
    g = 0
    for a in ints:
        g = math.gcd(g, a)
    if g == 0:
        return [0] * len(ints), Fraction(0)
    return [a // g for a in ints], Fraction(g, den)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Exact measure over (zeta, eta) with merged duplicate keys.

    ``zeta_key``/``eta_key`` are the exact integer keys (Python ints in an
    object array when they exceed int64); ``zeta = zeta_key * scale``.
    """

    zeta: np.ndarray
    eta: np.ndarray
    weight: np.ndarray
    zeta_key: np.ndarray
    eta_key: np.ndarray
    scale: Fraction
    bath: BathSpec | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.weight)

    def entries(self) -> list[JointWeight]:
        return [JointWeight(float(z), float(e), float(w))
                for z, e, w in zip(self.zeta, self.eta, self.weight)]

    @cached_property
    def sqrt_zeta(self) -> np.ndarray:
        return np.sqrt(self.zeta)

    @cached_property
    def sqrt_eta(self) -> np.ndarray:
        return np.sqrt(self.eta)

    @cached_property
    def zeta_marginal(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct zeta values and their total weight."""
        return _merge_1d(self.zeta_key, self.weight, self.scale)

    @cached_property
    def pair_index(self):
        """(unique zeta, unique eta, index arrays) for factorized evaluation."""
        zk, zi = _unique_inverse(self.zeta_key)
        ek, ei = _unique_inverse(self.eta_key)
        s = float(self.scale)
        return _keys_to_float(zk, s), _keys_to_float(ek, s), zi, ei


def _keys_to_float(keys, s):
    if keys.dtype == object:
        return np.array([float(k) for k in keys]) * s
    return keys.astype(float) * s


def _unique_inverse(keys):
    if keys.dtype == object:
        uniq = sorted(set(keys.tolist()))
        pos = {k: i for i, k in enumerate(uniq)}
        inv = np.fromiter((pos[k] for k in keys), dtype=np.int64, count=len(keys))
        return np.array(uniq, dtype=object), inv
    return np.unique(keys, return_inverse=True)


def _merge_1d(keys, weights, scale):
    uniq, inv = _unique_inverse(keys)
    w = np.bincount(inv, weights=weights, minlength=len(uniq))
    return _keys_to_float(uniq, float(scale)), w


def _convolve_int(kz, ke, w, lz, le, lw):
    """One layer-convolution step on int64 keys; merge with np.unique."""
    z = (kz[:, None] + lz[None, :]).ravel()
    e = (ke[:, None] + le[None, :]).ravel()
    ww = (w[:, None] * lw[None, :]).ravel()
    pairs = np.stack([z, e], axis=1)
    uniq, inv = np.unique(pairs, axis=0, return_inverse=True)
    inv = inv.ravel()
    return uniq[:, 0], uniq[:, 1], np.bincount(inv, weights=ww, minlength=len(uniq))


def _convolve_dict(acc, lz, le, lw):
    out: dict[tuple[int, int], float] = {}
    for (z, e), w in acc.items():
        for a, b, v in zip(lz, le, lw):
            key = (z + a, e + b)
            out[key] = out.get(key, 0.0) + w * v
    return out


def joint_distribution(bath: BathSpec, cap: int = DEFAULT_ENTRY_CAP) -> JointDistribution:
    """Exact layer-by-layer convolution of the per-layer (zeta, eta) measures.

    Entries with equal exact keys are merged after every layer. The running
    product of entry counts is checked against ``cap`` before any work is
    done; the distribution is never truncated.
    """
    quanta, scale = coupling_quanta(bath.couplings)
    layers = [_layer_arrays(l.spin_count) for l in bath.layers]

    bound = 1
    for hp, _, _ in layers:
        bound *= len(hp)
    # all-zero couplings collapse to one entry whatever the sizes
    if scale != 0 and bound > cap:
        raise ResourceError(
            f"joint distribution would need up to {bound} entries (cap {cap}); "
            "the distribution is exact and is not truncated")

    max_key = sum(a * max(hp) for a, (hp, _, _) in zip(quanta, layers))
    if scale == 0:
        zk = ek = np.zeros(1, dtype=np.int64)
        w = np.ones(1)
    elif max_key < _INT64_SAFE:
        zk = np.zeros(1, dtype=np.int64)
        ek = np.zeros(1, dtype=np.int64)
        w = np.ones(1)
        for a, (hp, hm, lw) in zip(quanta, layers):
            lz = a * np.asarray(hp, dtype=np.int64)
            le = a * np.asarray(hm, dtype=np.int64)
            zk, ek, w = _convolve_int(zk, ek, w, lz, le, np.asarray(lw))
    else:
        acc = {(0, 0): 1.0}
        for a, (hp, hm, lw) in zip(quanta, layers):
            acc = _convolve_dict(acc, [a * h for h in hp], [a * h for h in hm], lw)
        keys = sorted(acc)
        zk = np.array([k[0] for k in keys], dtype=object)
        ek = np.array([k[1] for k in keys], dtype=object)
        w = np.array([acc[k] for k in keys])

    s = float(scale)
    return JointDistribution(
        zeta=_keys_to_float(zk, s), eta=_keys_to_float(ek, s), weight=w,
        zeta_key=zk, eta_key=ek, scale=scale, bath=bath)


def zeta_marginal(bath: BathSpec, lattice_cap: int = LATTICE_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Distribution of zeta alone (all that f_z needs).

    When the coupling quanta are small integers the per-layer marginals live
    on a common integer lattice and are convolved with FFTs, which reaches
    baths far beyond the joint-distribution cap. Otherwise falls back to the
    joint distribution.
    """
    quanta, scale = coupling_quanta(bath.couplings)
    if scale == 0:
        return np.zeros(1), np.ones(1)
    layers = [_layer_arrays(l.spin_count) for l in bath.layers]
    size = 1 + sum(a * max(hp) for a, (hp, _, _) in zip(quanta, layers))
    if size > lattice_cap:
        return joint_distribution(bath).zeta_marginal

    dens = np.ones(1)
    support = np.ones(1, dtype=bool)
    for a, (hp, _, lw) in zip(quanta, layers):
        idx = a * np.asarray(hp, dtype=np.int64)
        layer = np.bincount(idx, weights=lw)
        mask = np.bincount(idx) > 0
        if len(dens) * len(layer) < 4_000_000:
            dens = np.convolve(dens, layer)
            support = np.convolve(support.astype(float), mask.astype(float)) > 0.5
        else:
            dens = fftconvolve(dens, layer)
            support = fftconvolve(support.astype(float), mask.astype(float)) > 0.5
    keys = np.nonzero(support)[0]
    # FFT round-off leaves ~1e-17 noise; the structural support removes it
    return keys.astype(float) * float(scale), np.clip(dens[keys], 0.0, None)


def sector_count_identity(n: int) -> int:
    """Sum of degeneracies over all (j, m) sectors; equals 2**n."""
    return sum(e.degeneracy for e in enumerate_layer(n))


def rescaled(alpha: float, spin_count: int) -> float:
    """Coupling rescaling alpha -> alpha / sqrt(N) that keeps the N -> inf limit finite."""
    if spin_count < 1:
        raise DomainError("spin_count must be positive")
    return alpha / math.sqrt(spin_count)
