"""Decoherence functions from the joint (zeta, eta) measure, Bloch-vector
propagation, reduced density matrix and von Neumann entropy."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .bath import BathSpec, JointDistribution, joint_distribution
from .errors import DomainError

METHODS = ("exact", "oracle", "series", "nz2", "tcl2", "limit", "sector")

_HERM_TOL = 1e-12


@dataclass(frozen=True)
class BlochVector:
    w1: float
    w2: float
    w3: float

    @property
    def w_plus(self) -> complex:
        return complex(self.w1, self.w2) / 2

    @property
    def w_minus(self) -> complex:
        return complex(self.w1, -self.w2) / 2

    @property
    def length(self) -> float:
        return math.sqrt(self.w1**2 + self.w2**2 + self.w3**2)

    def as_array(self) -> np.ndarray:
        return np.array([self.w1, self.w2, self.w3])


@dataclass(frozen=True, eq=False)
class DecoherenceCurve:
    times: np.ndarray
    f_perp: np.ndarray
    f_z: np.ndarray
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown method tag {self.method!r}")

    def bloch(self, bloch0: BlochVector) -> np.ndarray:
        """Bloch vectors along the curve, shape (len(times), 3)."""
        return np.column_stack([self.f_perp * bloch0.w1,
                                self.f_perp * bloch0.w2,
                                self.f_z * bloch0.w3])


def _times(t):
    return np.atleast_1d(np.asarray(t, dtype=float))


def _unwrap(t, values):
    return float(values[0]) if np.ndim(t) == 0 else values


def f_z(t, dist: JointDistribution):
    """sum_k w_k cos(4 t sqrt(zeta_k)); ``t`` may be a scalar or an array."""
    ts = _times(t)
    zeta, w = dist.zeta_marginal
    out = np.cos(4.0 * np.outer(ts, np.sqrt(zeta))) @ w
    return _unwrap(t, out)


def f_perp(t, dist: JointDistribution, factor: float = 2.0):
    """sum_k w_k cos(2 t sqrt(zeta_k)) cos(2 t sqrt(eta_k)).

    ``factor=4`` gives the variant with 4t inside both cosines; it does not
    reproduce the full-Hamiltonian dynamics and exists for comparison only.
    """
    ts = _times(t)
    uz, ue, zi, ei = dist.pair_index
    pairs = sparse.csr_matrix((dist.weight, (zi, ei)), shape=(len(uz), len(ue)))
    cz = np.cos(factor * np.outer(ts, np.sqrt(uz)))
    ce = np.cos(factor * np.outer(ts, np.sqrt(ue)))
    out = np.einsum("ij,ij->i", np.asarray((pairs.T @ cz.T).T), ce)
    return _unwrap(t, out)


def exact_curve(bath: BathSpec, times, dist: JointDistribution | None = None) -> DecoherenceCurve:
    ts = _times(times)
    dist = joint_distribution(bath) if dist is None else dist
    return DecoherenceCurve(ts, f_perp(ts, dist), f_z(ts, dist), "exact")


def evolve(bloch0: BlochVector, t: float, dist: JointDistribution) -> BlochVector:
    """omega_1,2 scale with f_perp, omega_3 with f_z."""
    fp = f_perp(float(t), dist)
    fz = f_z(float(t), dist)
    return BlochVector(fp * bloch0.w1, fp * bloch0.w2, fz * bloch0.w3)


def reduced_state(bloch: BlochVector) -> np.ndarray:
    """rho = (I + w3 s3)/2 + w_plus s_minus + w_minus s_plus."""
    w1, w2, w3 = bloch.w1, bloch.w2, bloch.w3
    return 0.5 * np.array([[1 + w3, w1 - 1j * w2],
                           [w1 + 1j * w2, 1 - w3]], dtype=complex)


def bloch_of_state(rho) -> BlochVector:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise DomainError(f"expected a 2x2 matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > _HERM_TOL:
        raise DomainError("reduced state is not Hermitian")
    return BlochVector(2 * rho[0, 1].real, -2 * rho[0, 1].imag,
                       (rho[0, 0] - rho[1, 1]).real)


def entropy(q: float) -> float:
    """Von Neumann entropy in nats of a qubit whose Bloch vector has length q."""
    if not (0.0 <= q <= 1.0 + 1e-12):
        raise DomainError(f"Bloch length must lie in [0, 1], got {q}")
    q = min(q, 1.0)
    s = 0.0
    for lam in ((1 + q) / 2, (1 - q) / 2):
        if lam > 0:
            s -= lam * math.log(lam)
    return s
