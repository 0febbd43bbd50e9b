"""Full-Hilbert-space ground truth for the central-spin model.

The basis is the computational product basis with the central spin as the
most significant factor (index bit ``N``), bit value 1 meaning spin up.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .bath import BathSpec
from .dynamics import DecoherenceCurve
from .errors import ResourceError

DENSE_CAP = 14
BLOCKED_CAP = 20


def _spin_couplings(bath: BathSpec) -> np.ndarray:
    """Coupling of every bath spin, bath spin k at bit position k."""
    return np.concatenate([np.full(l.spin_count, l.coupling) for l in bath.layers])


def _check_size(n, blocked):
    cap = BLOCKED_CAP if blocked else DENSE_CAP
    if n > cap:
        raise ResourceError(f"oracle limited to N <= {cap} bath spins (got {n})")


def hamiltonian_sparse(bath: BathSpec) -> sparse.csr_matrix:
    """H = 2 sum_k alpha_k (s+ s-^k + s- s+^k) as a sparse matrix."""
    n = bath.total_spins
    dim = 2 ** (n + 1)
    alphas = _spin_couplings(bath)
    states = np.arange(dim)
    top = 1 << n
    rows, cols, vals = [], [], []
    for k, a in enumerate(alphas):
        if a == 0.0:
            continue
        bit = 1 << k
        # central up & bath k down  <->  central down & bath k up
        src = states[((states & top) != 0) & ((states & bit) == 0)]
        dst = src ^ top ^ bit
        rows += [src, dst]
        cols += [dst, src]
        vals += [np.full(len(src), 2.0 * a)] * 2
    if not rows:
        return sparse.csr_matrix((dim, dim))
    return sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim))


def build_hamiltonian(bath: BathSpec) -> np.ndarray:
    """Dense real symmetric Hamiltonian of the N+1 spin system."""
    _check_size(bath.total_spins, blocked=False)
    return hamiltonian_sparse(bath).toarray()


def magnetization(n_total: int) -> np.ndarray:
    """Number of up spins in each basis state of ``n_total`` spins."""
    states = np.arange(2**n_total)
    return np.array([bin(s).count("1") for s in states])


def _phase_sum(kernel, lam_a, lam_b, times):
    """sum_ab K_ab cos((lam_a - lam_b) t) for every t."""
    ea = np.exp(1j * np.outer(lam_a, times))
    eb = np.exp(1j * np.outer(lam_b, times))
    return np.real(np.einsum("at,at->t", ea.conj(), kernel @ eb))


@dataclass(eq=False)
class _Eigen:
    values: np.ndarray
    vectors: np.ndarray
    index: np.ndarray = field(default=None)


def _eigensystems(bath, blocked):
    h = hamiltonian_sparse(bath)
    dim = h.shape[0]
    if not blocked:
        vals, vecs = np.linalg.eigh(h.toarray())
        return [_Eigen(vals, vecs, np.arange(dim))]
    mag = magnetization(bath.total_spins + 1)
    out = []
    for k in range(bath.total_spins + 2):
        idx = np.nonzero(mag == k)[0]
        vals, vecs = np.linalg.eigh(h[idx][:, idx].toarray())
        out.append(_Eigen(vals, vecs, idx))
    return out


def oracle_f(bath: BathSpec, times, blocked: bool = False) -> DecoherenceCurve:
    """Propagate rho_S(0) (x) 2^-N I exactly and read off f_perp and f_z.

    f_z uses rho_S(0) = |up><up| and f_perp the +x eigenstate. The infinite-
    temperature bath average is the exact trace, evaluated in the eigenbasis
    of H:  tr(A U B U^+) = sum_ab (V^T A V)_ab (V^T B V)_ba e^{i(l_a - l_b)t}.
    """
    n = bath.total_spins
    _check_size(n, blocked)
    ts = np.atleast_1d(np.asarray(times, dtype=float))
    dim = 2 ** (n + 1)
    up = (np.arange(dim) >> n) & 1  # central spin up
    z_diag = np.where(up == 1, 1.0, -1.0)
    norm = 2.0**n

    systems = _eigensystems(bath, blocked)
    fz = np.zeros(len(ts))
    for s in systems:
        v = s.vectors
        zt = v.T @ (z_diag[s.index, None] * v)
        pt = v.T @ (up[s.index, None] * v)
        fz += _phase_sum(zt * pt.T, s.values, s.values, ts)
    fz /= norm

    # omega_1(t) = tr(X U X U^+) / 2^{N+1} for rho_S(0) = (1 + s_x)/2
    flip = np.arange(dim) ^ (1 << n)
    fp = np.zeros(len(ts))
    pos = np.empty(dim, dtype=np.int64)
    owner = np.empty(dim, dtype=np.int64)
    for b, s in enumerate(systems):
        pos[s.index] = np.arange(len(s.index))
        owner[s.index] = b
    for a, sa in enumerate(systems):
        targets = flip[sa.index]
        for b in np.unique(owner[targets]):
            sb = systems[b]
            sel = owner[targets] == b
            # X restricted to (block a rows, block b cols)
            xab = np.zeros((len(sa.index), len(sb.index)))
            xab[np.nonzero(sel)[0], pos[targets[sel]]] = 1.0
            xt = sa.vectors.T @ xab @ sb.vectors
            fp += _phase_sum(xt * xt, sa.values, sb.values, ts)
    fp /= 2.0 * norm
    return DecoherenceCurve(ts, fp, fz, "oracle")


def reconstruction_error(bath: BathSpec) -> float:
    """max |V diag(l) V^T - H| of the dense eigendecomposition."""
    h = build_hamiltonian(bath)
    vals, vecs = np.linalg.eigh(h)
    return float(np.max(np.abs((vecs * vals) @ vecs.T - h)))


@dataclass
class StateReport:
    ok: bool
    failures: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def verify_state_properties(rho_grid, times=None, tol: float = 1e-10) -> StateReport:
    """Check Hermiticity, unit trace and positivity of every 2x2 sample."""
    rho_grid = np.asarray(rho_grid, dtype=complex)
    times = np.arange(len(rho_grid)) if times is None else np.asarray(times)
    failures = []
    for t, rho in zip(times, rho_grid):
        herm = float(np.max(np.abs(rho - rho.conj().T)))
        if herm > tol:
            failures.append((float(t), "hermiticity", herm))
        tr = abs(np.trace(rho) - 1.0)
        if tr > tol:
            failures.append((float(t), "trace", float(tr)))
        lo = float(np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2)))
        if lo < -tol:
            failures.append((float(t), "eigenvalue", lo))
    return StateReport(not failures, failures)
