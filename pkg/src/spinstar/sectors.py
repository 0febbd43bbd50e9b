"""Exact multi-layer dynamics without the layer-factorized measure.

Each layer splits into spin-j_mu multiplets with multiplicity
Upsilon(j_mu, N_mu). For a tuple (j_1, ..., j_n) the collective operators
Xi_pm = sum_mu alpha_mu J_pm^mu act on the product of the irreps, where
Xi_- Xi_+ and Xi_+ Xi_- keep their cross-layer terms. Both conserve total
magnetization, so everything reduces to small blocks:

    f_z    = 2^-N tr cos(4t sqrt(Xi_- Xi_+))
    f_perp = 2^-N tr[cos(2t sqrt(Xi_- Xi_+)) cos(2t sqrt(Xi_+ Xi_-))]
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy import sparse

from .bath import BathSpec, degeneracy
from .dynamics import DecoherenceCurve
from .errors import ResourceError

PRODUCT_DIM_CAP = 20_000


def _raising(j2):
    """J_+ for spin j on basis m = -j..j (index increases with m)."""
    m2 = np.arange(-j2, j2 + 1, 2)
    # <m+1|J+|m> = sqrt((j-m)(j+m+1))
    elems = np.sqrt((j2 - m2[:-1]) * (j2 + m2[:-1] + 2) / 4.0)
    return sparse.diags(elems, -1, shape=(j2 + 1, j2 + 1), format="csr"), m2


def _collective(j2s, alphas):
    ops, ms = zip(*(_raising(j2) for j2 in j2s))
    dims = [len(m) for m in ms]
    xi = None
    for mu, (op, a) in enumerate(zip(ops, alphas)):
        term = sparse.identity(1, format="csr")
        for nu, d in enumerate(dims):
            term = sparse.kron(term, op if nu == mu else sparse.identity(d), format="csr")
        term = a * term
        xi = term if xi is None else xi + term
    mtot = np.zeros(1, dtype=np.int64)
    for m in ms:
        mtot = (mtot[:, None] + m[None, :]).ravel()
    return xi.tocsr(), mtot


def sector_curve(bath: BathSpec, times, dim_cap: int = PRODUCT_DIM_CAP) -> DecoherenceCurve:
    ts = np.atleast_1d(np.asarray(times, dtype=float))
    alphas = bath.couplings
    ranges = [list(range(n % 2, n + 1, 2)) for n in bath.spin_counts]
    fz = np.zeros(len(ts))
    fp = np.zeros(len(ts))
    norm = 2 ** bath.total_spins
    for j2s in itertools.product(*ranges):
        dim = int(np.prod([j2 + 1 for j2 in j2s]))
        if dim > dim_cap:
            raise ResourceError(f"product multiplet of dimension {dim} exceeds cap {dim_cap}")
        mult = 1
        for j2, n in zip(j2s, bath.spin_counts):
            mult *= degeneracy(j2, n)
        weight = mult / norm
        xi_p, mtot = _collective(j2s, alphas)
        xi_m = xi_p.T.tocsr()
        order = np.argsort(mtot, kind="stable")
        a_op = (xi_m @ xi_p)[order][:, order].toarray()
        b_op = (xi_p @ xi_m)[order][:, order].toarray()
        bounds = np.flatnonzero(np.diff(mtot[order])) + 1
        for idx in np.split(np.arange(dim), bounds):
            blk = slice(idx[0], idx[-1] + 1)
            la, va = np.linalg.eigh(a_op[blk, blk])
            lb, vb = np.linalg.eigh(b_op[blk, blk])
            ra = np.sqrt(np.clip(la, 0.0, None))
            rb = np.sqrt(np.clip(lb, 0.0, None))
            fz += weight * np.cos(4.0 * np.outer(ts, ra)).sum(axis=1)
            overlap = (va.T @ vb) ** 2
            ca = np.cos(2.0 * np.outer(ts, ra))
            cb = np.cos(2.0 * np.outer(ts, rb))
            fp += weight * np.einsum("tb,tb->t", ca @ overlap, cb)
    return DecoherenceCurve(ts, fp, fz, "sector")
