"""Second-order master equations: Born / NZ2 (memory kernel) and
Redfield / TCL2 (time-local), plus the memory-kernel check showing that no
Born-Markov limit exists.

Channels: the transverse components omega_pm feel the kernel -4 delta and
omega_3 feels -8 delta, with delta = sum_mu alpha_mu^2 N_mu = 2 Omega_1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_ivp

from .bath import BathSpec
from .dynamics import DecoherenceCurve
from .errors import AccuracyError, DomainError


@dataclass(frozen=True)
class ApproxParams:
    delta: float

    def __post_init__(self):
        if not (self.delta >= 0 and math.isfinite(self.delta)):
            raise DomainError(f"delta must be finite and non-negative, got {self.delta}")

    @classmethod
    def from_bath(cls, bath: BathSpec) -> "ApproxParams":
        return cls(bath.delta)

    @property
    def omega1(self) -> float:
        return self.delta / 2


# channel kernel strengths: (perp, z)
def _rates(params):
    return 4.0 * params.delta, 8.0 * params.delta


def nz2_closed(t, params: ApproxParams):
    """(cos(2t sqrt(delta)), cos(2t sqrt(2 delta)))."""
    t = np.asarray(t, dtype=float)
    d = params.delta
    return np.cos(2 * t * math.sqrt(d)), np.cos(2 * t * math.sqrt(2 * d))


def _uniform(t_grid):
    ts = np.asarray(t_grid, dtype=float)
    if ts.ndim != 1 or len(ts) < 2:
        raise DomainError("need a 1-d time grid with at least two points")
    steps = np.diff(ts)
    if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
        raise DomainError("time grid must be uniform and ascending")
    if ts[0] != 0.0:
        raise DomainError("time grid must start at t = 0")
    return ts, float(steps[0])


def _volterra_trapezoid(kappa, h, n_out, sub):
    """Solve w'(t) = -kappa int_0^t w(s) ds, w(0) = 1 on a grid of spacing h.

    The memory integral I(t) and w itself are advanced with the trapezoid
    rule (implicit, second order); ``sub`` substeps per output interval.
    """
    k = h / sub
    # [w, I]' = [[0, -kappa], [1, 0]] [w, I]; trapezoid step is a fixed 2x2 map
    a = np.array([[0.0, -kappa], [1.0, 0.0]])
    eye = np.eye(2)
    step = np.linalg.solve(eye - 0.5 * k * a, eye + 0.5 * k * a)
    big = np.linalg.matrix_power(step, sub)
    out = np.empty(n_out)
    state = np.array([1.0, 0.0])
    for i in range(n_out):
        out[i] = state[0]
        state = big @ state
    return out


def _volterra(kappa, h, n_out, tol, max_refine):
    """Richardson-extrapolated trapezoid solution with step halving until
    successive extrapolants agree to ``tol``."""
    if kappa == 0.0:
        return np.ones(n_out)
    sub = 1
    coarse = _volterra_trapezoid(kappa, h, n_out, sub)
    prev = None
    for _ in range(max_refine):
        sub *= 2
        fine = _volterra_trapezoid(kappa, h, n_out, sub)
        extrap = fine + (fine - coarse) / 3.0
        if prev is not None:
            err = float(np.max(np.abs(extrap - prev)))
            if err < tol:
                return extrap
        prev, coarse = extrap, fine
    raise AccuracyError(f"Volterra integration did not reach tolerance {tol:g}",
                        bound=float(np.max(np.abs(fine - coarse))))


def nz2_numeric(t_grid, params: ApproxParams, tol: float = 1e-8, max_refine: int = 20) -> DecoherenceCurve:
    """Integrate the NZ2 integro-differential equations directly on ``t_grid``."""
    ts, h = _uniform(t_grid)
    kp, kz = _rates(params)
    fp = _volterra(kp, h, len(ts), tol, max_refine)
    fz = _volterra(kz, h, len(ts), tol, max_refine)
    return DecoherenceCurve(ts, fp, fz, "nz2")


def nz2_curve(t_grid, params: ApproxParams) -> DecoherenceCurve:
    ts = np.asarray(t_grid, dtype=float)
    fp, fz = nz2_closed(ts, params)
    return DecoherenceCurve(ts, fp, fz, "nz2")


def tcl2_closed(t, params: ApproxParams, literal: bool = False):
    """Gaussian solution (exp(-2 delta t^2), exp(-4 delta t^2)) of the time-local
    equation. ``literal=True`` gives exp(-2 delta t), exp(-4 delta t), which is
    not a solution of that equation and is kept only as a negative control."""
    t = np.asarray(t, dtype=float)
    d = params.delta
    if literal:
        return np.exp(-2 * d * t), np.exp(-4 * d * t)
    return np.exp(-2 * d * t * t), np.exp(-4 * d * t * t)


def tcl2(t_grid, params: ApproxParams, rtol: float = 1e-12, atol: float = 1e-14) -> DecoherenceCurve:
    """Integrate w' = -kappa t w for both channels with an adaptive RK solver."""
    ts = np.asarray(t_grid, dtype=float)
    kp, kz = _rates(params)

    def rhs(t, y):
        return [-kp * t * y[0], -kz * t * y[1]]

    if np.any(np.diff(ts) <= 0):
        raise DomainError("time grid must be ascending")
    sol = solve_ivp(rhs, (0.0, ts[-1]), [1.0, 1.0], t_eval=ts, method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise AccuracyError(f"TCL2 integration failed: {sol.message}")
    return DecoherenceCurve(ts, sol.y[0], sol.y[1], "tcl2")


@dataclass(frozen=True)
class MarkovReport:
    kernel_perp: np.ndarray
    kernel_z: np.ndarray
    constant: bool
    running_integral: np.ndarray
    diverges: bool
    markov_limit_exists: bool
    message: str


def markov_kernel_check(params: ApproxParams, t_grid) -> MarkovReport:
    """Sample the NZ2 memory kernel and its running integral.

    The kernel is built from Omega_1, which carries no time argument, so it is
    the same number at every t; int_0^T kernel ds = -4 delta T grows without
    bound and no finite Markovian rate exists (unless delta = 0).
    """
    ts = np.asarray(t_grid, dtype=float)
    kp, kz = _rates(params)
    kernel_p = np.full(len(ts), -kp)
    kernel_z = np.full(len(ts), -kz)
    constant = bool(np.all(kernel_p == kernel_p[0]) and np.all(kernel_z == kernel_z[0]))
    running = -cumulative_trapezoid(kernel_p, ts, initial=0.0)
    if params.delta == 0.0:
        return MarkovReport(kernel_p, kernel_z, constant, running, False, True,
                            "delta = 0: the kernel vanishes identically and the "
                            "Markov limit exists trivially (no dynamics)")
    return MarkovReport(kernel_p, kernel_z, constant, running, True, False,
                        f"memory kernel is constant ({-kp:g} per transverse channel); "
                        "its integral over [0, inf) diverges, so no Born-Markov limit exists")
