"""Curve generation for every method, figure data and sweeps.

Output tables are ordered dicts of column name -> array. Numbers are
rendered with 17 significant digits so that identical inputs give
byte-identical files.
"""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from .approximations import ApproxParams, nz2_numeric, tcl2
from .bath import BathSpec, joint_distribution, rescaled
from .config import ConfigError, RunConfig
from .correlations import moment_table, series_f_perp, series_f_z
from .dynamics import DecoherenceCurve, exact_curve
from .errors import DomainError
from .limits import MixedLimitSpec, f_both_infinite_grid, f_perp_mixed, f_z_mixed
from .oracle import oracle_f
from .sectors import sector_curve

CURVE_COLUMNS = ("f_perp", "f_z", "w1", "w2", "w3", "q", "entropy")
FIGURE_WINDOW = (0.0, 50.0, 2001)


def _limit_mixed(cfg: RunConfig):
    lim = cfg.limit
    if lim.alpha_inf is None:
        raise ConfigError("method limit-mixed needs limit.alpha_inf")
    alpha = lim.alpha_inf
    if lim.rescale:
        if lim.infinite_spin_count is None:
            raise ConfigError("rescale needs limit.infinite_spin_count")
        alpha = rescaled(alpha, lim.infinite_spin_count)
    return MixedLimitSpec(cfg.bath, alpha)


def _limit_alphas(cfg: RunConfig):
    lim = cfg.limit
    if lim.alphas is not None:
        alphas = tuple(lim.alphas)
        counts = cfg.bath.spin_counts[:2]
    else:
        if len(cfg.layers) != 2:
            raise ConfigError("method limit-both needs two layers or limit.alphas")
        alphas = cfg.bath.couplings
        counts = cfg.bath.spin_counts
    if len(alphas) != 2:
        raise ConfigError("limit.alphas needs exactly two couplings")
    if lim.rescale:
        alphas = tuple(rescaled(a, n) for a, n in zip(alphas, counts))
    return alphas


def curve_for(method: str, cfg: RunConfig) -> DecoherenceCurve:
    ts = cfg.times
    bath = cfg.bath
    if method == "exact":
        return exact_curve(bath, ts)
    if method == "oracle":
        return oracle_f(bath, ts, blocked=cfg.oracle_blocked)
    if method == "sector":
        return sector_curve(bath, ts)
    if method == "series":
        table = moment_table(joint_distribution(bath), cfg.series_order + 1)
        fp = np.array([series_f_perp(t, table, cfg.series_order, cfg.tolerance).value for t in ts])
        fz = np.array([series_f_z(t, table, cfg.series_order, cfg.tolerance).value for t in ts])
        return DecoherenceCurve(ts, fp, fz, "series")
    if method in ("nz2", "tcl2"):
        params = ApproxParams.from_bath(bath)
        if method == "tcl2":
            return tcl2(ts, params)
        if ts[0] != 0.0:
            grid = np.linspace(0.0, ts[-1], len(ts))
            raise ConfigError(f"nz2 needs a grid starting at 0 (e.g. {grid[0]}..{grid[-1]})")
        return nz2_numeric(ts, params, tol=min(cfg.tolerance, 1e-6))
    if method == "limit-mixed":
        spec = _limit_mixed(cfg)
        return DecoherenceCurve(ts, f_perp_mixed(ts, spec), f_z_mixed(ts, spec), "limit")
    if method == "limit-both":
        fp, fz = f_both_infinite_grid(ts, _limit_alphas(cfg), law=cfg.limit.law)
        return DecoherenceCurve(ts, fp, fz, "limit")
    raise ConfigError(f"unknown method {method!r}")


def _entropy_col(q):
    out = np.full(len(q), np.nan)
    ok = q <= 1 + 1e-12
    qq = np.clip(q[ok], 0.0, 1.0)
    lp, lm = (1 + qq) / 2, (1 - qq) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        s = -np.where(lp > 0, lp * np.log(lp), 0.0) - np.where(lm > 0, lm * np.log(lm), 0.0)
    out[ok] = s
    return out


def curve_columns(curve: DecoherenceCurve, cfg: RunConfig) -> dict:
    w = curve.bloch(cfg.bloch0)
    q = np.sqrt(np.sum(w * w, axis=1))
    return {"f_perp": curve.f_perp, "f_z": curve.f_z, "w1": w[:, 0], "w2": w[:, 1],
            "w3": w[:, 2], "q": q, "entropy": _entropy_col(q)}


def run_table(cfg: RunConfig, threads: int = 1) -> dict:
    """Column table with ``t`` and ``<method>_<column>`` for every method."""
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        curves = list(pool.map(lambda m: curve_for(m, cfg), cfg.methods))
    table = {"t": cfg.times}
    for method, curve in zip(cfg.methods, curves):
        for name, col in curve_columns(curve, cfg).items():
            table[f"{method}_{name}"] = col
    return table


# -- figures ----------------------------------------------------------------

FIGURES = {
    2: dict(layers=((20, 0.1), (20, 0.1)), quantity="f_perp"),
    3: dict(layers=((20, 0.1), (100, 0.1)), quantity="f_perp"),
    4: dict(layers=((20, 0.1), (20, 0.1)), quantity="f_z"),
    5: dict(layers=((20, 0.1), (100, 0.1)), quantity="f_z"),
    # "n = 20" is read as the spin count of the finite layer; both couplings 0.1
    6: dict(layers=((20, 0.1),), quantity="f_perp", alpha_inf=0.1, alphas=(0.1, 0.1)),
    7: dict(layers=((20, 0.1),), quantity="f_z", alpha_inf=0.1, alphas=(0.1, 0.1)),
}


def figure_config(which: int, t_start=None, t_end=None, t_steps=None) -> RunConfig:
    if which not in FIGURES:
        raise ConfigError(f"figure must be one of {sorted(FIGURES)}")
    spec = FIGURES[which]
    t0, t1, n = FIGURE_WINDOW
    return RunConfig(layers=spec["layers"], methods=("exact",),
                     t_start=t0 if t_start is None else t_start,
                     t_end=t1 if t_end is None else t_end,
                     t_steps=n if t_steps is None else t_steps)


def figure_table(which: int, t_start=None, t_end=None, t_steps=None) -> dict:
    cfg = figure_config(which, t_start, t_end, t_steps)
    spec = FIGURES[which]
    q = spec["quantity"]
    ts = cfg.times
    if which <= 5:
        curve = exact_curve(cfg.bath, ts)
        return {"t": ts, q: getattr(curve, q)}
    mixed = MixedLimitSpec(cfg.bath, spec["alpha_inf"])
    fp_both, fz_both = f_both_infinite_grid(ts, spec["alphas"], law="independent")
    if q == "f_perp":
        return {"t": ts, "f_perp_both": fp_both, "f_perp_mixed": f_perp_mixed(ts, mixed)}
    return {"t": ts, "f_z_both": fz_both, "f_z_mixed": f_z_mixed(ts, mixed)}


# -- sweeps -----------------------------------------------------------------

def parse_sweep_param(text: str):
    """``alpha:2`` / ``N:1`` (1-based layer index) or ``alpha_inf``."""
    if text == "alpha_inf":
        return ("alpha_inf", None)
    try:
        kind, idx = text.split(":")
        idx = int(idx)
    except ValueError as exc:
        raise ConfigError(f"cannot parse sweep parameter {text!r}") from exc
    if kind not in ("alpha", "N") or idx < 1:
        raise ConfigError(f"sweep parameter must be alpha:<layer>, N:<layer> or alpha_inf, got {text!r}")
    return (kind, idx - 1)


def sweep_point(cfg: RunConfig, param, value) -> RunConfig:
    kind, idx = param
    if kind == "alpha_inf":
        return replace(cfg, limit=replace(cfg.limit, alpha_inf=float(value)))
    if idx >= len(cfg.layers):
        raise ConfigError(f"layer {idx + 1} does not exist")
    layers = list(cfg.layers)
    n, a = layers[idx]
    if kind == "alpha":
        layers[idx] = (n, float(value))
    else:
        if float(value) != int(float(value)):
            raise ConfigError(f"spin count must be an integer, got {value}")
        layers[idx] = (int(float(value)), a)
    try:
        return replace(cfg, layers=tuple(layers))
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def sweep_tables(cfg: RunConfig, param_text: str, values, threads: int = 1):
    if not values:
        raise ConfigError("sweep needs at least one value")
    param = parse_sweep_param(param_text)
    points = [sweep_point(cfg, param, v) for v in values]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        # map keeps input order whatever the completion order
        return list(pool.map(run_table, points))


# -- serialization ------------------------------------------------------------

def fmt(x) -> str:
    x = float(x) + 0.0  # folds -0.0 into 0.0
    if math.isnan(x):
        return "nan"
    return "%.17g" % x


def to_csv(table: dict, prefix: dict | None = None) -> str:
    buf = io.StringIO()
    head = list(prefix or {}) + list(table)
    buf.write(",".join(head) + "\n")
    cols = list(table.values())
    pre = [fmt(v) for v in (prefix or {}).values()]
    for i in range(len(cols[0])):
        buf.write(",".join(pre + [fmt(c[i]) for c in cols]) + "\n")
    return buf.getvalue()


def _json_col(col):
    return [None if math.isnan(float(x)) else float(x) for x in col]


def to_json(obj: dict) -> str:
    return json.dumps(obj, indent=1, sort_keys=False) + "\n"


def table_json(table: dict) -> dict:
    return {k: _json_col(v) for k, v in table.items()}
