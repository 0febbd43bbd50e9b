"""Run configuration: a single JSON document, with command-line flags
overriding individual fields."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .bath import BathSpec, LayerSpec
from .dynamics import BlochVector
from .errors import DomainError

RUN_METHODS = ("exact", "oracle", "sector", "series", "nz2", "tcl2", "limit-mixed", "limit-both")


class ConfigError(DomainError):
    """Unparseable or inconsistent configuration (exit status 2)."""


@dataclass(frozen=True)
class LimitOptions:
    alpha_inf: float | None = None
    infinite_spin_count: int | None = None
    alphas: tuple[float, float] | None = None
    rescale: bool = False
    law: str = "independent"


@dataclass(frozen=True)
class RunConfig:
    layers: tuple[tuple[int, float], ...]
    initial_bloch: tuple[float, float, float] = (math.sqrt(0.5), 0.0, math.sqrt(0.5))
    t_start: float = 0.0
    t_end: float = 10.0
    t_steps: int = 201
    methods: tuple[str, ...] = ("exact",)
    limit: LimitOptions = field(default_factory=LimitOptions)
    series_order: int = 30
    tolerance: float = 1e-8
    oracle_blocked: bool = False

    def __post_init__(self):
        if self.t_steps < 2:
            raise ConfigError(f"t_steps must be >= 2, got {self.t_steps}")
        if not (self.t_end > self.t_start >= 0):
            raise ConfigError("need t_end > t_start >= 0")
        if not self.methods:
            raise ConfigError("select at least one method")
        bad = [m for m in self.methods if m not in RUN_METHODS]
        if bad:
            raise ConfigError(f"unknown methods {bad}; choose from {list(RUN_METHODS)}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("methods must not repeat")
        if len(self.initial_bloch) != 3:
            raise ConfigError("initial_bloch needs three components")
        if math.sqrt(sum(w * w for w in self.initial_bloch)) > 1 + 1e-12:
            raise ConfigError("initial Bloch vector is longer than 1")
        if self.tolerance <= 0:
            raise ConfigError("tolerance must be positive")
        try:
            self.bath
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def bath(self) -> BathSpec:
        return BathSpec(tuple(LayerSpec(n, a) for n, a in self.layers))

    @property
    def bloch0(self) -> BlochVector:
        return BlochVector(*self.initial_bloch)

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.t_steps)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["layers"] = [list(x) for x in self.layers]
        d["initial_bloch"] = list(self.initial_bloch)
        d["methods"] = list(self.methods)
        if d["limit"]["alphas"] is not None:
            d["limit"]["alphas"] = list(d["limit"]["alphas"])
        return d


def _layers(raw):
    out = []
    for item in raw:
        if isinstance(item, dict):
            out.append((item["spin_count"], float(item["coupling"])))
        else:
            n, a = item
            out.append((n, float(a)))
    for n, _ in out:
        if isinstance(n, bool) or int(n) != n:
            raise ConfigError(f"spin_count must be an integer, got {n!r}")
    return tuple((int(n), a) for n, a in out)


def from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    raw = dict(raw)
    try:
        if "layers" not in raw:
            raise ConfigError("configuration needs 'layers'")
        kwargs = {"layers": _layers(raw.pop("layers"))}
        lim = raw.pop("limit", None) or {}
        if lim:
            if lim.get("alphas") is not None:
                lim = dict(lim, alphas=tuple(float(a) for a in lim["alphas"]))
            kwargs["limit"] = LimitOptions(**lim)
        if "initial_bloch" in raw:
            kwargs["initial_bloch"] = tuple(float(w) for w in raw.pop("initial_bloch"))
        if "methods" in raw:
            methods = raw.pop("methods")
            if isinstance(methods, str):
                methods = [methods]
            kwargs["methods"] = tuple(methods)
        for key in ("t_start", "t_end", "tolerance"):
            if key in raw:
                kwargs[key] = float(raw.pop(key))
        for key in ("t_steps", "series_order"):
            if key in raw:
                v = raw.pop(key)
                if isinstance(v, bool) or int(v) != v:
                    raise ConfigError(f"{key} must be an integer")
                kwargs[key] = int(v)
        if "oracle_blocked" in raw:
            kwargs["oracle_blocked"] = bool(raw.pop("oracle_blocked"))
    except (TypeError, ValueError, KeyError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed configuration: {exc}") from exc
    if raw:
        raise ConfigError(f"unknown configuration keys: {sorted(raw)}")
    try:
        return RunConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    return from_dict(raw)


def parse_layers(text: str) -> tuple[tuple[int, float], ...]:
    """``"20:0.1,100:0.1"`` -> ((20, 0.1), (100, 0.1))."""
    try:
        pairs = []
        for part in text.split(","):
            n, a = part.split(":")
            pairs.append((int(n), float(a)))
        return tuple(pairs)
    except ValueError as exc:
        raise ConfigError(f"cannot parse layers {text!r}; expected N:alpha,N:alpha") from exc


def with_overrides(cfg: RunConfig | None, **over) -> RunConfig:
    """Apply non-None overrides; ``cfg=None`` starts from defaults (layers required)."""
    over = {k: v for k, v in over.items() if v is not None}
    lim_keys = {"alpha_inf", "infinite_spin_count", "alphas", "rescale", "law"}
    lim_over = {k: over.pop(k) for k in list(over) if k in lim_keys}
    if cfg is None:
        if "layers" not in over:
            raise ConfigError("no configuration given: pass --config or --layers")
        base = {"layers": over.pop("layers")}
        if lim_over:
            base["limit"] = LimitOptions(**lim_over)
        try:
            return RunConfig(**base, **over)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
    if lim_over:
        over["limit"] = replace(cfg.limit, **lim_over)
    return replace(cfg, **over)
