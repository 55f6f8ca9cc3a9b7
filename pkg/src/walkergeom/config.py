"""Metric definitions read from flat dotted-key TOML files.

Example::

    kind = "typeII"
    tau = 24
    coeff.Q = "x4^2"
    region.min = [-1, -1, -1, -1]
    region.max = [1, 1, 1, 1]
    samples.points = 10
    samples.dirs = 40
    seed = 7
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .expr import ExprError, parse
from .families import (
    FAMILY_KINDS,
    SelfDualCoefficients,
    TypeIICoefficients,
    make_antiselfdual_example,
    make_parakahler,
    make_ricciflat_selfdual,
    make_selfdual,
    make_strict,
    make_typeII,
)
from .metric import WalkerMetric

KINDS = ("raw",) + tuple(FAMILY_KINDS)

SELFDUAL_COEFFS = ("calA", "calB", "calC", "calD", "calE", "calF",
                   "P", "Q", "S", "T", "U", "V", "xi", "eta", "gam")
TYPEII_COEFFS = ("P", "Q", "S", "T", "U", "V")
RICCIFLAT_COEFFS = TYPEII_COEFFS + ("xi", "eta", "gam")

_COEFFS = {
    "selfdual": SELFDUAL_COEFFS,
    "typeII": TYPEII_COEFFS,
    "ricciflat-selfdual": RICCIFLAT_COEFFS,
}
_EXPR_KINDS = ("raw", "strict")

_SCALARS = {
    "kind", "tau", "alpha", "seed", "tol", "tol_eigen", "tol_classify", "tol_jordan",
    "samples.points", "samples.dirs", "samples.workers", "region.min", "region.max",
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class MetricConfig:
    kind: str
    expressions: dict = field(default_factory=dict)
    tau: float | None = None
    alpha: float | None = None
    region: tuple = ((-1.0, 1.0),) * 4
    points: int = 10
    dirs: int = 40
    workers: int = 1
    tol: float = 1e-9  # residuals and table agreement
    tol_eigen: float = 1e-8  # spectrum matching
    tol_classify: float = 1e-9  # W+ criterion
    tol_jordan: float = 1e-6  # eigenvalue clustering in Jordan decisions
    seed: int = 0
    digest: str = ""

    def with_seed(self, seed: int) -> MetricConfig:
        return replace(self, seed=int(seed))


def _flatten(d: dict, prefix: str = "") -> dict[str, Any]:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _real(flat, key, default=None):
    if key not in flat:
        return default
    v = flat[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
        raise ConfigError(f"{key} must be a finite number, got {v!r}")
    return float(v)


def _count(flat, key, default):
    if key not in flat:
        return default
    v = flat[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise ConfigError(f"{key} must be a positive integer, got {v!r}")
    return v


def _positive(flat, key, default):
    v = _real(flat, key, default)
    if v <= 0:
        raise ConfigError(f"{key} must be positive")
    return v


def _region(flat) -> tuple:
    lo = flat.get("region.min", [-1.0] * 4)
    hi = flat.get("region.max", [1.0] * 4)
    for name, v in (("region.min", lo), ("region.max", hi)):
        if not isinstance(v, list) or len(v) != 4 or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
            raise ConfigError(f"{name} must be a list of four numbers")
    box = tuple((float(a), float(b)) for a, b in zip(lo, hi))
    for i, (a, b) in enumerate(box, 1):
        if not (np.isfinite(a) and np.isfinite(b)) or a >= b:
            raise ConfigError(f"region axis x{i}: need finite min < max, got [{a}, {b}]")
    return box


def parse_config(text: str, source: str = "<string>") -> MetricConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    flat = _flatten(raw)
    kind = flat.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"{source}: kind must be one of {', '.join(KINDS)}; got {kind!r}")

    if kind in _EXPR_KINDS:
        allowed = {f"expr.{n}" for n in "abc"}
    else:
        allowed = {f"coeff.{n}" for n in _COEFFS.get(kind, ())}
    unknown = sorted(set(flat) - _SCALARS - allowed)
    if unknown:
        raise ConfigError(f"{source}: unknown or misplaced keys for kind {kind!r}: {', '.join(unknown)}")

    expressions = {}
    for key in sorted(allowed & set(flat)):
        v = flat[key]
        if isinstance(v, bool) or not isinstance(v, (str, int, float)):
            raise ConfigError(f"{key} must be an expression string")
        text_v = v if isinstance(v, str) else repr(v)
        try:
            parse(text_v)
        except ExprError as exc:
            raise ConfigError(f"{source}: {key}: {exc}") from None
        expressions[key.split(".", 1)[1]] = text_v
    if kind in _EXPR_KINDS and not expressions:
        raise ConfigError(f"{source}: kind {kind!r} needs at least one of expr.a, expr.b, expr.c")

    tau = _real(flat, "tau")
    alpha = _real(flat, "alpha")
    if kind == "typeII" and not tau:
        raise ConfigError(f"{source}: kind 'typeII' needs a nonzero tau")
    if kind == "parakahler" and alpha is None:
        raise ConfigError(f"{source}: kind 'parakahler' needs alpha")
    seed = flat.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"{source}: seed must be a non-negative integer")

    return MetricConfig(
        kind=kind,
        expressions=expressions,
        tau=tau,
        alpha=alpha,
        region=_region(flat),
        points=_count(flat, "samples.points", 10),
        dirs=_count(flat, "samples.dirs", 40),
        workers=_count(flat, "samples.workers", 1),
        tol=_positive(flat, "tol", 1e-9),
        tol_eigen=_positive(flat, "tol_eigen", 1e-8),
        tol_classify=_positive(flat, "tol_classify", 1e-9),
        tol_jordan=_positive(flat, "tol_jordan", 1e-6),
        seed=seed,
        digest=hashlib.sha256(text.encode()).hexdigest(),
    )


def load_config(path: str | Path) -> MetricConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, str(path))


@dataclass(frozen=True)
class BuiltMetric:
    metric: WalkerMetric
    extras: dict = field(default_factory=dict)


def build_metric(cfg: MetricConfig) -> BuiltMetric:
    """Construct the metric (and family side data) described by ``cfg``."""
    e = {k: parse(v) for k, v in cfg.expressions.items()}
    kind = cfg.kind
    if kind == "raw":
        return BuiltMetric(WalkerMetric(e.get("a", 0), e.get("b", 0), e.get("c", 0)))
    if kind == "strict":
        return BuiltMetric(make_strict(e.get("a", 0), e.get("b", 0), e.get("c", 0)))
    if kind == "selfdual":
        return BuiltMetric(make_selfdual(SelfDualCoefficients(**e)))
    if kind == "typeII":
        return BuiltMetric(make_typeII(TypeIICoefficients(cfg.tau, **e)))
    if kind == "ricciflat-selfdual":
        W, residuals = make_ricciflat_selfdual(**e)
        return BuiltMetric(W, {"residuals": residuals, "coefficients": e})
    if kind == "parakahler":
        W, J = make_parakahler(cfg.alpha)
        return BuiltMetric(W, {"J": J})
    return BuiltMetric(make_antiselfdual_example())
