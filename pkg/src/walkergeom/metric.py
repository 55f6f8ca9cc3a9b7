"""Walker metrics in canonical coordinates.

    g = [[0, 0, 1, 0],
         [0, 0, 0, 1],
         [1, 0, a, c],
         [0, 1, c, b]]

``a``, ``b`` and ``c`` are arbitrary scalar fields.  ``det g = 1`` identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from types import SimpleNamespace
from typing import Sequence

import numpy as np

from .expr import ScalarField, compile_fields, const, parse

# index pairs used by the jet, e.g. (1, 3) -> "a13"
_FIRST = [(i,) for i in range(1, 5)]
_SECOND = list(combinations_with_replacement(range(1, 5), 2))


def _as_field(f) -> ScalarField:
    if isinstance(f, ScalarField):
        return f
    if isinstance(f, str):
        return parse(f)
    return const(f)


@dataclass(frozen=True, eq=False)
class WalkerMetric:
    a: ScalarField
    b: ScalarField
    c: ScalarField
    # compiled evaluators, filled lazily by the modules that need them
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_strings(cls, a: str = "0", b: str = "0", c: str = "0") -> WalkerMetric:
        return cls(parse(a), parse(b), parse(c))

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, _as_field(getattr(self, name)))

    def fields(self) -> dict[str, ScalarField]:
        """a, b, c and every first and second partial, keyed like ``a``, ``a1``, ``c34``."""
        out = {}
        for name in ("a", "b", "c"):
            f = getattr(self, name)
            out[name] = f
            firsts = {i: f.diff(i) for i in range(1, 5)}
            for (i,) in _FIRST:
                out[f"{name}{i}"] = firsts[i]
            for i, j in _SECOND:
                out[f"{name}{i}{j}"] = firsts[i].diff(j)
        return out

    def jet(self, p: Sequence[float]) -> SimpleNamespace:
        """Values of a, b, c and their first/second partials at ``p``.

        Mixed partials are available under both orders (``a12`` and ``a21``).
        """
        fn = self.cache.get("jet")
        if fn is None:
            fields = self.fields()
            names = list(fields)
            compiled = compile_fields([fields[n] for n in names])
            fn = self.cache.setdefault("jet", (names, compiled))
        names, compiled = fn
        values = dict(zip(names, compiled(*_point(p))))
        for name in ("a", "b", "c"):
            for i, j in _SECOND:
                if i != j:
                    values[f"{name}{j}{i}"] = values[f"{name}{i}{j}"]
        return SimpleNamespace(**values)


def _point(p: Sequence[float]) -> tuple[float, float, float, float]:
    if len(p) != 4:
        raise ValueError(f"point must have 4 coordinates, got {len(p)}")
    x = tuple(float(v) for v in p)
    if not np.all(np.isfinite(x)):
        raise ValueError(f"point has non-finite coordinates: {p!r}")
    return x


@dataclass(frozen=True)
class MetricAtPoint:
    g: np.ndarray
    ginv: np.ndarray


def metric_from_values(a: float, b: float, c: float) -> MetricAtPoint:
    g = np.array([
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, a, c],
        [0.0, 1.0, c, b],
    ])
    ginv = np.array([
        [-a, -c, 1.0, 0.0],
        [-c, -b, 0.0, 1.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
    ])
    return MetricAtPoint(g, ginv)


def metric_matrix(W: WalkerMetric, p: Sequence[float]) -> MetricAtPoint:
    """Metric and its closed-form inverse at ``p``."""
    j = W.jet(p)
    return metric_from_values(j.a, j.b, j.c)


def inner(W: WalkerMetric, p: Sequence[float], X, Y) -> float:
    g = metric_matrix(W, p).g
    return float(np.asarray(X, dtype=float) @ g @ np.asarray(Y, dtype=float))
