"""Explicit Walker metric families.

All constructors assemble ``a, b, c`` symbolically so that downstream
curvature evaluation differentiates them exactly.  Coefficient functions must
depend on (x3, x4) only.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Callable

import numpy as np

from .duality import WplusDiagnostic, classify_wplus
from .expr import ScalarField, parse, var
from .metric import WalkerMetric, _as_field

x1, x2 = var(1), var(2)

FAMILY_KINDS = {
    "selfdual": "self-dual Walker metrics (cubic in x1, x2 with (x3, x4) coefficients)",
    "typeII": "Einstein self-dual metrics with nonzero scalar curvature tau",
    "ricciflat-selfdual": "self-dual metrics with tau = 0, linear in x1, x2; Einstein iff three PDE residuals vanish",
    "strict": "strict Walker metrics: a, b, c depend on (x3, x4) only",
    "parakahler": "para-Kaehler metric of constant paraholomorphic sectional curvature alpha",
    "antiselfdual-example": "a = b = c = (x1 - x2)^2, anti-self-dual with nilpotent Jacobi operators",
}


class CoefficientError(ValueError):
    pass


def _coeff(name: str, f) -> ScalarField:
    f = _as_field(f)
    bad = f.free_vars & {1, 2}
    if bad:
        raise CoefficientError(
            f"coefficient {name} must depend on x3, x4 only (depends on {', '.join(f'x{i}' for i in sorted(bad))})")
    return f


@dataclass(frozen=True)
class SelfDualCoefficients:
    calA: ScalarField = 0
    calB: ScalarField = 0
    calC: ScalarField = 0
    calD: ScalarField = 0
    calE: ScalarField = 0
    calF: ScalarField = 0
    P: ScalarField = 0
    Q: ScalarField = 0
    S: ScalarField = 0
    T: ScalarField = 0
    U: ScalarField = 0
    V: ScalarField = 0
    xi: ScalarField = 0
    eta: ScalarField = 0
    gam: ScalarField = 0

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _coeff(f.name, getattr(self, f.name)))


@dataclass(frozen=True)
class TypeIICoefficients:
    tau: float
    P: ScalarField = 0
    Q: ScalarField = 0
    S: ScalarField = 0
    T: ScalarField = 0
    U: ScalarField = 0
    V: ScalarField = 0

    def __post_init__(self):
        if not self.tau:
            raise CoefficientError("tau must be nonzero")
        object.__setattr__(self, "tau", float(self.tau))
        for name in "PQSTUV":
            object.__setattr__(self, name, _coeff(name, getattr(self, name)))


def make_selfdual(c: SelfDualCoefficients) -> WalkerMetric:
    A, B, C, D, E, F = c.calA, c.calB, c.calC, c.calD, c.calE, c.calF
    a = (x1 ** 3 * A + x1 ** 2 * B + x1 ** 2 * x2 * C + x1 * x2 * D
         + x1 * c.P + x2 * c.Q + c.xi)
    b = (x2 ** 3 * C + x2 ** 2 * E + x1 * x2 ** 2 * A + x1 * x2 * F
         + x1 * c.S + x2 * c.T + c.eta)
    cc = (0.5 * x1 ** 2 * F + 0.5 * x2 ** 2 * D + x1 ** 2 * x2 * A + x1 * x2 ** 2 * C
          + 0.5 * x1 * x2 * (B + E) + x1 * c.U + x2 * c.V + c.gam)
    return WalkerMetric(a, b, cc)


def make_typeII(c: TypeIICoefficients) -> WalkerMetric:
    """Einstein self-dual Walker metric with scalar curvature ``c.tau``."""
    tau = c.tau
    P, Q, S, T, U, V = c.P, c.Q, c.S, c.T, c.U, c.V
    k = 6.0 / tau
    a = (x1 ** 2 * (tau / 6) + x1 * P + x2 * Q
         + k * (Q * (T - U) + V * (P - V) - 2 * (Q.diff(4) - V.diff(3))))
    b = (x2 ** 2 * (tau / 6) + x1 * S + x2 * T
         + k * (S * (P - V) + U * (T - U) - 2 * (S.diff(3) - U.diff(4))))
    cc = (x1 * x2 * (tau / 6) + x1 * U + x2 * V
          + k * (-Q * S + U * V + T.diff(3) - U.diff(3) + P.diff(4) - V.diff(4)))
    return WalkerMetric(a, b, cc)


def make_ricciflat_selfdual(P=0, Q=0, S=0, T=0, U=0, V=0, xi=0, eta=0, gam=0):
    """Metric ``a = x1 P + x2 Q + xi`` etc. and the three Einstein PDE residuals.

    The residual fields are left-hand side minus right-hand side; the metric is
    Einstein exactly when all three vanish identically.
    """
    P, Q, S, T, U, V = (_coeff(n, f) for n, f in zip("PQSTUV", (P, Q, S, T, U, V)))
    xi, eta, gam = _coeff("xi", xi), _coeff("eta", eta), _coeff("gam", gam)
    W = WalkerMetric(x1 * P + x2 * Q + xi, x1 * S + x2 * T + eta, x1 * U + x2 * V + gam)
    residuals = (
        2 * (Q.diff(4) - V.diff(3)) - (Q * (T - U) + V * (P - V)),
        2 * (S.diff(3) - U.diff(4)) - (S * (P - V) + U * (T - U)),
        (T.diff(3) - U.diff(3) + P.diff(4) - V.diff(4)) - (Q * S - U * V),
    )
    return W, residuals


def wplus12_ricciflat(P=0, T=0, U=0, V=0) -> ScalarField:
    """T3 + U3 - P4 - V4, which vanishes iff W+12 = 0 on the tau = 0 branch."""
    P, T, U, V = (_coeff(n, f) for n, f in zip("PTUV", (P, T, U, V)))
    return T.diff(3) + U.diff(3) - P.diff(4) - V.diff(4)


RICCIFLAT_JACOBI = {"zero": "Ia", "two-step-nilpotent": "II", "three-step-nilpotent": "III"}


def ricciflat_class(W: WalkerMetric, p, tol: float = 1e-9) -> tuple[str, WplusDiagnostic]:
    """Jacobi type on the tau = 0 branch, read off the W+ diagnostic.

    Vanishing operators (Ia) when W+11 = W+12 = 0, two-step nilpotent (II)
    when only W+12 vanishes, three-step nilpotent (III) otherwise.
    """
    d = classify_wplus(W, p, tol)
    if d.jordan not in RICCIFLAT_JACOBI:
        raise ValueError(f"scalar curvature {d.tau:.3e} is not zero at {tuple(p)}")
    return RICCIFLAT_JACOBI[d.jordan], d


def make_strict(a=0, b=0, c=0) -> WalkerMetric:
    return WalkerMetric(_coeff("a", a), _coeff("b", b), _coeff("c", c))


def strict_indicator(W: WalkerMetric) -> ScalarField:
    """2 c34 - a44 - b33, the value of W+11 for a strict Walker metric."""
    return 2 * W.c.diff(3).diff(4) - W.a.diff(4).diff(4) - W.b.diff(3).diff(3)


def make_parakahler(alpha: float) -> tuple[WalkerMetric, Callable[[np.ndarray], np.ndarray]]:
    """Metric (alpha x1², alpha x2², alpha x1 x2) and its paracomplex structure J(p).

    ``J(p)`` is the matrix whose columns are J d_1 .. J d_4.
    """
    alpha = float(alpha)
    W = WalkerMetric(alpha * x1 ** 2, alpha * x2 ** 2, alpha * x1 * x2)

    def J(p) -> np.ndarray:
        j = W.jet(p)
        return np.array([
            [-1.0, 0.0, -j.a, -j.c],
            [0.0, -1.0, -j.c, -j.b],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ])

    return W, J


def make_antiselfdual_example() -> WalkerMetric:
    f = parse("x1^2 + x2^2 - 2*x1*x2")
    return WalkerMetric(f, f, f)


__all__ = [
    "SelfDualCoefficients", "TypeIICoefficients", "CoefficientError", "FAMILY_KINDS",
    "make_selfdual", "make_typeII", "make_ricciflat_selfdual", "make_strict",
    "strict_indicator", "make_parakahler", "make_antiselfdual_example",
    "wplus12_ricciflat", "ricciflat_class",
]
