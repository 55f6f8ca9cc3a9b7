"""Curvature of Walker metrics.

Two routes per table: closed-form expressions in the partial derivatives of
``a, b, c`` (``connection``, ``riemann``, ``ricci_scalar``, ``weyl``,
``einstein_residuals``) and a generic route through symbolic Christoffel
symbols of the full metric (the ``*_oracle`` functions).  The two share
nothing beyond the metric fields, so agreement is a real check.

Conventions: arrays are 0-based; ``gamma[k, i, j]`` is the ``d_k`` component
of ``nabla_{d_i} d_j``; ``R[i, j, k, l] = g(R(d_i, d_j) d_k, d_l)`` with
``R(X, Y) = nabla_[X,Y] - [nabla_X, nabla_Y]``.  With this sign the Ricci
tensor is ``rho(X, Y) = trace(U -> R(X, U) Y)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .expr import ScalarField, compile_fields, const
from .metric import WalkerMetric, _point, metric_from_values

EINSTEIN_KEYS = ("13", "14", "23", "33", "34", "44")


@dataclass(frozen=True)
class ConnectionTable:
    gamma: np.ndarray  # (4, 4, 4)


@dataclass(frozen=True)
class RiemannTable:
    R: np.ndarray  # (4, 4, 4, 4)


@dataclass(frozen=True)
class RicciScalar:
    rho: np.ndarray
    tau: float


@dataclass(frozen=True)
class WeylTable:
    W: np.ndarray


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def connection(W: WalkerMetric, p: Sequence[float]) -> ConnectionTable:
    j = W.jet(p)
    a, b, c = j.a, j.b, j.c
    G = np.zeros((4, 4, 4))

    def put(i, jj, comps):
        for k, v in enumerate(comps):
            G[k, i - 1, jj - 1] = v
            G[k, jj - 1, i - 1] = v

    put(1, 3, (0.5 * j.a1, 0.5 * j.c1, 0.0, 0.0))
    put(1, 4, (0.5 * j.c1, 0.5 * j.b1, 0.0, 0.0))
    put(2, 3, (0.5 * j.a2, 0.5 * j.c2, 0.0, 0.0))
    put(2, 4, (0.5 * j.c2, 0.5 * j.b2, 0.0, 0.0))
    put(3, 3, (
        0.5 * (a * j.a1 + c * j.a2 + j.a3),
        0.5 * (c * j.a1 + b * j.a2 - j.a4 + 2 * j.c3),
        -0.5 * j.a1,
        -0.5 * j.a2,
    ))
    put(3, 4, (
        0.5 * (j.a4 + a * j.c1 + c * j.c2),
        0.5 * (j.b3 + c * j.c1 + b * j.c2),
        -0.5 * j.c1,
        -0.5 * j.c2,
    ))
    put(4, 4, (
        0.5 * (a * j.b1 + c * j.b2 - j.b3 + 2 * j.c4),
        0.5 * (c * j.b1 + b * j.b2 + j.b4),
        -0.5 * j.b1,
        -0.5 * j.b2,
    ))
    return ConnectionTable(G)


def _set_curvature(R: np.ndarray, i: int, j: int, k: int, l: int, v: float) -> None:
    i, j, k, l = i - 1, j - 1, k - 1, l - 1
    for (p, q, r, s), sign in (
        ((i, j, k, l), 1), ((j, i, k, l), -1), ((i, j, l, k), -1), ((j, i, l, k), 1),
        ((k, l, i, j), 1), ((l, k, i, j), -1), ((k, l, j, i), -1), ((l, k, j, i), 1),
    ):
        R[p, q, r, s] = sign * v


def riemann_components(j) -> dict[str, float]:
    """The fifteen listed components R_ijkl of a Walker metric, keyed "1313" etc."""
    a, b, c = j.a, j.b, j.c
    return {
        "1313": -0.5 * j.a11,
        "1314": -0.5 * j.c11,
        "1323": -0.5 * j.a12,
        "1324": -0.5 * j.c12,
        "1334": 0.25 * (-j.a2 * j.b1 + j.c1 * j.c2 + 2 * j.a14 - 2 * j.c13),
        "1414": -0.5 * j.b11,
        "1423": -0.5 * j.c12,
        "1424": -0.5 * j.b12,
        "1434": 0.25 * (-j.c1 ** 2 + j.a1 * j.b1 - j.b1 * j.c2 + j.b2 * j.c1
                        - 2 * j.b13 + 2 * j.c14),
        "2323": -0.5 * j.a22,
        "2324": -0.5 * j.c22,
        "2334": 0.25 * (j.c2 ** 2 - j.a2 * j.b2 - j.a1 * j.c2 + j.a2 * j.c1
                        + 2 * j.a24 - 2 * j.c23),
        "2424": -0.5 * j.b22,
        "2434": 0.25 * (j.a2 * j.b1 - j.c1 * j.c2 - 2 * j.b23 + 2 * j.c24),
        "3434": 0.25 * (
            -a * j.c1 ** 2 - b * j.c2 ** 2
            + a * j.a1 * j.b1 + c * j.a1 * j.b2 - j.a1 * j.b3 + 2 * j.a1 * j.c4
            + c * j.a2 * j.b1 + b * j.a2 * j.b2 + j.a2 * j.b4
            + j.a3 * j.b1
            - j.a4 * j.b2 - 2 * j.a4 * j.c1
            + 2 * j.b2 * j.c3
            - 2 * j.b3 * j.c2
            - 2 * c * j.c1 * j.c2
            - 2 * j.a44 - 2 * j.b33 + 4 * j.c34
        ),
    }


def riemann(W: WalkerMetric, p: Sequence[float]) -> RiemannTable:
    R = np.zeros((4, 4, 4, 4))
    for key, v in riemann_components(W.jet(p)).items():
        _set_curvature(R, *map(int, key), v)
    return RiemannTable(R)


def _ricci_from_jet(j) -> RicciScalar:
    a, b, c = j.a, j.b, j.c
    rho = np.zeros((4, 4))
    vals = {
        (1, 3): 0.5 * (j.a11 + j.c12),
        (1, 4): 0.5 * (j.b12 + j.c11),
        (2, 3): 0.5 * (j.a12 + j.c22),
        (2, 4): 0.5 * (j.b22 + j.c12),
        (3, 3): 0.5 * (-j.c2 ** 2 + j.a1 * j.c2 + j.a2 * j.b2 - j.a2 * j.c1
                       + a * j.a11 + 2 * c * j.a12 + b * j.a22 + 2 * j.c23 - 2 * j.a24),
        (3, 4): 0.5 * (-j.a2 * j.b1 + j.c1 * j.c2 + j.a14 + j.b23
                       + a * j.c11 + 2 * c * j.c12 - j.c13 + b * j.c22 - j.c24),
        (4, 4): 0.5 * (-j.c1 ** 2 + j.a1 * j.b1 - j.b1 * j.c2 + j.b2 * j.c1
                       + a * j.b11 + 2 * c * j.b12 - 2 * j.b13 + b * j.b22 + 2 * j.c14),
    }
    for (i, k), v in vals.items():
        rho[i - 1, k - 1] = rho[k - 1, i - 1] = v
    tau = j.a11 + j.b22 + 2 * j.c12
    return RicciScalar(rho, float(tau))


def ricci_scalar(W: WalkerMetric, p: Sequence[float]) -> RicciScalar:
    return _ricci_from_jet(W.jet(p))


def weyl_from(g: np.ndarray, R: np.ndarray, rho: np.ndarray, tau: float) -> np.ndarray:
    """Weyl tensor in dimension four from lowered R, Ricci and scalar curvature."""
    gg = np.einsum("ik,jl->ijkl", g, g)
    gr = np.einsum("ik,jl->ijkl", rho, g)
    gr2 = np.einsum("ik,jl->ijkl", g, rho)
    term_tau = gg - gg.transpose(1, 0, 2, 3)
    term_rho = gr - gr.transpose(1, 0, 2, 3) + gr2 - gr2.transpose(1, 0, 2, 3)
    return R + tau / 6.0 * term_tau - 0.5 * term_rho


def weyl(W: WalkerMetric, p: Sequence[float]) -> WeylTable:
    j = W.jet(p)
    g = metric_from_values(j.a, j.b, j.c).g
    R = np.zeros((4, 4, 4, 4))
    for key, v in riemann_components(j).items():
        _set_curvature(R, *map(int, key), v)
    rs = _ricci_from_jet(j)
    return WeylTable(weyl_from(g, R, rs.rho, rs.tau))


def einstein_residuals(W: WalkerMetric, p: Sequence[float]) -> dict[str, float]:
    """Components of the trace-free Ricci tensor rho - tau/4 g (13, 14, 23, 33, 34, 44)."""
    j = W.jet(p)
    a, b, c = j.a, j.b, j.c
    return {
        "13": 0.25 * (j.a11 - j.b22),
        "14": 0.5 * (j.b12 + j.c11),
        "23": 0.5 * (j.a12 + j.c22),
        "33": 0.25 * (2 * j.a1 * j.c2 + 2 * j.a2 * j.b2 - 2 * j.a2 * j.c1 - 2 * j.c2 ** 2
                      + a * j.a11 + 4 * c * j.a12 + 2 * b * j.a22 - 4 * j.a24
                      - a * j.b22 - 2 * a * j.c12 + 4 * j.c23),
        "34": 0.25 * (-2 * j.a2 * j.b1 + 2 * j.c1 * j.c2 - c * j.a11 + 2 * j.a14 - c * j.b22
                      + 2 * j.b23 + 2 * a * j.c11 + 2 * c * j.c12 - 2 * j.c13 + 2 * b * j.c22
                      - 2 * j.c24),
        "44": 0.25 * (2 * j.a1 * j.b1 - 2 * j.b1 * j.c2 + 2 * j.b2 * j.c1 - 2 * j.c1 ** 2
                      - b * j.a11 + 2 * a * j.b11 + 4 * c * j.b12 - 4 * j.b13
                      + b * j.b22 - 2 * b * j.c12 + 4 * j.c14),
    }


# ---------------------------------------------------------------------------
# Generic route
# ---------------------------------------------------------------------------


def _symbolic_metric(W: WalkerMetric):
    z, o = const(0), const(1)
    a, b, c = W.a, W.b, W.c
    g = [[z, z, o, z], [z, z, z, o], [o, z, a, c], [z, o, c, b]]
    ginv = [[-a, -c, o, z], [-c, -b, z, o], [o, z, z, z], [z, o, z, z]]
    return g, ginv


def _oracle_evaluator(W: WalkerMetric):
    cached = W.cache.get("oracle")
    if cached is not None:
        return cached
    g, ginv = _symbolic_metric(W)
    dg = [[[g[i][j].diff(m + 1) for j in range(4)] for i in range(4)] for m in range(4)]
    gamma: list[ScalarField] = []
    for k in range(4):
        for i in range(4):
            for j in range(4):
                total = const(0)
                for l in range(4):
                    if ginv[k][l].is_zero():
                        continue
                    bracket = dg[i][j][l] + dg[j][i][l] - dg[l][i][j]
                    if bracket.is_zero():
                        continue
                    total = total + ginv[k][l] * bracket
                gamma.append(0.5 * total)
    dgamma = [f.diff(m + 1) for m in range(4) for f in gamma]
    fn = compile_fields([W.a, W.b, W.c] + gamma + dgamma)
    return W.cache.setdefault("oracle", fn)


def _oracle_arrays(W: WalkerMetric, p):
    vals = np.array(_oracle_evaluator(W)(*_point(p)), dtype=float)
    a, b, c = vals[:3]
    gam = vals[3:67].reshape(4, 4, 4)
    dgam = vals[67:].reshape(4, 4, 4, 4)  # dgam[m, k, i, j] = d_m gamma[k, i, j]
    return metric_from_values(a, b, c), gam, dgam


def connection_oracle(W: WalkerMetric, p: Sequence[float]) -> ConnectionTable:
    return ConnectionTable(_oracle_arrays(W, p)[1])


def _riemann_generic(m, gam, dgam) -> np.ndarray:
    # usual-sign R^l_{kij} = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
    Rstd = (
        np.einsum("iljk->lkij", dgam)
        - np.einsum("jlik->lkij", dgam)
        + np.einsum("lim,mjk->lkij", gam, gam)
        - np.einsum("ljm,mik->lkij", gam, gam)
    )
    # flip to R(X, Y) = nabla_[X,Y] - [nabla_X, nabla_Y] and lower the last slot
    R = -np.einsum("lm,mkij->ijkl", m.g, Rstd)
    # Lowering breaks the (k, l) antisymmetry by rounding, which leaves O(eps * |R|)
    # noise on entries that vanish identically; average over the exact symmetries.
    R = 0.5 * (R - R.transpose(1, 0, 2, 3))
    R = 0.5 * (R - R.transpose(0, 1, 3, 2))
    return 0.5 * (R + R.transpose(2, 3, 0, 1))


def riemann_oracle(W: WalkerMetric, p: Sequence[float]) -> RiemannTable:
    m, gam, dgam = _oracle_arrays(W, p)
    return RiemannTable(_riemann_generic(m, gam, dgam))


def _ricci_generic(ginv, R) -> RicciScalar:
    rho = np.einsum("il,jikl->jk", ginv, R)
    return RicciScalar(rho, float(np.einsum("jk,jk->", ginv, rho)))


def ricci_oracle(W: WalkerMetric, p: Sequence[float]) -> RicciScalar:
    m, gam, dgam = _oracle_arrays(W, p)
    return _ricci_generic(m.ginv, _riemann_generic(m, gam, dgam))


def weyl_oracle(W: WalkerMetric, p: Sequence[float]) -> WeylTable:
    m, gam, dgam = _oracle_arrays(W, p)
    R = _riemann_generic(m, gam, dgam)
    rs = _ricci_generic(m.ginv, R)
    return WeylTable(weyl_from(m.g, R, rs.rho, rs.tau))


def einstein_oracle(W: WalkerMetric, p: Sequence[float]) -> dict[str, float]:
    m, gam, dgam = _oracle_arrays(W, p)
    rs = _ricci_generic(m.ginv, _riemann_generic(m, gam, dgam))
    rho0 = rs.rho - rs.tau / 4.0 * m.g
    return {k: float(rho0[int(k[0]) - 1, int(k[1]) - 1]) for k in EINSTEIN_KEYS}
