"""Self-dual and anti-self-dual Weyl operators of Walker metrics.

Orientation is fixed by the frame below together with the two-form bases

    E1± = (e^12 ± e^34)/√2,  E2± = (e^13 ± e^24)/√2,  E3± = (e^14 ∓ e^23)/√2.

"Self-dual" means W⁻ = 0 in this convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .curvature import ricci_oracle, weyl_oracle
from .linalg import expand, spectrum3
from .metric import WalkerMetric

EPS = (1.0, 1.0, -1.0, -1.0)
PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))  # (12),(13),(14),(23),(24),(34)


@dataclass(frozen=True)
class Frame:
    e: np.ndarray  # rows e1..e4 in the coordinate basis
    eps: tuple = EPS


@dataclass(frozen=True)
class WeylOperator:
    m: np.ndarray
    sign: str  # "self" or "anti"
    tau: float


@dataclass(frozen=True)
class WplusDiagnostic:
    w11: float
    w12: float
    tau: float
    delta: float
    jordan: str
    indeterminate: bool = False

    @property
    def scale(self) -> float:
        return self.tau ** 2 + abs(12 * self.tau * self.w11) + 48 * self.w12 ** 2


def frame_from_values(a: float, b: float, c: float) -> Frame:
    e = np.array([
        [0.5 * (1 - a), 0.0, 1.0, 0.0],
        [-c, 0.5 * (1 - b), 0.0, 1.0],
        [-0.5 * (1 + a), 0.0, 1.0, 0.0],
        [-c, -0.5 * (1 + b), 0.0, 1.0],
    ])
    return Frame(e)


def frame(W: WalkerMetric, p: Sequence[float]) -> Frame:
    j = W.jet(p)
    return frame_from_values(j.a, j.b, j.c)


# ---------------------------------------------------------------------------
# Two-forms in the orthonormal coframe, stored as antisymmetric 4x4 arrays
# ---------------------------------------------------------------------------


def _perm_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def _hodge_table(eps=EPS) -> np.ndarray:
    """6x6 matrix of the star on the basis e^ij (ordered as PAIRS).

    Solved from  e^ij ∧ *(e^kl) = (δ^i_k δ^j_l − δ^i_l δ^j_k) ε_i ε_j vol.
    """
    # wedge[(ij), (mn)] = coefficient of vol in e^ij ∧ e^mn
    wedge = np.zeros((6, 6))
    for r, (i, j) in enumerate(PAIRS):
        for col, (m, n) in enumerate(PAIRS):
            if len({i, j, m, n}) == 4:
                wedge[r, col] = _perm_sign((i, j, m, n))
    rhs = np.diag([eps[i] * eps[j] for i, j in PAIRS])
    # columns of the star matrix: *(e^kl) = sum_mn S[mn, kl] e^mn, so wedge @ S = rhs
    return np.linalg.solve(wedge, rhs)


HODGE = _hodge_table()


def _form(coeffs: dict) -> np.ndarray:
    F = np.zeros((4, 4))
    for (i, j), v in coeffs.items():
        F[i, j] += v
        F[j, i] -= v
    return F


def two_form_basis(sign: str) -> list[np.ndarray]:
    s = 1.0 if sign == "self" else -1.0
    r = 1.0 / math.sqrt(2.0)
    return [
        _form({(0, 1): r, (2, 3): s * r}),
        _form({(0, 2): r, (1, 3): s * r}),
        _form({(0, 3): r, (1, 2): -s * r}),
    ]


def form_vector(F: np.ndarray) -> np.ndarray:
    return np.array([F[i, j] for i, j in PAIRS])


def form_inner(F: np.ndarray, G: np.ndarray, eps=EPS) -> float:
    return float(sum(F[i, j] * G[i, j] * eps[i] * eps[j] for i, j in PAIRS))


def frame_components(T: np.ndarray, fr: Frame) -> np.ndarray:
    """T(e_a, e_b, e_c, e_d) for a covariant 4-tensor given in coordinates."""
    e = fr.e
    return np.einsum("ai,bj,ck,dl,ijkl->abcd", e, e, e, e, T)


def _pair_value(Wf: np.ndarray, F: np.ndarray, G: np.ndarray) -> float:
    # W(F, G) with W(e^i∧e^j, e^k∧e^l) = W(e_i, e_j, e_k, e_l)
    return 0.25 * float(np.einsum("ij,kl,ijkl->", F, G, Wf))


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def wminus_components(j) -> dict[str, float]:
    return {
        "11": -(j.a11 + 3 * j.a22 + 3 * j.b11 + j.b22 - 4 * j.c12) / 12.0,
        "22": -(j.a11 + j.b22 - 4 * j.c12) / 6.0,
        "33": (j.a11 - 3 * j.a22 - 3 * j.b11 + j.b22 - 4 * j.c12) / 12.0,
        "12": (j.a12 + j.b12 - j.c11 - j.c22) / 4.0,
        "13": (j.a22 - j.b11) / 4.0,
        "23": -(j.a12 - j.b12 + j.c11 - j.c22) / 4.0,
    }


def wplus_11(j) -> float:
    a, b, c = j.a, j.b, j.c
    return (
        6 * c * j.a1 * j.b2 - 6 * j.a1 * j.b3 - 6 * b * j.a1 * j.c2 + 12 * j.a1 * j.c4
        - 6 * c * j.a2 * j.b1 + 6 * j.a2 * j.b4 + 6 * b * j.a2 * j.c1
        + 6 * j.a3 * j.b1 - 6 * j.a4 * j.b2 - 12 * j.a4 * j.c1 + 6 * a * j.b1 * j.c2
        - 6 * a * j.b2 * j.c1 + 12 * j.b2 * j.c3 - 12 * j.b3 * j.c2
        - j.a11 - 12 * c ** 2 * j.a11 - 12 * b * c * j.a12 + 24 * c * j.a14
        - 3 * b ** 2 * j.a22 + 12 * b * j.a24 - 12 * j.a44
        - 3 * a ** 2 * j.b11 + 12 * a * j.b13 - j.b22 - 12 * j.b33
        + 12 * a * c * j.c11 - 2 * j.c12 + 6 * a * b * j.c12
        - 24 * c * j.c13 - 12 * a * j.c14 - 12 * b * j.c23 + 24 * j.c34
    ) / 12.0


def wplus_12(j) -> float:
    a, b, c = j.a, j.b, j.c
    return (
        -2 * c * j.a11 - b * j.a12 + 2 * j.a14 + a * j.b12 - 2 * j.b23 + a * j.c11
        - 2 * c * j.c12 - 2 * j.c13 - b * j.c22 + 2 * j.c24
    ) / 4.0


def _signed_matrix(w11, w12, w13, w22, w23, w33) -> np.ndarray:
    return np.array([
        [w11, w12, w13],
        [-w12, -w22, -w23],
        [-w13, -w23, -w33],
    ])


def wpm_matrix(W: WalkerMetric, p: Sequence[float], sign: str) -> WeylOperator:
    j = W.jet(p)
    tau = j.a11 + j.b22 + 2 * j.c12
    if sign == "self":
        w11, w12 = wplus_11(j), wplus_12(j)
        m = _signed_matrix(w11, w12, w11 + tau / 12.0, -tau / 6.0, w12, w11 + tau / 6.0)
    elif sign == "anti":
        c = wminus_components(j)
        m = _signed_matrix(c["11"], c["12"], c["13"], c["22"], c["23"], c["33"])
    else:
        raise ValueError(f"sign must be 'self' or 'anti', got {sign!r}")
    return WeylOperator(m, sign, float(tau))


def wpm_oracle(W: WalkerMetric, p: Sequence[float], sign: str) -> WeylOperator:
    """W± assembled by contracting the generic Weyl tensor with the E± two-forms."""
    if sign not in ("self", "anti"):
        raise ValueError(f"sign must be 'self' or 'anti', got {sign!r}")
    j = W.jet(p)
    Wf = frame_components(weyl_oracle(W, p).W, frame_from_values(j.a, j.b, j.c))
    basis = two_form_basis(sign)
    raw = np.array([[_pair_value(Wf, Ei, Ej) for Ej in basis] for Ei in basis])
    norms = np.array([form_inner(E, E) for E in basis])
    return WeylOperator(norms[:, None] * raw, sign, ricci_oracle(W, p).tau)


def selfdual_residuals(W: WalkerMetric, p: Sequence[float]) -> tuple[float, ...]:
    """a22, b11, a12 - c22, b12 - c11, a11 + b22 - 4 c12."""
    j = W.jet(p)
    return (
        j.a22,
        j.b11,
        j.a12 - j.c22,
        j.b12 - j.c11,
        j.a11 + j.b22 - 4 * j.c12,
    )


def wplus_eigenvalues(W: WalkerMetric, p: Sequence[float], tol: float = 1e-6) -> list[float]:
    clusters, _, _ = spectrum3(wpm_matrix(W, p, "self").m, tol)
    return expand(clusters)


def classify_wplus(W: WalkerMetric, p: Sequence[float], tol: float = 1e-9) -> WplusDiagnostic:
    """Jordan structure of W⁺ from its two free components and tau.

    tau != 0: diagonalizable iff tau² + 12 tau W11 + 48 W12² vanishes, otherwise
    -tau/12 is a double root of the minimal polynomial.  tau == 0: zero,
    two-step nilpotent (W12 = 0, W11 != 0) or three-step nilpotent (W12 != 0).
    Decisions within a factor 10 of their threshold are marked indeterminate.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    j = W.jet(p)
    tau = float(j.a11 + j.b22 + 2 * j.c12)
    w11, w12 = float(wplus_11(j)), float(wplus_12(j))
    delta = tau ** 2 + 12 * tau * w11 + 48 * w12 ** 2

    def near(x, thr):
        return thr / 10.0 < abs(x) <= thr * 10.0

    if abs(tau) > tol:
        scale = tau ** 2 + abs(12 * tau * w11) + 48 * w12 ** 2
        thr = tol * scale
        jordan = "Ia-diagonalizable" if abs(delta) <= thr else "II-double-root"
        indeterminate = near(delta, thr) or near(tau, tol)
    else:
        z11, z12 = abs(w11) <= tol, abs(w12) <= tol
        if z11 and z12:
            jordan = "zero"
        elif z12:
            jordan = "two-step-nilpotent"
        else:
            jordan = "three-step-nilpotent"
        indeterminate = near(tau, tol) or near(w11, tol) or near(w12, tol)
    return WplusDiagnostic(w11, w12, tau, delta, jordan, indeterminate)
