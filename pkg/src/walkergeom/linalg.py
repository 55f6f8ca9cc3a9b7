"""Small dense helpers: closed-form 3x3 spectra and rank tests.

Weyl and Jacobi operators routinely have exactly repeated eigenvalues that are
defective, which splits a numerically computed double root by roughly
sqrt(machine eps).  Roots are therefore computed from the characteristic
cubic, close roots are merged, and merged values are recovered from the
well-conditioned simple root and the trace.  A triple root is detected from
the coefficients of the depressed cubic, which stay accurate even when the
individual roots do not.
"""

from __future__ import annotations

import cmath
import math

import numpy as np


def char_coeffs(m: np.ndarray) -> tuple[float, float, float]:
    """(trace, sum of principal 2x2 minors, det) of a 3x3 matrix."""
    t = m[0, 0] + m[1, 1] + m[2, 2]
    s = (m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
         + m[0, 0] * m[2, 2] - m[0, 2] * m[2, 0]
         + m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
    d = float(np.linalg.det(m))
    return float(t), float(s), d


def _polish(r: float, t: float, s: float, d: float, steps: int = 3) -> float:
    for _ in range(steps):
        f = ((r - t) * r + s) * r - d
        fp = (3 * r - 2 * t) * r + s
        if fp == 0.0:
            break
        step = f / fp
        r2 = r - step
        if not math.isfinite(r2) or abs(((r2 - t) * r2 + s) * r2 - d) > abs(f):
            break
        r = r2
    return r


def cubic_roots(t: float, s: float, d: float) -> list[complex]:
    """Roots of x^3 - t x^2 + s x - d, real roots Newton-polished."""
    # depressed cubic y^3 + p y + q with x = y + t/3
    shift = t / 3.0
    p = s - t * t / 3.0
    q = -2.0 * t ** 3 / 27.0 + t * s / 3.0 - d
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if p == 0.0 and q == 0.0:
        roots = [complex(shift)] * 3
    elif disc <= 0.0 and p < 0.0:
        # three real roots, trigonometric form
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * r)
        arg = max(-1.0, min(1.0, arg))
        phi = math.acos(arg) / 3.0
        roots = [complex(r * math.cos(phi - 2.0 * math.pi * k / 3.0) + shift) for k in range(3)]
    else:
        # one real root (Cardano), then deflate
        sq = math.sqrt(max(disc, 0.0))
        u = math.copysign(abs(-q / 2.0 - math.copysign(sq, q)) ** (1.0 / 3.0), -q / 2.0 - math.copysign(sq, q))
        y = u - p / (3.0 * u) if u != 0.0 else 0.0
        x0 = y + shift
        # quadratic factor x^2 + B x + C from synthetic division
        B = x0 - t
        C = s + B * x0
        dq = cmath.sqrt(B * B - 4.0 * C)
        roots = [complex(x0), (-B + dq) / 2.0, (-B - dq) / 2.0]
    out = []
    for z in roots:
        if abs(z.imag) <= 1e-300:
            out.append(complex(_polish(z.real, t, s, d)))
        else:
            out.append(z)
    return out


def spectrum3(m: np.ndarray, tol: float = 1e-6) -> tuple[list[tuple[complex, int]], float, bool]:
    """Eigenvalue clusters of a 3x3 matrix.

    Returns ``(clusters, scale, borderline)``; clusters are ``(value,
    multiplicity)`` pairs sorted by value and ``scale`` is the Frobenius norm.
    Two roots closer than ``tol * scale`` are merged, and the double value is
    recovered from the trace and the remaining simple root.  A triple root is
    declared when the normalized depressed cubic has both coefficients below
    ``tol**2`` (roots within about ``tol * scale`` of each other).
    ``borderline`` flags a merge decision within a factor 10 of its threshold.
    """
    m = np.asarray(m, dtype=float)
    scale = float(np.linalg.norm(m))
    if scale == 0.0:
        return [(0.0, 3)], 0.0, False
    t, s, d = char_coeffs(m / scale)
    p = s - t * t / 3.0
    q = -2.0 * t ** 3 / 27.0 + t * s / 3.0 - d
    tri = max(abs(p), abs(q))
    if tri <= tol ** 2:
        clusters = [(complex(t / 3.0), 3)]
        borderline = tri > tol ** 2 / 10.0
    else:
        roots = cubic_roots(t, s, d)
        seps = {(i, j): abs(roots[i] - roots[j]) for i in range(3) for j in range(i + 1, 3)}
        (i, j), sep = min(seps.items(), key=lambda kv: kv[1])
        k = 3 - i - j
        if sep <= tol:
            borderline = sep > tol / 10.0 or tri <= tol ** 2 * 10.0
            alpha = roots[k]
            clusters = [(alpha, 1), ((t - alpha) / 2.0, 2)]
        else:
            borderline = sep <= tol * 10.0 or tri <= tol ** 2 * 10.0
            clusters = [(z, 1) for z in roots]
    out = []
    for z, mult in clusters:
        z = z * scale
        if mult > 1 or abs(z.imag) <= tol * scale:
            out.append((float(z.real), mult))
        else:
            out.append((z, mult))
    out.sort(key=lambda vm: (complex(vm[0]).real, complex(vm[0]).imag))
    return out, scale, borderline


def expand(clusters) -> list:
    """Flatten ``(value, multiplicity)`` pairs into a sorted list of values."""
    vals = [v for v, mult in clusters for _ in range(mult)]
    return sorted(vals, key=lambda z: (complex(z).real, complex(z).imag))


def numerical_rank(m: np.ndarray, threshold: float) -> tuple[int, bool]:
    """Rank by singular values against ``threshold``; flag values within x10 of it."""
    sv = np.linalg.svd(np.asarray(m, dtype=float), compute_uv=False)
    rank = int(np.sum(sv > threshold))
    near = bool(np.any((sv > threshold / 10.0) & (sv <= threshold * 10.0)))
    return rank, near
