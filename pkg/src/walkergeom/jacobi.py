"""Jacobi operators, Jordan normal form classification and Osserman sampling."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .curvature import riemann
from .linalg import expand, numerical_rank, spectrum3
from .metric import WalkerMetric, metric_matrix

NULL_TOL = 1e-8


class NullDirectionError(ValueError):
    pass


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class JacobiOperator:
    X: np.ndarray
    epsX: int
    m4: np.ndarray
    m3: np.ndarray
    basis: np.ndarray  # columns span X-perp

    def spectrum(self, tol: float = 1e-6) -> list:
        """Normalized spectrum: 0 (the X direction) plus epsX times the eigenvalues on X-perp."""
        clusters, _, _ = spectrum3(self.m3, tol)
        return sort_values([0.0] + [self.epsX * v for v in expand(clusters)])


@dataclass(frozen=True)
class JordanReport:
    type: str  # Ia, Ib, II, III
    eigenvalues: list  # (value, multiplicity)
    nilpotency_degree: int | None = None
    normalized: bool = False
    indeterminate: bool = False


def sort_values(vals) -> list:
    return sorted(vals, key=lambda z: (complex(z).real, complex(z).imag))


# ---------------------------------------------------------------------------
# Operator assembly
# ---------------------------------------------------------------------------


def perp_basis(g: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Euclidean-orthonormal basis of X-perp (4x3, columns).

    X-perp is the kernel of the covector g X, so the last three right singular
    vectors of that covector span it.  A well-conditioned basis keeps the
    restricted operator as accurate as the 4x4 one even for strongly boosted
    directions.
    """
    _, _, vt = np.linalg.svd((g @ X)[None, :])
    return vt[1:].T


def jacobi_from_tables(g: np.ndarray, ginv: np.ndarray, R: np.ndarray, X) -> JacobiOperator:
    X = np.asarray(X, dtype=float)
    gXX = float(X @ g @ X)
    if abs(gXX) <= NULL_TOL * float(X @ X):
        raise NullDirectionError(f"direction is null or nearly null (g(X,X) = {gXX:.3e})")
    X = X / math.sqrt(abs(gXX))
    epsX = 1 if gXX > 0 else -1
    # J_X Y = R(X, Y) X in the sign convention of R used here; g(J_X d_j, d_k) = L[j, k]
    L = np.einsum("ajbk,a,b->jk", R, X, X)
    m4 = ginv @ L.T
    # X-perp is J-invariant, so J F = F m3 with F orthonormal
    F = perp_basis(g, X)
    m3 = F.T @ m4 @ F
    return JacobiOperator(X, epsX, m4, m3, F)


def jacobi_operator(W: WalkerMetric, p: Sequence[float], X) -> JacobiOperator:
    mp = metric_matrix(W, p)
    return jacobi_from_tables(mp.g, mp.ginv, riemann(W, p).R, X)


# ---------------------------------------------------------------------------
# Jordan classification of 3x3 operators
# ---------------------------------------------------------------------------


def jordan_classify(m, tol: float = 1e-6, atol: float = 1e-12, rank_tol: float = 1e-10) -> JordanReport:
    """Jordan type of a 3x3 operator: Ia, Ib, II (double root of the minimal
    polynomial) or III (triple root).

    Eigenvalues closer than ``tol * scale`` are merged (scale is the Frobenius
    norm); defective roots split by about sqrt(eps) under rounding, so this
    needs to be loose.  Rank decisions compare singular values against
    ``rank_tol * scale``, which only has to clear the rounding floor.
    Operators with Frobenius norm at most ``atol`` are treated as zero.
    """
    if tol <= 0 or rank_tol <= 0:
        raise ValueError("tolerances must be positive")
    m = np.asarray(m, dtype=float)
    scale = float(np.linalg.norm(m))
    if scale <= atol:
        return JordanReport("Ia", [(0.0, 3)], nilpotency_degree=0)
    clusters, _, border = spectrum3(m, tol)
    thr = rank_tol * scale
    if any(isinstance(v, complex) for v, _ in clusters):
        return JordanReport("Ib", clusters, indeterminate=border)
    if len(clusters) == 3:
        return JordanReport("Ia", clusters, indeterminate=border)
    I = np.eye(3)
    if len(clusters) == 2:
        beta = next(v for v, mult in clusters if mult == 2)
        rank, near = numerical_rank(m - beta * I, thr)
        kind = "Ia" if rank <= 1 else "II"
        return JordanReport(kind, clusters, indeterminate=border or near)
    lam = clusters[0][0]
    rank, near = numerical_rank(m - lam * I, thr)
    kind = {0: "Ia", 1: "II"}.get(rank, "III")
    nil = None
    if abs(lam) <= tol * scale:
        nil = {0: 0, 1: 2}.get(rank, 3)
    return JordanReport(kind, clusters, nilpotency_degree=nil, indeterminate=border or near)


# ---------------------------------------------------------------------------
# Osserman sampling
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PointScan:
    point: tuple
    spectrum: list  # normalized reference spectrum at this point
    types: tuple  # sorted distinct Jordan types seen here
    spread: float
    indeterminate: int
    raw_spacelike: list = field(default_factory=list)
    raw_timelike: list = field(default_factory=list)


@dataclass(frozen=True)
class OssermanReport:
    seed: int
    points_sampled: int
    directions_per_point: int
    spacelike_spectrum: list
    timelike_spectrum: list
    max_spread: float
    is_pointwise_osserman: bool
    is_osserman: bool
    is_jordan_osserman: bool
    types: tuple
    indeterminate_count: int
    samples: list


def _distance(u, v) -> float:
    return max(abs(complex(x) - complex(y)) for x, y in zip(u, v))


def _within(u, v, tol) -> bool:
    ref = max([1.0] + [abs(complex(x)) for x in v])
    return _distance(u, v) <= tol * ref


def sample_direction(g: np.ndarray, sign: int, rng: np.random.Generator,
                     max_tries: int = 1000, ratio: float = 1e-2) -> np.ndarray:
    """Unit vector with g(X, X) = sign, by rejection on the sign of g(X, X).

    Gaussian coefficients are drawn in the g-orthonormal basis built from the
    eigenvectors of g, which gives the unit vectors of smallest Euclidean norm
    and keeps acceptance independent of the size of the metric coefficients.
    """
    lam, Q = np.linalg.eigh(g)
    B = Q / np.sqrt(np.abs(lam))
    for _ in range(max_tries):
        y = rng.standard_normal(4)
        q = float(np.sign(lam) @ (y * y))
        if q * sign > ratio * float(y @ y):
            X = B @ y
            return X / math.sqrt(abs(float(X @ g @ X)))
    raise SamplingError(f"no {'spacelike' if sign > 0 else 'timelike'} direction after {max_tries} tries")


def _scan_point(W, p, n_dirs, seed_seq, tol, jordan_tol):
    rng = np.random.default_rng(seed_seq)
    mp = metric_matrix(W, p)
    R = riemann(W, p).R
    spectra = {1: [], -1: []}
    types = []
    indet = 0
    for sign in (1, -1):
        for _ in range(n_dirs):
            X = sample_direction(mp.g, sign, rng)
            J = jacobi_from_tables(mp.g, mp.ginv, R, X)
            rep = jordan_classify(J.m3, jordan_tol)
            spectra[sign].append(J.spectrum(jordan_tol))
            types.append(rep.type)
            indet += rep.indeterminate
    ref = spectra[1][0]
    spread = max(_distance(s, ref) for sign in (1, -1) for s in spectra[sign])
    ok = all(_within(s, ref, tol) for sign in (1, -1) for s in spectra[sign])
    return spectra, PointScan(
        point=tuple(float(x) for x in p),
        spectrum=ref,
        types=tuple(sorted(set(types))),
        spread=spread,
        indeterminate=indet,
        raw_spacelike=spectra[1][0],
        raw_timelike=[-v for v in spectra[-1][0]],
    ), ok


def sample_points(region, n_points: int, rng: np.random.Generator) -> np.ndarray:
    lo, hi = _check_region(region)
    return rng.uniform(lo, hi, size=(n_points, 4))


def _seeds(seed: int) -> tuple[np.random.SeedSequence, np.random.SeedSequence]:
    point_seq, dir_seq = np.random.SeedSequence(seed).spawn(2)
    return point_seq, dir_seq


def scan_points(region, n_points: int, seed: int) -> np.ndarray:
    """The points ``osserman_scan`` visits for this region, count and seed."""
    return sample_points(region, n_points, np.random.default_rng(_seeds(seed)[0]))


def _check_region(region):
    box = np.asarray(region, dtype=float)
    if box.shape != (4, 2):
        raise ValueError("region must be four (min, max) pairs")
    if not np.all(np.isfinite(box)) or np.any(box[:, 0] >= box[:, 1]):
        raise ValueError(f"degenerate region {box.tolist()}")
    return box[:, 0], box[:, 1]


def osserman_scan(W: WalkerMetric, region, n_points: int, n_dirs: int, tol: float = 1e-8,
                  seed: int = 0, jordan_tol: float = 1e-6, workers: int = 1,
                  points: np.ndarray | None = None) -> OssermanReport:
    """Sample Jacobi spectra on the unit spacelike and timelike bundles.

    ``points`` overrides the uniform sample of ``region``.  Results are merged
    in sample order, so ``workers`` does not change the report.
    """
    if n_points < 1 or n_dirs < 1:
        raise ValueError("counts must be at least 1")
    point_seq, dir_seq = _seeds(seed)
    if points is None:
        points = sample_points(region, n_points, np.random.default_rng(point_seq))
    else:
        _check_region(region)
    child = dir_seq.spawn(len(points))
    jobs = [(W, p, n_dirs, s, tol, jordan_tol) for p, s in zip(points, child)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda a: _scan_point(*a), jobs))
    else:
        results = [_scan_point(*a) for a in jobs]

    space_ref = results[0][0][1][0]
    time_ref = results[0][0][-1][0]
    max_spread = 0.0
    osserman = True
    for spectra, _, _ in results:
        for sign, ref in ((1, space_ref), (-1, time_ref)):
            for s in spectra[sign]:
                max_spread = max(max_spread, _distance(s, ref))
                osserman &= _within(s, ref, tol)
    samples = [r[1] for r in results]
    types = tuple(sorted({t for s in samples for t in s.types}))
    indet = sum(s.indeterminate for s in samples)
    pointwise = all(r[2] for r in results)
    return OssermanReport(
        seed=seed,
        points_sampled=len(points),
        directions_per_point=n_dirs,
        spacelike_spectrum=space_ref,
        timelike_spectrum=time_ref,
        max_spread=max_spread,
        is_pointwise_osserman=pointwise,
        is_osserman=osserman and pointwise,
        is_jordan_osserman=osserman and pointwise and len(types) == 1 and indet == 0,
        types=types,
        indeterminate_count=indet,
        samples=samples,
    )
