"""Report builders behind the command-line interface."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import __version__
from .config import BuiltMetric, MetricConfig, build_metric
from .curvature import (
    EINSTEIN_KEYS,
    connection,
    connection_oracle,
    einstein_oracle,
    einstein_residuals,
    ricci_oracle,
    ricci_scalar,
    riemann,
    riemann_oracle,
    weyl,
    weyl_oracle,
)
from .duality import classify_wplus, selfdual_residuals, wpm_matrix, wpm_oracle
from .expr import evaluate
from .families import ricciflat_class, strict_indicator, wplus12_ricciflat
from .jacobi import (
    JacobiOperator,
    jacobi_from_tables,
    jordan_classify,
    osserman_scan,
    sample_direction,
    scan_points,
)
from .linalg import expand, spectrum3
from .metric import WalkerMetric, metric_matrix


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real) + 0.0, float(x.imag) + 0.0]
    if isinstance(x, (np.floating, float)):
        return float(x) + 0.0  # no negative zeros
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def to_json(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------


def classify(cfg: MetricConfig) -> dict:
    """Per-point curvature records plus a summary; deterministic in (config, seed)."""
    W = build_metric(cfg).metric
    scan = osserman_scan(W, cfg.region, cfg.points, cfg.dirs, tol=cfg.tol_eigen, seed=cfg.seed,
                         jordan_tol=cfg.tol_jordan, workers=cfg.workers)
    records = []
    wplus_indet = 0
    for s in scan.samples:
        p = s.point
        d = classify_wplus(W, p, cfg.tol_classify)
        wplus_indet += d.indeterminate
        records.append({
            "point": list(p),
            "tau": ricci_scalar(W, p).tau,
            "selfdual_residuals": list(selfdual_residuals(W, p)),
            "einstein_residuals": einstein_residuals(W, p),
            "wplus": {"w11": d.w11, "w12": d.w12, "tau": d.tau, "delta": d.delta,
                      "jordan": d.jordan, "indeterminate": d.indeterminate},
            "jordan_type": s.types[0] if len(s.types) == 1 else "mixed",
            "jordan_types": list(s.types),
            "spectrum": s.spectrum,
            "raw_spectrum_spacelike": s.raw_spacelike,
            "raw_spectrum_timelike": s.raw_timelike,
            "spectrum_spread": s.spread,
            "indeterminate": s.indeterminate,
        })
    sd_max = [max(abs(r["selfdual_residuals"][i]) for r in records) for i in range(5)]
    ein_max = {k: max(abs(r["einstein_residuals"][k]) for r in records) for k in EINSTEIN_KEYS}
    summary = {
        "kind": cfg.kind,
        "is_selfdual": max(sd_max) <= cfg.tol,
        "is_einstein": max(ein_max.values()) <= cfg.tol,
        "selfdual_residual_max": sd_max,
        "einstein_residual_max": ein_max,
        "is_pointwise_osserman": scan.is_pointwise_osserman,
        "is_osserman": scan.is_osserman,
        "is_jordan_osserman": scan.is_jordan_osserman,
        "jordan_types": list(scan.types),
        "wplus_classes": sorted({r["wplus"]["jordan"] for r in records}),
        "spectrum": scan.spacelike_spectrum,
        "spectrum_spread": scan.max_spread,
        "points": scan.points_sampled,
        "directions_per_point": scan.directions_per_point,
        "indeterminate_count": scan.indeterminate_count + wplus_indet,
    }
    return {
        "summary": summary,
        "points": records,
        "provenance": {"config_sha256": cfg.digest, "seed": cfg.seed, "version": __version__},
    }


def _fmt_spectrum(vals) -> str:
    out = []
    for v in vals:
        z = complex(v)
        out.append(f"{z.real:.10g}" if z.imag == 0 else f"{z.real:.6g}{z.imag:+.6g}i")
    return "{" + ", ".join(out) + "}"


def classify_text(report: dict) -> str:
    s = report["summary"]
    lines = [
        f"kind: {s['kind']}",
        f"points: {s['points']} x {s['directions_per_point']} directions per causal bundle",
        f"self-dual: {'yes' if s['is_selfdual'] else 'no'}"
        f"  (max residuals {', '.join(f'{v:.3g}' for v in s['selfdual_residual_max'])})",
        f"einstein: {'yes' if s['is_einstein'] else 'no'}"
        f"  (max residual {max(s['einstein_residual_max'].values()):.3g})",
        f"osserman: {'yes' if s['is_osserman'] else 'no'}"
        f" (pointwise {'yes' if s['is_pointwise_osserman'] else 'no'}, spread {s['spectrum_spread']:.3g})",
        f"jordan-osserman: {'yes' if s['is_jordan_osserman'] else 'no'}",
        f"jacobi types: {', '.join(s['jordan_types'])}",
        f"W+ classes: {', '.join(s['wplus_classes'])}",
        f"normalized spectrum: {_fmt_spectrum(s['spectrum'])}",
        f"indeterminate decisions: {s['indeterminate_count']}",
        f"config sha256: {report['provenance']['config_sha256'][:16]}  seed: {report['provenance']['seed']}",
    ]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# audit: closed forms against the generic route
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TableAudit:
    table: str
    max_abs: float
    max_rel: float
    ok: bool


def _tables(W: WalkerMetric, p) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    rs, ro = ricci_scalar(W, p), ricci_oracle(W, p)
    e, eo = einstein_residuals(W, p), einstein_oracle(W, p)
    return {
        "connection": (connection(W, p).gamma, connection_oracle(W, p).gamma),
        "riemann": (riemann(W, p).R, riemann_oracle(W, p).R),
        "ricci": (rs.rho, ro.rho),
        "scalar": (np.array([rs.tau]), np.array([ro.tau])),
        "einstein": (np.array([e[k] for k in EINSTEIN_KEYS]), np.array([eo[k] for k in EINSTEIN_KEYS])),
        "weyl": (weyl(W, p).W, weyl_oracle(W, p).W),
        "wplus": (wpm_matrix(W, p, "self").m, wpm_oracle(W, p, "self").m),
        "wminus": (wpm_matrix(W, p, "anti").m, wpm_oracle(W, p, "anti").m),
    }


AUDIT_TABLES = ("connection", "riemann", "ricci", "scalar", "einstein", "weyl", "wplus", "wminus")


def audit(cfg: MetricConfig, inject: str | None = None) -> list[TableAudit]:
    """Compare closed-form tables with the generic ones at the scan points.

    Entry-wise acceptance: |closed - generic| <= tol/10 + tol |generic|.
    ``inject`` names a table whose closed form is perturbed (negative control).
    """
    if inject is not None and inject not in AUDIT_TABLES:
        raise ValueError(f"unknown table {inject!r}")
    W = build_metric(cfg).metric
    atol, rtol = cfg.tol / 10.0, cfg.tol
    stats = {t: [0.0, 0.0, True] for t in AUDIT_TABLES}
    for p in scan_points(cfg.region, cfg.points, cfg.seed):
        for name, (closed, oracle) in _tables(W, p).items():
            closed = np.array(closed, dtype=float)
            if name == inject:
                closed.flat[0] += 1e-6 * (1.0 + abs(closed.flat[0]))
            diff = np.abs(closed - oracle)
            mag = np.abs(oracle)
            st = stats[name]
            st[0] = max(st[0], float(diff.max()))
            nz = mag > atol
            if nz.any():
                st[1] = max(st[1], float((diff[nz] / mag[nz]).max()))
            st[2] = st[2] and bool(np.all(diff <= atol + rtol * mag))
    return [TableAudit(t, *stats[t]) for t in AUDIT_TABLES]


# ---------------------------------------------------------------------------
# verify-family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str


def _check_max(name: str, values, limit: float, label: str = "max |value|") -> Check:
    worst = max((abs(float(v)) for v in values), default=0.0)
    return Check(name, worst <= limit, f"{label} = {worst:.3g} (limit {limit:.3g})")


def _directions(W: WalkerMetric, p, n: int, rng: np.random.Generator) -> list[JacobiOperator]:
    mp = metric_matrix(W, p)
    R = riemann(W, p).R
    return [jacobi_from_tables(mp.g, mp.ginv, R, sample_direction(mp.g, sign, rng))
            for sign in (1, -1) for _ in range(n)]


def _spectrum_error(J: JacobiOperator, expected, tol) -> float:
    got = np.array([complex(v) for v in J.spectrum(tol)])
    return float(np.max(np.abs(np.sort_complex(got) - np.sort_complex(np.array(expected, dtype=complex)))))


def _common(W, pts, cfg, *, einstein=True, selfdual=True) -> list[Check]:
    out = []
    if selfdual:
        out.append(_check_max("self-duality residuals vanish",
                              [v for p in pts for v in selfdual_residuals(W, p)], cfg.tol))
        out.append(_check_max("W- vanishes",
                              [v for p in pts for v in wpm_matrix(W, p, "anti").m.ravel()], cfg.tol))
    if einstein:
        out.append(_check_max("Einstein residuals vanish",
                              [v for p in pts for v in einstein_residuals(W, p).values()], cfg.tol))
    return out


def _verify_selfdual(W, built, pts, cfg, rng):
    return _common(W, pts, cfg, einstein=False)


def _verify_typeII(W, built, pts, cfg, rng):
    tau = cfg.tau
    checks = _common(W, pts, cfg)
    checks.append(_check_max("scalar curvature equals tau",
                             [ricci_scalar(W, p).tau - tau for p in pts], cfg.tol * max(1.0, abs(tau)),
                             "max |tau(p) - tau|"))
    wplus_err = []
    for p in pts:
        m = wpm_matrix(W, p, "self").m
        clusters, _, _ = spectrum3(m, cfg.tol_jordan)
        got = np.array(expand(clusters), dtype=complex)
        exp_ = np.sort_complex(np.array([tau / 6, -tau / 12, -tau / 12], dtype=complex))
        wplus_err.append(float(np.max(np.abs(np.sort_complex(got) - exp_))) / max(1.0, float(np.linalg.norm(m))))
    checks.append(_check_max("W+ eigenvalues {tau/6, -tau/12, -tau/12}", wplus_err, cfg.tol_eigen,
                             "max error / max(1, |W+|)"))
    expected = [0.0, tau / 6, tau / 24, tau / 24]
    spec_err, ratio_err = [], []
    agree = disagree = skipped = 0
    for p in pts:
        d = classify_wplus(W, p, cfg.tol_classify)
        for J in _directions(W, p, cfg.dirs, rng):
            spec_err.append(_spectrum_error(J, expected, cfg.tol_jordan))
            vals = [float(complex(v).real) for v in J.spectrum(cfg.tol_jordan)]
            big = max(vals, key=abs)
            small = sorted(vals, key=abs)[1]
            ratio_err.append(big / small - 4.0 if small else np.inf)
            rep = jordan_classify(J.m3, cfg.tol_jordan)
            if rep.indeterminate or d.indeterminate:
                skipped += 1
                continue
            want = "II" if d.jordan == "II-double-root" else "Ia"
            if rep.type == want:
                agree += 1
            else:
                disagree += 1
    checks.append(_check_max("Jacobi spectrum {0, tau/6, tau/24, tau/24}", spec_err, cfg.tol_eigen,
                             "max |error|"))
    checks.append(_check_max("nonzero eigenvalue ratio 4:1", ratio_err, cfg.tol_eigen, "max |ratio - 4|"))
    checks.append(Check("Jacobi type II exactly where the W+ criterion fails", disagree == 0,
                        f"{agree} agree, {disagree} disagree, {skipped} in the indeterminate band"))
    return checks


def _verify_ricciflat(W, built, pts, cfg, rng):
    residuals = built.extras["residuals"]
    checks = []
    for i, r in enumerate(residuals, 1):
        checks.append(_check_max(f"Einstein PDE residual r{i} vanishes", [evaluate(r, p) for p in pts], cfg.tol,
                                 f"max |r{i}|"))
    if not all(c.ok for c in checks):
        return checks  # not a solution: the remaining invariants do not apply
    checks.append(_check_max("scalar curvature vanishes", [ricci_scalar(W, p).tau for p in pts], cfg.tol))
    checks.extend(_common(W, pts, cfg))
    coeffs = built.extras["coefficients"]
    indicator = wplus12_ricciflat(**{k: coeffs[k] for k in "PTUV" if k in coeffs})
    bad_w12 = 0
    agree = disagree = skipped = 0
    for p in pts:
        kind, d = ricciflat_class(W, p, cfg.tol_classify)
        bad_w12 += (abs(evaluate(indicator, p)) <= cfg.tol) != (abs(d.w12) <= cfg.tol_classify)
        for J in _directions(W, p, cfg.dirs, rng):
            rep = jordan_classify(J.m3, cfg.tol_jordan)
            if rep.indeterminate or d.indeterminate:
                skipped += 1
            elif rep.type == kind:
                agree += 1
            else:
                disagree += 1
    checks.append(Check("W+12 vanishes iff T3 + U3 - P4 - V4 does", bad_w12 == 0, f"{bad_w12} points disagree"))
    checks.append(Check("Jacobi type matches the W+ sub-case", disagree == 0,
                        f"{agree} agree, {disagree} disagree, {skipped} in the indeterminate band"))
    return checks


def _verify_strict(W, built, pts, cfg, rng):
    checks = [_check_max("Ricci flat", [v for p in pts for v in ricci_scalar(W, p).rho.ravel()], cfg.tol)]
    checks.extend(_common(W, pts, cfg, einstein=False))
    ind = strict_indicator(W)
    wrong = 0
    for p in pts:
        v = evaluate(ind, p)
        for J in _directions(W, p, cfg.dirs, rng):
            norm = float(np.linalg.norm(J.m4))
            if abs(v) <= cfg.tol:
                wrong += norm > cfg.tol
            else:
                wrong += not (norm > cfg.tol and np.linalg.norm(J.m4 @ J.m4) <= cfg.tol * max(1.0, norm ** 2))
    checks.append(Check("Jacobi operators vanish iff 2c34 - a44 - b33 = 0, else J^2 = 0", wrong == 0,
                        f"{wrong} directions violate the rule"))
    return checks


def _verify_parakahler(W, built, pts, cfg, rng):
    J = built.extras["J"]
    alpha = cfg.alpha
    sq, iso = [], []
    for p in pts:
        Jp = J(p)
        g = metric_matrix(W, p).g
        sq.append(float(np.abs(Jp @ Jp - np.eye(4)).max()))
        X, Y = rng.standard_normal(4), rng.standard_normal(4)
        gxy = float(X @ g @ Y)
        iso.append(abs(float((Jp @ X) @ g @ (Jp @ Y)) + gxy) / (1.0 + abs(gxy)))
    checks = [
        _check_max("J^2 = identity", sq, cfg.tol),
        _check_max("g(JX, JY) = -g(X, Y)", iso, cfg.tol, "max relative error"),
        _check_max("scalar curvature equals 6 alpha", [ricci_scalar(W, p).tau - 6 * alpha for p in pts],
                   cfg.tol * max(1.0, abs(alpha))),
    ]
    checks.extend(_common(W, pts, cfg))
    expected = [0.0, alpha, alpha / 4, alpha / 4]
    errs, types = [], set()
    for p in pts:
        for Jx in _directions(W, p, cfg.dirs, rng):
            errs.append(_spectrum_error(Jx, expected, cfg.tol_jordan))
            types.add(jordan_classify(Jx.m3, cfg.tol_jordan).type)
    checks.append(_check_max("Jacobi spectrum {0, alpha, alpha/4, alpha/4}", errs, cfg.tol_eigen, "max |error|"))
    checks.append(Check("Jacobi operators diagonalizable", types <= {"Ia"}, f"types seen: {sorted(types)}"))
    return checks


def _verify_antiselfdual(W, built, pts, cfg, rng):
    ident = []
    for p in pts:
        j = W.jet(p)
        ident += [j.a11 - j.a22, j.a11 + j.a12, j.a13 - j.a14, j.a23 - j.a24, j.a33 + j.a44 - 2 * j.a34]
    checks = [
        _check_max("a11 = a22 = -a12, a13 = a14, a23 = a24, a33 + a44 = 2 a34", ident, cfg.tol),
        _check_max("scalar curvature vanishes", [ricci_scalar(W, p).tau for p in pts], cfg.tol),
        _check_max("Ricci tensor vanishes", [v for p in pts for v in ricci_scalar(W, p).rho.ravel()], cfg.tol),
        _check_max("W+ vanishes", [v for p in pts for v in wpm_matrix(W, p, "self").m.ravel()], cfg.tol),
    ]
    ops = [J for p in pts for J in _directions(W, p, cfg.dirs, rng)]
    sq = [float(np.linalg.norm(J.m4 @ J.m4)) / max(1.0, float(np.linalg.norm(J.m4)) ** 2) for J in ops]
    least = min(float(np.linalg.norm(J.m4)) for J in ops)
    checks.append(_check_max("J^2 = 0", sq, cfg.tol, "max |J^2| / max(1, |J|^2)"))
    checks.append(Check("J != 0", least > cfg.tol, f"min |J| = {least:.3g}"))
    return checks


_VERIFIERS: dict[str, Callable] = {
    "selfdual": _verify_selfdual,
    "typeII": _verify_typeII,
    "ricciflat-selfdual": _verify_ricciflat,
    "strict": _verify_strict,
    "parakahler": _verify_parakahler,
    "antiselfdual-example": _verify_antiselfdual,
}


def verify_family(cfg: MetricConfig) -> list[Check]:
    if cfg.kind not in _VERIFIERS:
        raise ValueError(f"kind {cfg.kind!r} is not a family; use classify or audit instead")
    built: BuiltMetric = build_metric(cfg)
    pts = scan_points(cfg.region, cfg.points, cfg.seed)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(3)[2])
    return _VERIFIERS[cfg.kind](built.metric, built, pts, cfg, rng)
