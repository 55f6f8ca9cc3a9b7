"""``walkergeom`` command line: classify, audit and verify Walker metrics."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .expr import DomainError, ExprError
from .families import FAMILY_KINDS, CoefficientError
from .jacobi import NullDirectionError, SamplingError
from .pipeline import AUDIT_TABLES, audit, classify, classify_text, to_json, verify_family

EXIT_OK, EXIT_ERROR, EXIT_INDETERMINATE = 0, 1, 2

_EXPECTED = (ConfigError, ExprError, DomainError, CoefficientError, NullDirectionError, SamplingError,
             ValueError, OSError)


def cmd_classify(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    report = classify(cfg)
    sys.stdout.write(classify_text(report))
    if args.json:
        Path(args.json).write_text(to_json(report), encoding="utf-8")
    return EXIT_INDETERMINATE if report["summary"]["indeterminate_count"] else EXIT_OK


def cmd_audit(args) -> int:
    cfg = load_config(args.config)
    rows = audit(cfg, inject=args.inject_fault)
    print(f"{'table':<12}{'max abs':>12}{'max rel':>12}  status")
    for r in rows:
        print(f"{r.table:<12}{r.max_abs:>12.3e}{r.max_rel:>12.3e}  {'ok' if r.ok else 'FAIL'}")
    return EXIT_OK if all(r.ok for r in rows) else EXIT_ERROR


def cmd_verify_family(args) -> int:
    cfg = load_config(args.config)
    checks = verify_family(cfg)
    for c in checks:
        print(f"[{'PASS' if c.ok else 'FAIL'}] {c.name}: {c.detail}")
    return EXIT_OK if all(c.ok for c in checks) else EXIT_ERROR


def cmd_families(args) -> int:
    width = max(map(len, FAMILY_KINDS))
    print(f"{'raw':<{width}}  any a, b, c given as expr.a, expr.b, expr.c")
    for kind, text in FAMILY_KINDS.items():
        print(f"{kind:<{width}}  {text}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="walkergeom", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="curvature, W+ and Jacobi classification on sampled points")
    p.add_argument("config")
    p.add_argument("--json", metavar="PATH", help="also write the full report as JSON")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("audit", help="compare closed-form tables against the generic computation")
    p.add_argument("config")
    p.add_argument("--inject-fault", choices=AUDIT_TABLES, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("verify-family", help="check the invariants of a metric family")
    p.add_argument("config")
    p.set_defaults(func=cmd_verify_family)

    p = sub.add_parser("families", help="list metric kinds")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=cmd_families)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _EXPECTED as exc:
        print(f"walkergeom: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
