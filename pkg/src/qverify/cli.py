"""Command-line front end: list, verify, certify, parse."""

from __future__ import annotations

import argparse
import json
import re
import sys

from .catalog import (
    Catalog, CertificateSpec, DSLError, InductionSpec, RelationSpec, TransportSpec,
    UnknownSpec, builtin_catalog, parse_catalog, spec_kind, spec_n_min,
)
from .verifier import (
    MERSENNE_61, MODES, ModularConfig, Selection, VerifyResult, aggregate, default_jobs,
    run_suite,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
DEFAULT_HI = 6
REPORT_VERSION = 1

CERTIFIABLE = (CertificateSpec, RelationSpec, InductionSpec, TransportSpec)


class UsageError(Exception):
    pass


def parse_range(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", text)
    if not m:
        raise UsageError(f"bad range {text!r}, expected LO..HI")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo < 0:
        raise UsageError(f"range start {lo} is negative")
    if lo > hi:
        raise UsageError(f"empty range {lo}..{hi}")
    return lo, hi


def load_catalog(extra: str | None) -> Catalog:
    catalog = builtin_catalog()
    if extra:
        catalog = catalog.merged(read_catalog(extra))
    return catalog


def read_catalog(path: str) -> Catalog:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_catalog(text)
    except DSLError as exc:
        raise UsageError(f"{path}:{exc.line}:{exc.col}: {type(exc).__name__}: {exc.message}") from None


# -- reports -------------------------------------------------------------------

def result_line(r: VerifyResult, timing: bool = True) -> str:
    k = "" if r.k is None else f" k={r.k}"
    ms = f" {r.ms}ms" if timing and r.ms is not None else ""
    line = f"{r.id} n={r.n}{k} {r.mode} {r.status}{ms}"
    if r.witness and r.status != "pass":
        line += f"\n    {r.witness}"
    return line


def report_json(results: list[VerifyResult], cfg: ModularConfig, timing: bool) -> str:
    doc = {
        "version": REPORT_VERSION,
        "seed": cfg.seed,
        "prime": str(cfg.prime),
        "results": [r.to_dict(timing) for r in results],
        "aggregate": aggregate(results),
    }
    return json.dumps(doc, indent=2)


def _emit(results_fn, args, cfg: ModularConfig, out) -> int:
    if args.format == "text":
        def stream(r):
            print(result_line(r, args.timing), file=out, flush=True)
        results = results_fn(stream)
        agg = aggregate(results)
        print(f"aggregate: {agg} ({len(results)} results)", file=out)
    else:
        results = results_fn(None)
        agg = aggregate(results)
        print(report_json(results, cfg, args.timing), file=out)
    return EXIT_OK if agg == "pass" else EXIT_FAIL


def _config(args) -> ModularConfig:
    try:
        return ModularConfig(prime=args.prime, trials=args.trials, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _selection(catalog: Catalog, ids: list[str], n_range: str | None, mode: str) -> list[Selection]:
    sel = []
    explicit = parse_range(n_range) if n_range else None
    for spec_id in ids:
        try:
            spec = catalog.lookup(spec_id)
        except UnknownSpec:
            raise UsageError(f"unknown spec id {spec_id!r}") from None
        lo, hi = explicit or (spec_n_min(spec, catalog), max(DEFAULT_HI, spec_n_min(spec, catalog)))
        sel.append(Selection(spec_id, lo, hi, mode))
    return sel


# -- commands --------------------------------------------------------------------

def cmd_list(args, out) -> int:
    catalog = load_catalog(args.catalog)
    rows = [{"id": s.id, "kind": spec_kind(s), "n_min": spec_n_min(s, catalog),
             "anchor": catalog.anchors.get(s.id, "")} for s in catalog]
    if args.format == "json":
        print(json.dumps(rows, indent=2), file=out)
    else:
        for r in rows:
            print(f"{r['id']:<6} {r['kind']:<12} n>={r['n_min']}  {r['anchor']}", file=out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    catalog = load_catalog(args.catalog)
    cfg = _config(args)
    if args.all == bool(args.id):
        raise UsageError("give exactly one of --id or --all")
    ids = catalog.ids() if args.all else args.id
    sel = _selection(catalog, ids, args.n, args.mode)
    return _emit(lambda cb: run_suite(sel, cfg, catalog, args.jobs, cb), args, cfg, out)


def cmd_certify(args, out) -> int:
    catalog = load_catalog(args.catalog)
    cfg = _config(args)
    for spec_id in args.id:
        spec = catalog.lookup(spec_id) if spec_id in catalog else None
        if not isinstance(spec, CERTIFIABLE):
            raise UsageError(f"{spec_id!r} is not a certificate, relation, induction or transport")
    sel = _selection(catalog, args.id, args.n, args.mode)
    return _emit(lambda cb: run_suite(sel, cfg, catalog, args.jobs, cb), args, cfg, out)


def cmd_parse(args, out) -> int:
    catalog = read_catalog(args.file)
    for s in catalog:
        print(f"{s.id:<6} {spec_kind(s):<12} n>={s.n_min}", file=out)
    print(f"{len(catalog)} specs", file=out)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _run_flags(p: argparse.ArgumentParser):
    p.add_argument("--n", metavar="LO..HI", help="range of n (default: n_min..6)")
    p.add_argument("--mode", choices=MODES, default="symbolic")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--prime", type=int, default=MERSENNE_61)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--catalog", metavar="FILE", help="extra DSL file merged into the catalog")
    p.add_argument("--jobs", type=int, default=default_jobs())
    p.add_argument("--timing", action="store_true", help="include per-result milliseconds")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qverify", description="Verify terminating 4phi3 summations exactly.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("list", help="list catalog entries")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--catalog", metavar="FILE")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("verify", help="verify identities")
    p.add_argument("--id", action="append", default=[])
    p.add_argument("--all", action="store_true")
    _run_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("certify", help="check certificates, relations, inductions, transports")
    p.add_argument("--id", action="append", required=True)
    _run_flags(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("parse", help="parse and validate a DSL file")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse)
    return parser


def _glue_ranges(argv: list[str]) -> list[str]:
    # "--n -1..2" would otherwise be read as an unknown option.
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--n" and i + 1 < len(argv):
            out.append(f"--n={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(_glue_ranges(argv))
        return args.func(args, out)
    except UsageError as exc:
        print(f"qverify: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"qverify: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
