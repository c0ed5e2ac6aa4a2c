"""Command-line entry point.

Exit codes: 0 success or pass, 1 a check failed or an ``--assert`` query
answered no, 2 usage/parse errors (including corrupt caches), 3 a
resource limit fired.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import cache
from .closure import ClosureConfig, generate, member
from .core import (
    InvalidInputError,
    ResourceLimitError,
    builtin_function,
    format_pfn,
    parse_pfns,
)
from .enumeration import FnFilter, count_fns, enumerate_fns
from .relations import BUILTIN_NAMES, builtin, format_relation, is_bounded_order, is_order, parse_relation, preserves
from .separating import MODES, SeparationInstance, exists_separating_family
from .verify import CHECKS, run_all, run_check, worker_count

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3

log = logging.getLogger("pclone")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _read_functions(spec: str):
    """A pfn file path, or the name of a built-in function."""
    path = Path(spec)
    if path.exists():
        return parse_pfns(path.read_text())
    try:
        return [builtin_function(spec)]
    except InvalidInputError:
        raise InvalidInputError(f"no such file or built-in function: {spec}") from None


def _read_function(spec: str):
    fns = _read_functions(spec)
    if len(fns) != 1:
        raise InvalidInputError(f"{spec}: expected exactly one function, found {len(fns)}")
    return fns[0]


def _relations(args):
    rels = [builtin(name) for name in args.rel or ()]
    rels += [parse_relation(Path(p).read_text()) for p in args.rel_file or ()]
    return rels


def _add_rel_flags(p):
    p.add_argument("--rel", action="append", metavar="NAME", help=f"built-in relation ({', '.join(BUILTIN_NAMES)})")
    p.add_argument("--rel-file", action="append", metavar="PATH", help="relation in 'rel k=.. h=..' format")


def _parse_value(raw: str):
    if raw.lower() == "none":
        return None
    parts = raw.split(",")
    try:
        vals = [int(x) for x in parts]
    except ValueError:
        return raw
    return vals[0] if len(vals) == 1 else tuple(vals)


def _parse_params(items):
    out = {}
    for item in items or ():
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise InvalidInputError(f"--params expects key=value, got {item!r}")
        out[key.strip()] = _parse_value(raw.strip())
    return out


# -- subcommands -------------------------------------------------------------

def cmd_enumerate(args, out):
    flt = FnFilter(_relations(args), args.total)
    if args.count:
        print(count_fns(args.k, args.n, flt, allow_large=args.allow_large), file=out)
        return EXIT_OK
    first = True
    for f in enumerate_fns(args.k, args.n, flt, allow_large=args.allow_large):
        if not first:
            out.write("\n")
        out.write(format_pfn(f))
        first = False
    return EXIT_OK


def cmd_closure(args, out):
    gens = [f for spec in args.gen or () for f in _read_functions(spec)]
    ks = {f.k for f in gens}
    if args.k is not None:
        ks.add(args.k)
    if len(ks) != 1:
        raise InvalidInputError("give --k or generators on a single domain")
    k = ks.pop()
    config = ClosureConfig(
        args.target_arity,
        args.intermediate_arity,
        strong=args.strong,
        max_size=args.max_size,
        max_rounds=args.max_rounds,
        max_compositions=args.max_compositions,
    )
    code = EXIT_OK
    try:
        result = generate(k, gens, config)
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        result = exc.partial
        code = EXIT_LIMIT
    by_arity = {}
    for f in result.functions.values():
        by_arity[f.n] = by_arity.get(f.n, 0) + 1
    print(f"k={k} members={len(result)} saturated={str(result.saturated).lower()}", file=out)
    for n in sorted(by_arity):
        print(f"arity {n}: {by_arity[n]}", file=out)
    if args.out:
        cache.save(result, args.out)
    if args.stats_json:
        stats = dict(result.stats, members=len(result), saturated=result.saturated)
        Path(args.stats_json).write_text(json.dumps(stats, indent=2, sort_keys=True, default=str) + "\n")
    if args.print:
        for f in result.members():
            out.write("\n" + format_pfn(f))
    return code


def cmd_member(args, out):
    f = _read_function(args.fn)
    result = cache.load(args.closure)
    ans = member(f, result)
    print(str(ans).lower(), file=out)
    return EXIT_NO if args.assert_ and not ans else EXIT_OK


def cmd_preserves(args, out):
    f = _read_function(args.fn)
    rels = _relations(args)
    if not rels:
        raise InvalidInputError("give at least one --rel or --rel-file")
    answers = [preserves(f, rho) for rho in rels]
    for rho, ans in zip(rels, answers):
        label = f"{rho.name}: " if len(rels) > 1 else ""
        print(f"{label}{str(ans).lower()}", file=out)
    return EXIT_NO if args.assert_ and not all(answers) else EXIT_OK


def _parse_point(raw, n):
    if raw is None:
        return None
    try:
        pt = tuple(int(x) for x in raw.replace(" ", "").split(","))
    except ValueError:
        raise InvalidInputError(f"bad point {raw!r}") from None
    if len(pt) != n:
        raise InvalidInputError(f"point {raw!r} does not have {n} coordinates")
    return pt


def cmd_separate(args, out):
    if args.pool:
        pool = [f for spec in args.pool for f in _read_functions(spec)]
        if not pool:
            raise InvalidInputError("empty pool")
        k, n = pool[0].k, pool[0].n
        if args.n is not None and args.n != n:
            raise InvalidInputError(f"--n {args.n} disagrees with pool arity {n}")
    else:
        if args.k is None or args.n is None:
            raise InvalidInputError("without --pool give --k and --n (and optionally --rel)")
        k, n = args.k, args.n
        pool = list(enumerate_fns(k, n, _relations(args), total_only=True))
    inst = SeparationInstance(k, n, pool, args.m, _parse_point(args.b, n))
    rep = exists_separating_family(inst, args.mode, max_tuples=args.max_tuples)
    if args.json:
        payload = dict(rep.as_dict(), k=k, n=n, m=args.m, b=list(inst.b), pool=len(inst.pool))
        print(json.dumps(payload, sort_keys=True), file=out)
    else:
        print(f"outcome: {rep.outcome}", file=out)
        print(f"pool: {len(inst.pool)}  m: {args.m}  n: {n}  b: {inst.b}  examined: {rep.examined}", file=out)
        if rep.family:
            for f in rep.family:
                out.write(format_pfn(f))
        elif rep.outcome == "no-family":
            points = sorted({a for _, a in rep.collisions})
            print("collision points: " + " ".join("(" + ",".join(map(str, a)) + ")" for a in points), file=out)
    return EXIT_LIMIT if rep.outcome == "resource-limit" else EXIT_OK


def cmd_verify(args, out):
    params = _parse_params(args.params)
    workers = args.workers if args.workers is not None else worker_count()
    if args.check == "all":
        reports = run_all(params, workers=workers)
    else:
        reports = [run_check(args.check, params)]
    for r in reports:
        print(r.summary(), file=out)
        print(f"{r.check}: {r.millis} ms", file=sys.stderr)
    if args.json:
        Path(args.json).write_text(json.dumps([r.as_dict() for r in reports], indent=2, default=list) + "\n")
    verdicts = {r.verdict for r in reports}
    if "fail" in verdicts:
        return EXIT_NO
    if "resource-limit" in verdicts:
        return EXIT_LIMIT
    return EXIT_OK


def cmd_relations(args, out):
    if not args.name:
        for name in BUILTIN_NAMES:
            print(name, file=out)
        return EXIT_OK
    rho = builtin(args.name)
    out.write(format_relation(rho))
    if rho.h == 2:
        print(f"# order: {str(is_order(rho)).lower()}  bounded: {str(is_bounded_order(rho)).lower()}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pclone", description="Exact computation with partial clones on small finite domains.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("enumerate", help="list or count functions preserving relations")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    _add_rel_flags(p)
    p.add_argument("--total", action="store_true", help="total functions only")
    p.add_argument("--count", action="store_true", help="print the count only")
    p.add_argument("--allow-large", action="store_true", help="lift the k^n enumeration bound")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("closure", help="bounded-arity closure of generators")
    p.add_argument("--gen", action="append", metavar="PATH|NAME", help="pfn file or built-in function (maj, neg, and, or)")
    p.add_argument("--k", type=int)
    p.add_argument("--target-arity", type=int, default=3)
    p.add_argument("--intermediate-arity", type=int)
    p.add_argument("--strong", action="store_true", help="also close under subfunctions")
    p.add_argument("--max-size", type=int, default=5_000_000)
    p.add_argument("--max-rounds", type=int, default=64)
    p.add_argument("--max-compositions", type=int, default=200_000_000)
    p.add_argument("--out", help="write a reloadable closure dump")
    p.add_argument("--stats-json", help="write statistics as JSON")
    p.add_argument("--print", action="store_true", help="also print every member")
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("member", help="membership of a function in a cached closure")
    p.add_argument("--fn", required=True, metavar="PATH|NAME")
    p.add_argument("--closure", required=True, metavar="CACHE")
    p.add_argument("--assert", dest="assert_", action="store_true", help="exit 1 when not a member")
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("preserves", help="does a function preserve relations")
    p.add_argument("--fn", required=True, metavar="PATH|NAME")
    _add_rel_flags(p)
    p.add_argument("--assert", dest="assert_", action="store_true", help="exit 1 when some relation is not preserved")
    p.set_defaults(func=cmd_preserves)

    p = sub.add_parser("separate", help="search for a separating family")
    p.add_argument("--pool", action="append", metavar="PATH|NAME", help="pfn file(s) with total functions")
    p.add_argument("--k", type=int)
    _add_rel_flags(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--b", help="point to separate, e.g. 0,0,0 (default all zeros)")
    p.add_argument("--mode", choices=MODES, default="all-points")
    p.add_argument("--max-tuples", type=int, default=10_000_000)
    p.add_argument("--json", action="store_true", help="structured output")
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("verify", help="run named checks")
    p.add_argument("--check", default="all", choices=["all", *CHECKS])
    p.add_argument("--params", action="append", metavar="KEY=VALUE", help="e.g. k=3 or m=1,2")
    p.add_argument("--json", metavar="PATH", help="write reports as JSON")
    p.add_argument("--workers", type=int, help="parallel checks (default $PCLONE_WORKERS or 1)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("relations", help="list built-in relations or print one")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_relations)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"pclone: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args, out)
    except cache.CorruptCacheError as exc:
        print(f"pclone: corrupt cache: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidInputError as exc:
        print(f"pclone: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"pclone: resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except OSError as exc:
        print(f"pclone: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
