"""Command-line front end: generate, count, verify, bench.

Exit codes: 0 success, 1 failed property or failed --check, 2 usage
error, 3 rank overflow or resource exhaustion.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from math import comb

from .engine import load_cgbt, run_parallel, table_from_family
from .generators import (
    kcombs_dc,
    kcombs_revol,
    kcombs_revol_int,
    kcombs_seq,
    kperms_dc,
)
from .nested import (
    nccg_outer_sizes,
    nested_combs_dc,
    nested_combs_multi,
    nested_combs_revol,
    nested_combs_revol_int,
    nested_combs_seq,
    nested_perms_dc,
    npcg_outer_sizes,
)
from .oracle import (
    check_fusion,
    check_rank_consistency,
    check_revolving_door,
)
from .semiring import RankOverflowError, falling_factorial
from .splitplan import SplitPlan

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

FLAT_GENS = ("kcombs-dc", "kcombs-seq", "kcombs-revol", "kcombs-revol-int", "kperms")
NESTED_GENS = ("nccg-dc", "nccg-seq", "nccg-revol", "nccg-int", "nccg-multi", "npcg")
GEN_CHOICES = FLAT_GENS + NESTED_GENS
N_ONLY_GENS = ("kcombs-revol", "kcombs-revol-int", "nccg-revol", "nccg-int")


def _parse_elems(text: str) -> tuple:
    items = [v.strip() for v in text.split(",") if v.strip() != ""]

    def conv(v: str):
        try:
            return int(v)
        except ValueError:
            return v

    return tuple(conv(v) for v in items)


def _build_plan(args, n: int) -> SplitPlan:
    spec = getattr(args, "split", "midpoint") or "midpoint"
    threshold = getattr(args, "threshold", 1) or 1
    if spec == "midpoint":
        return SplitPlan.midpoint(n, threshold)
    if spec == "one-rest":
        return SplitPlan.one_rest(n, threshold)
    if spec.startswith("random:"):
        return SplitPlan.random_plan(n, int(spec.split(":", 1)[1], 0), threshold)
    return SplitPlan.from_spec(json.loads(spec), n, threshold)


def _labels_for(args, parser) -> tuple:
    if args.gen in N_ONLY_GENS:
        if args.elems:
            parser.error(f"{args.gen} takes --n only (its ground list is fixed)")
        if args.n is None:
            parser.error(f"{args.gen} needs --n")
        return tuple(range(1, args.n + 1))
    if args.elems:
        labels = _parse_elems(args.elems)
    elif args.n is not None:
        labels = tuple(range(1, args.n + 1))
    else:
        parser.error("need --elems or --n")
    return labels


def _fmt_atom(value) -> str:
    if isinstance(value, tuple):
        return "[" + " ".join(str(v) for v in value) + "]"
    return str(value)


def _family_text(family, out) -> None:
    for k, bucket in enumerate(family):
        out.write(f"k={k}\n")
        for cfg in bucket:
            if isinstance(cfg, tuple):
                out.write(",".join(_fmt_atom(v) for v in cfg) + "\n")
            else:
                out.write(str(cfg) + "\n")


def _family_csv(family, out, prefix: str = "") -> None:
    for k, bucket in enumerate(family):
        for pos, cfg in enumerate(bucket):
            cells = [_fmt_atom(v) for v in cfg] if isinstance(cfg, tuple) else [str(cfg)]
            out.write(",".join([prefix + str(k), str(pos)] + cells) + "\n")


def _generate(args, parser):
    """Returns (kind, payload): kind is 'family', 'nested' or 'ranks'."""
    labels = _labels_for(args, parser)
    n = len(labels)
    k = args.k
    plan = _build_plan(args, n)
    if args.gen == "kcombs-dc":
        if args.workers > 1:
            res = run_parallel("kcombs", k, n, plan=plan, workers=args.workers)
            return "family", res.table.to_family(labels)
        return "family", kcombs_dc(k, labels, plan)
    if args.gen == "kcombs-seq":
        return "family", kcombs_seq(k, labels)
    if args.gen == "kcombs-revol":
        return "family", kcombs_revol(k, n)
    if args.gen == "kcombs-revol-int":
        return "ranks", kcombs_revol_int(k, n).buckets
    if args.gen == "kperms":
        if args.workers > 1:
            res = run_parallel("kperms", k, n, plan=plan, workers=args.workers)
            return "family", res.table.to_family(labels)
        return "family", kperms_dc(k, labels, plan)
    d = args.d
    if args.gen == "nccg-multi":
        if not args.ds:
            parser.error("nccg-multi needs --ds")
        return "nested", nested_combs_multi(k, _parse_elems(args.ds), labels, plan)
    if d is None:
        parser.error(f"{args.gen} needs --d")
    if args.gen == "nccg-dc":
        return "nested", nested_combs_dc(k, d, labels, plan)
    if args.gen == "nccg-seq":
        return "nested", nested_combs_seq(k, d, labels)
    if args.gen == "nccg-revol":
        return "nested", nested_combs_revol(k, d, n)
    if args.gen == "nccg-int":
        res = nested_combs_revol_int(k, d, n)
        return "nested", type(res)(res.inner.buckets, res.outer)
    if args.gen == "npcg":
        return "nested", nested_perms_dc(k, d, labels, plan)
    parser.error(f"unknown generator {args.gen}")


def cmd_gen(args, parser) -> int:
    kind, payload = _generate(args, parser)
    if args.format == "cgbt":
        if args.gen not in ("kcombs-dc", "kcombs-seq", "kcombs-revol", "kperms"):
            parser.error("--format cgbt applies to flat config generators only")
        labels = _labels_for(args, parser)
        index_of = {v: i for i, v in enumerate(labels)}
        table = table_from_family(payload, len(labels), lambda v: index_of[v])
        data = table.to_bytes()
        if args.out:
            with open(args.out, "wb") as fh:
                fh.write(data)
        else:
            sys.stdout.buffer.write(data)
        return EXIT_OK

    out = open(args.out, "w") if args.out else sys.stdout
    try:
        if kind == "nested":
            if args.format == "text":
                out.write("# inner\n")
                _family_text(payload.inner, out)
                out.write("# outer\n")
                _family_text(payload.outer, out)
            else:
                _family_csv(payload.inner, out, prefix="inner:")
                _family_csv(payload.outer, out, prefix="outer:")
        else:
            fam = payload
            if args.format == "text":
                _family_text(fam, out)
            else:
                _family_csv(fam, out)
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def cmd_read_cgbt(args, parser) -> int:
    with open(args.path, "rb") as fh:
        table = load_cgbt(fh.read())
    labels = tuple(range(1, table.n + 1))
    _family_text(table.to_family(labels), sys.stdout)
    return EXIT_OK


def _counts_for(args, parser) -> list[tuple[str, list[int]]]:
    k = args.k
    n = args.n
    if n is None and args.elems:
        n = len(_parse_elems(args.elems))
    if n is None:
        parser.error("count needs --n or --elems")
    if args.gen in ("kcombs-dc", "kcombs-seq", "kcombs-revol", "kcombs-revol-int"):
        return [("", [comb(n, j) for j in range(k + 1)])]
    if args.gen == "kperms":
        return [("", [falling_factorial(n, j) for j in range(k + 1)])]
    if args.gen == "nccg-multi":
        ds = _parse_elems(args.ds or "")
        if not ds:
            parser.error("nccg-multi needs --ds")
        inner = [comb(n, j) for j in range(max(ds) + 1)]
        atoms = sum(comb(n, d) for d in ds)
        return [("inner ", inner), ("outer ", [comb(atoms, j) for j in range(k + 1)])]
    if args.d is None:
        parser.error(f"{args.gen} needs --d")
    inner = [comb(n, j) for j in range(args.d + 1)]
    if args.gen == "npcg":
        outer = npcg_outer_sizes(n, args.d, k)
    else:
        outer = nccg_outer_sizes(n, args.d, k)
    return [("inner ", inner), ("outer ", outer)]


def cmd_count(args, parser) -> int:
    sections = _counts_for(args, parser)
    for prefix, counts in sections:
        print(prefix + ",".join(str(c) for c in counts))
    if not args.check:
        return EXIT_OK
    kind, payload = _generate(args, parser)
    if kind == "nested":
        inner = payload.inner if isinstance(payload.inner, list) else payload.inner.buckets
        got = [
            ("inner ", [len(b) for b in inner]),
            ("outer ", [len(b) for b in payload.outer]),
        ]
        # a blanked top bucket is expected to disagree with the formula
        got[0][1][-1] = sections[0][1][-1]
    else:
        got = [("", [len(b) for b in payload])]
    for (prefix, expected), (_, actual) in zip(sections, got):
        if expected != actual:
            print(f"count mismatch {prefix.strip()}: expected {expected}, generated {actual}")
            return EXIT_PROPERTY
    print("check ok")
    return EXIT_OK


def cmd_verify(args, parser) -> int:
    reports = []
    if args.property == "revolving-door":
        gen = args.generator or "kcombs-revol"
        for n in range(1, args.n + 1):
            k = min(args.k, n)
            if gen == "kcombs-revol":
                fam = kcombs_revol(k, n)
            elif gen == "kcombs-seq":
                fam = kcombs_seq(k, tuple(range(1, n + 1)))
            elif gen == "kcombs-dc":
                fam = kcombs_dc(k, tuple(range(1, n + 1)))
            else:
                parser.error(f"cannot verify revolving-door on {gen}")
            reports.append(check_revolving_door(fam, {"generator": gen, "k": k, "n": n}))
    elif args.property == "rank":
        for n in range(0, args.n + 1):
            reports.append(check_rank_consistency(min(args.k, max(n, 1)), n))
    elif args.property == "fusion":
        if args.d is None:
            parser.error("fusion needs --d")
        for n in range(0, args.n + 1):
            reports.append(check_fusion(args.k, args.d, tuple(range(1, n + 1))))
    else:
        parser.error(f"unknown property {args.property}")
    failed = False
    for report in reports:
        print(report.line())
        failed = failed or not report.passed
    return EXIT_PROPERTY if failed else EXIT_OK


def cmd_bench(args, parser) -> int:
    gen_map = {"kcombs-dc": "kcombs", "kperms": "kperms", "nccg-dc": "nccg",
               "nccg-multi": "nccg-multi", "npcg": "npcg"}
    if args.gen not in gen_map:
        parser.error(f"bench supports {sorted(gen_map)}")
    ns = [int(v) for v in args.n.split(",")]
    workers = [int(v) for v in args.workers.split(",")]
    ds = _parse_elems(args.ds) if args.ds else None
    rows = []
    for n in ns:
        for w in workers:
            plan = SplitPlan.midpoint(n, args.threshold)
            best = None
            result = None
            for _ in range(args.repeats):
                t0 = time.perf_counter()
                result = run_parallel(
                    gen_map[args.gen], args.k, n,
                    d=args.d, ds=ds, plan=plan, workers=w,
                )
                dt = time.perf_counter() - t0
                best = dt if best is None else min(best, dt)
            table = result.table if result.table is not None else result.outer
            configs = result.stats.configs
            ns_per = best * 1e9 / max(configs, 1)
            rows.append(
                {
                    "gen": args.gen, "k": args.k, "n": n, "workers": w,
                    "configs": configs, "seconds": round(best, 6),
                    "ns_per_config": round(ns_per, 1),
                    "growth_events": result.stats.growth_events,
                    "sha256": table.sha256(),
                }
            )
    if args.csv:
        header = list(rows[0].keys())
        lines = [",".join(header)] + [
            ",".join(str(r[h]) for h in header) for r in rows
        ]
        text = "\n".join(lines) + "\n"
        if args.csv == "-":
            sys.stdout.write(text)
        else:
            with open(args.csv, "w") as fh:
                fh.write(text)
    else:
        for r in rows:
            print(json.dumps(r))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="combgen",
        description="Generate, count, verify and benchmark combination families.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_gen=True):
        if with_gen:
            p.add_argument("--gen", required=True, choices=GEN_CHOICES)
        p.add_argument("--k", type=int, required=True, help="outer capacity K")
        p.add_argument("--d", type=int, help="inner combination size")
        p.add_argument("--ds", help="comma list of inner sizes (nccg-multi)")
        p.add_argument("--n", type=int, help="ground-set size, labels 1..N")
        p.add_argument("--elems", help="comma list of element labels")

    gen_p = sub.add_parser(
        "gen",
        help="generate a family",
        epilog=(
            "text: one 'k=<k>' header per bucket, then one config per line as "
            "comma-separated elements (inner combinations render as '[a b]'). "
            "csv rows: k,position,element,... (nested runs prefix k with "
            "'inner:'/'outer:'). cgbt: binary dump, magic 'CGBT', version "
            "byte, then K and N as u64 LE, then per bucket: k (u64), row "
            "count (u64), row-major 0-based element indices (u64 each)."
        ),
    )
    add_common(gen_p)
    gen_p.add_argument("--split", default="midpoint",
                       help="midpoint | one-rest | random:SEED | explicit JSON tree")
    gen_p.add_argument("--threshold", type=int, default=1,
                       help="leaf width of the split plan")
    gen_p.add_argument("--workers", type=int, default=1)
    gen_p.add_argument("--format", choices=("text", "csv", "cgbt"), default="text")
    gen_p.add_argument("--out", help="output path (default stdout)")
    gen_p.set_defaults(func=cmd_gen)

    read_p = sub.add_parser("read-cgbt", help="print a CGBT dump as text")
    read_p.add_argument("path")
    read_p.set_defaults(func=cmd_read_cgbt)

    count_p = sub.add_parser("count", help="bucket sizes by arithmetic")
    add_common(count_p)
    count_p.add_argument("--check", action="store_true",
                         help="cross-validate against an actual run")
    count_p.add_argument("--split", default="midpoint")
    count_p.add_argument("--threshold", type=int, default=1)
    count_p.add_argument("--workers", type=int, default=1)
    count_p.set_defaults(func=cmd_count)

    verify_p = sub.add_parser("verify", help="run property checkers")
    verify_p.add_argument("property", choices=("revolving-door", "rank", "fusion"))
    verify_p.add_argument("--k", type=int, required=True)
    verify_p.add_argument("--d", type=int)
    verify_p.add_argument("--n", type=int, required=True)
    verify_p.add_argument("--generator",
                          help="family source for revolving-door (default kcombs-revol)")
    verify_p.set_defaults(func=cmd_verify)

    bench_p = sub.add_parser("bench", help="timing and preallocation report")
    bench_p.add_argument("--gen", required=True)
    bench_p.add_argument("--k", type=int, required=True)
    bench_p.add_argument("--d", type=int)
    bench_p.add_argument("--ds")
    bench_p.add_argument("--n", required=True, help="comma list of ground sizes")
    bench_p.add_argument("--workers", default="1", help="comma list of worker counts")
    bench_p.add_argument("--repeats", type=int, default=5)
    bench_p.add_argument("--threshold", type=int, default=64)
    bench_p.add_argument("--csv", help="write CSV here ('-' for stdout)")
    bench_p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except RankOverflowError as exc:
        print(f"rank overflow: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except MemoryError:
        print("resource exhaustion: out of memory", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
