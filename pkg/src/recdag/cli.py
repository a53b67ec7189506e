"""Command-line front end.

Exit codes: 0 success, 1 a requested check failed (or a data file was
unusable), 2 bad usage.  Every run echoes its resolved configuration to
stderr so logged invocations can be replayed exactly; when --seed is
omitted a fresh one is drawn from the OS and printed the same way.
"""

import argparse
import json
import math
import secrets
import sys
from contextlib import contextmanager

from . import constants, graph_model, montecarlo, path_stats
from .errors import DomainError, ParseError, RecdagError, ResourceError, UsageError
from .label_process import rn_tail_bound, sample_brw
from .rng import GENERATOR_ID, RngStream


def _int_arg(s):
    # accept 1000000 and 1e6 alike
    try:
        return int(s)
    except ValueError:
        pass
    try:
        f = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}")
    if not f.is_integer():
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}")
    return int(f)


def _positive_int(s):
    v = _int_arg(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {s!r}")
    return v


def _arity(s):
    v = _int_arg(s)
    if not 1 <= v <= 64:
        raise argparse.ArgumentTypeError(f"k must be in 1..64, got {s!r}")
    return v


def _seed_arg(s):
    v = _int_arg(s)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 bits, got {s!r}")
    return v


def _int_list(s):
    return [_positive_int(part) for part in s.split(",") if part]


def _t_spec(s):
    """Either 'lo..hi' (inclusive) or a comma list."""
    if ".." in s:
        lo, hi = s.split("..", 1)
        lo, hi = _int_arg(lo), _int_arg(hi)
        if hi < lo:
            raise argparse.ArgumentTypeError(f"empty range {s!r}")
        return list(range(lo, hi + 1))
    return [_int_arg(part) for part in s.split(",") if part]


def _window_arg(s):
    parts = s.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"window must be 'lo,hi', got {s!r}")
    lo, hi = float(parts[0]), float(parts[1])
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty window {s!r}")
    return (lo, hi)


def _stats_arg(s):
    try:
        return path_stats.parse_stats(s.split(","))
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc))


@contextmanager
def _out_stream(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fp:
            yield fp


def _echo_config(args):
    skip = {"func"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    for key, val in cfg.items():
        if isinstance(val, tuple):
            cfg[key] = list(val)
    print("config: " + json.dumps(cfg, sort_keys=True), file=sys.stderr)


def _resolve_seed(args):
    if getattr(args, "seed", "absent") is None and getattr(args, "infile", None) is None:
        args.seed = secrets.randbits(63)
        print(f"seed not given; using {args.seed}", file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_generate(args):
    with _out_stream(args.out) as fp:
        graph_model.dump_dag(fp, args.n, args.k, args.mode, args.seed)
    return 0


def _profile_rows(profile, stats):
    cols = list(path_stats.STAT_NAMES)
    arrays = {s: profile.array(s) if s in stats else None for s in cols}
    yield "node\t" + "\t".join(cols)
    for i in range(profile.n + 1):
        row = [str(i)]
        for s in cols:
            arr = arrays[s]
            row.append("NA" if arr is None else str(int(arr[i])))
        yield "\t".join(row)


def _cmd_stats(args):
    if args.infile is not None:
        with open(args.infile) as fp:
            dag = graph_model.load_dag(fp)
        profile = path_stats.compute_profiles(dag, args.stats)
        n, k = dag.n, dag.k
    else:
        if args.n is None or args.seed is None:
            raise UsageError("need --n and --seed (or --in FILE)")
        profile = path_stats.compute_profiles(
            (args.n, args.k, args.mode, args.seed), args.stats
        )
        n, k = args.n, args.k
    with _out_stream(args.out) as fp:
        if args.summary:
            summary = path_stats.summarize(profile)
            doc = {"n": n, "k": k}
            for stat in args.stats:
                t = summary.entries[stat]
                doc[stat] = {
                    "value_at_n": t.value_at_n,
                    "max_1_to_n": t.max_1_to_n,
                    "min_half_to_n": t.min_half_to_n,
                }
            fp.write(json.dumps(doc, sort_keys=True) + "\n")
        else:
            for line in _profile_rows(profile, args.stats):
                fp.write(line + "\n")
    return 0


def _cmd_constants(args):
    try:
        ks = constants.parse_k_spec(args.k) if args.k else list(constants.TABLE_KS)
    except UsageError as exc:
        raise UsageError(f"--k: {exc}")
    rows = [constants.constants_row(k) for k in ks]
    table = args.paper_table
    if table is None and args.format == "paper-table":
        table = 1  # the per-k limits block is the default golden layout
    with _out_stream(args.out) as fp:
        if table == 1:
            fp.write("\n\n".join(constants.format_limits_block(r) for r in rows) + "\n")
        elif table == 2:
            fp.write(constants.format_decreasing_table(rows) + "\n")
        elif args.format == "jsonl":
            for row in rows:
                doc = {f: getattr(row, f) for f in constants.ROW_FIELDS}
                fp.write(json.dumps(doc, sort_keys=True) + "\n")
        else:
            for line in constants.csv_lines(rows):
                fp.write(line + "\n")
    return 0


def _cmd_simulate(args):
    if len(args.n) > 1 and args.out and "{n}" not in args.out:
        raise UsageError("--out needs a {n} placeholder when --n lists several sizes")
    for n in args.n:
        config = montecarlo.ExperimentConfig(
            k=args.k,
            n=n,
            mode=args.mode,
            stats=args.stats,
            replications=args.reps,
            master_seed=args.seed,
        )
        record = montecarlo.run_experiment(config, threads=args.threads)
        doc = {
            "n": n,
            "k": args.k,
            "mode": config.mode,
            "reps": args.reps,
            "master_seed": args.seed,
            "aggregates": record.aggregates(),
        }
        if args.compare:
            row = constants.constants_row(args.k)
            report = montecarlo.compare_to_constants(record, row)
            doc["compare"] = [
                {
                    "stat": e.stat,
                    "variant": e.variant,
                    "mean_over_log_n": e.empirical,
                    "constant": e.constant_name,
                    "ratio": None if math.isnan(e.ratio) else e.ratio,
                    "ok": e.ok,
                    "conjectured": e.conjectured,
                }
                for e in report.entries
            ]
        print(json.dumps(doc, sort_keys=True))
        if args.out:
            path = args.out.replace("{n}", str(n))
            montecarlo.persist(record, path, include_timing=args.timing)
            print(f"wrote {path}", file=sys.stderr)
    return 0


def _cmd_tailcheck(args):
    check = montecarlo.check_rn_tail(
        args.n, args.reps, t_values=args.t, master_seed=args.seed
    )
    with _out_stream(args.out) as fp:
        fp.write("t,frequency,bound,passed\n")
        for row in check.rows:
            fp.write(f"{row.t},{row.frequency},{row.bound},{row.passed}\n")
    print(f"tailcheck: {'PASS' if check.passed else 'FAIL'}", file=sys.stderr)
    return 0 if check.passed else 1


def _cmd_minrcheck(args):
    ok = True
    with _out_stream(args.out) as fp:
        fp.write("n,frequency,se\n")
        for n in args.n:
            check = montecarlo.check_min_r(
                n, args.reps, master_seed=args.seed, threads=args.threads
            )
            fp.write(f"{n},{check.frequency},{check.se}\n")
        ok = check.frequency >= args.min_freq  # verdict on the largest n
    print(
        f"minrcheck: {'PASS' if ok else 'FAIL'} "
        f"(frequency {check.frequency:.4f} at n={args.n[-1]}, "
        f"threshold {args.min_freq})",
        file=sys.stderr,
    )
    return 0 if ok else 1


def _cmd_maxrcheck(args):
    check = montecarlo.check_max_r(
        args.n, args.reps, master_seed=args.seed, threads=args.threads,
        window=args.window,
    )
    print(
        json.dumps(
            {
                "n": check.n,
                "reps": check.reps,
                "mean_ratio": check.mean_ratio,
                "se": check.se,
                "window": list(check.window),
                "passed": check.passed,
            },
            sort_keys=True,
        )
    )
    print(f"maxrcheck: {'PASS' if check.passed else 'FAIL'}", file=sys.stderr)
    return 0 if check.passed else 1


def _cmd_brw(args):
    with _out_stream(args.out) as fp:
        fp.write("ell,k,rep,value\n")
        for ell in args.ell:
            vals = []
            for r in range(args.reps):
                rng = RngStream(args.seed, r)
                v = sample_brw(ell, args.k, rng, leaf_budget=args.leaf_budget).value
                vals.append(v)
                fp.write(f"{ell},{args.k},{r},{v}\n")
            mean = sum(vals) / len(vals)
            if len(vals) > 1:
                var = sum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
                se = math.sqrt(var / len(vals))
            else:
                se = float("nan")
            print(
                f"brw: ell={ell} k={args.k} reps={args.reps} "
                f"mean={mean:.6f} se={se:.6f} mean/ell={mean / ell:.6f}",
                file=sys.stderr,
            )
    return 0


def _cmd_tailbound(args):
    with _out_stream(args.out) as fp:
        fp.write("n,t,bound\n")
        for n in args.n:
            for t in args.t:
                if t <= math.log(n):
                    continue  # bound only holds past ln n
                fp.write(f"{n},{t},{rn_tail_bound(n, t)}\n")
    return 0


def _load_record(path):
    try:
        return montecarlo.load(path)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}")


def _cmd_compare(args):
    record = _load_record(args.file)
    row = constants.constants_row(record.config.k)
    report = montecarlo.compare_to_constants(record, row)
    print(f"k={report.k} n={report.n} reps={record.config.replications}")
    print(f"{'stat':<8}{'variant':<16}{'mean/ln n':>12}{'constant':>26}{'ratio':>9}  flag")
    for e in report.entries:
        if e.ok is None and math.isnan(e.constant_value):
            const = "(none)"
            ratio = "-"
            flag = "raw"
        else:
            mark = "~" if e.conjectured else ""
            const = f"{mark}{e.constant_name}={e.constant_value:.6f}"
            ratio = f"{e.ratio:.4f}"
            flag = "-" if e.ok is None else ("ok" if e.ok else "OFF")
        print(f"{e.stat:<8}{e.variant:<16}{e.empirical:>12.5f}{const:>26}{ratio:>9}  {flag}")
    if any(e.conjectured for e in report.entries):
        print("~ marks constants that are conjectured, not proved")
    if args.strict and not report.all_ok:
        return 1
    return 0


def _cmd_export(args):
    record = _load_record(args.file)
    with _out_stream(args.out) as fp:
        montecarlo.export_csv(record, fp)
    return 0


# ---------------------------------------------------------------------------


def _add_out(p):
    p.add_argument("--out", metavar="FILE", help="output file ('-' = stdout)")


def _add_gen_args(p):
    p.add_argument("--k", type=_arity, default=2, help="parents per node (1..64)")
    p.add_argument(
        "--mode",
        choices=[graph_model.MODE_WITH, graph_model.MODE_WITHOUT, "with", "without"],
        default=graph_model.MODE_WITH,
    )
    p.add_argument("--seed", type=_seed_arg, default=None, help="64-bit seed (default: from OS)")


def build_parser():
    from . import KERNEL_LANE, __version__

    ap = argparse.ArgumentParser(
        prog="recdag",
        description="Random recursive k-dag simulator and limit-constant tables.",
    )
    ap.add_argument(
        "--version",
        action="version",
        version=f"artifact {__version__} ({GENERATOR_ID}; {KERNEL_LANE} kernels)",
    )
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("generate", help="stream a dag to a tab-separated dump")
    p.add_argument("--n", type=_positive_int, required=True, help="largest node index")
    _add_gen_args(p)
    _add_out(p)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("stats", help="per-node depth profiles or their summary")
    p.add_argument("--n", type=_positive_int, help="largest node index (generate on the fly)")
    _add_gen_args(p)
    p.add_argument("--in", dest="infile", metavar="FILE", help="read a dag dump instead")
    p.add_argument("--stats", type=_stats_arg, default=("S",), help="comma list from S,Rminus,R,Rplus,L")
    p.add_argument("--summary", action="store_true", help="print the fifteen-parameter summary")
    _add_out(p)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("constants", help="solve and print the limit-constant table")
    p.add_argument("--k", metavar="SPEC", help="k values, e.g. '2..30,35,40' (default: table grid)")
    p.add_argument("--format", choices=["csv", "jsonl", "paper-table"], default="csv")
    p.add_argument(
        "--paper-table", type=int, choices=[1, 2],
        help="1 = per-k limits block (first k of SPEC), 2 = decreasing-constants table",
    )
    _add_out(p)
    p.set_defaults(func=_cmd_constants)

    p = sub.add_parser("simulate", help="replicated runs; aggregates of X/ln n")
    p.add_argument("--n", type=_int_list, required=True, help="sizes, comma separated")
    _add_gen_args(p)
    p.add_argument("--stats", type=_stats_arg, default=("S",))
    p.add_argument("--reps", type=_positive_int, default=100)
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--compare", action="store_true", help="add ratio-to-constant columns")
    p.add_argument("--timing", action="store_true", help="persist wall-clock time too")
    p.add_argument("--out", metavar="FILE", help="persist replications ({n} expands)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("tailcheck", help="first-parent depth tail vs. explicit bound")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--reps", type=_positive_int, default=10000)
    p.add_argument("--t", type=_t_spec, default=None, help="'lo..hi' or comma list")
    p.add_argument("--seed", type=_seed_arg, default=None)
    _add_out(p)
    p.set_defaults(func=_cmd_tailcheck)

    p = sub.add_parser("minrcheck", help="frequency of a small upper-half depth")
    p.add_argument("--n", type=_int_list, required=True, help="sizes, comma separated")
    p.add_argument("--reps", type=_positive_int, default=1000)
    p.add_argument("--min-freq", type=float, default=0.95, help="required at the largest n")
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--seed", type=_seed_arg, default=None)
    _add_out(p)
    p.set_defaults(func=_cmd_minrcheck)

    p = sub.add_parser("maxrcheck", help="mean max-depth ratio vs. a window")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--reps", type=_positive_int, default=200)
    p.add_argument(
        "--window", type=_window_arg, default=montecarlo.DEFAULT_MAX_R_WINDOW,
        help="lo,hi (default pilot-calibrated for n=1e6)",
    )
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--seed", type=_seed_arg, default=None)
    p.set_defaults(func=_cmd_maxrcheck)

    p = sub.add_parser("brw", help="sample the k-ary max-sum displacement")
    p.add_argument("--ell", type=_int_list, required=True, help="depths, comma separated")
    p.add_argument("--k", type=_arity, default=2)
    p.add_argument("--reps", type=_positive_int, default=100)
    p.add_argument("--seed", type=_seed_arg, default=None)
    p.add_argument("--leaf-budget", type=_positive_int, default=1 << 24)
    _add_out(p)
    p.set_defaults(func=_cmd_brw)

    p = sub.add_parser("tailbound", help="tabulate the explicit tail bound")
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--t", type=_t_spec, required=True)
    _add_out(p)
    p.set_defaults(func=_cmd_tailbound)

    p = sub.add_parser("compare", help="persisted record vs. solved constants")
    p.add_argument("file", help="a simulate --out file")
    p.add_argument("--strict", action="store_true", help="exit 1 when any ratio is flagged")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("export", help="persisted record to flat csv")
    p.add_argument("file", help="a simulate --out file")
    p.add_argument("--csv", action="store_true", help="flat csv (the only format; default)")
    _add_out(p)
    p.set_defaults(func=_cmd_export)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    _resolve_seed(args)
    _echo_config(args)
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ParseError, ResourceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RecdagError as exc:  # anything else of ours: runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
