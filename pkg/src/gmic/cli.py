"""Command-line interface: ``gmic compute|nulltable|test|power|means``.

Exit codes: 0 success, 1 usage or validation error, 2 data error,
3 study finished with failed cells. ``test --reject-exit-code`` returns 4 when
independence is rejected.
"""

import argparse
import csv
import datetime
import json
import math
import os
import sys

from . import __version__
from ._backend import backend_name
from .charmat import MineParams, max_grid_bound
from .grid import InvalidInputError, Sample
from .inference import (NullTable, StatisticSpec, critical_value, evaluate, null_distribution,
                        test_independence)
from .simulation import SimConfig, parse_config, power_study, sample_mean_study

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_PARTIAL, EXIT_REJECT = 0, 1, 2, 3, 4
TABLE_DIR_ENV = "GMIC_TABLE_DIR"
MANIFEST_NAME = "manifest.json"
DEFAULT_STATS = ("mic", "minic", "gmic:-inf", "gmic:-1", "gmic:0.1", "gmic:inf", "mcn",
                 "pearson_r2", "dcor")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def read_xy_csv(path):
    """Two numeric columns, optional ``x,y`` header. Errors cite the line number."""
    xs, ys = [], []
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None
    with fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise DataError(f"{path}, line {lineno}: expected 2 columns, found {len(row)}")
            try:
                x, y = float(row[0]), float(row[1])
            except ValueError:
                if lineno == 1 and not xs:
                    continue  # header
                raise DataError(f"{path}, line {lineno}: non-numeric value in {row!r}") from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise DataError(f"{path}, line {lineno}: non-finite value in {row!r}")
            xs.append(x)
            ys.append(y)
    if len(xs) < 2:
        raise DataError(f"{path}: need at least 2 observations, found {len(xs)}")
    return Sample(xs, ys)


def _params(args):
    return MineParams(alpha=args.alpha, clump_factor=args.clump_factor)


def _dump(obj):
    sys.stdout.write(json.dumps(obj, indent=2, allow_nan=False) + "\n")


def cmd_compute(args):
    sample = read_xy_csv(args.input)
    params = _params(args)
    names = args.stat or DEFAULT_STATS
    specs = [StatisticSpec.parse(s, params) for s in names]
    if any(s.rank_based for s in specs) and sample.n < 4:
        raise DataError(f"MINE statistics need at least 4 observations, found {sample.n}")
    values = evaluate(specs, sample)
    _dump({
        "n": sample.n,
        "bound": max_grid_bound(sample.n, params.alpha),
        "alpha": params.alpha,
        "clump_factor": params.clump_factor,
        "statistics": {s.label: v for s, v in zip(specs, values)},
    })
    return EXIT_OK


def _stat_spec(args, params):
    text = args.stat
    if args.p is not None:
        if args.stat != "gmic":
            raise UsageError("--p only applies to --stat gmic")
        text = f"gmic:{args.p}"
    elif args.stat == "gmic":
        raise UsageError("--stat gmic requires --p")
    if args.delta is not None:
        text = f"mcn:{args.delta}"
    return StatisticSpec.parse(text, params)


def _default_table_path(spec, n, reps, seed):
    folder = os.environ.get(TABLE_DIR_ENV) or "."
    name = f"{spec.label.replace('(', '_').replace(')', '')}_n{n}_R{reps}_s{seed}.tsv"
    return os.path.join(folder, name)


def cmd_nulltable(args):
    spec = _stat_spec(args, _params(args))
    if args.reps < 100:
        raise UsageError(f"--reps must be at least 100, got {args.reps}")
    if args.n < 4 and spec.rank_based:
        raise UsageError(f"--n must be at least 4 for MINE statistics, got {args.n}")
    out = args.out or _default_table_path(spec, args.n, args.reps, args.seed)
    if os.path.exists(out) and not args.force:
        raise UsageError(f"{out} exists; pass --force to overwrite")
    table = null_distribution(spec, args.n, args.reps, args.seed, threads=args.threads)
    os.makedirs(os.path.dirname(os.path.abspath(out)), exist_ok=True)
    table.save(out)
    _dump({"table": out, "statistic": spec.label, "n": args.n, "reps": table.reps,
           "seed": args.seed,
           "cutoffs": {"0.90": critical_value(table, 0.10),
                       "0.95": critical_value(table, 0.05),
                       "0.99": critical_value(table, 0.01)}})
    return EXIT_OK


def _resolve_table(path):
    if not os.path.exists(path) and os.environ.get(TABLE_DIR_ENV):
        alt = os.path.join(os.environ[TABLE_DIR_ENV], path)
        if os.path.exists(alt):
            return alt
    return path


def cmd_test(args):
    sample = read_xy_csv(args.input)
    path = _resolve_table(args.table)
    try:
        table = NullTable.load(path)
    except OSError as exc:
        raise DataError(f"cannot read null table {path}: {exc.strerror}") from None
    if table.n != sample.n:
        raise DataError(f"null table was built for n={table.n} but the data have n={sample.n}")
    res = test_independence(sample, table.spec, table, args.level)
    _dump({"statistic": res.statistic, "n": res.n, "observed": res.observed,
           "critical_value": res.critical_value, "p_value": res.p_value,
           "reject": res.reject, "level": res.level, "table": path})
    if res.reject and args.reject_exit_code:
        return EXIT_REJECT
    return EXIT_OK


def _now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _load_manifest(path, command):
    try:
        with open(path) as fh:
            man = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read manifest {path}: {exc}") from None
    if man.get("command") != command:
        raise UsageError(f"manifest {path} records command {man.get('command')!r}, not {command!r}")
    return man


def _run_study(args, command):
    if bool(args.config) == bool(args.manifest):
        raise UsageError("pass exactly one of --config or --manifest")
    if args.config:
        try:
            with open(args.config) as fh:
                config = parse_config(fh.read())
        except OSError as exc:
            raise DataError(f"cannot read config {args.config}: {exc.strerror}") from None
        out_dir = args.out
        if out_dir is None:
            raise UsageError("--out is required with --config")
    else:
        man = _load_manifest(args.manifest, command)
        config = SimConfig.from_dict(man["config"])
        out_dir = args.out or os.path.dirname(os.path.abspath(args.manifest))

    names = {"power": ("power.csv", "power.json"), "means": ("means.csv", "means.json")}[command]
    paths = [os.path.join(out_dir, f) for f in names]
    if args.config and not args.force and any(os.path.exists(p) for p in paths):
        raise UsageError(f"outputs exist in {out_dir}; pass --force to overwrite")
    os.makedirs(out_dir, exist_ok=True)

    started = _now()
    if command == "power":
        result = power_study(config, threads=args.threads)
    else:
        result = sample_mean_study(config, threads=args.threads)
    for path, text in zip(paths, (result.to_csv(), result.to_json())):
        with open(path, "w", newline="\n") as fh:
            fh.write(text)

    manifest = {
        "command": command,
        "config": config.to_dict(),
        "seed": config.seed,
        "tool_version": __version__,
        "backend": backend_name(),
        "threads": args.threads,
        "started": started,
        "finished": _now(),
        "outputs": paths,
    }
    with open(os.path.join(out_dir, MANIFEST_NAME), "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    failed = result.failed
    print(f"wrote {', '.join(paths)} ({len(result.cells)} cells, {len(failed)} failed)")
    return EXIT_PARTIAL if failed else EXIT_OK


def build_parser():
    parser = _Parser(prog="gmic", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def mine_opts(p):
        p.add_argument("--alpha", type=float, default=0.6, help="grid budget exponent (default 0.6)")
        p.add_argument("--clump-factor", type=int, default=15)

    p = sub.add_parser("compute", help="statistics for a two-column CSV")
    p.add_argument("input")
    p.add_argument("--stat", action="append",
                   help="statistic such as mic, minic, gmic:-1, mcn:0.05, dcor (repeatable)")
    mine_opts(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("nulltable", help="build and save a null table")
    p.add_argument("--stat", required=True)
    p.add_argument("--p", help="GMIC exponent, e.g. -1, 0.1, inf, -inf")
    p.add_argument("--delta", type=float, help="MCN robustness parameter")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help=f"output file (default: under ${TABLE_DIR_ENV} or cwd)")
    p.add_argument("--force", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    mine_opts(p)
    p.set_defaults(func=cmd_nulltable)

    p = sub.add_parser("test", help="test independence against a saved null table")
    p.add_argument("input")
    p.add_argument("--table", required=True)
    p.add_argument("--level", type=float, default=0.05)
    p.add_argument("--reject-exit-code", action="store_true",
                   help=f"exit with {EXIT_REJECT} when independence is rejected")
    p.set_defaults(func=cmd_test)

    for name, helptext in (("power", "run a power study"), ("means", "run a sample-mean study")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", help="key = value study description")
        p.add_argument("--manifest", help="replay a previous run from its manifest.json")
        p.add_argument("--out", help="output directory")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--force", action="store_true")
        p.set_defaults(func=lambda a, _n=name: _run_study(a, _n))
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gmic: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"gmic: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InvalidInputError as exc:
        print(f"gmic: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
