"""
Command line interface.

    magr simulate   --system henon --n 1500 --coupling 0.4 --seed 1 -o pair.csv
    magr inject     pair.csv --kind fixed_block --block-size 10 --pct 20 -o gappy.csv
    magr measure    gappy.csv --measure te --m 2 --treatment magr
    magr experiment config.ini -o stats.csv
    magr matrix     returns.csv --measure cc -o cc.csv

Exit status: 0 on success, 1 on a fatal error, 2 on usage errors, 3 when
the command completed but some cells or realizations failed.
"""

import argparse
import configparser
import sys

import numpy as np

from .errors import MagrError
from .gaps import FILLERS, TREATMENTS, GapPlan, close_pair, inject_gaps
from .harness import ExperimentConfig, pairwise_matrix, run_experiment
from .io import DataTable, format_value, read_csv, write_csv
from .measures import MeasureSpec, estimate
from .systems import SystemSpec, generate

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2, 3


def _precision(args):
    return None if args.full_precision else 6


def _add_measure_flags(p):
    p.add_argument("--measure", choices=("cc", "cmi", "te"), default="cc")
    p.add_argument("--lag", type=int, default=0, help="lag of y for cc/cmi")
    p.add_argument("--m", type=int, default=1, help="embedding dimension for te")
    p.add_argument("--tau", type=int, default=1, help="delay for te")
    p.add_argument("--r", type=float, default=0.2, help="radius for te (normalized units)")
    p.add_argument("--bins", type=int, default=None, help="bins per axis for cmi")
    p.add_argument("--norm", choices=("euclidean", "max"), default="euclidean")


def _measure_spec(args):
    return MeasureSpec(args.measure, args.lag, args.m, args.tau, args.r, args.bins, args.norm)


def _output(args, text):
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)


def cmd_simulate(args):
    spec = SystemSpec(args.system, args.n, args.coupling, args.seed, args.transient)
    x, y = generate(spec)
    _output(args, write_csv(DataTable(["x", "y"], [x, y]), precision=_precision(args)))
    return EXIT_OK


def cmd_inject(args):
    table = read_csv(args.input)
    names = args.columns or table.names
    columns = []
    seeds = np.random.SeedSequence(args.seed).spawn(len(table.names))
    for name, col, sd in zip(table.names, table.columns, seeds):
        if name in names:
            g = args.g if args.g is not None else int(round(args.pct / 100.0 * len(col)))
            plan = GapPlan(args.kind, g, args.block_size, (args.block_min, args.block_max), sd)
            col = inject_gaps(col, plan)
        columns.append(col)
    out = DataTable(table.names, columns, table.dates)
    _output(args, write_csv(out, precision=_precision(args)))
    return EXIT_OK


def cmd_measure(args):
    table = read_csv(args.input)
    xname = args.x or table.names[0]
    yname = args.y or table.names[1]
    x, y = table[xname], table[yname]
    spec = _measure_spec(args)
    treatment = args.treatment.upper()
    if treatment == "MAGR":
        res = estimate(x, y, spec)
    elif treatment == "GC":
        res = estimate(*close_pair(x, y), spec)
    elif treatment == "STI":
        sx, sy = np.random.SeedSequence(args.seed).spawn(2)
        res = estimate(FILLERS["STI"](x, sx), FILLERS["STI"](y, sy), spec)
    else:
        res = estimate(FILLERS[treatment](x), FILLERS[treatment](y), spec)
    fmt = lambda v: format_value(v, _precision(args))
    lines = [
        "measure,treatment,x,y,value,effective_n,n_removed\n",
        f"{spec.kind},{args.treatment},{xname},{yname},{fmt(res.value)},{res.effective_n},{res.n_removed}\n",
    ]
    _output(args, "".join(lines))
    return EXIT_OK


def _split(value, cast=str):
    return tuple(cast(v.strip()) for v in value.replace(",", " ").split() if v.strip())


def load_experiment_config(path):
    """
    Read an :class:`ExperimentConfig` from an INI file.

    Sections and keys (all optional)::

        [system]      kind, n, coupling, transient
        [measure]     kind, lag, m, tau, r, bins, norm
        [gaps]        kind, block_size, block_min, block_max, percentages
        [experiment]  methods, realizations, base_seed, jobs
    """
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise MagrError(f"cannot read config file {path!r}")
    sy = cp["system"] if cp.has_section("system") else {}
    me = cp["measure"] if cp.has_section("measure") else {}
    ga = cp["gaps"] if cp.has_section("gaps") else {}
    ex = cp["experiment"] if cp.has_section("experiment") else {}
    system = SystemSpec(
        sy.get("kind", "mvar"),
        int(sy.get("n", 500)),
        float(sy.get("coupling", 0.0)),
        None,
        int(sy.get("transient", 1000)),
    )
    bins = me.get("bins")
    measure = MeasureSpec(
        me.get("kind", "cc"),
        int(me.get("lag", 0)),
        int(me.get("m", 1)),
        int(me.get("tau", 1)),
        float(me.get("r", 0.2)),
        int(bins) if bins not in (None, "", "auto") else None,
        me.get("norm", "euclidean"),
    )
    plan = GapPlan(
        ga.get("kind", "single"),
        0,
        int(ga.get("block_size", 1)),
        (int(ga.get("block_min", 1)), int(ga.get("block_max", 15))),
    )
    pcts = _split(ga["percentages"], float) if "percentages" in ga else tuple(range(5, 55, 5))
    methods = tuple(m.upper() for m in _split(ex["methods"])) if "methods" in ex else TREATMENTS
    config = ExperimentConfig(
        system,
        measure,
        methods,
        plan,
        pcts,
        int(ex.get("realizations", 50)),
        int(ex.get("base_seed", 0)),
    )
    return config, int(ex.get("jobs", 1))


def cmd_experiment(args):
    config, jobs = load_experiment_config(args.config)
    if args.jobs is not None:
        jobs = args.jobs
    stats = run_experiment(config, n_jobs=jobs)
    _output(args, stats.to_csv(precision=_precision(args)))
    failed = sum(c.n_failed for c in stats)
    if failed:
        print(f"warning: {failed} realization cell(s) failed", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_matrix(args):
    table = read_csv(args.input)
    names = args.columns or table.names
    series = [table[n] for n in names]
    result = pairwise_matrix(series, _measure_spec(args), names)
    _output(args, result.to_csv(precision=_precision(args)))
    real_errors = {k: v for k, v in result.errors.items() if v != "not applicable"}
    for (i, j), msg in sorted(real_errors.items()):
        print(f"warning: cell ({names[i]}, {names[j]}): {msg}", file=sys.stderr)
    return EXIT_PARTIAL if real_errors else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="magr", description="Connectivity measures on gappy time series.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-o", "--output", default=None, help="output file (default: stdout)")
        p.add_argument("--full-precision", action="store_true", help="write exact floats instead of 6 digits")

    p = sub.add_parser("simulate", help="generate a driver/response pair")
    p.add_argument("--system", choices=("mvar", "henon"), default="mvar")
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--coupling", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--transient", type=int, default=1000)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("inject", help="remove samples from the columns of a CSV")
    p.add_argument("input")
    p.add_argument("--kind", choices=("single", "fixed_block", "varying_block"), default="single")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--g", type=int, help="number of samples to remove per column")
    grp.add_argument("--pct", type=float, help="percentage of samples to remove per column")
    p.add_argument("--block-size", type=int, default=1)
    p.add_argument("--block-min", type=int, default=1)
    p.add_argument("--block-max", type=int, default=15)
    p.add_argument("--columns", nargs="+", default=None)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("measure", help="estimate a measure x -> y")
    p.add_argument("input")
    p.add_argument("--x", default=None, help="driver column (default: first)")
    p.add_argument("--y", default=None, help="response column (default: second)")
    p.add_argument("--treatment", choices=tuple(t.lower() for t in TREATMENTS), default="magr")
    p.add_argument("--seed", type=int, default=0, help="seed for sti")
    _add_measure_flags(p)
    common(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("experiment", help="run a Monte-Carlo sweep from an INI config")
    p.add_argument("config")
    p.add_argument("--jobs", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("matrix", help="pairwise measure matrix over CSV columns")
    p.add_argument("input")
    p.add_argument("--columns", nargs="+", default=None)
    _add_measure_flags(p)
    common(p)
    p.set_defaults(func=cmd_matrix)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MagrError, OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
