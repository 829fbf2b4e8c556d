"""Command-line front end.

    extropy analytic "uniform(0,6)" fe
    extropy analytic "exp(1)" dfe --t 1 --bounds
    extropy curve "exp(0.5)" "exp(1)" --tmax 5 --out fig1.csv
    extropy empirical --dataset blood-cancer fe
    extropy empirical data.csv dfe --t 3
    extropy fig2 --dataset neuron-spikes --out fig2.csv
    extropy orders "power(1)" "power(2)" --kinds st,fe
    extropy harness --seed 7 --pairs 200 --out harness.json
    extropy mc uniform01 --n 10 --n 100 --replicates 100000 --seed 42

Exit codes: 0 ok, 2 usage or unreadable input, 3 value undefined for the
input, 4 quadrature could not reach the requested accuracy.  Every run emits
a manifest (next to ``--out`` as ``<out>.manifest.json``, otherwise as one
JSON line on stderr).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .datasets import DATASETS
from .empirical import (
    VARIANTS,
    Sample,
    empirical_dfe,
    empirical_fe,
    empirical_wdfe,
    empirical_wfe,
    fig2_series,
    load_sample,
    matching_variant,
    mc_consistency_study,
)
from .errors import AccuracyError, ExtropyError, ParameterError
from .measures import (
    dfe_bounds,
    dfe_curve,
    dynamic_failure_extropy,
    failure_extropy,
    failure_extropy_bounds,
    weighted_dfe,
    weighted_failure_extropy,
)
from .orders import KINDS, check_order, implication_harness, random_family_pairs
from .quadrature import DEFAULT_CONFIG
from .transforms import WEIGHTS, get_weight, parse_distribution

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_ACCURACY = 0, 2, 3, 4
MEASURES = ("fe", "dfe", "wfe", "wdfe")
FIGURE1_RATES = (0.5, 1.0, 1.5, 2.0, 2.5)
FIGURE2_WEIGHTS = ("sqrt", "id", "square", "cube")


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    """Display form: six significant digits."""
    if x == -math.inf:
        return "-inf (unbounded support)"
    return format(x, ".6g")


def _full(x: float) -> str:
    return format(float(x), ".17g")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_full(v) for v in row])
    return buf.getvalue()


class Run:
    """Collects outputs and the manifest for one invocation."""

    def __init__(self, argv, args):
        self.argv = list(argv)
        self.args = args
        self.outputs = {}
        self.extra = {}

    def emit(self, text: str):
        """Write ``text`` to ``--out`` if given, else stdout."""
        out = getattr(self.args, "out", None)
        data = text.encode()
        if out:
            with open(out, "wb") as fh:
                fh.write(data)
            self.outputs[out] = hashlib.sha256(data).hexdigest()
        else:
            sys.stdout.write(text)
            self.outputs["<stdout>"] = hashlib.sha256(data).hexdigest()

    def print(self, text: str):
        self.emit(text if text.endswith("\n") else text + "\n")

    def manifest(self) -> dict:
        config = {k: v for k, v in sorted(vars(self.args).items()) if k != "handler"}
        return {
            "command": self.argv,
            "config": config,
            "seed": config.get("seed"),
            "version": __version__,
            "integration": asdict(DEFAULT_CONFIG),
            "weighted_variant": matching_variant(),
            **self.extra,
            "outputs": self.outputs,
        }

    def write_manifest(self):
        text = json.dumps(self.manifest(), sort_keys=True)
        out = getattr(self.args, "out", None)
        if out:
            with open(out + ".manifest.json", "w", newline="\n") as fh:
                fh.write(text + "\n")
        else:
            sys.stderr.write("manifest: " + text + "\n")


# ---------------------------------------------------------------------------
# commands


def _weight(args):
    return get_weight(args.weight)


def cmd_analytic(run: Run):
    a = run.args
    dist = parse_distribution(a.spec)
    m = a.measure
    if m in ("dfe", "wdfe") and a.t is None:
        raise UsageError(f"{m} needs --t")
    if m == "fe":
        val = failure_extropy(dist)
    elif m == "dfe":
        val = dynamic_failure_extropy(dist, a.t)
    elif m == "wfe":
        val = weighted_failure_extropy(dist, _weight(a))
    else:
        val = weighted_dfe(dist, _weight(a), a.t)
    lines = [fmt(val.value) if val.is_infinite else f"{fmt(val.value)} ({val.method})"]
    if a.bounds:
        if m == "fe":
            lower, upper = failure_extropy_bounds(dist)
        elif m == "dfe":
            lower, upper = dfe_bounds(dist, a.t)
        else:
            raise UsageError("--bounds is available for fe and dfe")
        lines.append(f"bounds: [{fmt(lower)}, {fmt(upper)}]")
    run.print("\n".join(lines))


def cmd_curve(run: Run):
    a = run.args
    specs = list(a.spec)
    if a.figure1:
        specs = [f"exp({r:g})" for r in FIGURE1_RATES]
    if not specs:
        raise UsageError("give at least one distribution or --figure1")
    dists = [parse_distribution(s) for s in specs]
    weight = _weight(a) if a.measure == "wdfe" else None
    t_max = a.tmax
    if t_max is None and any(not d.bounded for d in dists):
        if a.figure1:
            t_max = 5.0
        else:
            raise UsageError("--tmax is required for unbounded supports")
    top = t_max if t_max is not None else max(d.hi for d in dists)
    lo = min(d.lo for d in dists)
    if a.grid == 1:
        grid = np.array([lo])
    else:
        grid = np.linspace(lo + (top - lo) / 1000.0, top, a.grid)
    curves = [dfe_curve(d, grid=grid, weight=weight) for d in dists]
    if len(curves) == 1:
        run.emit(curves[0].to_csv())
    else:
        header = ["t"] + [c.descriptor for c in curves]
        rows = zip(grid, *[c.values for c in curves])
        run.emit(_csv_text(header, rows))


def _load_input(a) -> Sample:
    if a.dataset and a.input:
        raise UsageError("give either --dataset or an input file, not both")
    if a.dataset:
        if a.dataset not in DATASETS:
            raise UsageError(f"unknown dataset {a.dataset!r}; expected one of {sorted(DATASETS)}")
        return Sample.from_dataset(a.dataset)
    if not a.input:
        raise UsageError("give --dataset or an input file")
    try:
        return load_sample(a.input)
    except OSError as exc:
        raise UsageError(f"cannot read {a.input}: {exc.strerror}") from None
    except ParameterError as exc:
        raise UsageError(str(exc)) from None


def cmd_empirical(run: Run):
    a = run.args
    words = list(a.words)
    measures = [w for w in words if w in MEASURES]
    files = [w for w in words if w not in MEASURES]
    if len(measures) > 1 or len(files) > 1:
        raise UsageError("expected at most one input file and one measure")
    a.input = files[0] if files else None
    measure = measures[0] if measures else None
    if measure is None and not a.all:
        raise UsageError(f"give a measure ({', '.join(MEASURES)}) or --all")
    sample = _load_input(a)
    variant = a.variant or matching_variant()
    w = _weight(a)
    run.extra["variant_used"] = variant

    def compute(m):
        if m == "fe":
            return empirical_fe(sample)
        if m == "wfe":
            return empirical_wfe(sample, w, variant)
        if a.t is None:
            raise UsageError(f"{m} needs --t")
        if m == "dfe":
            return empirical_dfe(sample, a.t)
        return empirical_wdfe(sample, w, a.t, variant)

    if a.all:
        if a.t is None:
            raise UsageError("--all needs --t")
        lines = []
        for m in MEASURES:
            r = compute(m)
            label = m + (f"[{r.weight}]" if r.weight else "") + (f"(t={a.t:g})" if r.t is not None else "")
            lines.append(f"{label}\t{fmt(r.value)}")
        run.print("\n".join(lines))
    else:
        run.print(fmt(compute(measure).value))


def cmd_fig2(run: Run):
    a = run.args
    names = [a.dataset] if a.dataset else sorted(DATASETS)
    variant = a.variant or matching_variant()
    run.extra["variant_used"] = variant
    parts = []
    for name in names:
        if name not in DATASETS:
            raise UsageError(f"unknown dataset {name!r}")
        sample = Sample.from_dataset(name)
        grid = None
        if a.t:
            grid = sorted(a.t)
        ts, series = fig2_series(sample, FIGURE2_WEIGHTS, variant, grid=grid, n=a.grid)
        header = ["dataset", "t"] + [f"w={k}" for k in series]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if not parts:
            writer.writerow(header)
        for i, t in enumerate(ts):
            writer.writerow([name, _full(t)] + [_full(series[k][i]) for k in series])
        parts.append(buf.getvalue())
    run.emit("".join(parts))


def cmd_orders(run: Run):
    a = run.args
    X, Y = parse_distribution(a.x), parse_distribution(a.y)
    kinds = [k.strip() for k in a.kinds.split(",")] if a.kinds else list(KINDS)
    bad = [k for k in kinds if k not in KINDS]
    if bad:
        raise UsageError(f"unknown order(s) {bad}; expected from {KINDS}")
    lines = []
    for k in kinds:
        v = check_order(k, X, Y, a.grid)
        extra = f"\twitness={v.witness}" if v.holds == "no" else (f"\t{v.note}" if v.note else "")
        lines.append(f"{k}\t{v.holds}{extra}")
    run.print("\n".join(lines))


def cmd_harness(run: Run):
    a = run.args
    pairs = random_family_pairs(a.seed, a.pairs, shared_support=not a.any_support)
    report = implication_harness(pairs, grid=a.grid)
    run.emit(report.to_json(indent=2, sort_keys=True) + "\n")
    run.extra["falsification_count"] = report.falsification_count
    return EXIT_OK if report.falsification_count == 0 else 1


def cmd_mc(run: Run):
    a = run.args
    n_values = a.n or [10]
    rows = mc_consistency_study(a.family, n_values, a.replicates, a.seed, rate=a.rate)
    run.emit(json.dumps([r.as_dict() for r in rows], indent=2) + "\n")


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="extropy", description="Failure extropy measures, estimators and order checks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, weight=True, out=True):
        if weight:
            sp.add_argument("--weight", default="id", choices=sorted(set(WEIGHTS)),
                            help="weight label for weighted measures (default: id)")
        if out:
            sp.add_argument("--out", help="write output here instead of stdout")

    s = sub.add_parser("analytic", help="a measure of a parametric law")
    s.add_argument("spec", help='e.g. "uniform(0,6)", "prhr(exp(1),3)"')
    s.add_argument("measure", choices=MEASURES)
    s.add_argument("--t", type=float)
    s.add_argument("--bounds", action="store_true")
    common(s)
    s.set_defaults(handler=cmd_analytic)

    s = sub.add_parser("curve", help="dynamic measure on a grid, as CSV")
    s.add_argument("spec", nargs="*")
    s.add_argument("--measure", choices=("dfe", "wdfe"), default="dfe")
    s.add_argument("--grid", type=int, default=200)
    s.add_argument("--tmax", type=float)
    s.add_argument("--figure1", action="store_true", help="the five exponential curves, rates 0.5..2.5")
    common(s)
    s.set_defaults(handler=cmd_curve)

    s = sub.add_parser("empirical", help="estimators from a sample")
    s.add_argument("words", nargs="*", metavar="[FILE] MEASURE")
    s.add_argument("--dataset", choices=sorted(DATASETS))
    s.add_argument("--t", type=float)
    s.add_argument("--variant", choices=VARIANTS)
    s.add_argument("--all", action="store_true")
    common(s)
    s.set_defaults(handler=cmd_empirical)

    s = sub.add_parser("fig2", help="weighted empirical dynamic measure for four weights")
    s.add_argument("--dataset", choices=sorted(DATASETS))
    s.add_argument("--variant", choices=VARIANTS)
    s.add_argument("--grid", type=int, default=200)
    s.add_argument("--t", type=float, action="append", help="evaluate at these times instead of a grid")
    common(s, weight=False)
    s.set_defaults(handler=cmd_fig2)

    s = sub.add_parser("orders", help="check stochastic orders between two laws")
    s.add_argument("x")
    s.add_argument("y")
    s.add_argument("--kinds", help=f"comma-separated subset of {','.join(KINDS)}")
    s.add_argument("--grid", type=int, default=512)
    common(s, weight=False)
    s.set_defaults(handler=cmd_orders)

    s = sub.add_parser("harness", help="search random pairs for falsified implications")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--pairs", type=int, default=200)
    s.add_argument("--grid", type=int, default=512)
    s.add_argument("--any-support", action="store_true",
                   help="draw members independently instead of on a shared support")
    common(s, weight=False)
    s.set_defaults(handler=cmd_harness)

    s = sub.add_parser("mc", help="Monte Carlo study of the spacing estimator")
    s.add_argument("family", help="uniform01, exponential or exp(rate)")
    s.add_argument("--n", type=int, action="append")
    s.add_argument("--replicates", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--rate", type=float)
    common(s, weight=False)
    s.set_defaults(handler=cmd_mc)
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"extropy: error: {exc}\n")
        return EXIT_USAGE
    run = Run(argv, args)
    try:
        code = args.handler(run) or EXIT_OK
    except (UsageError, ParameterError) as exc:
        sys.stderr.write(f"extropy: error: {exc}\n")
        return EXIT_USAGE
    except AccuracyError as exc:
        sys.stderr.write(f"extropy: accuracy not reached: {exc}\n")
        return EXIT_ACCURACY
    except (ExtropyError, ArithmeticError) as exc:
        sys.stderr.write(f"extropy: {exc}\n")
        return EXIT_DOMAIN
    run.write_manifest()
    return code


if __name__ == "__main__":
    sys.exit(main())
