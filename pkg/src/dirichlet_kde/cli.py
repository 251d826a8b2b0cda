"""Command-line interface: density, bandwidth, simulate, verify, bounds.

Options may come from an INI-style file (``--config``) with a ``[common]``
section and one section per subcommand; command-line flags take precedence.
"""

import argparse
import configparser
import re
import sys
from fractions import Fraction

import numpy as np

from . import acceptance
from .bandwidth import lscv, plug_in, rule_of_thumb
from .concentration import DeviationConfig, dirichlet_tail_bound, hoeffding_bound, large_deviation_bound, solve_delta
from .dirichlet import DirichletParams
from .errors import DirichletKDEError
from .estimator import estimate_on_grid
from .experiments import DEFAULT_SEED
from .io import fmt, ingest_csv, write_grid, write_parts, write_table
from .simplex import make_grid
from .target import BETA22, MIXTURE_A, MIXTURE_B, TargetDensity

TARGETS = {"beta22": BETA22, "mixture1": MIXTURE_A, "mixture2": MIXTURE_B}

_POWER = re.compile(r"^\s*(?:([0-9.eE+-]+)\s*\*\s*)?n\s*\^\s*\(?\s*([-+]?[0-9./]+)\s*\)?\s*$")

# (name, type, default) of every option that can also be set from the config file
_OPTIONS = {
    "common": [("seed", int, DEFAULT_SEED), ("grid", int, None), ("d", int, None), ("out", str, None)],
    "density": [("data", str, None), ("b", str, "plugin"), ("no_closure", bool, False), ("normalize", bool, False)],
    "bandwidth": [("data", str, None), ("method", str, "plugin"), ("no_closure", bool, False)],
    "simulate": [("target", str, "beta22"), ("n", int, 1000), ("params", str, None), ("weights", str, None)],
    "verify": [("criteria", str, None), ("workers", int, 1)],
    "bounds": [
        ("kind", str, "deviation"),
        ("n", int, None),
        ("b", float, None),
        ("a", float, None),
        ("f_sup", float, None),
        ("C", float, 1.0),
        ("x", float, None),
        ("t", str, None),
        ("alpha", str, None),
        ("beta", float, None),
        ("width", float, 1.0),
    ],
}


def parse_bandwidth(spec, n, d):
    """Numeric bandwidth, ``rot``, or ``[c*]n^(p)``; plugin/lscv are resolved by the caller."""
    spec = str(spec).strip()
    if spec == "rot":
        return rule_of_thumb(n, d)
    m = _POWER.match(spec)
    if m:
        c = float(m.group(1)) if m.group(1) else 1.0
        return c * float(n) ** float(Fraction(m.group(2)))
    try:
        return float(spec)
    except ValueError:
        raise DirichletKDEError(f"cannot parse bandwidth {spec!r}") from None


def _floats(text):
    return [float(v) for v in str(text).replace(";", ",").split(",") if v.strip()]


def _parse_target(opts):
    if opts.params:
        comps = [_floats(p) for p in opts.params.split(";")]
        w = _floats(opts.weights) if opts.weights else [1.0 / len(comps)] * len(comps)
        return TargetDensity.from_full(w, comps, name="custom")
    if opts.target.startswith("uniform"):
        return TargetDensity.uniform(opts.d or 1)
    try:
        return TARGETS[opts.target]
    except KeyError:
        raise DirichletKDEError(f"unknown target {opts.target!r}; choose from {sorted(TARGETS)} or uniform") from None


def _grid_for(d, m):
    return make_grid(d, m or (400 if d == 1 else 120 if d == 2 else 40))


def _select(data, spec, grid):
    spec = str(spec).strip()
    if spec == "plugin":
        return plug_in(data, grid).b
    if spec == "lscv":
        return lscv(data, grid=grid).b
    return parse_bandwidth(spec, data.n, data.d)


def cmd_density(opts):
    _need(opts, "data")
    data = ingest_csv(opts.data, closure=not opts.no_closure)
    grid = _grid_for(data.d, opts.grid)
    b = _select(data, opts.b, grid)
    vals = estimate_on_grid(data, b, grid)
    if opts.normalize:
        vals = vals / (grid.weights @ vals)
    if opts.out:
        write_grid(opts.out, grid.nodes, vals)
    else:
        print(f"b = {fmt(b)}, {len(vals)} grid nodes")
    return 0


def cmd_bandwidth(opts):
    _need(opts, "data")
    data = ingest_csv(opts.data, closure=not opts.no_closure)
    grid = _grid_for(data.d, opts.grid)
    if opts.method == "plugin":
        sel = plug_in(data, grid)
        b, note = sel.b, ("fallback: " + sel.note) if sel.fallback else ""
    elif opts.method == "lscv":
        b, note = lscv(data, grid=grid).b, ""
    elif opts.method == "rot":
        b, note = rule_of_thumb(data.n, data.d), ""
    else:
        raise DirichletKDEError(f"unknown method {opts.method!r}")
    if opts.out:
        write_table(opts.out, ["method", "n", "d", "b"], [[opts.method, data.n, data.d, b]])
    print(fmt(b) + (f"  ({note})" if note else ""))
    return 0


def cmd_simulate(opts):
    target = _parse_target(opts)
    pts = target.sample(np.random.default_rng(opts.seed), opts.n)
    if opts.out:
        write_parts(opts.out, pts)
    else:
        for row in pts:
            print(",".join(fmt(v) for v in np.append(row, 1.0 - row.sum())))
    return 0


def cmd_verify(opts):
    chosen = [int(c) for c in opts.criteria.split(",")] if opts.criteria else None
    results = acceptance.run(chosen, seed=opts.seed, workers=opts.workers, thresholds=opts.thresholds)
    for r in results:
        print(r.line())
    if opts.out:
        write_table(
            opts.out,
            ["criterion", "name", "value", "threshold", "pass"],
            [[r.number, r.name, r.value, r.threshold, str(r.passed).lower()] for r in results],
        )
    return 0 if all(r.passed for r in results) else 1


def _need(opts, *names):
    missing = [n for n in names if getattr(opts, n) is None]
    if missing:
        raise DirichletKDEError("missing option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def cmd_bounds(opts):
    kind = opts.kind
    if kind == "deviation":
        _need(opts, "n", "b", "a", "f_sup", "d")
        res = large_deviation_bound(DeviationConfig(opts.n, opts.b, opts.a, opts.d, opts.f_sup, opts.C))
        print(f"bound = {fmt(res.value)}  delta = {fmt(res.delta)}")
        for msg in res.failed:
            print(f"warning: hypothesis fails: {msg}")
    elif kind == "delta":
        _need(opts, "x")
        print(fmt(solve_delta(opts.x)))
    elif kind == "tail":
        _need(opts, "alpha", "beta", "t")
        print(fmt(dirichlet_tail_bound(DirichletParams(_floats(opts.alpha), opts.beta), _floats(opts.t))))
    elif kind == "hoeffding":
        _need(opts, "n", "t")
        print(fmt(hoeffding_bound(opts.n, opts.width, float(opts.t))))
    else:
        raise DirichletKDEError(f"unknown bound kind {kind!r}")
    return 0


COMMANDS = {
    "density": cmd_density,
    "bandwidth": cmd_bandwidth,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "bounds": cmd_bounds,
}


def _flag(name):
    return "--" + name.replace("_", "-")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with [common] and per-command sections")
    for name, typ, _ in _OPTIONS["common"]:
        common.add_argument(_flag(name), type=typ, default=None)
    parser = argparse.ArgumentParser(prog="dirichlet-kde", description="Dirichlet kernel density estimation on the simplex")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "density": "evaluate the estimator on a simplex grid",
        "bandwidth": "select a bandwidth for a dataset",
        "simulate": "draw a sample from a Dirichlet mixture",
        "verify": "run the acceptance criteria",
        "bounds": "evaluate probability bounds",
    }
    for cmd, text in helps.items():
        p = sub.add_parser(cmd, parents=[common], help=text)
        for name, typ, _ in _OPTIONS[cmd]:
            if typ is bool:
                p.add_argument(_flag(name), action="store_true", default=None)
            else:
                p.add_argument(_flag(name), type=typ, default=None)
    return parser


def _config_thresholds(cfg):
    """``threshold_K = value`` (or ``centre, tol`` for the rate criteria) in the [verify] section."""
    out = {}
    if cfg.has_section("verify"):
        for key, raw in cfg.items("verify"):
            m = re.fullmatch(r"threshold_(\d+)", key)
            if m:
                k = int(m.group(1))
                if k not in acceptance.THRESHOLDS:
                    raise DirichletKDEError(f"no acceptance criterion {k}")
                vals = _floats(raw)
                out[k] = tuple(vals) if isinstance(acceptance.THRESHOLDS[k], tuple) else vals[0]
    return out


def resolve_options(args):
    """Merge flags over config-file values over built-in defaults."""
    cfg = configparser.ConfigParser()
    if args.config:
        if not cfg.read(args.config, encoding="utf-8"):
            raise DirichletKDEError(f"cannot read config file {args.config!r}")
    for section in ("common", args.command):
        for name, typ, default in _OPTIONS[section]:
            if getattr(args, name, None) is not None:
                continue
            value = default
            for sec in (args.command, "common"):
                if cfg.has_option(sec, name):
                    value = cfg.getboolean(sec, name) if typ is bool else typ(cfg.get(sec, name))
                    break
            setattr(args, name, value)
    if args.command == "verify":
        args.thresholds = _config_thresholds(cfg)
    if not 0 <= args.seed < 2**64:
        raise DirichletKDEError("seed must be an unsigned 64-bit integer")
    return args


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        opts = resolve_options(args)
        return COMMANDS[opts.command](opts)
    except (DirichletKDEError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
