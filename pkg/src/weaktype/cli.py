"""Command-line entry point: ``weaktype <subcommand> [options]``.

Every run writes its data file(s) plus a ``<command>.manifest.json`` into
the output directory (``--out-dir``, else ``$WEAKTYPE_OUT``, else ``.``).
Options may also come from ``--config FILE`` holding ``key = value`` lines;
explicit flags win over the file, which wins over built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path


from . import construction as cons
from . import estimation as est
from . import oned
from . import probability as prob
from .maxfun import default_lattice_rmax, eval_max, eval_max_lattice
from .measures import DeltaMeasure, LatticeWindow
from .report import RunManifest, format_value, write_report

log = logging.getLogger("weaktype")

OUT_ENV = "WEAKTYPE_OUT"
DEFAULT_SEED = est.McConfig().seed


class UsageError(Exception):
    """Bad arguments detected after parsing (exit code 2)."""


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.replace(",", " ").split()]


def _ints(text: str) -> list[int]:
    return [int(float(v)) for v in text.replace(",", " ").split()]


def parse_schedule(text: str) -> list[int]:
    """``start:stop:xF`` (geometric) or a comma-separated list of dimensions."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3 or not parts[2].startswith("x"):
            raise argparse.ArgumentTypeError("schedule must look like 1e3:1e6:x2")
        return prob.d_schedule(int(float(parts[0])), int(float(parts[1])), int(parts[2][1:]))
    return _ints(text)


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


# -- subcommands ------------------------------------------------------------

def cmd_eval_point(a):
    x = _floats(a.x)
    if len(x) == 1 and a.d > 1:
        x = x * a.d
    if len(x) != a.d:
        raise UsageError(f"--x has {len(x)} coordinates, expected {a.d}")
    if a.measure:
        measure = DeltaMeasure.from_json(json.loads(Path(a.measure).read_text()))
        res = eval_max(measure, x, a.r_max if a.r_max else math.inf)
        kind = "delta"
    else:
        if (a.lo is None) != (a.hi is None):
            raise UsageError("--lo and --hi go together")
        window = LatticeWindow(a.d, a.lo, a.hi)
        res = eval_max_lattice(x, window, a.r_max or default_lattice_rmax(a.d))
        kind = "lattice"
    row = {"d": a.d, "x": x, "measure": kind, "value": res.value,
           "best_radius": res.best_radius, "truncated": res.truncated}
    print(f"value {format_value(res.value)} at r {format_value(res.best_radius)}")
    return [row], ("d", "x", "measure", "value", "best_radius", "truncated")


def cmd_ms_bound(a):
    rows = [{"d": d, "ms_bound": cons.ms_bound(d)} for d in _ints(a.d)]
    for r in rows:
        print(format_value(r["ms_bound"]))
    return rows, ("d", "ms_bound")


def cmd_claims(a):
    schedule = parse_schedule(a.d_schedule)
    wanted = [c.strip() for c in a.claim.split(",")]
    for c in wanted:
        if c not in prob.CLAIM_IDS:
            raise UsageError(f"unknown claim {c!r}")
    v = a.v if a.v is not None else a.u - a.t ** (-4.0 / 3.0)
    rows = []
    for claim in wanted:
        reps = []
        for d in schedule:
            if claim == "claim1":
                reps.append(prob.claim1_report(a.u, a.t, d))
            elif claim == "claim1_clt":
                reps.append(prob.claim1_clt_report(a.u, a.t, d))
            elif claim == "claim2":
                reps.append(prob.claim2_report(a.u, v, a.t, d))
            else:
                reps.append(prob.claim3_report(a.t, d, a.a, a.b))
        threshold = prob.empirical_threshold(reps)
        print(f"{claim}: empirical threshold D = {threshold if threshold else 'not reached'}")
        rows.extend(r.to_row() for r in reps)
    return rows, prob.REPORT_COLUMNS


def cmd_eu_exact(a):
    profile = cons.LevelProfile(a.u, a.t, a.d)
    value = prob.exact_Eu(profile)
    lo, hi = prob.claim1_bracket(a.t)
    clo, chi = prob.clt_bracket(a.t)
    row = {"d": a.d, "u": a.u, "t": a.t, "k_lo": profile.k_lo, "r0": profile.r0,
           "exact": value, "bracket_lo": lo, "bracket_hi": hi, "clt_lo": clo, "clt_hi": chi}
    print(f"|E^u| = {format_value(value)}  bracket ({format_value(lo)}, {format_value(hi)})")
    return [row], tuple(row)


def cmd_union_bound(a):
    ub = prob.union_lower_bound(a.d, a.t, a.a, a.b)
    row = {"d": a.d, "t": a.t, "levels": len(ub.levels), "exact_sum": ub.exact_sum,
           "pairwise_total": ub.pairwise_total, "lower": ub.lower,
           "closed_form_floor": ub.closed_form_floor, "holds": ub.lower >= ub.closed_form_floor}
    print(f"union >= {format_value(ub.lower)} (floor {format_value(ub.closed_form_floor)})")
    return [row], tuple(row)


def _mc_config(a) -> est.McConfig:
    grid = tuple(_floats(a.alpha_grid)) if a.alpha_grid else est.default_alpha_grid(a.t, a.alpha_points)
    return est.McConfig(samples=a.samples, seed=a.seed, r_max=a.r_max,
                        alpha_grid=grid, workers=a.workers)


def cmd_mc_bound(a):
    config = _mc_config(a)
    bb = est.best_bound(a.d, config, _ints(a.R) if a.R else ())
    row = bb.to_row()
    print(f"d={a.d} alpha*={format_value(bb.alpha)} value={format_value(bb.value)} "
          f"99% CI=({format_value(bb.ci[0])}, {format_value(bb.ci[1])})")
    for R, v in bb.certified.items():
        print(f"  R={R}: certified form {format_value(v)}")
    return [row], est.CSV_COLUMNS


def cmd_sweep(a):
    config = _mc_config(a)
    rows = [bb.to_row() for bb in est.sweep_dimensions(_ints(a.d_list), config)]
    for r in rows:
        print(f"d={r['d']} value={format_value(r['value'])} ms_bound={format_value(r['ms_bound'])}")
    return rows, est.CSV_COLUMNS


def cmd_oned_search(a):
    res = oned.optimize_positions(a.n, a.iterations, a.restarts, a.seed, a.workers)
    print(f"n={a.n} value={format_value(res.value)} lambda={format_value(res.lam)} restart={res.restart}")
    extra = {}
    if a.trace:
        extra["trace"] = ([{"iteration": i, "value": v, "step": s} for i, v, s in res.trace],
                          ("iteration", "value", "step"), a.trace)
    if a.save_config:
        Path(a.save_config).write_text(json.dumps(res.config.to_json(), indent=2) + "\n")
        extra["config"] = a.save_config
    row = {"n": a.n, "value": res.value, "lambda": res.lam, "restart": res.restart,
           "positions": list(res.config.positions)}
    return [row], ("n", "value", "lambda", "restart", "positions"), extra


def cmd_certificate(a):
    levels = prob.u_grid(a.t, a.a, a.b)
    alpha = min(cons.claim4_threshold(cons.LevelProfile(u, a.t, a.d)) for u in levels)
    ub = prob.union_lower_bound(a.d, a.t, a.a, a.b)
    R = a.R if a.R else None
    cert = cons.assemble_certificate(
        a.d, alpha, ub.lower, R,
        {"alpha": "closed-form", "superlevel_lower": "exact-binomial"},
    )
    print(f"c_{a.d} >= {format_value(cert.bound)}  (alpha={format_value(alpha)}, "
          f"superlevel>={format_value(ub.lower)}, window={format_value(cert.window_factor)})")
    print(f"asymptotic constant for t={format_value(a.t)}: {format_value(prob.theorem_constant(a.t))}")
    row = cert.to_json()
    return [row], ("d", "alpha", "superlevel_lower", "window_factor", "mass_per_cell",
                   "bound", "R", "asymptotic", "provenance")


COMMANDS = {
    "eval-point": cmd_eval_point,
    "claims": cmd_claims,
    "eu-exact": cmd_eu_exact,
    "union-bound": cmd_union_bound,
    "mc-bound": cmd_mc_bound,
    "sweep": cmd_sweep,
    "oned-search": cmd_oned_search,
    "ms-bound": cmd_ms_bound,
    "certificate": cmd_certificate,
}


ARG_HELP = {
    "format": "report format",
    "seed": "master seed for all random streams",
    "verbose": "log progress",
    "d": "dimension",
    "t": "deviation parameter t",
    "u": "level u in (0, 1)",
    "a": "lowest level",
    "b": "highest level",
    "d_schedule": "dimensions as START:STOP:xFACTOR or a comma list",
    "d_list": "dimensions, comma separated",
    "samples": "Monte Carlo sample count N",
    "alpha_points": "size of the geometric alpha grid",
    "n": "number of unit deltas",
    "iterations": "iterations per restart",
    "restarts": "independent restarts",
}


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=None,
                        help=f"output directory (default: ${OUT_ENV} or the current directory)")
    common.add_argument("--output", default=None, help="report path (default: OUT_DIR/COMMAND.FORMAT)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--config", default=None, help="file of 'key = value' defaults")
    common.add_argument("--workers", type=int, default=1, help="worker processes")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="weaktype", description=__doc__.splitlines()[0],
                                formatter_class=fmt)
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_, description=help_,
                              formatter_class=fmt)

    s = add("eval-point", "evaluate the maximal function at one point")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--x", required=True, help="coordinates, comma separated (one value is broadcast)")
    s.add_argument("--lattice", action="store_true", help="use the integer lattice (the default)")
    s.add_argument("--lo", type=int, default=None, help="lattice window lower bound (unbounded if omitted)")
    s.add_argument("--hi", type=int, default=None, help="lattice window upper bound")
    s.add_argument("--measure", default=None, help="DeltaMeasure JSON file instead of the lattice")
    s.add_argument("--r-max", type=float, default=None,
                   help="truncation radius (lattice default ceil(sqrt d)+1, deltas unbounded)")

    s = add("claims", "exact checks of the band-set claims along a dimension schedule")
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--u", type=float, default=0.125)
    s.add_argument("--v", type=float, default=None, help="second level for claim2 (default u - t^(-4/3))")
    s.add_argument("--d-schedule", default="1e3:1e6:x2")
    s.add_argument("--claim", default="claim1,claim1_clt",
                   help=f"comma list from {', '.join(prob.CLAIM_IDS)}")
    s.add_argument("--a", type=float, default=0.125, help="lowest level")
    s.add_argument("--b", type=float, default=0.25, help="highest level")

    s = add("eu-exact", "exact measure of one band set")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--u", type=float, default=0.125)
    s.add_argument("--t", type=float, required=True)

    s = add("union-bound", "inclusion-exclusion lower bound on the union of band sets")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--a", type=float, default=0.125)
    s.add_argument("--b", type=float, default=0.25)

    for name, help_ in (("mc-bound", "Monte Carlo lower bound for one dimension"),
                        ("sweep", "Monte Carlo lower bounds over several dimensions")):
        s = add(name, help_)
        if name == "mc-bound":
            s.add_argument("--d", type=int, required=True)
            s.add_argument("--R", default=None, help="window sizes for the certified form")
        else:
            s.add_argument("--d-list", default="1,2,3,5,10")
        s.add_argument("--samples", type=int, default=100_000)
        s.add_argument("--t", type=float, default=2.0, help="sets the top of the alpha grid, e^(t^2/2)")
        s.add_argument("--alpha-points", type=int, default=64)
        s.add_argument("--alpha-grid", default=None, help="explicit thresholds, comma separated")
        s.add_argument("--r-max", type=float, default=None, help="truncation radius (default ceil(sqrt d)+1)")

    s = add("oned-search", "search one-dimensional delta configurations")
    s.add_argument("--n", type=int, default=16)
    s.add_argument("--iterations", type=int, default=400)
    s.add_argument("--restarts", type=int, default=20)
    s.add_argument("--trace", default=None, help="CSV trace path (iteration, value, step)")
    s.add_argument("--save-config", default=None, help="write the best configuration as JSON")

    s = add("ms-bound", "closed-form lattice bound ((1 + 2^(1/d)) / 2)^d")
    s.add_argument("--d", required=True, help="dimension(s), comma separated")

    s = add("certificate", "finite-d certificate from exact band-set computations")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--R", type=int, default=None, help="window size (omit for the R -> inf limit)")
    s.add_argument("--a", type=float, default=0.125)
    s.add_argument("--b", type=float, default=0.25)

    for sp in sub.choices.values():
        for action in sp._actions:
            if action.help is None and action.dest in ARG_HELP:
                action.help = ARG_HELP[action.dest]
    return p


def _parse(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            values = read_config(args.config)
        except OSError as exc:
            parser.error(f"cannot read config: {exc}")
        except UsageError as exc:
            parser.error(str(exc))
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(values) - known
        if unknown:
            parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
        typed = {}
        for action in sub._actions:
            if action.dest in values:
                raw = values[action.dest]
                if action.type:
                    typed[action.dest] = action.type(raw)
                elif isinstance(action, argparse._StoreTrueAction):
                    typed[action.dest] = raw.lower() in ("1", "true", "yes", "on")
                else:
                    typed[action.dest] = raw
        sub.set_defaults(**typed)
        args = parser.parse_args(argv)
    return args


def dispatch(argv=None) -> int:
    """Run one subcommand; returns 0 on success, 1 on runtime failure, 2 on bad arguments."""
    try:
        args = _parse(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out_dir = Path(args.out_dir or os.environ.get(OUT_ENV) or ".")
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("command", "out_dir", "output", "config", "verbose")}
    manifest = RunManifest(args.command, params, args.seed)
    manifest_path = out_dir / f"{args.command}.manifest.json"
    code = 0
    try:
        result = COMMANDS[args.command](args)
        rows, columns = result[0], result[1]
        extra = result[2] if len(result) > 2 else {}
        path = Path(args.output) if args.output else out_dir / f"{args.command}.{args.format}"
        manifest.outputs.append(write_report(rows, args.format, path, columns))
        if "trace" in extra:
            trows, tcols, tpath = extra["trace"]
            manifest.outputs.append(write_report(trows, "csv", tpath, tcols))
        if "config" in extra:
            manifest.outputs.append(Path(extra["config"]))
        manifest.finish("ok")
    except (UsageError, ValueError) as exc:
        print(f"weaktype {args.command}: error: {exc}", file=sys.stderr)
        manifest.finish("usage-error", str(exc))
        code = 2
    except Exception as exc:  # noqa: BLE001 - reported through the exit code and manifest
        log.exception("run failed")
        manifest.finish("failed", f"{type(exc).__name__}: {exc}")
        code = 1
    try:
        manifest.write(manifest_path)
    except OSError as exc:
        print(f"weaktype: cannot write manifest: {exc}", file=sys.stderr)
        code = code or 1
    return code


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
