"""Command-line interface.

Subcommands::

    hotelling solve CONFIG
    hotelling sweep CONFIG
    hotelling compare CONFIG_A CONFIG_B
    hotelling oracle-check CONFIG --bins N [--horizon H]

Exit codes: 0 success, 2 config error, 3 solver error, 4 oracle deviation
above tolerance. Errors go to stderr as ``ERROR <code>: <message>``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import emit
from .config import parse_config
from .errors import HotellingError
from .lab import sweep
from .oracle import compare_paths, solve_discrete
from .solver import GridSpec, solve_path

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_ORACLE = 0, 2, 3, 4
ORACLE_TOL = 1e-3


class _Fail(Exception):
    def __init__(self, code, msg):
        super().__init__(msg)
        self.code = code


def _load(filename):
    try:
        text = Path(filename).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise _Fail(EXIT_CONFIG, f"cannot read {filename}: {exc}") from exc
    try:
        return parse_config(text)
    except HotellingError as exc:
        raise _Fail(EXIT_CONFIG, f"{filename}: {exc}") from exc


def _solve(cfg):
    try:
        return solve_path(cfg.scenario, cfg.grid, cfg.tol)
    except HotellingError as exc:
        raise _Fail(EXIT_SOLVER, str(exc)) from exc


def _outdir(cfg, override):
    out = Path(override or cfg.directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path, text):
    path.write_text(text, encoding="utf-8", newline="\n")
    return path


def cmd_solve(args):
    cfg = _load(args.config)
    path = _solve(cfg)
    out = _outdir(cfg, args.out)
    stem = Path(args.config).stem
    written = []
    if "csv" in cfg.formats:
        written.append(_write(out / f"{stem}.csv", emit.emit_csv(path)))
    if "json" in cfg.formats:
        written.append(_write(out / f"{stem}.json", emit.emit_summary_json(path)))
    if "svg" in cfg.formats:
        written.append(_write(out / f"{stem}.svg", emit.render_svg([path])))
    if "png" in cfg.formats:
        from .figures import plot_paths

        plot_paths([path], out / f"{stem}.png", title=path.scenario.describe())
        written.append(out / f"{stem}.png")
    sys.stdout.write(emit.emit_summary_json(path))
    for w in written:
        print(f"wrote {w}", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args):
    cfg = _load(args.config)
    if cfg.sweep is None:
        raise _Fail(EXIT_CONFIG, f"{args.config}: sweep subcommand needs a 'sweep' block")
    result = sweep(cfg.scenario, cfg.sweep.parameter, cfg.sweep.values, cfg.grid, cfg.tol)
    out = _outdir(cfg, args.out)
    stem = Path(args.config).stem + "_sweep"
    if "csv" in cfg.formats:
        _write(out / f"{stem}.csv", emit.emit_sweep_csv(result))
    if "json" in cfg.formats:
        _write(out / f"{stem}.json", emit.emit_summary_json(result))
    paths = [r.path for r in result.rows if r.ok]
    if "svg" in cfg.formats and paths:
        _write(out / f"{stem}.svg", emit.render_svg(paths, title=f"Extraction rate Q(t), sweep over {result.parameter}"))
    if "png" in cfg.formats and paths:
        from .figures import plot_sweep

        plot_sweep(result, out / f"{stem}.png")
    sys.stdout.write(emit.emit_summary_json(result))
    for v in result.verdicts:
        print(v.line(), file=sys.stderr)
    if not paths:
        raise _Fail(EXIT_SOLVER, "every sweep row failed")
    return EXIT_OK


def cmd_compare(args):
    cfg_a, cfg_b = _load(args.config_a), _load(args.config_b)
    pa, pb = _solve(cfg_a), _solve(cfg_b)
    out = _outdir(cfg_a, args.out)
    stem = f"{Path(args.config_a).stem}_vs_{Path(args.config_b).stem}"
    _write(out / f"{stem}.svg", emit.render_svg([pa, pb]))
    if "png" in cfg_a.formats:
        from .figures import plot_paths

        plot_paths([pa, pb], out / f"{stem}.png")
    sa, sb = emit.summary_dict(pa), emit.summary_dict(pb)
    print(f"{'':16s}{Path(args.config_a).name:>24s}{Path(args.config_b).name:>24s}")
    for key in ("lambda", "exhaustion_time", "t50", "value", "stock"):
        cells = [v if isinstance(v, str) else emit.fmt(v) if v is not None else "-" for v in (sa[key], sb[key])]
        print(f"{key:16s}{cells[0]:>24s}{cells[1]:>24s}")
    return EXIT_OK


def cmd_oracle_check(args):
    cfg = _load(args.config)
    if args.bins < 2:
        raise _Fail(EXIT_CONFIG, f"--bins must be >= 2, got {args.bins}")
    # linear interpolation of the continuous path must not dominate the gap
    grid = GridSpec(
        points=max(cfg.grid.points, 2 * args.bins + 1),
        horizon=cfg.grid.horizon,
        t_max=cfg.grid.t_max,
        tail_mass_tol=cfg.grid.tail_mass_tol,
    )
    try:
        path = solve_path(cfg.scenario, grid, cfg.tol)
        horizon = args.horizon
        if horizon is None:
            horizon = 2 * path.exhaustion if math.isfinite(path.exhaustion) and path.exhaustion > 0 else path.horizon
        disc = solve_discrete(cfg.scenario, args.bins, horizon or 1.0)
        report = compare_paths(path, disc)
    except HotellingError as exc:
        raise _Fail(EXIT_SOLVER, str(exc)) from exc
    print(
        json.dumps(
            {
                "bins": args.bins,
                "horizon": horizon,
                "sup_deviation": report.sup_rate_deviation,
                "at_time": report.at_time,
                "objective_gap": report.objective_gap,
                "tolerance": ORACLE_TOL,
            },
            indent=2,
        )
    )
    if report.sup_rate_deviation > ORACLE_TOL:
        raise _Fail(EXIT_ORACLE, f"sup deviation {report.sup_rate_deviation:.3e} exceeds {ORACLE_TOL:g}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"ERROR {EXIT_CONFIG}: {message}\n")


def build_parser():
    parser = _Parser(prog="hotelling", description="Optimal depletion of an exhaustible stock.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one scenario and write the requested outputs")
    p.add_argument("config")
    p.add_argument("--out", help="output directory (overrides output.directory)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="comparative statics over the config's sweep block")
    p.add_argument("config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="solve two configs and plot them together")
    p.add_argument("config_a")
    p.add_argument("config_b")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("oracle-check", help="cross-check against the discrete transcription")
    p.add_argument("config")
    p.add_argument("--bins", type=int, default=2000)
    p.add_argument("--horizon", type=float, default=None, help="default: 2T, or the truncation horizon")
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code or EXIT_OK
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"ERROR {exc.code}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
