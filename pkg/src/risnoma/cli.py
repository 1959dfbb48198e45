"""Command line front end: parameter sweeps, single points and validation.

Usage::

    risnoma sweep run.cfg [--trials N] [--seed S] [--out coverage.csv] [--emit-plot]
    risnoma point run.cfg
    risnoma validate [--trials N] [--seed S]

Exit status is 0 on success, 1 for configuration errors, 2 when a numeric
engine failed and 3 when a validation check failed.
"""

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

from . import analytic
from .config import load_config, params_lines
from .errors import ConfigError, DomainError, NumericalError
from .mcsim import ScenarioMode, estimate_coverage, gains_key, simulate_gains

__all__ = [
    "CSV_COLUMNS", "EXIT_OK", "EXIT_CONFIG", "EXIT_NUMERIC", "EXIT_VALIDATION",
    "run_sweep", "write_csv", "emit_plot_script", "evaluate_point", "main",
]

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "sweep_value", "mode", "p_t_analytic", "p_c_analytic",
    "p_t_mc", "p_t_ci", "p_c_mc", "p_c_ci", "trials", "seed",
)
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2, 3
_ENGINE_FAILURES = (NumericalError, DomainError, ArithmeticError)


class SweepResult(list):
    """Rows of a sweep (dicts keyed by :data:`CSV_COLUMNS`) plus failure notes."""

    def __init__(self, rows=(), diagnostics=()):
        super().__init__(rows)
        self.diagnostics = list(diagnostics)


def _analytic_point(p, cfg):
    pair = analytic.coverage_pair(p, K=cfg.K, c_mode=cfg.c_mode)
    return pair.p_typical, pair.p_connected


def run_sweep(cfg, workers=None):
    """Evaluate every (sweep value, mode) pair with the requested engines.

    The analytic engine only covers ``ris_noma``; its columns stay empty for
    the baselines.  Monte Carlo gains are sampled once per distinct
    geometry/fading parameter set and reused across modes and across SNR or
    RIS-length sweeps.  Engine failures leave empty fields and are collected
    in ``result.diagnostics``.
    """
    points = [(value, cfg.sweep.apply(cfg.params, value)) for value in cfg.sweep.values]
    return _run_points(cfg, points, workers)


def _run_points(cfg, points, workers):
    sweep = cfg.sweep
    result = SweepResult()
    cache = {}
    for value, p in points:
        analytic_vals = None
        if "analytic" in sweep.engines and ScenarioMode.RIS_NOMA in sweep.modes:
            try:
                analytic_vals = _analytic_point(p, cfg)
            except _ENGINE_FAILURES as exc:
                result.diagnostics.append(f"{sweep.variable}={value!r} analytic: {type(exc).__name__}: {exc}")
        gains = None
        if "montecarlo" in sweep.engines:
            key = gains_key(p, cfg.r_max_factor)
            try:
                if key not in cache:
                    cache.clear()
                    cache[key] = simulate_gains(p, cfg.trials, cfg.seed, cfg.r_max_factor, workers)
                gains = cache[key]
            except _ENGINE_FAILURES as exc:
                result.diagnostics.append(f"{sweep.variable}={value!r} montecarlo: {type(exc).__name__}: {exc}")
        for mode in sweep.modes:
            row = dict.fromkeys(CSV_COLUMNS, None)
            row.update(sweep_value=value, mode=mode.value, trials=cfg.trials, seed=cfg.seed)
            if analytic_vals is not None and mode is ScenarioMode.RIS_NOMA:
                row["p_t_analytic"], row["p_c_analytic"] = analytic_vals
            if gains is not None:
                try:
                    t, c = estimate_coverage(
                        p, mode, cfg.trials, cfg.seed, cfg.expectation, cfg.r_max_factor, workers, gains=gains,
                    )
                    row.update(p_t_mc=t.probability, p_t_ci=t.ci_halfwidth, p_c_mc=c.probability, p_c_ci=c.ci_halfwidth)
                except _ENGINE_FAILURES as exc:
                    result.diagnostics.append(
                        f"{sweep.variable}={value!r} {mode.value} montecarlo: {type(exc).__name__}: {exc}"
                    )
            result.append(row)
    return result


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_text(rows, cfg):
    """CSV text: ``#`` comment lines with the run parameters, then header and rows."""
    buf = io.StringIO()
    buf.write(f"# sweep_variable = {cfg.sweep.variable}\n")
    for line in params_lines(cfg.params):
        buf.write(f"# {line}\n")
    buf.write(f"# c_mode = {cfg.c_mode}\n# expectation = {cfg.expectation}\n")
    buf.write(f"# K = {cfg.K}\n# r_max_factor = {cfg.r_max_factor!r}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def diagnostics_path(path):
    return Path(str(path) + ".diagnostics.txt")


def write_csv(rows, cfg, path=None):
    """Write the sweep CSV (and a diagnostics sidecar when engines failed)."""
    path = Path(path or cfg.output_path)
    path.write_text(csv_text(rows, cfg), encoding="utf-8")
    diag = getattr(rows, "diagnostics", ())
    side = diagnostics_path(path)
    if diag:
        side.write_text("\n".join(diag) + "\n", encoding="utf-8")
    elif side.exists():
        side.unlink()
    return path


_CURVES = (
    ("typical user", "p_t_analytic", "p_t_mc"),
    ("connected user", "p_c_analytic", "p_c_mc"),
)


def emit_plot_script(rows, path, csv_path, xlabel="sweep value"):
    """Write a gnuplot script drawing coverage against the sweep variable.

    One curve per (mode, engine) present in ``rows``; an engine whose column
    is empty for a mode is left out.  Typical and connected users go to two
    panels.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to plot")
    modes = list(dict.fromkeys(r["mode"] for r in rows))
    col = {c: i + 1 for i, c in enumerate(CSV_COLUMNS)}
    lines = [
        f"# coverage probability versus {xlabel}",
        f"datafile = '{csv_path}'",
        "set datafile separator ','",
        "set datafile commentschars '#'",
        "set key bottom right",
        f"set xlabel '{xlabel}'",
        "set ylabel 'coverage probability'",
        "set yrange [0:1]",
        "set multiplot layout 1,2",
    ]
    for title, a_col, mc_col in _CURVES:
        curves = []
        for mode in modes:
            for engine, column in (("analytic", a_col), ("montecarlo", mc_col)):
                if not any(r["mode"] == mode and r[column] is not None for r in rows):
                    continue
                style = "lines" if engine == "analytic" else "points"
                curves.append(
                    f"datafile every ::1 using 1:(strcol(2) eq '{mode}' && strcol({col[column]}) ne '' "
                    f"? ${col[column]} : 1/0) with {style} title '{mode} {engine}'"
                )
        lines.append(f"set title '{title}'")
        lines.append("plot " + ", \\\n     ".join(curves) if curves else "# no data for this panel")
    lines.append("unset multiplot")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return Path(path)


def evaluate_point(cfg, workers=None):
    """Both engines at ``cfg.params`` for every configured mode."""
    return _run_points(cfg, [(cfg.params.transmit_snr_db, cfg.params)], workers)


def _print_rows(rows, out):
    out.write(f"{'mode':<18}{'engine':<12}{'P_t':>14}{'ci':>12}{'P_c':>14}{'ci':>12}\n")
    for r in rows:
        if r["p_t_analytic"] is not None:
            out.write(f"{r['mode']:<18}{'analytic':<12}{r['p_t_analytic']:>14.6g}{'':>12}{r['p_c_analytic']:>14.6g}{'':>12}\n")
        if r["p_t_mc"] is not None:
            out.write(
                f"{r['mode']:<18}{'montecarlo':<12}{r['p_t_mc']:>14.6g}{r['p_t_ci']:>12.2g}"
                f"{r['p_c_mc']:>14.6g}{r['p_c_ci']:>12.2g}\n"
            )


def _parser():
    ap = argparse.ArgumentParser(prog="risnoma", description="Coverage of RIS-aided NOMA downlinks.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, needs_cfg in (("sweep", True), ("point", True), ("validate", False)):
        sp = sub.add_parser(name)
        if needs_cfg:
            sp.add_argument("config")
        sp.add_argument("--trials", type=int)
        sp.add_argument("--seed", type=int)
        if name == "sweep":
            sp.add_argument("--out")
            sp.add_argument("--emit-plot", action="store_true")
    return ap


def _overrides(cfg, args):
    changes = {}
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.seed is not None:
        changes["seed"] = args.seed
    if getattr(args, "out", None):
        changes["output_path"] = args.out
    if getattr(args, "emit_plot", False):
        changes["emit_plot_script"] = True
    return cfg.replace(**changes) if changes else cfg


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "validate":
            from .validation import run_validation

            kw = {k: v for k, v in (("trials", args.trials), ("seed", args.seed)) if v is not None}
            report = run_validation(**kw)
            print(report.format())
            return EXIT_OK if report.ok else EXIT_VALIDATION
        cfg = _overrides(load_config(args.config), args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "point":
        rows = evaluate_point(cfg)
        _print_rows(rows, sys.stdout)
    else:
        rows = run_sweep(cfg)
        out = write_csv(rows, cfg)
        print(f"wrote {out} ({len(rows)} rows)")
        if cfg.emit_plot_script:
            script = emit_plot_script(rows, out.with_suffix(".gp"), out.name, xlabel=cfg.sweep.variable)
            print(f"wrote {script}")
    for line in rows.diagnostics:
        print(f"engine failure: {line}", file=sys.stderr)
    return EXIT_NUMERIC if rows.diagnostics else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
