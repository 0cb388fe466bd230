"""Command-line front end: coverage curves, rate sweeps, validation.

Inputs and outputs speak dB at the boundary (grids, thresholds, powers);
everything internal is linear SI.  CSV files carry the curves; a JSON
sidecar records provenance (config fingerprint, seed, drop count,
package version).  Exit codes: 0 success, 1 validation/numerical failure,
2 usage or config error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import sys

import numpy as np

from . import __version__, analytic, metrics, sim_engine
from .config import ConfigError, linear_to_db, load_scenario, scenario_fingerprint

USAGE_ERROR = 2
CHECK_FAILED = 1


def _read_config(path, overrides):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"cannot read config file {path}: {exc.strerror}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR) from exc
    try:
        return load_scenario(text, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR) from exc


def _parse_overrides(pairs):
    out = {}
    for pair in pairs or ():
        if "=" not in pair:
            print(f"--set expects KEY=VALUE, got {pair!r}", file=sys.stderr)
            raise SystemExit(USAGE_ERROR)
        key, value = pair.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _parse_t_grid(spec):
    """'start:step:stop' in dB, inclusive, strictly ascending."""
    try:
        start, step, stop = (float(x) for x in spec.split(":"))
    except ValueError:
        print(f"bad t-grid {spec!r}; expected START:STEP:STOP in dB",
              file=sys.stderr)
        raise SystemExit(USAGE_ERROR) from None
    if step <= 0 or stop <= start:
        print(f"t-grid {spec!r} must be ascending (positive step)",
              file=sys.stderr)
        raise SystemExit(USAGE_ERROR)
    n = int(round((stop - start) / step)) + 1
    return start + step * np.arange(n)


def _parse_values(spec):
    """Comma list of numbers; 'lo..hi' expands to 7 log-spaced points."""
    values = []
    for tok in spec.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if ".." in tok:
            lo, hi = (float(x) for x in tok.split("..", 1))
            if lo <= 0 or hi <= lo:
                print(f"bad range {tok!r}", file=sys.stderr)
                raise SystemExit(USAGE_ERROR)
            values.extend(np.geomspace(lo, hi, 7).tolist())
        else:
            try:
                values.append(float(tok))
            except ValueError:
                print(f"bad sweep value {tok!r}", file=sys.stderr)
                raise SystemExit(USAGE_ERROR) from None
    if not values:
        print("empty sweep value list", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)
    return values


def _open_out(path):
    return sys.stdout if path in (None, "-") else open(path, "w", encoding="utf-8")


def _write_header(fh, args):
    if not args.no_timestamp:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
        fh.write(f"# generated {stamp}\n")


def _fmt(x):
    if x is None:
        return ""
    return f"{x:.9g}"


# --- coverage ----------------------------------------------------------------

def cmd_coverage(args):
    cfg = _read_config(args.config, _parse_overrides(args.set))
    t_db = _parse_t_grid(args.t_grid_db)
    t_lin = 10.0 ** (t_db / 10.0)

    mode = args.mode.strip()
    if mode not in sim_engine.MODE_NAMES:
        print(f"unknown mode {mode!r}; valid: {', '.join(sim_engine.MODE_NAMES)}",
              file=sys.stderr)
        return USAGE_ERROR

    sinr, stats = sim_engine.simulate_sinr(cfg, [mode], args.drops, args.seed,
                                           workers=args.workers)
    n_grid = len(t_db)
    curves = {
        "p_c_sim": np.array([(sinr[mode] > t).mean() for t in t_lin]),
        "p_c_thm1_ub": [None] * n_grid,
        "p_c_thm2_lb": [None] * n_grid,
        "p_c_near_orth": [None] * n_grid,
    }
    if args.bounds:
        try:
            curves["p_c_thm1_ub"] = analytic.theorem1_curve(t_lin, cfg)
            curves["p_c_thm2_lb"] = analytic.theorem2_curve(t_lin, cfg)
            curves["p_c_near_orth"] = analytic.near_orth_curve(t_lin, cfg)
        except analytic.QuadratureError as exc:
            print(f"bound evaluation failed: {exc}", file=sys.stderr)
            return CHECK_FAILED

    fh = _open_out(args.out)
    try:
        _write_header(fh, args)
        cols = ["t_db"] + list(curves)
        fh.write(",".join(cols) + "\n")
        for i, t in enumerate(t_db):
            row = [_fmt(t)] + [_fmt(curves[c][i]) for c in curves]
            fh.write(",".join(row) + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()

    if args.sidecar:
        _write_sidecar(args.sidecar, cfg, args, {"alignment": stats[mode]})
    return 0


def _write_sidecar(path, cfg, args, extra):
    record = {
        "schema_version": 1,
        "tool_version": __version__,
        "scenario_fingerprint": scenario_fingerprint(cfg),
        "seed": args.seed,
        "drops": getattr(args, "drops", None),
        **extra,
    }
    if not args.no_timestamp:
        record["generated"] = datetime.datetime.now(
            datetime.timezone.utc).isoformat()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --- sweep -------------------------------------------------------------------

def cmd_sweep(args):
    cfg = _read_config(args.config, _parse_overrides(args.set))
    if args.param not in sim_engine.SWEEP_PARAMS:
        print(f"unknown sweep parameter {args.param!r}; valid: "
              f"{', '.join(sim_engine.SWEEP_PARAMS)}", file=sys.stderr)
        return USAGE_ERROR
    values = _parse_values(args.values)
    modes = tuple(m.strip() for m in args.modes.split(",") if m.strip())
    for mode in modes:
        if mode not in sim_engine.MODE_NAMES:
            print(f"unknown mode {mode!r}; valid: {', '.join(sim_engine.MODE_NAMES)}",
                  file=sys.stderr)
            return USAGE_ERROR

    exp = sim_engine.Experiment(base=cfg, modes=modes, sweep_param=args.param,
                                sweep_values=tuple(values), n_drops=args.drops,
                                seed=args.seed, workers=args.workers)
    rows = sim_engine.run_experiment(exp)

    best = {}
    if args.optimize_pilots:
        grid = tuple(float(d) for d in args.pilot_grid.split(","))
        for value, pick, rate in sim_engine.optimize_pilot_reuse(exp, grid):
            best[value] = (pick, rate)

    fh = _open_out(args.out)
    try:
        _write_header(fh, args)
        cols = ["param", "value", "mode", "eta", "r_eff", "p_obp", "p_sbp",
                "p_miss", "best_delta", "best_delta_r_eff", "error"]
        fh.write(",".join(cols) + "\n")
        for row in rows:
            opt = best.get(row.sweep_value, (None, None))
            fh.write(",".join([
                args.param, _fmt(row.sweep_value), row.mode, _fmt(row.eta),
                _fmt(row.rate), _fmt(row.p_obp), _fmt(row.p_sbp),
                _fmt(row.p_miss), _fmt(opt[0]), _fmt(opt[1]), row.error,
            ]) + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()

    if args.sidecar:
        _write_sidecar(args.sidecar, cfg, args, {
            "param": args.param,
            "values": values,
            "modes": list(modes),
            "runtime_s": [row.runtime for row in rows],
        })
    return 1 if any(row.error for row in rows) else 0


# --- validate ----------------------------------------------------------------

def _check(name, ok, detail, results):
    results.append((name, bool(ok), detail))


def cmd_validate(args):
    cfg = _read_config(args.config, _parse_overrides(args.set))
    results = []
    quick = args.quick
    drops = 1_000 if quick else 20_000

    # analytic normalizations
    a_l, a_n = analytic.association_probs(cfg)
    _check("A_L + A_N = 1", abs(a_l + a_n - 1) < 1e-6,
           f"A_L={a_l:.6f} A_N={a_n:.6f}", results)
    from scipy.integrate import quad as _quad
    for kind in ("L", "N"):
        mass, _ = _quad(lambda x: analytic.serving_distance_pdf(x, kind, cfg),
                        0, 40 * cfg.cell_radius,
                        points=[cfg.cell_radius * f for f in (0.5, 1, 2, 4, 8)],
                        limit=200)
        _check(f"serving-distance pdf ({kind}) normalized",
               abs(mass - 1) < 1e-6, f"mass={mass:.8f}", results)

    # association frequencies vs Monte Carlo
    sinr, stats = sim_engine.simulate_sinr(cfg, ["perfect", "full-reuse"],
                                           drops, args.seed,
                                           workers=args.workers)
    tol = 4.0 / math.sqrt(drops) + 0.01
    from . import geometry
    rng = np.random.default_rng(args.seed + 1)
    mc_al = np.mean([
        bool(r.is_los[r.serving_index])
        for r in (geometry.sample_realization(cfg, rng) for _ in range(drops))])
    _check("A_L matches Monte Carlo", abs(mc_al - a_l) < tol,
           f"analytic={a_l:.4f} mc={mc_al:.4f}", results)

    # coverage monotonicity (common random numbers -> exact)
    t_grid = 10.0 ** (np.linspace(-10, 30, 21) / 10.0)
    cov = np.array([(sinr["full-reuse"] > t).mean() for t in t_grid])
    _check("SIM coverage non-increasing", bool(np.all(np.diff(cov) <= 0)),
           "common drops across thresholds", results)
    pcov = np.array([(sinr["perfect"] > t).mean() for t in t_grid])
    _check("perfect alignment dominates", bool(np.all(pcov >= cov)),
           "pointwise, same drops", results)

    # window edge effect: doubling the window moves coverage < 0.005
    shift = sim_engine.window_sensitivity(cfg, drops, args.seed + 2,
                                          workers=args.workers)
    _check("window-doubling shift < 0.005", shift < 0.005,
           f"max coverage shift {shift:.4f}", results)

    if not quick:
        # bound sandwich at three thresholds
        for t_db in (0.0, 10.0, 20.0):
            t = 10.0 ** (t_db / 10.0)
            ub = analytic.theorem1_upper(t, cfg)
            lb = analytic.theorem2_lower(t, cfg)
            s = float((sinr["full-reuse"] > t).mean())
            ok = (lb - 0.03 <= s <= ub + 0.03) and (ub - lb <= 0.10)
            _check(f"bound sandwich at {t_db:g} dB", ok,
                   f"LB={lb:.4f} SIM={s:.4f} UB={ub:.4f}", results)
        # rate estimator identity
        t_rate = 10.0 ** (np.linspace(-20, 90, 200) / 10.0)
        curve = metrics.coverage_from_samples(sinr["full-reuse"], t_rate)
        eta = sim_engine.mode_efficiency(cfg, ("reuse", 1.0))
        r_int = metrics.effective_rate_from_coverage(curve, eta,
                                                     cfg.sinr_threshold_min)
        r_emp = metrics.effective_rate_empirical(sinr["full-reuse"], eta,
                                                 cfg.sinr_threshold_min)
        ok = abs(r_int - r_emp) <= 0.02 * max(r_emp, 1e-12)
        _check("rate estimator identity (2%)", ok,
               f"integral={r_int:.4f} empirical={r_emp:.4f}", results)

    width = max(len(name) for name, _, _ in results)
    failures = 0
    for name, ok, detail in results:
        mark = "PASS" if ok else "FAIL"
        failures += not ok
        print(f"{mark}  {name:<{width}}  {detail}")
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return CHECK_FAILED if failures else 0


# --- entry point -------------------------------------------------------------

def _add_common(p):
    p.add_argument("config", help="scenario config file (key = value)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override any config field (repeatable)")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default: env MMWBEAMS_WORKERS or 1)")
    p.add_argument("--no-timestamp", action="store_true",
                   help="suppress the timestamp header for byte-stable output")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mmwbeams",
        description="mmWave downlink coverage/rate with beam-association overhead")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coverage", help="coverage curves (simulation and bounds)")
    _add_common(p)
    p.add_argument("--mode", default="full-reuse",
                   help=f"association mode, one of: {', '.join(sim_engine.MODE_NAMES)}")
    p.add_argument("--t-grid-db", default="-10:2:30", metavar="START:STEP:STOP")
    p.add_argument("--drops", type=int, default=10_000)
    p.add_argument("--bounds", action="store_true",
                   help="also evaluate Theorem-1/2 bounds and the "
                        "near-orthogonal expression")
    p.add_argument("--out", default="-", help="CSV path (default stdout)")
    p.add_argument("--sidecar", help="JSON provenance sidecar path")
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("sweep", help="effective-rate parameter sweep")
    _add_common(p)
    p.add_argument("--param", required=True,
                   help=f"one of: {', '.join(sim_engine.SWEEP_PARAMS)}")
    p.add_argument("--values", required=True,
                   help="comma list; 'lo..hi' expands to 7 log-spaced points")
    p.add_argument("--modes", default="perfect,near-orth,full-reuse")
    p.add_argument("--drops", type=int, default=10_000)
    p.add_argument("--optimize-pilots", action="store_true",
                   help="also report the best reuse factor per sweep point")
    p.add_argument("--pilot-grid", default="0.1,0.25,0.5,1.0")
    p.add_argument("--out", default="-", help="CSV path (default stdout)")
    p.add_argument("--sidecar", help="JSON provenance sidecar path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="cross-module oracle checks")
    _add_common(p)
    p.add_argument("--quick", action="store_true",
                   help="1k-drop smoke run (skips the slow identities)")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
