"""Command-line front-end.

Every subcommand resolves one RunConfig (config file < flags), runs the
corresponding analysis, and writes deterministic CSV or JSON: numeric
fields are decimal strings, outputs carry the fully resolved config (JSON
inline under "config", CSV in a sidecar ``<out>.meta.json``), and nothing
time- or host-dependent is ever emitted, so re-running a command
reproduces its files byte for byte.

Exit codes: 0 success; 1 error; 2 a --gate check failed; 64 usage.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .errors import AsymrenError
from .numeric import BigReal, required_precision
from .maps import AsymmetricMap
from .ladder import (build_ladder, fit_return_model, rescaled_renorm,
                     renorm_limit_errors, odd_left_limit)
from .cascade import Family, run_superstable_chain, sweep_at_parameters
from .scaling import analyze, check_scaling_laws, compare_invariants
from .semiext import (semi_extension, tau_sequence, entry_range_collapse,
                      special_point_checks, entry_space_ratio,
                      doublelog_expansion)
from .cantor import build_cover, hausdorff_sums, COVER_CAP

__all__ = ["main"]

USAGE_EXIT = 64
GATE_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _dec(x, digits):
    if x is None:
        return ""
    if isinstance(x, BigReal):
        return x.to_decimal(digits)
    if isinstance(x, bool):
        return x
    if isinstance(x, float):
        return repr(x)
    return x


# ---------------------------------------------------------------------------
# config resolution


CONFIG_FIELDS = ("beta", "t", "scale_left", "scale_right", "precision_bits",
                 "max_level", "rel_tol", "grid_size", "digits")

DEFAULTS = {
    "beta": "2",
    "t": "auto:8",
    "scale_left": "1",
    "scale_right": "1",
    "precision_bits": "auto",
    "max_level": 8,
    "rel_tol": None,
    "grid_size": 65,
    "digits": 40,
}


def _load_config(path):
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    unknown = set(data) - set(CONFIG_FIELDS)
    if unknown:
        raise AsymrenError(f"unknown config keys: {sorted(unknown)}")
    return data


def resolve_config(args):
    """Merge defaults, config file, and flags (highest priority last)."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(_load_config(args.config))
    for field in CONFIG_FIELDS:
        v = getattr(args, field, None)
        if v is not None:
            cfg[field] = v
    if cfg["precision_bits"] == "auto":
        cfg["precision_bits"] = required_precision(int(cfg["max_level"]), 2.0)
    cfg["precision_bits"] = int(cfg["precision_bits"])
    cfg["max_level"] = int(cfg["max_level"])
    cfg["grid_size"] = int(cfg["grid_size"])
    cfg["digits"] = int(cfg["digits"])
    return cfg


def _resolve_map(cfg):
    """Resolve the t field (decimal or "auto:N") to a concrete map.

    Returns (map, trusted_level, source_tag).  The auto anchor is the
    superstable parameter of index N (taken at the next odd index when N
    is even, since even-index superstable parameters do not exist in this
    family); trusted depth keeps a two-level margin below the anchor.
    """
    bits = cfg["precision_bits"]
    fam = Family(cfg["beta"], cfg["scale_left"], cfg["scale_right"], bits)
    t = str(cfg["t"])
    if t.startswith("auto:"):
        n = int(t.split(":", 1)[1])
        if n % 2 == 0 and n >= 2:
            n += 1
        chain = run_superstable_chain(fam, n, cfg["rel_tol"])
        rec = chain[-1]
        m = fam.map_at(rec.t)
        return m, max(0, rec.n - 2), f"superstable:{rec.n}"
    m = fam.map_at(BigReal.parse(t, bits))
    return m, cfg["max_level"], "explicit"


def _echo_config(cfg, extra=None):
    out = {k: (str(v) if k in ("beta", "t", "scale_left", "scale_right",
                               "rel_tol") and v is not None else v)
           for k, v in cfg.items()}
    if extra:
        out.update(extra)
    return out


# ---------------------------------------------------------------------------
# output helpers


def _write_json(path, payload):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(path, header, rows, meta):
    def emit(fh):
        w = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)

    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
        with open(path + ".meta.json", "w", encoding="utf-8") as fh:
            fh.write(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    else:
        emit(sys.stdout)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_cascade(args):
    cfg = resolve_config(args)
    d = cfg["digits"]
    fam = Family(cfg["beta"], cfg["scale_left"], cfg["scale_right"],
                 cfg["precision_bits"])
    chain = run_superstable_chain(fam, cfg["max_level"], cfg["rel_tol"])
    meta = {"config": _echo_config(cfg)}
    if args.format == "json":
        payload = dict(meta)
        payload["records"] = [
            {"n": r.n, "kind": r.kind, "t": _dec(r.t, d),
             "residual": _dec(r.residual, d),
             "bracket_width": _dec(r.bracket_width, d),
             "condition": r.condition}
            for r in chain]
        _write_json(args.out, payload)
    else:
        rows = [(r.n, r.kind, _dec(r.t, d), _dec(r.residual, d),
                 _dec(r.bracket_width, d), r.condition) for r in chain]
        _write_csv(args.out, ["n", "kind", "t", "residual", "bracket_width",
                              "condition"], rows, meta)
    return 0


def _cmd_ladder(args):
    cfg = resolve_config(args)
    d = cfg["digits"]
    m, trusted, source = _resolve_map(cfg)
    lad = build_ladder(m, cfg["max_level"], trusted=min(trusted,
                                                        cfg["max_level"]),
                       parameter_source=source)
    meta = {"config": _echo_config(cfg, {"parameter_source": source,
                                         "t_resolved": _dec(m.t, d),
                                         "trusted_level":
                                             lad.max_trusted_level})}
    rows = [(rec.k, _dec(rec.a, d), _dec(rec.b, d), _dec(rec.c_pow, d),
             _dec(rec.fixed_residual, d)) for rec in lad.levels]
    if args.format == "json":
        payload = dict(meta)
        payload["levels"] = [dict(zip(("k", "a_k", "b_k", "c_2k",
                                       "fixed_residual"), r)) for r in rows]
        _write_json(args.out, payload)
    else:
        _write_csv(args.out, ["k", "a_k", "b_k", "c_2k", "fixed_residual"],
                   rows, meta)
    return 0


def _pairs(d, items):
    return [[k, _dec(v, d)] for k, v in items]


def _cmd_scaling(args):
    cfg = resolve_config(args)
    d = cfg["digits"]
    m, trusted, source = _resolve_map(cfg)
    lad = build_ladder(m, cfg["max_level"],
                       trusted=min(trusted, cfg["max_level"]),
                       parameter_source=source)
    report = analyze(lad)
    table = check_scaling_laws(report, True if args.gate else None)
    meta = {"config": _echo_config(cfg, {"parameter_source": source,
                                         "t_resolved": _dec(m.t, d),
                                         "trusted_level":
                                             lad.max_trusted_level})}
    if args.format == "json":
        payload = dict(meta)
        payload["report"] = {
            "lambda_root": _dec(report.lambda_root, d),
            "lambda_est_by_k": _pairs(d, report.lambda_est_by_k),
            "Theta_est_by_k": _pairs(d, report.Theta_est_by_k),
            "D_est_by_k": _pairs(d, report.D_est_by_k),
            "D_pred": _dec(report.D_pred, d),
            "coef51_by_k": _pairs(d, report.coef51_by_k),
            "coef54_by_k": _pairs(d, report.coef54_by_k),
            "c_ratio_by_k": _pairs(d, report.c_ratio_by_k),
            "odd_step_b_by_k": _pairs(d, report.odd_step_b_by_k),
            "mu_by_k": _pairs(d, report.mu_by_k),
        }
        payload["checks"] = [
            {"quantity": row["quantity"], "k": row["k"],
             "value": _dec(row["value"], d),
             "predicted": _dec(row["predicted"], d),
             "rel_dev": _dec(row["rel_dev"], d),
             "trend_nonincreasing": row["trend_nonincreasing"],
             **({"passed": row["passed"]} if "passed" in row else {})}
            for row in table]
        _write_json(args.out, payload)
    else:
        rows = []
        for name, series in (("lambda_est", report.lambda_est_by_k),
                             ("Theta_est", report.Theta_est_by_k),
                             ("D_est", report.D_est_by_k),
                             ("two_step_coef", report.coef51_by_k),
                             ("odd_step_c_coef", report.coef54_by_k),
                             ("c_ratio", report.c_ratio_by_k),
                             ("odd_step_b_coef", report.odd_step_b_by_k),
                             ("mu", report.mu_by_k)):
            pred = {
                "lambda_est": report.lambda_root,
                "D_est": report.D_pred,
            }.get(name)
            for k, v in series:
                rel = "" if pred is None else \
                    _dec(abs(v - pred) / abs(pred), d)
                rows.append((k, name, _dec(v, d),
                             _dec(pred, d) if pred is not None else "", rel))
        rows.sort(key=lambda r: (r[0], r[1]))
        _write_csv(args.out, ["k", "quantity", "value", "predicted",
                              "rel_dev"], rows, meta)
    if args.gate and not all(row.get("passed", True) for row in table):
        return GATE_EXIT
    return 0


def _limit_curve(x, chat, beta, lam, even, bits):
    """Parity limit of the rescaled return map at a point of [0, 1]."""
    from mpmath import mp
    with mp.workprec(bits):
        if x >= chat.v:
            u = (x - chat.v) / (1 - chat.v) if chat.v < 1 else 0
            if u < 0:
                u = 0
            p = u ** 2 if float(beta.v) == 2 else \
                (mp.exp(beta.v * mp.ln(u)) if u > 0 else 0)
            if even:
                return BigReal(chat.v + (1 - chat.v) * (1 - p), bits)
            return BigReal(chat.v + (1 - chat.v) * p, bits)
        s = x / chat.v - 1 if chat.v > 0 else -1
        if even:
            return BigReal(s + 1, bits)
        return odd_left_limit(BigReal(s, bits), beta, lam)


def _cmd_renorm_limit(args):
    cfg = resolve_config(args)
    d = cfg["digits"]
    m, trusted, source = _resolve_map(cfg)
    K = min(cfg["max_level"], trusted)
    lad = build_ladder(m, K, trusted=K, parameter_source=source)
    meta = {"config": _echo_config(cfg, {"parameter_source": source,
                                         "t_resolved": _dec(m.t, d),
                                         "trusted_level":
                                             lad.max_trusted_level})}
    ks = list(range(2, K + 1))
    from .scaling import lambda_root as _lr
    lam = _lr(m.beta, m.precision_bits)
    if args.format == "json":
        payload = dict(meta)
        reports = []
        for k in ks:
            err = renorm_limit_errors(lad, k, cfg["grid_size"])
            fit = fit_return_model(lad, k)
            reports.append({
                "k": k, "parity": err["parity"],
                "c_hat": _dec(err["c_hat"], d),
                "right_err": _dec(err["right_err"], d),
                "right_deriv_err": _dec(err["right_deriv_err"], d),
                "left_err_even": _dec(err["left_err_even"], d),
                "left_err_odd": _dec(err["left_err_odd"], d),
                "left_deriv_err": _dec(err["left_deriv_err"], d),
                "left_slope": _dec(fit.left_slope, d),
                "right_coef": _dec(fit.right_coef, d),
                "left_residual": _dec(fit.left_residual, d),
                "right_residual": _dec(fit.right_residual, d),
            })
        payload["reports"] = reports
        _write_json(args.out, payload)
    else:
        rows = []
        for k in ks:
            samples, chat = rescaled_renorm(lad, k, cfg["grid_size"])
            even = (k % 2 == 0)
            for u, y in samples:
                lim = _limit_curve(u.v, chat, m.beta, lam, even,
                                  m.precision_bits)
                rows.append((k, _dec(u, d), _dec(y, d), _dec(lim, d)))
        _write_csv(args.out, ["k", "x", "value", "limit"], rows, meta)
    return 0


def _cmd_semiext(args):
    cfg = resolve_config(args)
    d = cfg["digits"]
    m, trusted, source = _resolve_map(cfg)
    K = min(cfg["max_level"], trusted)
    lad = build_ladder(m, K, trusted=K, parameter_source=source)
    meta = {"config": _echo_config(cfg, {"parameter_source": source,
                                         "t_resolved": _dec(m.t, d),
                                         "trusted_level":
                                             lad.max_trusted_level})}
    recs = [semi_extension(lad, k) for k in range(1, K + 1)]
    rows = [(r.k, _dec(r.A, d), _dec(r.B, d), _dec(r.hatA, d),
             _dec(r.hatB, d), _dec(r.tau, d), _dec(r.d, d), _dec(r.e, d),
             _dec(r.a_prime, d), _dec(r.b_prime, d)) for r in recs]
    if args.format == "json":
        payload = dict(meta)
        payload["records"] = [dict(zip(
            ("k", "A_k", "B_k", "hatA_k", "hatB_k", "tau_k", "d_k", "e_k",
             "a_prime", "b_prime"), r)) for r in rows]
        payload["tau_table"] = [
            {"k": r["k"], "tau": _dec(r["tau"], d),
             "log_exponent": _dec(r["log_exponent"], d)}
            for r in tau_sequence(lad, K)]
        payload["entry_range_collapse"] = [
            {"k": r["k"], "ratio": _dec(r["ratio"], d),
             "exponent": _dec(r["exponent"], d),
             "right_ratio": _dec(r["right_ratio"], d)}
            for r in entry_range_collapse(lad, K)]
        payload["special_points"] = [
            {k: _dec(v, d) for k, v in row.items()}
            for row in special_point_checks(lad, K)]
        entries = []
        for i in range(1, K // 2 + 1):
            er = entry_space_ratio(lad, i)
            entries.append({"i": er.i,
                            "left_space_ratio": _dec(er.left_space_ratio, d),
                            "collapsed": er.collapsed,
                            "c_coef": _dec(er.c_coef, d),
                            "b_coef": _dec(er.b_coef, d)})
        payload["entry_space"] = entries
        dl = []
        for i in range(2, K // 2 + 1):
            try:
                mf = doublelog_expansion(lad, i, 0.1, 33)
                dl.append({"i": i, "min_factor": _dec(mf, d)})
            except AsymrenError:
                continue
        payload["doublelog"] = dl
        _write_json(args.out, payload)
    else:
        _write_csv(args.out, ["k", "A_k", "B_k", "hatA_k", "hatB_k", "tau_k",
                              "d_k", "e_k", "a_prime", "b_prime"], rows, meta)
    return 0


def _cmd_hausdorff(args):
    cfg = resolve_config(args)
    d = cfg["digits"]
    m, trusted, source = _resolve_map(cfg)
    K = min(cfg["max_level"], trusted, COVER_CAP)
    K -= K % 2
    lad = build_ladder(m, K, trusted=K, parameter_source=source)
    gammas = [g.strip() for g in args.gamma.split(",") if g.strip()]
    covers = [build_cover(lad, k) for k in range(0, K + 1, 2)]
    table = hausdorff_sums(covers, gammas)
    meta = {"config": _echo_config(cfg, {"parameter_source": source,
                                         "t_resolved": _dec(m.t, d),
                                         "gamma": gammas,
                                         "trusted_level":
                                             lad.max_trusted_level})}
    if args.format == "json":
        payload = dict(meta)
        payload["sums"] = [{"k": k, "gamma": g, "sum": _dec(s, d)}
                           for k, g, s in table["rows"]]
        payload["k0_by_gamma"] = {str(g): k0 for g, k0
                                  in table["k0_by_gamma"].items()}
        _write_json(args.out, payload)
    else:
        rows = []
        for c in covers:
            for i, (lo, hi) in enumerate(c.intervals):
                rows.append((c.k, i, _dec(lo, d), _dec(hi, d)))
        _write_csv(args.out, ["k", "i", "left", "right"], rows, meta)
    return 0


def _sweep_chunk(packed):
    fam_args, ts, transient, samples, tol = packed
    fam = Family(*fam_args)
    return sweep_at_parameters(fam, ts, transient, samples, tol)


def _cmd_bifurcation(args):
    cfg = resolve_config(args)
    try:
        lo_s, hi_s = args.t_range.split(":")
        t_lo, t_hi = float(lo_s), float(hi_s)
    except ValueError:
        raise AsymrenError(f"bad --t-range {args.t_range!r}; expected lo:hi")
    fam_args = (cfg["beta"], cfg["scale_left"], cfg["scale_right"], 64)
    fam = Family(*fam_args)
    grid = np.linspace(t_lo, t_hi, args.points)
    jobs = max(1, args.jobs)
    if jobs == 1:
        results = sweep_at_parameters(fam, grid, args.transient,
                                      args.samples, args.tol)
    else:
        chunks = np.array_split(grid, jobs)
        packs = [(fam_args, c, args.transient, args.samples, args.tol)
                 for c in chunks if c.size]
        results = []
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            for part in ex.map(_sweep_chunk, packs):
                results.extend(part)
    meta = {"config": _echo_config(cfg, {
        "t_range": [repr(t_lo), repr(t_hi)], "points": args.points,
        "transient": args.transient, "samples": args.samples,
        "tol": repr(args.tol)})}
    rows = []
    for s in results:
        for p in s.points:
            rows.append((repr(s.t), repr(p)))
    if args.format == "json":
        payload = dict(meta)
        payload["sweep"] = [{"t": repr(s.t), "period": s.period,
                             "points": [repr(p) for p in s.points]}
                            for s in results]
        _write_json(args.out, payload)
    else:
        _write_csv(args.out, ["t", "point"], rows, meta)
    return 0


def _cmd_invariants(args):
    cfg = resolve_config(args)
    d = cfg["digits"]
    cfg_b = dict(cfg)
    for field, flag in (("beta", "beta_b"), ("t", "t_b"),
                        ("scale_left", "scale_left_b"),
                        ("scale_right", "scale_right_b")):
        v = getattr(args, flag, None)
        if v is not None:
            cfg_b[field] = v

    def one(c):
        m, trusted, source = _resolve_map(c)
        K = min(c["max_level"], trusted)
        lad = build_ladder(m, K, trusted=K, parameter_source=source)
        return analyze(lad), source, m

    rep_a, src_a, m_a = one(cfg)
    rep_b, src_b, m_b = one(cfg_b)
    cmpres = compare_invariants(rep_a, rep_b)
    payload = {
        "config": _echo_config(cfg, {"parameter_source": src_a,
                                     "t_resolved": _dec(m_a.t, d)}),
        "config_b": _echo_config(cfg_b, {"parameter_source": src_b,
                                         "t_resolved": _dec(m_b.t, d)}),
        "beta_match": cmpres.beta_match,
        "Theta_a": _dec(cmpres.Theta_a, d),
        "Theta_b": _dec(cmpres.Theta_b, d),
        "rho": _dec(cmpres.rho, d),
        "lipschitz_verdict": cmpres.lipschitz_verdict,
    }
    _write_json(args.out, payload)
    if args.gate and cmpres.lipschitz_verdict != "compatible":
        return GATE_EXIT
    return 0


# ---------------------------------------------------------------------------
# argument wiring


def _add_common(p, fmt_default="csv"):
    p.add_argument("--config", help="JSON config file (flags override it)")
    p.add_argument("--beta")
    p.add_argument("--t", help='parameter value, or "auto:N" for the '
                               "index-N superstable anchor")
    p.add_argument("--scale-left", dest="scale_left")
    p.add_argument("--scale-right", dest="scale_right")
    p.add_argument("--precision-bits", dest="precision_bits",
                   help='working precision in bits, or "auto"')
    p.add_argument("--max-level", dest="max_level", type=int)
    p.add_argument("--rel-tol", dest="rel_tol")
    p.add_argument("--grid-size", dest="grid_size", type=int)
    p.add_argument("--digits", type=int,
                   help="significant decimal digits in output (default 40)")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=fmt_default)
    p.add_argument("--gate", action="store_true",
                   help="turn report checks into a pass/fail exit status")
    p.add_argument("--jobs", type=int, default=1)


def build_parser():
    ap = _Parser(prog="asymren",
                 description="numerical laboratory for the period-doubling "
                             "cascade of strongly asymmetric unimodal maps")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cascade", help="superstable parameter chain")
    _add_common(p)
    p.set_defaults(func=_cmd_cascade)

    p = sub.add_parser("ladder", help="renormalization interval ladder")
    _add_common(p)
    p.set_defaults(func=_cmd_ladder)

    p = sub.add_parser("scaling", help="scaling invariants and law checks")
    _add_common(p, fmt_default="json")
    p.set_defaults(func=_cmd_scaling)

    p = sub.add_parser("renorm-limit",
                       help="rescaled return maps against their limits")
    _add_common(p, fmt_default="json")
    p.set_defaults(func=_cmd_renorm_limit)

    p = sub.add_parser("semiext",
                       help="semi-extensions, Koebe ratios, special points")
    _add_common(p, fmt_default="csv")
    p.set_defaults(func=_cmd_semiext)

    p = sub.add_parser("hausdorff", help="Cantor-set covers and their sums")
    _add_common(p, fmt_default="json")
    p.add_argument("--gamma", default="1,0.5,0.1",
                   help="comma-separated exponents for the cover sums")
    p.set_defaults(func=_cmd_hausdorff)

    p = sub.add_parser("bifurcation", help="double-precision attractor sweep")
    _add_common(p)
    p.add_argument("--t-range", dest="t_range", default="1.3:2.0")
    p.add_argument("--points", type=int, default=2000)
    p.add_argument("--transient", type=int, default=1 << 17)
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_bifurcation)

    p = sub.add_parser("invariants", help="compare two maps' invariants")
    _add_common(p, fmt_default="json")
    p.add_argument("--beta-b", dest="beta_b")
    p.add_argument("--t-b", dest="t_b")
    p.add_argument("--scale-left-b", dest="scale_left_b")
    p.add_argument("--scale-right-b", dest="scale_right_b")
    p.set_defaults(func=_cmd_invariants)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except AsymrenError as exc:
        print(f"asymren: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
