"""Command-line front end.

Every subcommand writes JSON (single values) or CSV (sweeps) to --out and
prints a short summary.  Exit codes: 0 success, 1 usage error, 2 domain
error (pole, divergence, out-of-range parameter).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import platform
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .core import BOX, SHO, SumRuleError
from .fracgreen import composition_residuals
from .helmholtz import (DensityProfile, helmholtz_Z1, length_map, schrodinger_Z1_const_potential,
                        transform)
from .impurity1d import (DoubleImpurity, SingleImpurity, critical_coupling, derivative_sum_rules,
                         double_critical_couplings, eigen_lhs, shifted_sum_rule, solve_spectrum,
                         sum_rule_double_Z1, sum_rule_exact, tail_completed_sum, zero_coupling)
from .impurity2d import (RingImpurity, critical_coupling_2d, unit_disk_z2, z2_partial_closed,
                         z2_partial_numeric, z2_total)
from .perturbative import (DeltaInBox, DoubleDeltaInBox, LinearInBox, PerturbationSpec, QuarticSHO,
                           pade_extend, sum_rule_perturbative)
from .rroracle import TAIL_MODELS, RRConfig, assemble_and_solve, fit_coupling_dependence, rr_sum_rule

THREADS_ENV = "SUMRULES_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# output helpers


def _clean(obj):
    """Floats stay floats (shortest round-trip repr); non-finite become strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj) + 0.0  # drops the sign of -0.0
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def _fmt(x):
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    return format(float(x) + 0.0, ".17g")


def _versions():
    return {"sumrules": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def _manifest(args, outputs):
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    return {"subcommand": args.command, "parameters": _clean(params), "outputs": [str(p) for p in outputs],
            "versions": _versions()}


def _write_json(args, payload):
    out = Path(args.out)
    payload = dict(payload)
    payload["params"] = _clean({k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command", "out")})
    payload["manifest"] = _manifest(args, [out])
    text = json.dumps(_clean(payload), indent=2, allow_nan=False) + "\n"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    return [out]


def _write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue())
    return path


def _write_csv_outputs(args, tables):
    """tables: list of (path, header, rows); writes them plus a manifest next to the first."""
    paths = [_write_csv(p, h, r) for p, h, r in tables]
    man = Path(str(paths[0]) + ".manifest.json")
    man.write_text(json.dumps(_manifest(args, paths + [man]), indent=2) + "\n")
    return paths + [man]


def _sweep(spec):
    try:
        a, b, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise UsageError(f"sweep must look like start:stop:step, got {spec!r}")
    if step <= 0 or b < a:
        raise UsageError("sweep needs step > 0 and stop >= start")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return [a + i * step for i in range(n)]


def _threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _pmap(func, items):
    """Ordered map over sweep points; each point reports ("ok", values) or ("error", message)."""
    def guarded(x):
        try:
            return "ok", func(x)
        except SumRuleError as exc:
            return "error: " + str(exc).replace(",", ";"), None

    n = _threads()
    if n == 1:
        return [guarded(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(guarded, items))


def _orders(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"orders must be a comma-separated list of integers, got {text!r}")


def _eval_dict(ev):
    pole = None
    if ev.z1 != 0:
        try:
            pole = pade_extend(ev).pole_location
        except SumRuleError:
            pass
    return {"value": ev.total, "error_bound": ev.truncation_error, "terms": ev.terms(),
            "pade": {"value": ev.pade, "pole": pole}}


# --------------------------------------------------------------------------
# subcommands


def cmd_box_linear(args):
    s = args.s
    if args.rho_sweep:
        rhos = _sweep(args.rho_sweep)
        cfg = RRConfig(args.basis, args.kept, "wkb-linear")
        pert = sum_rule_perturbative(BOX, LinearInBox(1.0), s, cutoff=args.cutoff)

        def point(rho):
            return rr_sum_rule(s, LinearInBox(rho), cfg)

        res = _pmap(point, rhos)
        rows = [(r, v, pert.z0 + r * r * pert.z2, st) for r, (st, v) in zip(rhos, res)]
        tables = [(args.out, ["rho", "Z_rr", "Z_pert_order2", "status"], rows)]
        msg = f"{len(rows)} sweep points"
        if args.fit:
            samples = [(r, v) for r, v, _, st in rows if st == "ok"]
            fit = fit_coupling_dependence(samples, even_only=True, degree=args.degree)
            frows = [(p, c, e) for p, c, e in zip(fit.powers, fit.coefficients, fit.stderr)]
            sample_path = Path(args.out).with_name(Path(args.out).stem + "_samples.csv")
            tables = [(args.out, ["power", "coefficient", "stderr"], frows),
                      (sample_path, ["rho", "Z_rr", "Z_pert_order2", "status"], rows)]
            msg = (f"fit: constant {fit.coefficient(0):.7g}, rho^2 {fit.coefficient(2):.7g} "
                   f"(perturbative {pert.z2:.7g})")
        return _write_csv_outputs(args, tables), msg
    ev = sum_rule_perturbative(BOX, PerturbationSpec(LinearInBox(1.0), args.rho), s, cutoff=args.cutoff)
    payload = _eval_dict(ev)
    return _write_json(args, payload), f"Zbar({s}) = {ev.total:.12g} (z0 {ev.z0:.12g}, z2 {ev.z2:.6g})"


def cmd_sho_quartic(args):
    ev = sum_rule_perturbative(SHO, PerturbationSpec(QuarticSHO(1.0), args.lam), args.s, cutoff=args.cutoff)
    return _write_json(args, _eval_dict(ev)), f"Z({args.s}) = {ev.total:.12g}"


def cmd_delta1(args):
    orders = _orders(args.orders)
    if args.energy_sweep:
        cfg = SingleImpurity(args.rho, args.a)
        es = _sweep(args.energy_sweep)
        rows = [(e, eigen_lhs(e, cfg) if e != 0 else float("nan"), "ok" if e != 0 else "error: E = 0")
                for e in es]
        return _write_csv_outputs(args, [(args.out, ["E", "lhs", "status"], rows)]), f"{len(rows)} points"
    if args.gamma_sweep:
        cfg = SingleImpurity(args.rho, args.a)
        gs = _sweep(args.gamma_sweep)
        res = _pmap(lambda g: shifted_sum_rule(g, cfg), gs)
        rows = [(g, v, st) for g, (st, v) in zip(gs, res)]
        return _write_csv_outputs(args, [(args.out, ["gamma", "Zgamma1", "status"], rows)]), f"{len(rows)} points"
    if args.rho_sweep:
        rhos = _sweep(args.rho_sweep)

        def point(r):
            return [sum_rule_exact(o, SingleImpurity(r, args.a)) for o in orders]

        res = _pmap(point, rhos)
        rows = [(r, *(v if v is not None else [None] * len(orders)), st) for r, (st, v) in zip(rhos, res)]
        header = ["rho"] + [f"Z{o}" for o in orders] + ["status"]
        return _write_csv_outputs(args, [(args.out, header, rows)]), f"{len(rows)} points"

    cfg = SingleImpurity(args.rho, args.a)
    values = {str(o): sum_rule_exact(o, cfg) for o in orders}
    payload = {"value": values, "error_bound": 0.0, "terms": None, "pade": None,
               "critical_coupling": critical_coupling(args.a) if abs(args.a) < 0.5 else None,
               "zero_coupling": zero_coupling(args.a) if abs(args.a) < 0.5 else None}
    if args.perturbative:
        per = {}
        for o in orders:
            ev = sum_rule_perturbative(BOX, PerturbationSpec(DeltaInBox(1.0, args.a), args.rho), o,
                                       cutoff=args.cutoff)
            d = _eval_dict(ev)
            per[str(o)] = {"terms": d["terms"], "pade": d["pade"], "error_bound": d["error_bound"]}
        payload["terms"] = {k: v["terms"] for k, v in per.items()}
        payload["pade"] = {k: v["pade"] for k, v in per.items()}
    if args.spectrum:
        spec = solve_spectrum(cfg, args.spectrum)
        payload["spectrum_check"] = {str(o): tail_completed_sum(o, spec, cfg) for o in orders}
    if args.derivative:
        payload["derivative_check"] = {str(o): derivative_sum_rules(o, cfg) for o in orders if o in (2, 3, 4)}
    summary = ", ".join(f"Zbar({k}) = {v:.12g}" for k, v in values.items())
    return _write_json(args, payload), summary


def cmd_delta2(args):
    if args.rho_sweep:
        rhos = _sweep(args.rho_sweep)
        cfg = RRConfig(args.basis, None, "first-order")

        def point(r):
            d = DoubleImpurity(r, args.mu_ratio * r, args.a, args.b)
            exact = sum_rule_double_Z1(d)
            rr = None
            if args.rr:
                rr = rr_sum_rule(1, DoubleDeltaInBox(r, args.mu_ratio * r, args.a, args.b), cfg,
                                 extrapolate=args.extrapolate)
            return exact, rr

        res = _pmap(point, rhos)
        rows = [(r, *(v if v is not None else (None, None)), st) for r, (st, v) in zip(rhos, res)]
        poles = double_critical_couplings(args.a, args.b, args.mu_ratio)
        return (_write_csv_outputs(args, [(args.out, ["rho", "Z1_exact", "Z1_rr", "status"], rows)]),
                f"{len(rows)} points; poles along mu = {args.mu_ratio} rho: {[float(x) for x in poles]}")
    d = DoubleImpurity(args.rho, args.mu, args.a, args.b)
    val = sum_rule_double_Z1(d)
    payload = {"value": val, "error_bound": 0.0, "terms": None, "pade": None}
    if args.rho != 0:
        payload["poles_along_ray"] = list(double_critical_couplings(args.a, args.b, args.mu / args.rho))
    return _write_json(args, payload), f"Zbar(1) = {val:.12g}"


def cmd_disk_ring(args):
    cfg = RingImpurity(args.rho, args.r0)
    tot = z2_total(cfg, args.nmax)
    terms = {f"z{n}": tot.terms[n] for n in range(min(len(tot.terms), 6))}
    payload = {"value": tot.value, "error_bound": tot.tail_bound, "terms": terms, "pade": None,
               "tail": tot.tail, "unit_disk": unit_disk_z2(),
               "critical_couplings": {str(j): critical_coupling_2d(j, args.r0) for j in range(4)}}
    if args.numeric:
        payload["numeric_check"] = {f"z{n}": z2_partial_numeric(n, cfg) for n in range(args.numeric)}
    return _write_json(args, payload), f"Z(2) = {tot.value:.12g} +- {tot.tail_bound:.2g}"


def cmd_helmholtz(args):
    makers = {"inverse-square": DensityProfile.inverse_square, "borg": DensityProfile.borg}
    if args.form == "constant":
        dens = DensityProfile.constant(args.beta, args.ell)
    else:
        dens = makers[args.form](args.alpha, args.beta, args.ell)
    zh = helmholtz_Z1(dens)
    L = length_map(dens)
    tp = transform(dens)
    u = np.linspace(-args.ell / 2, args.ell / 2, 1001)
    v = tp.V_of_u(u)
    payload = {"value": zh, "error_bound": 0.0, "terms": None, "pade": None, "L": L,
               "V_min": float(np.min(v)), "V_max": float(np.max(v))}
    if args.form in ("inverse-square", "constant"):
        v0 = args.alpha**2 / (4 * args.beta) if args.form == "inverse-square" else 0.0
        payload["schrodinger_Z1"] = schrodinger_Z1_const_potential(L, v0)
    return _write_json(args, payload), f"Z_H(1) = {zh:.15g}, L = {L:.15g}"


def cmd_rr_oracle(args):
    pots = {"linear": lambda: LinearInBox(args.rho),
            "delta": lambda: DeltaInBox(args.rho, args.a),
            "delta2": lambda: DoubleDeltaInBox(args.rho, args.mu, args.a, args.b)}
    pot = pots[args.potential]()
    cfg = RRConfig(args.basis, args.kept, args.tail)
    ev = assemble_and_solve(BOX, pot, cfg)
    val = rr_sum_rule(args.s, pot, cfg, extrapolate=args.extrapolate)
    payload = {"value": val, "error_bound": None, "terms": None, "pade": None,
               "lowest_levels": list(ev[: min(10, len(ev))])}
    return _write_json(args, payload), f"Z({args.s}) = {val:.12g}; E1 = {ev[0]:.12g}"


def cmd_frac_green(args):
    pot = LinearInBox(args.rho) if args.potential == "linear" else DeltaInBox(args.rho, args.a)
    res = {}
    for n in _orders(args.N):
        if n < 2:
            raise UsageError("N must be >= 2")
        res[str(n)] = list(composition_residuals(n, BOX, pot, args.cutoff))
    worst = max(max(v) for v in res.values())
    payload = {"value": worst, "error_bound": None, "terms": res, "pade": None}
    return _write_json(args, payload), f"max composition residual {worst:.3g}"


def _argv_from_manifest(manifest, out):
    argv = [manifest["subcommand"]]
    for key, val in sorted(manifest["parameters"].items()):
        if key == "command" or val is None or val is False:
            continue
        flag = "--" + key.replace("_", "-")
        argv.append(flag if val is True else f"{flag}={val!r}" if isinstance(val, float) else f"{flag}={val}")
    return argv + [f"--out={out}"]


def cmd_replay(args):
    try:
        data = json.loads(Path(args.manifest).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read manifest {args.manifest}: {exc}")
    manifest = data.get("manifest", data)
    if "subcommand" not in manifest or manifest["subcommand"] == "replay":
        raise UsageError(f"{args.manifest} is not a run manifest")
    out = args.out or manifest["outputs"][0]
    inner = build_parser().parse_args(_argv_from_manifest(manifest, out))
    return inner.func(inner)


# --------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="sumrules", description="Spectral sum rules for perturbed and decorated boxes.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    b = sub.add_parser("box-linear", help="linear potential in the unit box")
    b.add_argument("--s", default="1")
    b.add_argument("--rho", type=float, default=1.0)
    b.add_argument("--rho-sweep")
    b.add_argument("--fit", action="store_true")
    b.add_argument("--degree", type=int, default=8)
    b.add_argument("--basis", type=int, default=2000)
    b.add_argument("--kept", type=int, default=None)
    b.add_argument("--cutoff", type=int, default=1000)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_box_linear)

    q = sub.add_parser("sho-quartic", help="oscillator with a quartic perturbation")
    q.add_argument("--s", default="4")
    q.add_argument("--lam", type=float, default=0.1)
    q.add_argument("--cutoff", type=int, default=400)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_sho_quartic)

    d = sub.add_parser("delta1", help="single delta impurity in the box")
    d.add_argument("--rho", type=float, default=0.0)
    d.add_argument("--a", type=float, default=0.0)
    d.add_argument("--orders", default="1")
    d.add_argument("--rho-sweep")
    d.add_argument("--energy-sweep")
    d.add_argument("--gamma-sweep")
    d.add_argument("--perturbative", action="store_true")
    d.add_argument("--cutoff", type=int, default=1000)
    d.add_argument("--spectrum", type=int, default=0)
    d.add_argument("--derivative", action="store_true")
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_delta1)

    d2 = sub.add_parser("delta2", help="two delta impurities in the box")
    d2.add_argument("--rho", type=float, default=0.0)
    d2.add_argument("--mu", type=float, default=0.0)
    d2.add_argument("--a", type=float, default=1 / 6)
    d2.add_argument("--b", type=float, default=-1 / 6)
    d2.add_argument("--rho-sweep")
    d2.add_argument("--mu-ratio", type=float, default=1.0)
    d2.add_argument("--rr", action="store_true")
    d2.add_argument("--extrapolate", action="store_true")
    d2.add_argument("--basis", type=int, default=2000)
    d2.add_argument("--out", required=True)
    d2.set_defaults(func=cmd_delta2)

    r = sub.add_parser("disk-ring", help="unit disk with a ring impurity")
    r.add_argument("--r0", type=float, required=True)
    r.add_argument("--rho", type=float, default=0.0)
    r.add_argument("--nmax", type=int, default=200)
    r.add_argument("--numeric", type=int, default=0, help="also extract z_n(2) numerically for n < this")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_disk_ring)

    h = sub.add_parser("helmholtz", help="string density mapped onto a Schroedinger box")
    h.add_argument("--form", choices=["inverse-square", "borg", "constant"], default="inverse-square")
    h.add_argument("--alpha", type=float, default=1.0)
    h.add_argument("--beta", type=float, default=1.0)
    h.add_argument("--ell", type=float, default=1.0)
    h.add_argument("--out", required=True)
    h.set_defaults(func=cmd_helmholtz)

    o = sub.add_parser("rr-oracle", help="Rayleigh-Ritz sum rule")
    o.add_argument("--potential", choices=["linear", "delta", "delta2"], default="linear")
    o.add_argument("--rho", type=float, default=1.0)
    o.add_argument("--mu", type=float, default=0.0)
    o.add_argument("--a", type=float, default=0.0)
    o.add_argument("--b", type=float, default=0.0)
    o.add_argument("--s", default="1")
    o.add_argument("--basis", type=int, default=2000)
    o.add_argument("--kept", type=int, default=None)
    o.add_argument("--tail", choices=TAIL_MODELS, default="first-order")
    o.add_argument("--extrapolate", action="store_true")
    o.add_argument("--out", required=True)
    o.set_defaults(func=cmd_rr_oracle)

    f = sub.add_parser("frac-green-check", help="N-fold composition of the fractional Green's function")
    f.add_argument("--N", default="2,3,4")
    f.add_argument("--cutoff", type=int, default=50)
    f.add_argument("--potential", choices=["linear", "delta"], default="delta")
    f.add_argument("--rho", type=float, default=1.0)
    f.add_argument("--a", type=float, default=0.1)
    f.add_argument("--out", required=True)
    f.set_defaults(func=cmd_frac_green)

    rp = sub.add_parser("replay", help="re-run the invocation recorded in a manifest")
    rp.add_argument("manifest", help="a .manifest.json file or a JSON output with an embedded manifest")
    rp.add_argument("--out", default=None, help="write here instead of the recorded output path")
    rp.set_defaults(func=cmd_replay)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        outputs, summary = args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except SumRuleError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    print(f"{args.command}: {summary}")
    for p in outputs:
        print(f"  wrote {p}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
