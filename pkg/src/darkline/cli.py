"""Command-line front end.

    darkline steady SCENARIO [--delta D] [--json]
    darkline sweep SCENARIO SWEEP.json --out-csv F [--out-json F] [--threads N]
    darkline solve-condition SCENARIO [--json]
    darkline verify [SCENARIO | --random N] [--seed S] [--json]
    darkline stability SCENARIO --lambda-range LO,HI [--json]

Exit status is 0 on success, 1 when a check fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace


from . import closedform, linsys, sweep, verify
from .errors import DarklineError
from .model import Scheme, derive
from .scenario import config_to_dict, load_scenario


def _emit(args, payload, table_lines):
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(table_lines))


def _fail(args, failures, code=1):
    """Machine-readable failure list on stderr (and stdout under --json)."""
    doc = json.dumps({"failures": failures}, sort_keys=True)
    if getattr(args, "json", False):
        print(doc)
    print(doc, file=sys.stderr)
    return code


def cmd_steady(args):
    config = load_scenario(args.scenario)
    delta = config.signal.delta if args.delta is None else args.delta
    report = linsys.transfer(config, delta)
    p = derive(config)
    payload = {
        "scheme": config.kind.value,
        "delta": delta,
        "derived": {"c1": p.c1, "c2": p.c2, "c3": p.c3, "g_total": p.g_total, "t": p.t},
        "report": report.as_dict(),
    }
    lines = [f"scheme        {config.kind.value}", f"delta         {delta:.6g}"]
    lines += [f"C1, C2, C3    {p.c1:.6g}, {p.c2:.6g}, {p.c3:.6g}"]
    for key, value in report.as_dict().items():
        if isinstance(value, list):
            value = complex(*value)
        lines.append(f"{key:<20}{value}")
    _emit(args, payload, lines)
    return 0


def cmd_sweep(args):
    config = load_scenario(args.scenario)
    with open(args.sweep_file, encoding="utf-8") as fh:
        spec = sweep.load_sweep_spec(fh.read(), config)
    rows = sweep.run_sweep(spec, threads=args.threads)
    sweep.write_csv(rows, args.out_csv, spec)
    if args.out_json:
        sweep.write_json_summary(rows, args.out_json, spec)
    summary = sweep.summary(rows, spec)
    lines = [f"{len(rows)} rows -> {args.out_csv}"]
    if summary["chi"]:
        lines.append(f"chi max {summary['chi']['max']:.6g} at {summary['chi']['argmax']}")
    _emit(args, {"rows": len(rows), "csv": args.out_csv, "json": args.out_json, "chi": summary["chi"]}, lines)
    return 0


def cmd_solve_condition(args):
    config = load_scenario(args.scenario)
    if config.kind is Scheme.BASELINE:
        return _fail(args, [{"error": "the baseline scheme has no nulling condition"}], 2)
    nulled = closedform.apply_nulling(config)
    state = linsys.steady_state(nulled, 0.0)
    bd = linsys.bright_dark_decompose(state, nulled)
    residual = abs(bd.alpha_b) / abs(bd.alpha_d)
    payload = {"scheme": config.kind.value, "residual": residual}
    if config.kind is Scheme.WEAK_DRIVE:
        amp = nulled.aux_drive.amplitude
        ratio = amp / config.signal.amplitude if config.signal.amplitude != 0 else float("nan")
        payload.update(alpha3_in=[amp.real, amp.imag], amplitude_ratio=abs(ratio))
        lines = [f"alpha3_in        {amp}", f"|alpha3_in/alpha1_in|  {abs(ratio):.15g}"]
    else:
        lam = complex(nulled.lam)
        payload.update(
            lam=[lam.real, lam.imag],
            abs_lambda=abs(lam),
            threshold=closedform.parametric_threshold(nulled),
            stable=linsys.stability(nulled)[0],
        )
        lines = [f"lambda*          {abs(lam):.15g}", f"threshold        {payload['threshold']:.15g}"]
    lines.append(f"|aB|/|aD|        {residual:.3e}")
    _emit(args, payload, lines)
    if residual > 1e-12:
        return _fail(args, [{"check": "nulling residual", "value": residual, "tolerance": 1e-12}])
    return 0


def cmd_verify(args):
    if args.scenario:
        configs = [load_scenario(args.scenario)]
        td = [c for c in configs if linsys.stability(c)[0] and verify.stiffness(c) <= 1e4]
    else:
        n = args.random
        configs, td = [], []
        for i, kind in enumerate(verify.SCHEMES):
            configs += verify.random_configs(kind, n, seed=[args.seed, i])
            td += verify.random_configs(
                kind, args.time_domain, seed=[args.seed, i, 1], rate_range=(0.2, 5.0)
            )
        configs += verify.random_configs(
            Scheme.PARAMETRIC, n, seed=[args.seed, 3], adiabatic=True
        )
    results = verify.run_suite(configs, seed=args.seed, time_domain_configs=td or None)
    ok = all(r.passed for r in results)
    lines = [r.line() for r in results]
    lines.append("all properties pass" if ok else "some properties FAIL")
    _emit(args, {"passed": ok, "results": [r.as_dict() for r in results]}, lines)
    if not ok:
        return _fail(args, [r.as_dict() for r in results if not r.passed])
    return 0


def locate_threshold(config, lo, hi, rtol=1e-10):
    """Bisect |lambda| in [lo, hi] for the zero of the largest drift real part.

    The phase of the scenario's lambda is kept (real positive if it is zero).
    """
    phase = config.lam / abs(config.lam) if config.lam != 0 else 1.0

    def growth(mag):
        return -linsys.stability(replace(config, lam=mag * phase))[1]

    g_lo, g_hi = growth(lo), growth(hi)
    if not (g_lo < 0 <= g_hi):
        raise DarklineError(
            f"no stability change in |lambda| range [{lo}, {hi}] "
            f"(max growth rates {g_lo:.3g}, {g_hi:.3g})"
        )
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if growth(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def cmd_stability(args):
    config = load_scenario(args.scenario)
    if config.kind is not Scheme.PARAMETRIC:
        stable, slowest = linsys.stability(config)
        _emit(args, {"stable": stable, "slowest_rate": slowest},
              [f"stable        {stable}", f"slowest_rate  {slowest:.6g}"])
        return 0
    if args.lambda_range:
        lo, hi = (float(x) for x in args.lambda_range.split(","))
    else:
        est = closedform.parametric_threshold(config)
        lo, hi = 0.0, 2.0 * est
    found = locate_threshold(config, lo, hi)
    estimate = closedform.parametric_threshold(config)
    lam_star = closedform.solve_parametric_condition(config)
    payload = {
        "threshold": found,
        "adiabatic_estimate": estimate,
        "relative_difference": abs(found - estimate) / estimate,
        "lambda_star": lam_star,
        "lambda_star_stable": linsys.stability(closedform.apply_nulling(config))[0],
    }
    lines = [
        f"bisected threshold |lambda|  {found:.10g}",
        f"gamma_m (1+C1+C2)/2          {estimate:.10g}",
        f"relative difference          {payload['relative_difference']:.3e}",
        f"lambda* = {lam_star:.10g}  stable: {payload['lambda_star_stable']}",
    ]
    _emit(args, payload, lines)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="darkline", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="print JSON to stdout")
        return p

    p = common(sub.add_parser("steady", help="steady state and transfer report"))
    p.add_argument("scenario")
    p.add_argument("--delta", type=float, default=None)
    p.set_defaults(func=cmd_steady)

    p = common(sub.add_parser("sweep", help="parameter sweep to CSV/JSON"))
    p.add_argument("scenario")
    p.add_argument("sweep_file")
    p.add_argument("--out-csv", required=True)
    p.add_argument("--out-json")
    p.add_argument("--threads", type=int, default=None, help="default: $DARKLINE_THREADS or 1")
    p.set_defaults(func=cmd_sweep)

    p = common(sub.add_parser("solve-condition", help="bright-mode nulling amplitude or lambda*"))
    p.add_argument("scenario")
    p.set_defaults(func=cmd_solve_condition)

    p = common(sub.add_parser("verify", help="run the oracle suite"))
    p.add_argument("scenario", nargs="?")
    p.add_argument("--random", type=int, default=None, help="random configs per scheme")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-domain", type=int, default=3,
                   help="random configs per scheme for the RK4 check (default 3)")
    p.set_defaults(func=cmd_verify)

    p = common(sub.add_parser("stability", help="locate the parametric instability threshold"))
    p.add_argument("scenario")
    p.add_argument("--lambda-range", help="LO,HI bracket for |lambda|")
    p.set_defaults(func=cmd_stability)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "verify" and not args.scenario and args.random is None:
        ap.error("verify needs a SCENARIO or --random N")
    try:
        return args.func(args)
    except (DarklineError, OSError, ValueError) as exc:
        return _fail(args, [{"error": type(exc).__name__, "message": str(exc)}], 2)


if __name__ == "__main__":
    sys.exit(main())
