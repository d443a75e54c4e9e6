"""Command-line front end.

Subcommands::

    design-flat      closed-form moduli for one full CRT layer
    design-layered   two moduli with exactly K robust layers
    predict          analytical success lower bound for a design file
    simulate         Monte Carlo success rate and RRSE, optionally swept
    oracle           brute-force verification suites

Design commands print a design document (JSON) that ``predict`` and
``simulate`` read back through ``--design-file``.

CSV columns:

    design-flat      gammas,m_num,m_den,m,P,tau,case
    design-layered   j,sigma,P_num,P_den,P,tau_num,tau_den,tau
                     (x,T with --emit-staircase)
    predict          layer,lower,upper,tau,mass,pass_prob,contribution
    simulate         design,param,value,trials,success_rate,std_error,rrse,eta,rejections

Exit codes: 0 success, 2 usage error, 3 infeasible design, 4 property failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import designio
from .exceptions import ConfigurationError, DomainError, InfeasibleDesignError, RCRTError
from .flat import DesignRequest, compare_baselines, design_flat, design_flat_heuristic, quartet_case, truncate_scale
from .layered import LayeredDesign, design_layered, kstar, scaling_report, staircase_samples
from .numtheory import to_fraction
from .oracle import SUITES, run_suite
from .stats import NOISE_KINDS, PRIOR_KINDS, NoiseModel, SignalPrior, monte_carlo, success_lower_bound

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_PROPERTY = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _real(v, precision):
    return float(f"{float(v):.{precision}g}")


def _rat(v, precision):
    return designio.rational_to_json(v, precision)


def _emit(args, payload, rows=None, header=None):
    """Write JSON ``payload`` or CSV ``rows`` to --out or stdout."""
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _request(args, L):
    if args.rho is not None:
        if args.n_th is not None and args.m_max is not None:
            raise UsageError("give --rho or --n-th/--m-max, not all three")
        return DesignRequest(L, n_th=args.n_th, m_max=args.m_max, rho=args.rho)
    if args.n_th is None or args.m_max is None:
        raise UsageError("need --rho, or both --n-th and --m-max")
    return DesignRequest(L, n_th=args.n_th, m_max=args.m_max)


def cmd_design_flat(args):
    req = _request(args, args.L)
    ms = design_flat_heuristic(req) if args.heuristic else design_flat(req)
    p = args.precision
    payload = designio.design_to_dict(ms, p)
    payload["request"] = {"L": req.L, "rho": _rat(req.rho, p), "m_max": _rat(req.m_max, p), "n_th": _rat(req.n_th, p)}
    if ms.L == 4 and not args.heuristic and req.rho > 30:
        payload["case_label"] = quartet_case(req.rho)
    if args.compare_baselines:
        rep = compare_baselines(req)
        payload["baselines"] = {
            "prime": designio.design_to_dict(rep.prime, p),
            "structured": designio.design_to_dict(rep.structured, p),
            "improvement_over_prime": _rat(rep.improvement_over_prime, p),
            "improvement_over_structured": _rat(rep.improvement_over_structured, p),
        }
    if args.truncate_decimals is not None:
        tr = truncate_scale(ms, args.truncate_decimals)
        payload["truncated"] = {
            "m": _rat(tr.m, p),
            "range": _rat(tr.full_range, p),
            "range_ratio": _rat(tr.m / ms.m, p),
            "meets_n_th": tr.full_range >= req.n_th,
        }
    row = [
        " ".join(map(str, ms.gammas)),
        ms.m.numerator,
        ms.m.denominator,
        _real(ms.m, p),
        _real(ms.full_range, p),
        _real(ms.full_tolerance, p),
        ms.case or "",
    ]
    _emit(args, payload, [row], ["gammas", "m_num", "m_den", "m", "P", "tau", "case"])
    return EXIT_OK


def cmd_design_layered(args):
    if args.K is None:
        raise UsageError("--K is required")
    req = _request(args, 2)
    d = design_layered(req.rho, args.K, req.m_max)
    p = args.precision
    payload = designio.design_to_dict(d, p)
    ks = kstar(req.rho)
    payload["kstar"] = {"exact": ks.exact, "binet": ks.binet}
    payload["request"] = {"rho": _rat(req.rho, p), "m_max": _rat(req.m_max, p), "n_th": _rat(req.n_th, p)}
    stair = staircase_samples(d)
    if args.emit_staircase:
        payload["staircase"] = [{"x": _rat(x, p), "T": _rat(t, p)} for x, t in stair]
    if args.emit_scaling and d.K >= 1:
        sr = scaling_report(d)
        payload["scaling"] = {
            "tau_ratios": [_rat(v, p) for v in sr.tau_ratios],
            "p2_over_p1": None if sr.p2_over_p1 is None else _rat(sr.p2_over_p1, p),
            "p1_over_pK1": _rat(sr.p1_over_pK1, p),
            "p1_over_pK1_closed_form": None if sr.p1_over_pK1_closed_form is None else _rat(sr.p1_over_pK1_closed_form, p),
            "inverse_fib": None if sr.inverse_fib is None else _rat(sr.inverse_fib, p),
            "first_last_gap": None if sr.first_last_gap is None else _rat(sr.first_last_gap, p),
            "pK_over_pK1": _rat(sr.pK_over_pK1, p),
            "two_step_ratios": {str(j): _rat(v, p) for j, v in sr.two_step_ratios.items()},
        }
    if args.emit_staircase:
        rows = [[_real(x, p), _real(t, p)] for x, t in stair]
        header = ["x", "T"]
    else:
        rows = [
            [j, s, P.numerator, P.denominator, _real(P, p), t.numerator, t.denominator, _real(t, p)]
            for j, (s, P, t) in enumerate(zip(d.sigma, d.breakpoints, d.tolerances), start=1)
        ]
        header = ["j", "sigma", "P_num", "P_den", "P", "tau_num", "tau_den", "tau"]
    _emit(args, payload, rows, header)
    return EXIT_OK


def _parse_kind(text, kinds, what):
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if what == "noise" and kind == "none":
        return "gaussian", [0.0]
    if kind not in kinds:
        raise UsageError(f"unknown {what} kind {kind!r}; expected one of {', '.join(kinds)}")
    try:
        params = [float(v) for v in rest.split(":")] if rest else []
    except ValueError as exc:
        raise UsageError(f"bad {what} parameter in {text!r}") from exc
    return kind, params


def _prior(text, design, low):
    kind, params = _parse_kind(text, PRIOR_KINDS, "prior")
    if kind == "uniform":
        upper = params[0] if params else float(design.full_range)
        return SignalPrior(kind, upper, low)
    if len(params) != 1:
        raise UsageError(f"prior {kind} takes one parameter, e.g. {kind}:360")
    return SignalPrior(kind, params[0])


def _noise(text):
    kind, params = _parse_kind(text, NOISE_KINDS, "noise")
    if len(params) != 1:
        raise UsageError(f"noise {kind} takes one parameter, e.g. {kind}:1")
    return NoiseModel(kind, params[0])


def _load(path):
    try:
        return designio.load(path)
    except OSError as exc:
        raise UsageError(f"cannot read design file {path}: {exc}") from exc


def _protocol(args, design):
    if args.protocol:
        return args.protocol
    return "layered" if isinstance(design, LayeredDesign) else "flat"


def cmd_predict(args):
    design = _load(args.design_file)
    prior = _prior(args.prior, design, args.x_low)
    noise = _noise(args.noise)
    proto = _protocol(args, design)
    est = success_lower_bound(design, prior, noise, proto, args.x_low)
    p = args.precision
    if proto == "flat":
        taus = [design.tolerances[-1] if isinstance(design, LayeredDesign) else design.full_tolerance]
    else:
        taus = list(design.tolerances)
    rows, lower = [], args.x_low
    for j, (P, tau, mass, pp) in enumerate(zip(est.breakpoints, taus, est.per_layer_mass, est.per_layer_pass), 1):
        rows.append([j, _real(lower, p), _real(P, p), _real(tau, p), _real(mass, p), _real(pp, p), _real(mass * pp, p)])
        lower = P
    rows.append(["total", _real(args.x_low, p), _real(est.breakpoints[-1], p), "", _real(est.in_range_mass, p), "", _real(est.eta, p)])
    payload = {
        "protocol": proto,
        "prior": {"kind": prior.kind, "param": prior.param, "low": prior.low},
        "noise": {"kind": noise.kind, "param": noise.param},
        "layers": [
            dict(zip(("layer", "lower", "upper", "tau", "mass", "pass_prob", "contribution"), r)) for r in rows[:-1]
        ],
        "in_range_mass": _real(est.in_range_mass, p),
        "eta": _real(est.eta, p),
    }
    _emit(args, payload, rows, ["layer", "lower", "upper", "tau", "mass", "pass_prob", "contribution"])
    return EXIT_OK


def _sweep(text):
    try:
        param, lo, hi, step = text.split(":")
        lo, hi, step = to_fraction(lo), to_fraction(hi), to_fraction(step)
    except (ValueError, DomainError) as exc:
        raise UsageError(f"--sweep expects param:lo:hi:step, got {text!r}") from exc
    if param not in ("noise", "prior"):
        raise UsageError("--sweep parameter must be 'noise' or 'prior'")
    if step <= 0 or hi < lo:
        raise UsageError("--sweep needs step > 0 and hi >= lo")
    values = []
    v = lo
    while v <= hi:
        values.append(float(v))
        v += step
    return param, values


def _with_param(text, value):
    kind = text.partition(":")[0]
    return f"{kind}:{value!r}"


def cmd_simulate(args):
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    designs = [(path, _load(path)) for path in args.design_file]
    if args.sweep:
        param, values = _sweep(args.sweep)
    else:
        param, values = "noise", [None]
    jobs = []
    for path, design in designs:
        for v in values:
            prior_text = _with_param(args.prior, v) if param == "prior" and v is not None else args.prior
            noise_text = _with_param(args.noise, v) if param == "noise" and v is not None else args.noise
            prior = _prior(prior_text, design, args.x_low)
            noise = _noise(noise_text)
            value = v if v is not None else (noise.param if param == "noise" else prior.param)
            jobs.append((path, design, prior, noise, value))

    def run(job):
        path, design, prior, noise, value = job
        proto = _protocol(args, design)
        res = monte_carlo(design, prior, noise, args.trials, args.seed, proto, args.x_low)
        eta = success_lower_bound(design, prior, noise, proto, args.x_low).eta
        return path, value, res, eta

    if args.jobs > 1:
        with ThreadPoolExecutor(args.jobs) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    p = args.precision
    rows = [
        [path, param, _real(value, p), r.trials, _real(r.success_rate, p), _real(r.std_error, p), _real(r.rrse, p), _real(eta, p), r.rejections]
        for path, value, r, eta in results
    ]
    header = ["design", "param", "value", "trials", "success_rate", "std_error", "rrse", "eta", "rejections"]
    payload = {"seed": args.seed, "rows": [dict(zip(header, r)) for r in rows]}
    _emit(args, payload, rows, header)
    return EXIT_OK


def cmd_oracle(args):
    kw = {"rho_max": args.rho_max}
    if args.suite == "flat":
        kw["l4_max"] = args.l4_max
    else:
        kw["k_max"] = args.K_max
    rep = run_suite(args.suite, **kw)
    if args.format == "json":
        payload = {
            "suite": rep.suite,
            "passed": rep.passed,
            "cases": [
                {"name": c.name, "checked": c.checked, "failed": c.failed, "first_counterexample": c.first_counterexample}
                for c in rep.cases
            ],
            "labels_hit": rep.labels_hit,
        }
        _emit(args, payload)
    elif args.format == "csv":
        rows = [[rep.suite, c.name, c.checked, c.failed, c.first_counterexample or ""] for c in rep.cases]
        _emit(args, None, rows, ["suite", "case", "checked", "failed", "first_counterexample"])
    else:
        text = "\n".join(rep.lines()) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK if rep.passed else EXIT_PROPERTY


def _default_seed():
    raw = os.environ.get("RCRT_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        print(f"warning: ignoring non-integer RCRT_SEED={raw!r}", file=sys.stderr)
        return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--precision", type=int, default=12, help="significant digits for reals")
    common.add_argument("--out", help="write the report here instead of stdout")

    ratio = argparse.ArgumentParser(add_help=False)
    ratio.add_argument("--rho", type=to_fraction)
    ratio.add_argument("--n-th", dest="n_th", type=to_fraction)
    ratio.add_argument("--m-max", dest="m_max", type=to_fraction)

    ap = argparse.ArgumentParser(prog="rcrt", description="Robust CRT moduli design and verification.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design-flat", parents=[common, ratio], help="optimal moduli for a single full layer")
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--heuristic", action="store_true", help="use the near-optimal rule (needed for L = 5, 6)")
    p.add_argument("--compare-baselines", action="store_true")
    p.add_argument("--truncate-decimals", type=int)
    p.set_defaults(func=cmd_design_flat)

    p = sub.add_parser("design-layered", parents=[common, ratio], help="two moduli with K robust layers")
    p.add_argument("--K", type=int)
    p.add_argument("--emit-staircase", action="store_true")
    p.add_argument("--emit-scaling", action="store_true")
    p.set_defaults(func=cmd_design_layered)

    dist = argparse.ArgumentParser(add_help=False)
    dist.add_argument("--design-file", required=True)
    dist.add_argument("--prior", default="uniform", help="uniform[:hi] | rayleigh:beta | exponential:lambda | folded-gaussian:theta")
    dist.add_argument("--noise", default="none", help="gaussian:sigma | uniform:eps | none")
    dist.add_argument("--protocol", choices=("layered", "flat"))
    dist.add_argument("--x-low", dest="x_low", type=float, default=0.0, help="lower end of the signal range")

    p = sub.add_parser("predict", parents=[common, dist], help="analytical success lower bound")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo success rate and RRSE")
    p.add_argument("--design-file", action="append", required=True)
    p.add_argument("--prior", default="uniform")
    p.add_argument("--noise", default="none")
    p.add_argument("--protocol", choices=("layered", "flat"))
    p.add_argument("--x-low", dest="x_low", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--sweep", help="param:lo:hi:step with param in {noise, prior}")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", parents=[common], help="brute-force verification suites")
    p.set_defaults(format="text")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--rho-max", dest="rho_max", type=int)
    p.add_argument("--K-max", dest="K_max", type=int)
    p.add_argument("--l4-max", dest="l4_max", type=int)
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"rcrt {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleDesignError as exc:
        print(f"rcrt {args.command}: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (DomainError, ConfigurationError) as exc:
        print(f"rcrt {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RCRTError as exc:
        print(f"rcrt {args.command}: internal check failed: {exc}", file=sys.stderr)
        return EXIT_PROPERTY


def _entry():
    sys.exit(main())


if __name__ == "__main__":
    _entry()
