"""Command-line front end: one verb per module surface.

Exit codes: 0 every check passed, 1 at least one FAIL, 2 inconclusive
results without a FAIL, 3 usage or configuration errors.  All numeric
output carries its error estimate; reports are versioned JSON, plot data
is CSV.  A fixed seed fully determines randomized batteries.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .chains import ChainId, SamplePolicy, Verdict, measure_rate, verify_chain
from .constants import choose_constants
from .dirichlet import (ANNULUS_DOMAIN, ExteriorData, GridProblem, solve_dirichlet,
                        verify_comparison, verify_hopf_ratio, verify_kslap,
                        verify_measure_lemma, verify_qsmp)
from .errors import FraccertError
from .hypotheses import check_f2, check_f2prime, check_f3prime, check_f4prime, spec_from_dict
from .hypotheses import Verdict as HVerdict
from .liouville import (CandidateFamily, default_r_grid, nonexistence_scan,
                        proof_quantity_trace)
from .operator import QuadSpec, eval_pointwise, eval_radial
from .params import FracParams
from .profiles import (BarrierConstants, barrier_gallery, make_barrier, make_fundamental,
                       BarrierKind)
from .reporting import to_json, write_csv, write_json

_EXIT_PASS = 0
_EXIT_FAIL = 1
_EXIT_INCONCLUSIVE = 2
_EXIT_USAGE = 3


def _params(args) -> FracParams:
    return FracParams(args.n, args.s)


def _quad(args) -> QuadSpec:
    if args.tol is not None:
        return QuadSpec(rel_tol=args.tol, abs_tol=args.tol * 1e-4)
    return QuadSpec(rel_tol=5e-8, abs_tol=1e-14)


def _emit(args, payload, kind: str) -> None:
    if args.report:
        write_json(args.report, payload, kind)
    print(to_json(payload, kind))


def _constants(args) -> BarrierConstants:
    return BarrierConstants(base_radius=args.r0, outer_radius=args.r)


def cmd_eval(args) -> int:
    params = _params(args)
    quad = _quad(args)
    if args.profile == "fundamental":
        prof = make_fundamental(params)
        ov = eval_radial(prof, args.at, params, quad)
    elif args.profile == "cos":
        ov = eval_pointwise(np.cos, args.at, params, quad)
    else:
        constants = _constants(args)
        prof = make_barrier(BarrierKind(args.profile), constants, params)
        ov = eval_radial(prof, args.at, params, quad)
    payload = {
        "profile": args.profile, "at": args.at, "n": args.n, "s": args.s,
        "value": ov.value, "error_estimate": ov.error_estimate,
        "panels_used": ov.panels_used, "converged": ov.converged,
    }
    _emit(args, payload, "eval")
    return _EXIT_PASS if ov.converged else _EXIT_INCONCLUSIVE


def cmd_barrier(args) -> int:
    params = _params(args)
    constants = _constants(args)
    rows = barrier_gallery(constants, params)
    if args.out == "csv":
        target = args.report or "barriers.csv"
        write_csv(target, ("barrier", "radius", "value"), rows)
        print(f"wrote {len(rows)} rows to {target}")
    else:
        _emit(args, {"rows": rows, "n": args.n, "s": args.s,
                     "r0": args.r0, "r": args.r}, "barrier-gallery")
    return _EXIT_PASS


def cmd_verify_chain(args) -> int:
    params = _params(args)
    chain = ChainId(args.chain.upper())
    if args.auto_constants:
        try:
            constants = choose_constants(chain.value, params, r0=args.r0, r=args.r)
        except FraccertError:
            constants = _constants(args)
    else:
        constants = _constants(args)
    policy = SamplePolicy(points=args.samples)
    rep = verify_chain(chain, params, constants, policy, _quad(args))
    payload = {
        "chain": chain.value, "n": args.n, "s": args.s,
        "constants": constants, "verdict": rep.verdict.value,
        "worst_margin": rep.worst_margin, "fitted_constant": rep.fitted_constant,
        "notes": rep.notes,
        "samples": [{"x": x, "value": v, "err": e} for x, v, e in rep.samples],
    }
    _emit(args, payload, "verify-chain")
    if args.csv:
        write_csv(args.csv, ("radius", "value", "err"), rep.samples)
    return {Verdict.PASS: _EXIT_PASS, Verdict.FAIL: _EXIT_FAIL,
            Verdict.INCONCLUSIVE: _EXIT_INCONCLUSIVE}[rep.verdict]


def cmd_rate(args) -> int:
    params = _params(args)
    grid = np.geomspace(args.r_min, args.r_max, args.grid_points).tolist()
    fit = measure_rate(ChainId(args.chain.upper()), params, _constants(args), grid,
                       quad=_quad(args))
    payload = {"chain": args.chain.upper(), "n": args.n, "s": args.s, "r_grid": grid,
               "constant": fit.constant, "slope": fit.slope, "residual": fit.residual,
               "ratio_spread": fit.ratio_spread}
    _emit(args, payload, "rate-fit")
    return _EXIT_PASS


def cmd_solve(args) -> int:
    params = _params(args)
    intervals = tuple(tuple(map(float, part.split(":"))) for part in args.domain.split(","))
    rhs = args.rhs_const
    exterior = ExteriorData(args.exterior)
    problem = GridProblem(intervals, args.h, params, rhs, exterior)
    sol = solve_dirichlet(problem)
    payload = {
        "domain": intervals, "h": args.h, "n": args.n, "s": args.s,
        "exterior": args.exterior, "rhs_const": args.rhs_const,
        "residual_norm": sol.residual_norm,
        "min_value": float(sol.values.min()), "max_value": float(sol.values.max()),
        "nodes": sol.nodes.tolist(), "values": sol.values.tolist(),
    }
    _emit(args, payload, "solve")
    if args.csv:
        write_csv(args.csv, ("node", "value"), zip(sol.nodes.tolist(), sol.values.tolist()))
    return _EXIT_PASS


def cmd_maxprinciple(args) -> int:
    params = _params(args)
    rng = np.random.default_rng(args.seed)
    results = {}
    worst_exit = _EXIT_PASS
    which = args.check
    if which in ("comparison", "all"):
        violations = 0
        for _ in range(args.samples):
            base = rng.uniform(0.0, 1.0, 5)
            bump = rng.uniform(0.0, 1.0, 5)
            mk = lambda coefs: (lambda x: np.polyval(coefs, np.asarray(x)) ** 2)
            p1 = GridProblem(((-1.0, 1.0),), 1.0 / 32.0, params, mk(base))
            p2 = GridProblem(((-1.0, 1.0),), 1.0 / 32.0, params,
                             lambda x, b=base, u=bump: np.polyval(b, np.asarray(x)) ** 2
                             + np.polyval(u, np.asarray(x)) ** 2)
            rep = verify_comparison(p1, p2)
            violations += 0 if rep.passed else 1
        results["comparison"] = {"pairs": args.samples, "violations": violations}
        if violations:
            worst_exit = _EXIT_FAIL
    if which in ("hopf", "all"):
        prob = GridProblem(((-1.0, 1.0),), args.h, params,
                           lambda x: (np.abs(np.asarray(x)) < 0.1).astype(float))
        rep = verify_hopf_ratio(prob)
        results["hopf"] = rep
        if not rep.stable:
            worst_exit = max(worst_exit, _EXIT_INCONCLUSIVE)
    if which in ("kslap", "all"):
        base_set = ((-1.625, -1.375), (1.375, 1.625))
        battery = [base_set, base_set[:1], base_set[1:],
                   ((-1.5, -1.375), (1.375, 1.5))]
        rhs = lambda x: (((np.abs(np.asarray(x)) > 1.375) & (np.abs(np.asarray(x)) < 1.625))).astype(float)
        rep = verify_kslap(rhs, battery, params, h=args.h)
        results["kslap"] = rep
        if rep.c_bar <= 0:
            worst_exit = _EXIT_FAIL
    if which in ("qsmp", "all"):
        rep = verify_qsmp(((1.0, 4.0),), ((2.0, 3.0),), ((1.5, 1.8125),), params,
                          variant=args.variant, h=args.h)
        results["qsmp"] = rep
        if rep.c0 <= 0:
            worst_exit = _EXIT_FAIL
        elif not rep.stable:
            worst_exit = max(worst_exit, _EXIT_INCONCLUSIVE)
    if which in ("measure", "all"):
        rhs = lambda x: (((np.abs(np.asarray(x)) > 1.375) & (np.abs(np.asarray(x)) < 1.625))).astype(float)
        sol = solve_dirichlet(GridProblem(ANNULUS_DOMAIN, args.h, params, rhs))
        rep = verify_measure_lemma(sol, args.nu)
        results["measure"] = rep
    _emit(args, {"seed": args.seed, "results": results}, "maxprinciple")
    return worst_exit


def cmd_check_f(args) -> int:
    params = _params(args)
    data = json.loads(Path(args.spec).read_text())
    spec = spec_from_dict(data, params)
    checker = {"f2": check_f2, "f2prime": check_f2prime,
               "f3prime": check_f3prime, "f4prime": check_f4prime}[args.condition]
    rep = checker(spec, params)
    _emit(args, rep, "check-f")
    return {HVerdict.HOLDS: _EXIT_PASS, HVerdict.FAILS: _EXIT_FAIL,
            HVerdict.INCONCLUSIVE: _EXIT_INCONCLUSIVE}[rep.verdict]


def cmd_scan(args) -> int:
    params = _params(args)
    family = CandidateFamily(
        c_values=tuple(np.geomspace(0.1, 10.0, args.family_side)),
        beta_values=tuple(np.linspace(0.1, 6.0, args.family_side)),
        include_control=args.control, control_power=args.power if args.control else None,
    )
    f = lambda t, x: t**args.power
    scan = nonexistence_scan(family, f, params, (args.r_min, args.r_max),
                             points=args.samples, keep_curves=bool(args.csv))
    payload = {"power": args.power, "n": args.n, "s": args.s,
               "summary": scan.summary(),
               "members": [{"label": l, "verdict": v, "witness": w, "residual": r,
                             "err": e}
                            for l, v, w, r, e in scan.members]}
    _emit(args, payload, "scan")
    if args.csv:
        write_csv(args.csv, ("label", "radius", "residual", "err"), scan.curve_rows())
    return _EXIT_PASS


def cmd_trace(args) -> int:
    params = _params(args)
    prof = make_fundamental(params)
    f = (lambda t, x: t**args.power) if args.power > 0 else None
    rep = proof_quantity_trace(prof, f, params, default_r_grid(args.r0, 8, args.decades))
    _emit(args, rep, "trace")
    if args.csv:
        write_csv(args.csv, ("r", "m", "forcing_lower", "upper_envelope", "rho", "eta"),
                  [(row.r, row.m, row.forcing_lower, row.upper_envelope,
                    row.rho_ratio, row.eta_ratio) for row in rep.rows])
    return _EXIT_PASS


def cmd_report(args) -> int:
    data = json.loads(Path(args.file).read_text())
    body = data.get("body", data)
    print(f"schema_version: {data.get('schema_version')}  kind: {data.get('kind')}")
    if isinstance(body, dict):
        for key in sorted(body):
            value = body[key]
            if isinstance(value, list) and len(value) > 6:
                print(f"  {key}: [{len(value)} entries]")
            else:
                print(f"  {key}: {value}")
    return _EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fraccert",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, r0=2.0, r=20.0):
        p.add_argument("--n", type=int, default=1)
        p.add_argument("--s", type=float, default=0.5)
        p.add_argument("--r0", type=float, default=r0)
        p.add_argument("--r", type=float, default=r)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--samples", type=int, default=200)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", choices=("json", "csv"), default="json")
        p.add_argument("--report", type=str, default=None, help="write the JSON report here")
        p.add_argument("--csv", type=str, default=None, help="write CSV plot data here")

    p = sub.add_parser("eval", help="evaluate the operator on a profile")
    common(p)
    p.add_argument("--profile", default="fundamental")
    p.add_argument("--at", type=float, required=True)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("barrier", help="emit the barrier gallery")
    common(p)
    p.set_defaults(fn=cmd_barrier)

    p = sub.add_parser("verify-chain", help="verify a sign or rate certificate")
    common(p)
    p.add_argument("--chain", required=True)
    p.add_argument("--auto-constants", action="store_true", default=True)
    p.add_argument("--no-auto-constants", dest="auto_constants", action="store_false")
    p.set_defaults(fn=cmd_verify_chain)

    p = sub.add_parser("rate", help="fit the decay rate of a bound chain")
    common(p)
    p.add_argument("--chain", required=True)
    p.add_argument("--r-min", type=float, default=10.0)
    p.add_argument("--r-max", type=float, default=1000.0)
    p.add_argument("--grid-points", type=int, default=5)
    p.set_defaults(fn=cmd_rate)

    p = sub.add_parser("solve", help="solve a 1-d nonlocal Dirichlet problem")
    common(p)
    p.add_argument("--domain", default="-1:1", help="comma-separated a:b intervals")
    p.add_argument("--h", type=float, default=1.0 / 128.0)
    p.add_argument("--rhs-const", type=float, default=1.0)
    p.add_argument("--exterior", choices=("zero", "fundamental"), default="zero")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("maxprinciple", help="run the maximum-principle verifiers")
    common(p)
    p.add_argument("--check", choices=("comparison", "hopf", "kslap", "qsmp", "measure", "all"),
                   default="all")
    p.add_argument("--h", type=float, default=1.0 / 32.0)
    p.add_argument("--nu", type=float, default=0.5)
    p.add_argument("--variant", choices=("I", "II"), default="I")
    p.set_defaults(fn=cmd_maxprinciple)

    p = sub.add_parser("check-f", help="check a nonlinearity hypothesis from a spec file")
    common(p)
    p.add_argument("--spec", required=True)
    p.add_argument("--condition", choices=("f2", "f2prime", "f3prime", "f4prime"), required=True)
    p.set_defaults(fn=cmd_check_f)

    p = sub.add_parser("scan", help="run a nonexistence scan over a candidate family")
    common(p)
    p.add_argument("--power", type=float, default=1.4)
    p.add_argument("--family-side", type=int, default=20)
    p.add_argument("--control", action="store_true")
    p.add_argument("--r-min", type=float, default=10.0)
    p.add_argument("--r-max", type=float, default=1e4)
    p.set_defaults(fn=cmd_scan)

    p = sub.add_parser("trace", help="trace the proof quantities along a radius grid")
    common(p)
    p.add_argument("--power", type=float, default=1.4, help="forcing power; 0 disables forcing")
    p.add_argument("--decades", type=float, default=2.0)
    p.set_defaults(fn=cmd_trace)

    p = sub.add_parser("report", help="summarize a JSON report file")
    p.add_argument("file")
    p.set_defaults(fn=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return _EXIT_USAGE if exc.code not in (0,) else 0
    try:
        return args.fn(args)
    except FraccertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
