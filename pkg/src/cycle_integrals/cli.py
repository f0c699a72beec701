"""Command-line front end.

Exit codes: 0 success, 2 precondition/validation failure (the message
names the failing certificate or field), 3 numerical failure (retry at
higher precision).  Every report embeds the resolved configuration and
seed for reproducibility.
"""

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .config import DEFAULT
from .counting import (classify_alien, count_infinitesimal_zeros,
                       count_tangential_zeros, run_sharpness_experiment)
from .cycles import (Cycle, bound_infinitesimal, bound_simple, bound_tangential,
                     is_asymmetric, regular_at_infinity, symmetry_group)
from .errors import InputError, MalformedReport, NumericalError
from .melnikov import (Instance, brieskorn_dimension, brieskorn_generators,
                       design_g_with_zeros, reduce_deformation)
from .poly import RatPoly
from .serialize import (dump_report, instance_to_dict, load_instance,
                        load_report, parse_fraction_list, parse_poly)
from .tracking import monodromy

ENV_PRECISION = "CYCLE_INTEGRALS_PRECISION_BITS"


def _add_common(parser):
    parser.add_argument("--output", help="write the JSON report here instead of stdout")
    parser.add_argument("--seed", type=int, default=None, help="random seed override")
    parser.add_argument("--precision-bits", type=int, default=None,
                        help="force extended precision (mantissa bits)")
    parser.add_argument("--tol-root", type=float, default=None)
    parser.add_argument("--tol-cluster", type=float, default=None)
    parser.add_argument("--tol-fit", type=float, default=None)
    parser.add_argument("--degree-cap", type=int, default=None)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cycle-integrals",
        description="Count and certify zeros of abelian integrals and "
                    "displacement functions on zero-cycles. Cycle weights "
                    "are interpreted against the fiber ordered "
                    "lexicographically by (re, im) at the basepoint.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tangential", help="count zeros of the first-order integral")
    p.add_argument("--instance", required=True)
    _add_common(p)

    p = sub.add_parser("infinitesimal", help="count zeros of the displacement")
    p.add_argument("--instance", required=True)
    p.add_argument("--epsilon", help="override the instance epsilon (rational)")
    _add_common(p)

    p = sub.add_parser("alien", help="classify displacement zeros as regular or alien")
    p.add_argument("--instance", required=True)
    p.add_argument("--schedule", required=True,
                   help="decreasing epsilon list, e.g. 1/50,1/100,1/200")
    _add_common(p)

    p = sub.add_parser("bounds", help="closed-form sharp bounds for degrees (m, n)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("certify-cycle", help="symmetry and infinity certificates")
    p.add_argument("--cycle", required=True, help="JSON integer array")
    p.add_argument("--n", type=int, required=True, help="deformation degree")
    _add_common(p)

    p = sub.add_parser("reduce", help="strip multiples of powers of f from g")
    p.add_argument("--f", required=True, help="JSON coefficient array, ascending")
    p.add_argument("--g", required=True)
    _add_common(p)

    p = sub.add_parser("monodromy", help="fiber permutations around critical values")
    p.add_argument("--f", required=True)
    p.add_argument("--basepoint", help="complex basepoint 're,im'")
    p.add_argument("--real-order", action="store_true",
                   help="order an all-real fiber increasingly")
    _add_common(p)

    p = sub.add_parser("brieskorn", help="dimension and generators of the modulus")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--f", help="JSON coefficient array (for explicit generators)")
    _add_common(p)

    p = sub.add_parser("design-g", help="deformation with prescribed integral zeros")
    p.add_argument("--f", required=True)
    p.add_argument("--cycle", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--targets", required=True,
                   help="comma-separated complex targets, e.g. 1,2 or 1+2j")
    _add_common(p)

    p = sub.add_parser("experiment", help="randomized sharpness suite")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", choices=["tangential", "infinitesimal"],
                   default="tangential")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--cycle-mode", choices=["generic", "simple"], default="generic")
    p.add_argument("--epsilon", default="1/100")
    _add_common(p)

    p = sub.add_parser("plot-data", help="point sets from a prior report")
    p.add_argument("--report", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_common(p)
    return parser


def _resolve_settings(args, instance_bits=None):
    bits = args.precision_bits
    if bits is None and os.environ.get(ENV_PRECISION):
        try:
            bits = int(os.environ[ENV_PRECISION])
        except ValueError as exc:
            raise InputError(f"bad {ENV_PRECISION} value") from exc
    if bits is None:
        bits = instance_bits
    overrides = {}
    if bits is not None:
        overrides["precision_bits"] = bits
    for field, flag in (("tol_root", "tol_root"), ("tol_cluster", "tol_cluster"),
                        ("tol_fit", "tol_fit"), ("degree_cap", "degree_cap")):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field] = value
    return DEFAULT.with_overrides(**overrides)


def _emit(args, payload, settings, seed):
    payload["config"] = settings.as_dict()
    payload["seed"] = seed
    text = dump_report(payload, args.output)
    if args.output is None:
        print(text)
    return 0


def _json_array(text, field):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{field} must be a JSON array: {exc}") from exc
    if not isinstance(data, list):
        raise InputError(f"{field} must be a JSON array")
    return data


def _parse_complex_list(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        if part:
            try:
                out.append(complex(part))
            except ValueError as exc:
                raise InputError(f"bad complex target {part!r}") from exc
    return out


def _cmd_tangential(args):
    inst, seed, bits = load_instance(args.instance)
    if args.seed is not None:
        seed = args.seed
    settings = _resolve_settings(args, bits)
    report = count_tangential_zeros(inst, settings)
    payload = {"command": "tangential",
               "instance": instance_to_dict(inst, seed, bits),
               "result": report.as_dict()}
    return _emit(args, payload, settings, seed)


def _cmd_infinitesimal(args):
    inst, seed, bits = load_instance(args.instance)
    if args.seed is not None:
        seed = args.seed
    if args.epsilon is not None:
        from dataclasses import replace
        inst = replace(inst, epsilon=Fraction(args.epsilon))
    settings = _resolve_settings(args, bits)
    report = count_infinitesimal_zeros(inst, settings)
    payload = {"command": "infinitesimal",
               "instance": instance_to_dict(inst, seed, bits),
               "result": report.as_dict()}
    return _emit(args, payload, settings, seed)


def _cmd_alien(args):
    inst, seed, bits = load_instance(args.instance)
    if args.seed is not None:
        seed = args.seed
    schedule = parse_fraction_list(args.schedule)
    settings = _resolve_settings(args, bits)
    if inst.epsilon is None:
        from dataclasses import replace
        inst = replace(inst, epsilon=schedule[-1])
    report = classify_alien(inst, schedule, settings)
    payload = {"command": "alien",
               "instance": instance_to_dict(inst, seed, bits),
               "result": report.as_dict()}
    return _emit(args, payload, settings, seed)


def _cmd_bounds(args):
    settings = _resolve_settings(args)
    payload = {"command": "bounds", "m": args.m, "n": args.n,
               "result": {"tangential": bound_tangential(args.m, args.n),
                          "infinitesimal": bound_infinitesimal(args.m, args.n),
                          "simple": bound_simple(args.m, args.n)}}
    return _emit(args, payload, settings, args.seed or 0)


def _cmd_certify(args):
    settings = _resolve_settings(args)
    weights = _json_array(args.cycle, "--cycle")
    cycle = Cycle(weights)
    cert = regular_at_infinity(cycle, args.n, settings)
    group = symmetry_group(cycle, settings)
    payload = {"command": "certify-cycle",
               "cycle": list(cycle.weights), "n": args.n,
               "result": {"certificate": cert.as_dict(),
                          "symmetry_order": group.order,
                          "is_simple": cycle.is_simple,
                          "is_asymmetric": is_asymmetric(cycle, settings)}}
    return _emit(args, payload, settings, args.seed or 0)


def _cmd_reduce(args):
    settings = _resolve_settings(args)
    f = parse_poly(_json_array(args.f, "--f"), "f")
    g = parse_poly(_json_array(args.g, "--g"), "g")
    g_tilde, subtracted = reduce_deformation(f, g)
    payload = {"command": "reduce",
               "result": {"g_tilde": [str(c) for c in g_tilde.coeffs],
                          "degree": g_tilde.degree,
                          "subtracted": [{"coefficient": str(a), "power": k}
                                         for a, k in subtracted]}}
    return _emit(args, payload, settings, args.seed or 0)


def _cmd_monodromy(args):
    settings = _resolve_settings(args)
    f = parse_poly(_json_array(args.f, "--f"), "f")
    basepoint = None
    if args.basepoint:
        re, im = (args.basepoint.split(",") + ["0"])[:2]
        basepoint = complex(float(re), float(im))
    rep = monodromy(f, settings, basepoint=basepoint,
                    ordering="real" if args.real_order else "lex")
    payload = {"command": "monodromy", "f": [str(c) for c in f.coeffs],
               "result": rep.as_dict()}
    return _emit(args, payload, settings, args.seed or 0)


def _cmd_brieskorn(args):
    settings = _resolve_settings(args)
    result = {}
    if args.f:
        f = parse_poly(_json_array(args.f, "--f"), "f")
        if args.m is not None and args.m != f.degree:
            raise InputError("--m disagrees with deg f")
        basis = brieskorn_generators(f, args.n)
        result["dimension"] = basis.dimension
        result["generators"] = [[str(c) for c in gen.coeffs]
                                for gen in basis.generators]
        result["generator_degrees"] = [gen.degree for gen in basis.generators]
        m = f.degree
    else:
        if args.m is None:
            raise InputError("brieskorn needs --m or --f")
        m = args.m
        result["dimension"] = brieskorn_dimension(m, args.n)
    payload = {"command": "brieskorn", "m": m, "n": args.n, "result": result}
    return _emit(args, payload, settings, args.seed or 0)


def _cmd_design(args):
    settings = _resolve_settings(args)
    f = parse_poly(_json_array(args.f, "--f"), "f")
    cycle = Cycle(_json_array(args.cycle, "--cycle"))
    targets = _parse_complex_list(args.targets)
    g = design_g_with_zeros(f, cycle, targets, args.n, settings=settings)
    payload = {"command": "design-g",
               "result": {"g": [[repr(c.real), repr(c.imag)] for c in g.coeffs],
                          "targets": [[repr(t.real), repr(t.imag)] for t in targets],
                          "dimension": brieskorn_dimension(f.degree, args.n)}}
    return _emit(args, payload, settings, args.seed or 0)


def _cmd_experiment(args):
    settings = _resolve_settings(args)
    seed = args.seed if args.seed is not None else 0
    summary = run_sharpness_experiment(
        args.m, args.n, args.kind, args.trials, seed,
        cycle_mode=args.cycle_mode, epsilon=Fraction(args.epsilon),
        settings=settings)
    payload = {"command": "experiment", "result": summary}
    return _emit(args, payload, settings, seed)


def _plot_rows(report):
    command = report.get("command")
    result = report.get("result")
    if not isinstance(result, dict):
        raise MalformedReport("report has no result object")
    if command in ("tangential", "infinitesimal"):
        rows = [(float(z["t"][0]), float(z["t"][1]), z["multiplicity"], "regular")
                for z in result.get("distinct_regular_zeros", [])]
        rows += [(float(t[0]), float(t[1]), 0, "excluded")
                 for t in result.get("excluded_near_critical", [])]
        return ["re_t", "im_t", "multiplicity", "class"], rows
    if command == "alien":
        header = ["branch", "epsilon", "re_t", "im_t", "class"]
        rows = []
        for idx, branch in enumerate(result.get("branches", [])):
            eps = report["result"]["epsilon_schedule"]
            traj = branch["trajectory"]
            offset = len(eps) - len(traj)
            for k, point in enumerate(traj):
                rows.append((idx, eps[offset + k], float(point[0]),
                             float(point[1]), branch["class"]))
        return header, rows
    raise MalformedReport(f"no plot data for command {command!r}")


def _cmd_plot_data(args):
    settings = _resolve_settings(args)
    report = load_report(args.report)
    header, rows = _plot_rows(report)
    if args.format == "json":
        payload = {"command": "plot-data",
                   "result": {"header": header,
                              "rows": [list(r) for r in rows]}}
        return _emit(args, payload, settings, args.seed or 0)
    lines = [",".join(header)]
    lines += [",".join(str(v) for v in row) for row in rows]
    text = "\n".join(lines)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    return 0


_COMMANDS = {
    "tangential": _cmd_tangential,
    "infinitesimal": _cmd_infinitesimal,
    "alien": _cmd_alien,
    "bounds": _cmd_bounds,
    "certify-cycle": _cmd_certify,
    "reduce": _cmd_reduce,
    "monodromy": _cmd_monodromy,
    "brieskorn": _cmd_brieskorn,
    "design-g": _cmd_design,
    "experiment": _cmd_experiment,
    "plot-data": _cmd_plot_data,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}\n"
              "hint: retry with --precision-bits 200 or a finer schedule",
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
