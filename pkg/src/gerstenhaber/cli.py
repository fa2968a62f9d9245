"""Command-line front end.

Exit status: 0 when every residual vanishes, 1 on a verification failure,
2 on unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import serialize as S
from .algebroid import validate_algebroid
from .differentials import base_field, check_qlb, is_differential, twist, NotAlternating
from .exterior import Frame
from .hamiltonian import PreconditionFailed, check_hamiltonian, twisted_poisson_qlb
from .lifts import complete_lift, gauge_lift, linear_lift, vertical_lift
from .manin import (compare_base_field_pi_S, double, extract_qlb, reassemble, transformation_qlb, validate_quasi_triple,
                    PatternViolation)
from .pointcheck import (DEFAULT_FD_STEP, DEFAULT_FD_TOL, DEFAULT_TOL, PointedMultivector,
                         Subspace, is_coisotropic, graph_multiplicativity_check)
from .report import Report, VerificationError
from .scalars import ParseError, UnknownVariable, VarSet


class InputError(Exception):
    pass


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get("GERSTENHABER_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"GERSTENHABER_SEED must be an integer, got {env!r}") from None
    return 0


# -- commands: each returns (report, result-json-or-None) -------------------------

def cmd_validate_algebroid(args):
    A = S.algebroid_from_json(_load(args.file))
    return validate_algebroid(A), None


def cmd_check_differential(args):
    delta = S.differential_from_json(_load(args.file))
    return is_differential(delta), None


def cmd_check_qlb(args):
    q = S.qlb_from_json(_load(args.file))
    return check_qlb(q.delta, q.omega), None


def cmd_twist(args):
    q = S.qlb_from_json(_load(args.file))
    t = S.multivector_from_json(_load(args.t), q.algebroid.frame)
    rep = Report("twist")
    out = twist(q, t)
    rep.extend(check_qlb(out.delta, out.omega), "twisted.")
    if args.then_negate:
        out = twist(out, -t)
        rep.add("untwist identity", 0 if out == q else "differs")
    return rep, S.qlb_to_json(out)


def cmd_base_field(args):
    delta = S.differential_from_json(_load(args.file))
    rep = Report("base-field")
    try:
        field = base_field(delta)
    except NotAlternating as exc:
        return exc.report, None
    rep.add("alternating", 0)
    return rep, S.multivector_to_json(field)


def cmd_lift(args):
    data = _load(args.file)
    if args.kind == "linear":
        delta = S.differential_from_json(data)
        pi = linear_lift(delta)
    else:
        A = S.algebroid_from_json(S._need(data, "algebroid", "lift input"))
        P = S.multivector_from_json(S._need(data, "section", "lift input"), A.frame)
        if args.kind == "complete":
            pi = complete_lift(A, P)
        elif args.kind == "vertical":
            pi = vertical_lift(A, P)
        else:
            pi = gauge_lift(A, P, args.time)
    out = S.multivector_to_json(pi)
    out["frame"] = list(pi.frame.names)
    return Report(f"lift-{args.kind}"), out


def cmd_manin_extract(args):
    T = S.triple_from_json(_load(args.file))
    rep = validate_quasi_triple(T)
    if not rep.passed:
        return rep, None
    b = extract_qlb(T)
    return rep, S.bialgebra_to_json(b)


def cmd_double(args):
    g = S.quadratic_from_json(_load(args.file))
    T = double(g)
    rep = validate_quasi_triple(T)
    return rep, S.triple_to_json(T)


def cmd_transformation_qlb(args):
    data = _load(args.file)
    T = S.triple_from_json(S._need(data, "triple", "transformation-qlb input"))
    b = extract_qlb(T)
    act = S.action_from_json(S._need(data, "action", "transformation-qlb input"), T.d)
    act = act.rebase(T.g_basis + T.h_basis, reassemble(b).d)
    q, rep = transformation_qlb(b, act)
    try:
        rep.extend(compare_base_field_pi_S(q, b, act))
    except NotAlternating as exc:
        rep.extend(exc.report)
    return rep, S.qlb_to_json(q)


def cmd_twisted_poisson(args):
    data = _load(args.file)
    coords = list(S._need(data, "coords", "twisted-poisson input"))
    vs = VarSet(coords)
    frame = Frame.tangent(vs, coords)
    pi = S.multivector_from_json(S._need(data, "pi", "twisted-poisson input"), frame)
    phi = S.multivector_from_json(S._need(data, "phi", "twisted-poisson input"), frame.dual())
    try:
        q, rep = twisted_poisson_qlb(pi, phi)
    except PreconditionFailed as exc:
        return exc.report, None
    return rep, S.qlb_to_json(q)


def cmd_check_hamiltonian(args):
    data = _load(args.file)
    q = S.qlb_from_json(S._need(data, "qlb", "check-hamiltonian input"))
    coords = list(S._need(data, "coords", "check-hamiltonian input"))
    vs = VarSet(coords + [v for v in data.get("params", [])])
    frame = Frame.tangent(vs, coords)
    fields = [S.multivector_from_json(f, frame) for f in S._need(data, "fields", "check-hamiltonian input")]
    J = [S.parse_coef(j, vs) for j in S._need(data, "J", "check-hamiltonian input")]
    Pi = S.multivector_from_json(S._need(data, "Pi_X", "check-hamiltonian input"), frame)
    return check_hamiltonian(q, fields, J, Pi), None


def cmd_coisotropy(args):
    data = _load(args.file)
    d = S._need(data, "dim", "coisotropy input")
    k = S._need(data, "degree", "coisotropy input")
    comps = {tuple(i - 1 for i in t["idx"]): float(t["coef"]) for t in data.get("terms", [])}
    Pi = PointedMultivector.from_components(d, k, comps)
    W = Subspace(np.array(S._need(data, "subspace", "coisotropy input"), dtype=float).T, d)
    tol = args.tol if args.tol is not None else data.get("tolerance", DEFAULT_TOL)
    res = is_coisotropic(Pi, W, tol)
    rep = Report("coisotropy", tolerance=tol)
    rep.add_numeric("max |Pi(annihilator)| / |Pi|", res.max_residual / max(res.scale, 1e-300), tol)
    return rep, None


def cmd_groupoid_sample(args):
    from .groupoids import GROUPS, GxGGroupoid, GroupoidChartSample, quasi_poisson_residual
    data = _load(args.file)
    group = S._need(data, "group", "sample set")
    if group not in GROUPS:
        raise InputError(f"unknown group {group!r}; expected one of {sorted(GROUPS)}")
    seed = args.seed if args.seed is not None else data.get("seed", resolve_seed(None))
    count = args.count if args.count is not None else data.get("count", 20)
    tol = args.tol if args.tol is not None else data.get("tolerance", DEFAULT_TOL)
    h = args.fd_step if args.fd_step is not None else data.get("fd_step", DEFAULT_FD_STEP)
    model = GxGGroupoid(GROUPS[group](), flip=bool(data.get("flip", False)),
                        scale=float(data.get("scale", 1.0)))
    rng = np.random.default_rng(seed)
    rep = Report(f"groupoid-sample {group}", tolerance=tol)
    rep.flags["seed"] = seed
    worst = 0.0
    for n in range(count):
        sample = GroupoidChartSample.draw(model, rng)
        r = graph_multiplicativity_check(sample, 2, tol, h)
        worst = max(worst, r.flags.get("max_residual", 0.0))
        for e in r.entries:
            rep.entries.append(dict(e, label=f"sample {n + 1}: {e['label']}"))
    rep.flags["max_multiplicativity_residual"] = worst
    if data.get("quasi_poisson", True):
        for n in range(min(count, 10)):
            arrow = model.random_composable(rng)[1]
            val, fd = quasi_poisson_residual(model, arrow, h, DEFAULT_FD_TOL)
            rep.add_numeric(f"point {n + 1}: 1/2[Pi,Pi] - (Omega-> - <-Omega)", val, DEFAULT_FD_TOL)
            rep.add_numeric(f"point {n + 1}: Richardson estimate", fd.error_estimate, 10 * DEFAULT_FD_TOL)
    return rep, None


COMMANDS = {
    "validate-algebroid": cmd_validate_algebroid,
    "check-differential": cmd_check_differential,
    "check-qlb": cmd_check_qlb,
    "twist": cmd_twist,
    "base-field": cmd_base_field,
    "lift": cmd_lift,
    "manin-extract": cmd_manin_extract,
    "double": cmd_double,
    "transformation-qlb": cmd_transformation_qlb,
    "twisted-poisson": cmd_twisted_poisson,
    "check-hamiltonian": cmd_check_hamiltonian,
    "coisotropy": cmd_coisotropy,
    "groupoid-sample": cmd_groupoid_sample,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gerstenhaber", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=None,
                        help="random seed (default: $GERSTENHABER_SEED, else 0)")
    common.add_argument("-o", "--output", help="write the result object (canonical JSON) to this file")
    common.add_argument("--verbose", action="store_true", help="list every residual, not only failures")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "lift":
            sp.add_argument("kind", choices=["linear", "complete", "vertical", "gauge"])
            sp.add_argument("--time", default="t", help="time variable for the gauge lift")
        sp.add_argument("file")
        if name == "twist":
            sp.add_argument("--t", required=True, help="bivector section (multivector JSON)")
            sp.add_argument("--then-negate", action="store_true", help="twist back by -t afterwards")
        if name in ("coisotropy", "groupoid-sample"):
            sp.add_argument("--tol", type=float, default=None)
        if name == "groupoid-sample":
            sp.add_argument("--count", type=int, default=None)
            sp.add_argument("--fd-step", type=float, default=None)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, result = COMMANDS[args.command](args)
    except (InputError, S.SchemaError, ParseError, UnknownVariable, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (VerificationError, PatternViolation) as exc:
        rep = getattr(exc, "report", None)
        if args.json:
            print(S.canonical({"report": rep.to_dict() if rep else {"name": args.command, "passed": False,
                                                                   "entries": [], "error": str(exc)}}), end="")
        else:
            print(rep.table() if rep else f"verification failed: {exc}")
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.output and result is not None:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(S.canonical(result))
    if args.json:
        doc = {"report": report.to_dict()}
        if result is not None:
            doc["result"] = result
        print(S.canonical(doc), end="")
    else:
        print(report.table(show_all=args.verbose))
        if result is not None and not args.output:
            print(S.canonical(result), end="")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
