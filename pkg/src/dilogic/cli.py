"""Command-line front end.

Exit codes: 0 all checks pass, 1 a property violation was found, 2 budget
exceeded or malformed input.  All machine output is JSON with sorted keys
so repeated runs produce identical byte streams.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import family, integral as di, jsonio, mba, structure as st
from . import formula as fm
from . import transform as tr
from . import typei
from .errors import BudgetError, DilogicError

EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2


def _load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _emit(doc, fmt, pretty_text=None):
    if fmt == "pretty" and pretty_text is not None:
        print(pretty_text)
    else:
        print(json.dumps(doc, sort_keys=True, indent=2))


def _parse_with_sig(args):
    sig = jsonio.signature_from_doc(_load_json(args.signature))
    return fm.parse_formula(args.formula, sig), sig


def _load_field(args):
    return jsonio.field_from_doc(_load_json(args.field))


def cmd_transform(args):
    phi, _sig = _parse_with_sig(args)
    phi = fm.rewrite_inf(phi)
    result = tr.transform(phi, args.k, args.budget_c, args.budget_vars)
    _emit(jsonio.transform_result_to_doc(result), args.format,
          jsonio.pretty_transform_result(result))
    return EXIT_PASS


def cmd_eval(args):
    field_ = _load_field(args)
    phi = fm.parse_formula(args.formula, field_.signature)
    assignment = jsonio.assignment_from_doc(
        _load_json(args.assignment) if args.assignment else {}, field_)
    value = di.eval_on_integral(phi, field_, assignment,
                                limit=args.max_choice_functions)
    _emit({"value": jsonio.format_fraction(value)}, args.format,
          jsonio.format_fraction(value))
    return EXIT_PASS


def cmd_check(args):
    field_ = _load_field(args)
    phi = fm.parse_formula(args.formula, field_.signature)
    assignment = jsonio.assignment_from_doc(
        _load_json(args.assignment) if args.assignment else {}, field_)
    report = tr.determination_check(
        phi, args.k, field_, assignment, mode=args.mode,
        budget_c=args.budget_c, budget_vars=args.budget_vars,
        limit=args.max_choice_functions)
    doc = {
        "k": report.k,
        "integral_value": jsonio.format_fraction(report.integral_value),
        "mba_value": jsonio.format_fraction(report.mba_value),
        "ok": report.ok,
        "failures": [
            {"rule": rule, "l": l,
             "integral_value": jsonio.format_fraction(v),
             "mba_value": jsonio.format_fraction(g)}
            for rule, l, v, g in report.failures
        ],
    }
    _emit(doc, args.format,
          f"v = {report.integral_value}, g = {report.mba_value}, "
          f"{'pass' if report.ok else 'FAIL'}")
    return EXIT_PASS if report.ok else EXIT_VIOLATION


def cmd_mba_defin(args):
    alg = jsonio.algebra_from_doc(_load_json(args.algebra))
    phi, psi = mba.simple_definables()
    x1, x2, x3 = (mba.SetVarIndex(n, 0) for n in ("X1", "X2", "X3"))
    bad = []
    zero_pairs = [(a2, b2) for a2 in alg.subsets() for b2 in alg.subsets()
                  if a2 <= b2]
    for a in alg.subsets():
        for b in alg.subsets():
            v = mba.eval_mba(phi, {x1: a, x2: b}, alg)
            exact = min(
                max(alg.d(a, a2), alg.d(b, b2)) for a2, b2 in zero_pairs
            )
            if (v == 0) != (a <= b) or exact > v:
                bad.append(("inclusion", sorted(a), sorted(b)))
            w = mba.eval_mba(psi, {x1: a, x2: b, x3: a & b}, alg)
            if w != 0:
                bad.append(("intersection", sorted(a), sorted(b)))
    doc = {"ok": not bad, "violations": [list(x) for x in bad]}
    _emit(doc, args.format, "pass" if not bad else f"FAIL: {bad[:3]}")
    return EXIT_PASS if not bad else EXIT_VIOLATION


def cmd_mba_monotone(args):
    alg = jsonio.algebra_from_doc(_load_json(args.algebra))
    phi, _sig = _parse_with_sig(args)
    phi = fm.rewrite_inf(phi)
    result = tr.transform(phi, args.k, args.budget_c, args.budget_vars)
    ce = mba.check_monotone(result.g, alg, trials=args.trials, seed=args.seed)
    if ce is None:
        _emit({"ok": True}, args.format, "pass")
        return EXIT_PASS
    doc = {
        "ok": False,
        "low_value": jsonio.format_fraction(ce.low_value),
        "high_value": jsonio.format_fraction(ce.high_value),
    }
    _emit(doc, args.format, f"FAIL: {ce.low_value} > {ce.high_value}")
    return EXIT_VIOLATION


def cmd_mba_dist(args):
    alg = jsonio.algebra_from_doc(_load_json(args.algebra))
    doc = _load_json(args.input)
    chain = [jsonio.subset_from_doc(u, alg) for u in doc["chain"]]
    xs = [jsonio.subset_from_doc(x, alg) for x in doc["tuple"]]
    formula = mba.phi_chain(chain)
    assign = {mba.chain_var("X", m, len(chain)): x for m, x in enumerate(xs)}
    bound = mba.eval_mba(formula, assign, alg)
    dist, witness = mba.dist_to_chain_set(xs, chain, alg)
    out = {
        "phi_value": jsonio.format_fraction(bound),
        "distance": jsonio.format_fraction(dist),
        "witness": [jsonio.subset_to_doc(y, alg) for y in witness],
        "ok": dist <= bound,
    }
    _emit(out, args.format,
          f"phi = {bound}, dist = {dist}, witness = {out['witness']}")
    return EXIT_PASS if dist <= bound else EXIT_VIOLATION


def cmd_typei(args):
    if args.typei_cmd == "rho":
        desc = jsonio.description_from_doc(_load_json(args.desc))
        _emit(jsonio.rho_to_doc(typei.rho(desc)), args.format)
        return EXIT_PASS
    d1 = jsonio.description_from_doc(_load_json(args.left))
    d2 = jsonio.description_from_doc(_load_json(args.right))
    if args.typei_cmd == "equiv":
        same = typei.equiv(d1, d2)
        _emit({"equiv": same}, args.format, "equivalent" if same else "different")
        return EXIT_PASS
    _emit(jsonio.description_to_doc(typei.tensor(d1, d2)), args.format)
    return EXIT_PASS


def cmd_selftest(args):
    checks = {}
    instances = family.determination_instances(args.seed, args.count)
    det_fail = layer_fail = mono_fail = collapse_fail = compl_fail = 0
    for inst in instances:
        phi = fm.rewrite_inf(inst.formula)
        result = tr.transform(phi, inst.k, args.budget_c, args.budget_vars)
        report = tr.determination_check(
            phi, inst.k, inst.field, inst.assignment, result=result)
        if not report.ok:
            det_fail += 1
        if isinstance(phi, (fm.Atomic, fm.Const)):
            low = sum(
                (inst.field.space.measure(
                    di.level_set(phi, inst.field, inst.assignment,
                                 Fraction(i, inst.k)))
                 for i in range(1, inst.k)), Fraction(0)) / inst.k
            if not low <= report.integral_value <= low + Fraction(1, inst.k):
                layer_fail += 1
        if mba.check_monotone(result.g, inst.field.space, trials=10,
                              seed=args.seed, exhaustive_limit=2000) is not None:
            mono_fail += 1
        if mba.contains_supchain(result.g):
            assign = tr.build_level_assignment(result, inst.field, inst.assignment)
            a = mba.eval_mba(result.g, assign, inst.field.space, mba.ENUMERATE)
            b = mba.eval_mba(result.g, assign, inst.field.space, mba.MAXIMAL)
            if a != b:
                collapse_fail += 1
        for zeta in result.formulas:
            if not tr.complement_identity_holds(
                    zeta, result.levels[zeta], inst.field, inst.assignment):
                compl_fail += 1
                break
    checks["determination"] = det_fail
    checks["layer_cake"] = layer_fail
    checks["monotone"] = mono_fail
    checks["sup_collapse"] = collapse_fail
    checks["complement_identity"] = compl_fail
    relabel_fail = 0
    for field_a, field_b, _bij in family.relabel_pairs(args.seed, 10):
        if tr.corollary_equivalence_check(field_a, field_b, family.sentence_suite()):
            relabel_fail += 1
    checks["relabel_agreement"] = relabel_fail
    tensor_fail = 0
    for d1, d1p, d2, d2p in family.description_quadruples(args.seed, 25):
        t = typei.tensor(d1, d2)
        if not (typei.equiv(d1, d1p) and typei.equiv(d2, d2p)
                and typei.equiv(t, typei.tensor(d1p, d2p))
                and typei.equiv(t, typei.tensor(d2, d1))
                and t.total_mass() == 1):
            tensor_fail += 1
    checks["typei_congruence"] = tensor_fail
    ok = not any(checks.values())
    doc = {"ok": ok, "failures": checks, "instances": len(instances),
           "seed": args.seed}
    _emit(doc, args.format,
          ("pass" if ok else "FAIL") + f" ({len(instances)} instances)")
    return EXIT_PASS if ok else EXIT_VIOLATION


def _add_common(p, k=False, budgets=False, fmt=True):
    if k:
        p.add_argument("--k", type=int, default=2)
    if budgets:
        p.add_argument("--budget-c", type=int, default=tr.DEFAULT_BUDGET_C)
        p.add_argument("--budget-vars", type=int, default=tr.DEFAULT_BUDGET_VARS)
    if fmt:
        p.add_argument("--format", choices=["json", "pretty"], default="json")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dilogic",
        description="Formula compiler and exact verifier for direct "
                    "integrals of metric structures.")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("transform", help="compile a formula at precision k")
    p.add_argument("--formula", required=True)
    p.add_argument("--signature", required=True)
    _add_common(p, k=True, budgets=True)
    p.set_defaults(run=cmd_transform)

    p = sub.add_parser("eval", help="evaluate a formula on a direct integral")
    p.add_argument("--formula", required=True)
    p.add_argument("--field", required=True)
    p.add_argument("--assignment")
    p.add_argument("--max-choice-functions", type=int,
                   default=di.DEFAULT_CHOICE_LIMIT)
    _add_common(p)
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("check", help="run the determination check")
    p.add_argument("--formula", required=True)
    p.add_argument("--field", required=True)
    p.add_argument("--assignment")
    p.add_argument("--mode", choices=[mba.ENUMERATE, mba.MAXIMAL],
                   default=mba.MAXIMAL)
    p.add_argument("--max-choice-functions", type=int,
                   default=di.DEFAULT_CHOICE_LIMIT)
    _add_common(p, k=True, budgets=True)
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("mba", help="measure-algebra checks")
    msub = p.add_subparsers(dest="mba_cmd", required=True)
    q = msub.add_parser("defin", help="verify the warm-up definability formulas")
    q.add_argument("--algebra", required=True)
    _add_common(q)
    q.set_defaults(run=cmd_mba_defin)
    q = msub.add_parser("monotone", help="check a transform output is increasing")
    q.add_argument("--formula", required=True)
    q.add_argument("--signature", required=True)
    q.add_argument("--algebra", required=True)
    q.add_argument("--trials", type=int, default=200)
    q.add_argument("--seed", type=int, default=0)
    _add_common(q, k=True, budgets=True)
    q.set_defaults(run=cmd_mba_monotone)
    q = msub.add_parser("dist", help="distance to a chain set, with witness")
    q.add_argument("--algebra", required=True)
    q.add_argument("--input", required=True,
                   help='JSON {"chain": [...], "tuple": [...]}')
    _add_common(q)
    q.set_defaults(run=cmd_mba_dist)

    p = sub.add_parser("typei", help="type-I description calculus")
    tsub = p.add_subparsers(dest="typei_cmd", required=True)
    q = tsub.add_parser("rho", help="canonical invariant table")
    q.add_argument("--desc", required=True)
    _add_common(q)
    q.set_defaults(run=cmd_typei)
    for name in ("equiv", "tensor"):
        q = tsub.add_parser(name)
        q.add_argument("--left", required=True)
        q.add_argument("--right", required=True)
        _add_common(q)
        q.set_defaults(run=cmd_typei)

    p = sub.add_parser("selftest", help="seeded property-suite run")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=34)
    _add_common(p, budgets=True)
    p.set_defaults(budget_vars=family.FAMILY_BUDGET_VARS)
    p.set_defaults(run=cmd_selftest)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except BudgetError as exc:
        print(json.dumps({"error": "budget", "message": str(exc)},
                         sort_keys=True), file=sys.stderr)
        return EXIT_INPUT
    except (DilogicError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(json.dumps({"error": "input", "message": str(exc)},
                         sort_keys=True), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
