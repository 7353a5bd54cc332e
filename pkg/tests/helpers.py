"""Shared builders for the test suite: tiny structures, fields, and the
frozen example instances used across modules."""

from fractions import Fraction

from dilogic import formula as fm
from dilogic import integral as di
from dilogic import structure as st

F = Fraction

SIG_P = fm.Signature(predicates=(("P", 1),))
SIG_PQ = fm.Signature(predicates=(("P", 1), ("Q", 1)))


def make_structure(sig, values, dist=None):
    """Structure from per-predicate point->value dicts.

    `values` maps predicate name -> {point: value} (unary only here).
    `dist` maps frozenset({p, q}) -> value; defaults to distance 1
    between distinct points (discrete metric, always 1-Lipschitz).
    """
    first = next(iter(values.values()))
    points = tuple(first)
    d = {}
    for p in points:
        for q in points:
            if p == q:
                d[(p, q)] = F(0)
            else:
                key = frozenset({p, q})
                v = F(1) if dist is None else F(dist[key])
                d[(p, q)] = v
    preds = {
        name: {(p,): F(v) for p, v in table.items()}
        for name, table in values.items()
    }
    return st.ensure_valid(st.FiniteMetricStructure(sig, points, d, preds))


def uniform_space(atoms):
    n = len(atoms)
    return di.FiniteProbabilitySpace(tuple(atoms), {a: F(1, n) for a in atoms})


def atomic_example_field():
    """Two one-point fibers; P integrates to 1/2 on the unique element."""
    m1 = make_structure(SIG_P, {"P": {"p": F(3, 4)}})
    m2 = make_structure(SIG_P, {"P": {"p": F(1, 4)}})
    return di.MeasurableField(uniform_space(("w1", "w2")), {"w1": m1, "w2": m2})


def atomic_example_assignment(field_):
    return {"x": di.element_of(field_, {"w1": "p", "w2": "p"})}


def sup_example_field():
    """sup y.P(y) evaluates to 5/8: best choice picks p at w1 and r at w2."""
    m1 = make_structure(SIG_P, {"P": {"p": F(1), "q": F(0)}})
    m2 = make_structure(SIG_P, {"P": {"r": F(1, 4)}})
    return di.MeasurableField(uniform_space(("w1", "w2")), {"w1": m1, "w2": m2})


def joint_witness_field():
    """One atom, two points with P == 1 and Q = (3/8, 1/2).

    On sup y.sub(P(y), Q(y)) at k = 2 this instance exercises the joint
    profile constraints of the compiled supremum: per-slot bounds alone
    would under-determine the value.
    """
    m = make_structure(
        SIG_PQ,
        {"P": {"p0": F(1), "p1": F(1)}, "Q": {"p0": F(3, 8), "p1": F(1, 2)}},
        dist={frozenset({"p0", "p1"}): F(1, 2)},
    )
    return di.MeasurableField(uniform_space(("w1",)), {"w1": m})


def p_of(v):
    return fm.Atomic("P", (fm.Var(v),))


def q_of(v):
    return fm.Atomic("Q", (fm.Var(v),))
