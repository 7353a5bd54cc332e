"""Measure-algebra formulas: evaluation, constrained suprema, monotonicity,
and the definability formulas with their distance oracles."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs

from dilogic import mba
from dilogic.errors import ChainError, EvaluationError, ValidationError

F = Fraction

UNIFORM2 = mba.FiniteMeasureAlgebra(("w1", "w2"), {"w1": F(1, 2), "w2": F(1, 2)})
UNIFORM3 = mba.FiniteMeasureAlgebra(
    ("w1", "w2", "w3"), {"w1": F(1, 3), "w2": F(1, 3), "w3": F(1, 3)}
)


def s(*atoms):
    return frozenset(atoms)


# ---------------------------------------------------------------------------
# Algebra basics


def test_algebra_validation():
    with pytest.raises(ValidationError):
        mba.FiniteMeasureAlgebra(("a",), {"a": F(1, 2)})
    with pytest.raises(ValidationError):
        mba.FiniteMeasureAlgebra(("a", "b"), {"a": F(1), "b": F(0)})
    with pytest.raises(ValidationError):
        mba.FiniteMeasureAlgebra(("a", "a"), {"a": F(1)})


def test_measure_additivity_exhaustive():
    alg = UNIFORM3
    for a in alg.subsets():
        for b in alg.subsets():
            assert alg.measure(a | b) + alg.measure(a & b) == alg.measure(
                a
            ) + alg.measure(b)


def test_symmetric_difference_metric_axioms():
    alg = UNIFORM3
    subsets = list(alg.subsets())
    for a in subsets:
        assert alg.d(a, a) == 0
        for b in subsets:
            assert alg.d(a, b) == alg.d(b, a)
            assert (alg.d(a, b) == 0) == (a == b)
            for c in subsets:
                assert alg.d(a, c) <= alg.d(a, b) + alg.d(b, c)


@given(hs.integers(0, 7), hs.integers(0, 7))
@settings(max_examples=64, deadline=None)
def test_weighted_measure_additivity(m1, m2):
    alg = mba.FiniteMeasureAlgebra(
        ("a", "b", "c"), {"a": F(1, 2), "b": F(1, 3), "c": F(1, 6)}
    )
    atoms = alg.atoms
    a = frozenset(x for i, x in enumerate(atoms) if m1 >> i & 1)
    b = frozenset(x for i, x in enumerate(atoms) if m2 >> i & 1)
    assert alg.measure(a | b) + alg.measure(a & b) == alg.measure(a) + alg.measure(b)


# ---------------------------------------------------------------------------
# Set terms and plain formulas


def test_eval_set_operations():
    alg = UNIFORM3
    x = mba.SetVarIndex("X", 0)
    y = mba.SetVarIndex("Y", 0)
    assign = {x: s("w1", "w2"), y: s("w2", "w3")}
    vx, vy = mba.SetVar(x), mba.SetVar(y)
    assert mba.eval_set(mba.Union(vx, vy), assign, alg) == s("w1", "w2", "w3")
    assert mba.eval_set(mba.Inter(vx, vy), assign, alg) == s("w2")
    assert mba.eval_set(mba.Diff(vx, vy), assign, alg) == s("w1")
    assert mba.eval_set(mba.SymDiff(vx, vy), assign, alg) == s("w1", "w3")
    assert mba.eval_set(mba.Compl(vx), assign, alg) == s("w3")
    assert mba.eval_set(mba.Compl(mba.Compl(vx)), assign, alg) == s("w1", "w2")
    assert mba.eval_set(mba.Empty(), assign, alg) == s()
    assert mba.eval_set(mba.Full(), assign, alg) == alg.full


def test_eval_measure_of_variable():
    v = mba.SetVarIndex("X", 0)
    g = mba.Measure(mba.SetVar(v))
    assert mba.eval_mba(g, {v: s("w1")}, UNIFORM2) == F(1, 2)


def test_eval_truncation():
    g = mba.TruncSub(mba.Const(F(1, 4)), mba.Const(F(1, 2)))
    assert mba.eval_mba(g, {}, UNIFORM2) == 0


def test_eval_unbound_variable():
    g = mba.Measure(mba.SetVar(mba.SetVarIndex("X", 0)))
    with pytest.raises(EvaluationError):
        mba.eval_mba(g, {}, UNIFORM2)


def test_eval_scale_add_max_min():
    g = mba.Scale(
        F(1, 2),
        mba.Add(
            mba.Max((mba.Const(F(1, 4)), mba.Const(F(1, 2)))),
            mba.Min((mba.Const(F(1, 4)), mba.Const(F(1, 2)))),
        ),
    )
    assert mba.eval_mba(g, {}, UNIFORM2) == F(3, 8)


# ---------------------------------------------------------------------------
# SupChain evaluation


def test_supchain_single_slot_both_modes():
    u = mba.SetVarIndex("U", 0)
    g = mba.SupChain(
        binder=0,
        chains=(mba.ChainSpec("T", (mba.SetVar(u),)),),
        inner=mba.Measure(mba.ChainVar(0, "T", 0)),
    )
    assign = {u: s("w1")}
    assert mba.eval_mba(g, assign, UNIFORM2, mba.ENUMERATE) == F(1, 2)
    assert mba.eval_mba(g, assign, UNIFORM2, mba.MAXIMAL) == F(1, 2)


def test_supchain_nesting_constraint():
    # Y_1 must sit inside Y_0, so mu(Y_1) cannot beat mu(U_0 & U_1).
    u0 = mba.SetVarIndex("U", 0)
    u1 = mba.SetVarIndex("U", F(1, 2))
    g = mba.SupChain(
        binder=0,
        chains=(mba.ChainSpec("T", (mba.SetVar(u0), mba.SetVar(u1))),),
        inner=mba.Measure(mba.ChainVar(0, "T", 1)),
    )
    assign = {u0: s("w1", "w2"), u1: s("w1")}
    assert mba.eval_mba(g, assign, UNIFORM2, mba.ENUMERATE) == F(1, 2)
    assert mba.eval_mba(g, assign, UNIFORM2, mba.MAXIMAL) == F(1, 2)


def test_supchain_maximal_requires_decreasing_bounds():
    u0 = mba.SetVarIndex("U", 0)
    u1 = mba.SetVarIndex("U", F(1, 2))
    g = mba.SupChain(
        binder=0,
        chains=(mba.ChainSpec("T", (mba.SetVar(u0), mba.SetVar(u1))),),
        inner=mba.Measure(mba.ChainVar(0, "T", 1)),
    )
    assign = {u0: s("w1"), u1: s("w2")}
    with pytest.raises(ChainError):
        mba.eval_mba(g, assign, UNIFORM2, mba.MAXIMAL)
    # Enumeration still works: the nesting forces Y_1 = {}.
    assert mba.eval_mba(g, assign, UNIFORM2, mba.ENUMERATE) == 0


def test_supchain_profile_constraint():
    # Two independent slots, but the profile forbids them from jointly
    # containing any atom; the sum of measures then caps at 1.
    a0 = mba.SetVarIndex("A", 0)
    b0 = mba.SetVarIndex("B", 0)
    inner = mba.Add(
        mba.Measure(mba.ChainVar(0, "A", 0)), mba.Measure(mba.ChainVar(0, "B", 0))
    )
    profile = mba.ProfileSpec((("A", 0), ("B", 0)), mba.Empty())
    g = mba.SupChain(
        binder=0,
        chains=(
            mba.ChainSpec("A", (mba.SetVar(a0),)),
            mba.ChainSpec("B", (mba.SetVar(b0),)),
        ),
        inner=inner,
        profiles=(profile,),
    )
    unconstrained = mba.SupChain(g.binder, g.chains, g.inner)
    assign = {a0: alg_full(UNIFORM2), b0: alg_full(UNIFORM2)}
    assert mba.eval_mba(unconstrained, assign, UNIFORM2, mba.ENUMERATE) == 2
    for mode in (mba.ENUMERATE, mba.MAXIMAL):
        assert mba.eval_mba(g, assign, UNIFORM2, mode) == 1


def alg_full(alg):
    return alg.full


def test_supchain_profile_modes_agree_exhaustively():
    # Increasing inner + decreasing chains: staircase substitution must
    # match exhaustive enumeration for every assignment of the bounds.
    a0 = mba.SetVarIndex("A", 0)
    b0 = mba.SetVarIndex("B", 0)
    w = mba.SetVarIndex("W", 0)
    inner = mba.Add(
        mba.Measure(mba.ChainVar(0, "A", 0)),
        mba.Scale(F(1, 2), mba.Measure(mba.ChainVar(0, "B", 0))),
    )
    g = mba.SupChain(
        binder=0,
        chains=(
            mba.ChainSpec("A", (mba.SetVar(a0),)),
            mba.ChainSpec("B", (mba.SetVar(b0),)),
        ),
        inner=inner,
        profiles=(mba.ProfileSpec((("A", 0), ("B", 0)), mba.SetVar(w)),),
    )
    subsets = list(UNIFORM2.subsets())
    for va, vb, vw in itertools.product(subsets, repeat=3):
        assign = {a0: va, b0: vb, w: vw}
        assert mba.eval_mba(g, assign, UNIFORM2, mba.ENUMERATE) == mba.eval_mba(
            g, assign, UNIFORM2, mba.MAXIMAL
        )


def test_supchain_profile_validation():
    g = mba.SupChain(
        binder=0,
        chains=(mba.ChainSpec("A", (mba.Full(),)),),
        inner=mba.Measure(mba.ChainVar(0, "A", 0)),
        profiles=(mba.ProfileSpec((("missing", 0),), mba.Empty()),),
    )
    with pytest.raises(EvaluationError):
        mba.eval_mba(g, {}, UNIFORM2, mba.ENUMERATE)


def test_free_set_vars_sees_profile_bounds():
    w = mba.SetVarIndex("W", 0)
    g = mba.SupChain(
        binder=0,
        chains=(mba.ChainSpec("A", (mba.Full(),)),),
        inner=mba.Measure(mba.ChainVar(0, "A", 0)),
        profiles=(mba.ProfileSpec((("A", 0),), mba.SetVar(w)),),
    )
    assert mba.free_set_vars(g) == {w}
    substituted = mba.substitute_set_vars(g, {w: mba.Empty()})
    assert mba.free_set_vars(substituted) == set()


def test_value_bound():
    g = mba.Add(mba.Measure(mba.Full()), mba.Scale(F(1, 2), mba.Const(F(1, 2))))
    assert mba.value_bound(g) == F(5, 4)


# ---------------------------------------------------------------------------
# Monotonicity checking


def test_monotone_measure_passes():
    v = mba.SetVarIndex("X", 0)
    g = mba.Measure(mba.SetVar(v))
    assert mba.check_monotone(g, UNIFORM3) is None


def test_monotone_complement_fails():
    v = mba.SetVarIndex("X", 0)
    g = mba.Measure(mba.Compl(mba.SetVar(v)))
    ce = mba.check_monotone(g, UNIFORM3)
    assert ce is not None
    assert ce.low_value > ce.high_value


def test_monotone_random_mode_finds_complement():
    v = mba.SetVarIndex("X", 0)
    g = mba.Measure(mba.Compl(mba.SetVar(v)))
    ce = mba.check_monotone(g, UNIFORM3, trials=50, exhaustive=False)
    assert ce is not None


# ---------------------------------------------------------------------------
# Chain-set definability formulas


def test_phi_chain_worked_example():
    alg = UNIFORM3
    bounds = [s("w1", "w2", "w3"), s("w1")]
    xs = [s("w2", "w3"), s("w2")]
    phi = mba.phi_chain(bounds)
    assign = {mba.chain_var("X", m, 2): x for m, x in enumerate(xs)}
    assert mba.eval_mba(phi, assign, alg) == F(1, 3)
    dist, witness = mba.dist_to_chain_set(xs, bounds, alg)
    assert dist == F(1, 3)
    # First nearest witness in enumeration order.
    assert witness == (s("w2"), s())
    assert alg.d_tuple(xs, witness) == dist


def test_phi_chain_zero_on_members():
    alg = UNIFORM3
    bounds = [s("w1", "w2"), s("w1")]
    xs = list(bounds)  # the chain itself is a member of its chain set
    phi = mba.phi_chain(bounds)
    assign = {mba.chain_var("X", m, 2): x for m, x in enumerate(xs)}
    assert mba.eval_mba(phi, assign, alg) == 0
    dist, _ = mba.dist_to_chain_set(xs, bounds, alg)
    assert dist == 0


def test_phi_chain_full_bound_unconstrained():
    alg = UNIFORM3
    bounds = [alg.full]
    phi = mba.phi_chain(bounds)
    for x in alg.subsets():
        assign = {mba.chain_var("X", 0, 1): x}
        assert mba.eval_mba(phi, assign, alg) == 0
        dist, _ = mba.dist_to_chain_set([x], bounds, alg)
        assert dist == 0


def test_phi_chain_requires_decreasing():
    with pytest.raises(ChainError):
        mba.phi_chain([s("w1"), s("w2")])
    with pytest.raises(ChainError):
        mba.phi_chain([])


def test_dist_length_mismatch():
    with pytest.raises(ChainError):
        mba.dist_to_chain_set([s("w1")], [s("w1"), s("w1")], UNIFORM3)


def test_psi_multichain_two_tags():
    alg = UNIFORM3
    chains = {"A": [s("w1", "w2")], "B": [s("w3")]}
    psi = mba.psi_multichain(chains)
    assign = {
        mba.chain_var("A", 0, 1): s("w1"),   # inside chain set of A
        mba.chain_var("B", 0, 1): s("w1"),   # outside chain set of B
    }
    phi_b = mba.phi_chain(chains["B"], tag="B")
    expected = mba.eval_mba(
        phi_b, {mba.chain_var("B", 0, 1): s("w1")}, alg
    )
    assert mba.eval_mba(psi, assign, alg) == expected == F(1, 3)
    # Both inside: zero.
    assign_ok = {
        mba.chain_var("A", 0, 1): s("w2"),
        mba.chain_var("B", 0, 1): s("w3"),
    }
    assert mba.eval_mba(psi, assign_ok, alg) == 0


def test_psi_multichain_single_tag_equals_phi():
    alg = UNIFORM3
    chains = {"A": [s("w1", "w2"), s("w1")]}
    psi = mba.psi_multichain(chains)
    phi = mba.phi_chain(chains["A"], tag="A")
    for x0 in alg.subsets():
        for x1 in alg.subsets():
            assign = {
                mba.chain_var("A", 0, 2): x0,
                mba.chain_var("A", 1, 2): x1,
            }
            assert mba.eval_mba(psi, assign, alg) == mba.eval_mba(phi, assign, alg)


# ---------------------------------------------------------------------------
# Warm-up definability formulas


def test_simple_definables_examples():
    alg = UNIFORM2
    phi, psi = mba.simple_definables()
    x1, x2, x3 = (mba.SetVarIndex(n, 0) for n in ("X1", "X2", "X3"))
    assert mba.eval_mba(phi, {x1: s("w1"), x2: s("w1", "w2")}, alg) == 0
    # ({w1,w2},{w1}) sits at max-metric distance 1/2 from the inclusion set.
    v = mba.eval_mba(phi, {x1: s("w1", "w2"), x2: s("w1")}, alg)
    assert v == F(1, 2)
    exact = min(
        max(alg.d(s("w1", "w2"), a), alg.d(s("w1"), b))
        for a in alg.subsets()
        for b in alg.subsets()
        if a <= b
    )
    assert exact == v
    for a in alg.subsets():
        for b in alg.subsets():
            assert mba.eval_mba(psi, {x1: a, x2: b, x3: a & b}, alg) == 0


def test_simple_definables_zero_sets():
    alg = UNIFORM3
    phi, psi = mba.simple_definables()
    x1, x2, x3 = (mba.SetVarIndex(n, 0) for n in ("X1", "X2", "X3"))
    for a in alg.subsets():
        for b in alg.subsets():
            assert (mba.eval_mba(phi, {x1: a, x2: b}, alg) == 0) == (a <= b)
            for c in alg.subsets():
                v = mba.eval_mba(psi, {x1: a, x2: b, x3: c}, alg)
                assert (v == 0) == (a & b == c)
