"""Measure-algebra formulas over finite probability spaces.

Elements of the algebra are subsets of a finite atom list with positive
rational weights summing to 1; d(A,B) = mu(A symmetric-difference B).
Formulas are real-valued terms over indexed set variables, including a
constrained-supremum node (SupChain) evaluated either by exhaustive
search or by substituting the maximal feasible element.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import ChainError, EvaluationError, ValidationError

ENUMERATE = "enumerate"
MAXIMAL = "maximal"


@dataclass(frozen=True)
class FiniteMeasureAlgebra:
    atoms: tuple
    weights: dict  # atom -> Fraction > 0, summing to 1

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if len(set(self.atoms)) != len(self.atoms):
            raise ValidationError("duplicate atom names")
        if set(self.weights) != set(self.atoms):
            raise ValidationError("weights must cover exactly the atom list")
        w = {a: Fraction(v) for a, v in self.weights.items()}
        object.__setattr__(self, "weights", w)
        for a, v in w.items():
            if v <= 0:
                raise ValidationError(f"weight of atom {a!r} is not positive")
        if sum(w.values()) != 1:
            raise ValidationError("weights must sum to exactly 1")

    @property
    def full(self):
        return frozenset(self.atoms)

    def measure(self, subset):
        return sum((self.weights[a] for a in subset), Fraction(0))

    def d(self, a, b):
        return self.measure(a ^ b)

    def d_tuple(self, xs, ys):
        if len(xs) != len(ys):
            raise ChainError("tuple length mismatch")
        return max((self.d(x, y) for x, y in zip(xs, ys)), default=Fraction(0))

    def subsets(self, within=None):
        """All subsets of `within` (default: all atoms), in bitmask order."""
        base = [a for a in self.atoms if within is None or a in within]
        for mask in range(1 << len(base)):
            yield frozenset(a for i, a in enumerate(base) if mask >> i & 1)


# ---------------------------------------------------------------------------
# Set variables and set terms


@dataclass(frozen=True)
class SetVarIndex:
    """Index of a set variable: a formula tag, a threshold level, and the
    comparison mode the intended level set uses (strict '>' vs '>=')."""

    tag: object
    level: Fraction
    strict: bool = True

    def __post_init__(self):
        object.__setattr__(self, "level", Fraction(self.level))


def var_sort_key(index):
    return (str(index.tag), index.level, index.strict)


@dataclass(frozen=True)
class SetVar:
    index: SetVarIndex


@dataclass(frozen=True)
class ChainVar:
    """A bound variable of a SupChain, identified by binder id, tag, slot."""

    binder: int
    tag: object
    slot: int


@dataclass(frozen=True)
class SetLit:
    atoms: frozenset


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Full:
    pass


@dataclass(frozen=True)
class Union:
    left: object
    right: object


@dataclass(frozen=True)
class Inter:
    left: object
    right: object


@dataclass(frozen=True)
class Diff:
    left: object
    right: object


@dataclass(frozen=True)
class SymDiff:
    left: object
    right: object


@dataclass(frozen=True)
class Compl:
    body: object


def eval_set(term, assign, alg, env=None):
    env = env or {}
    if isinstance(term, SetVar):
        try:
            return assign[term.index]
        except KeyError:
            raise EvaluationError(f"unbound set variable {term.index}") from None
    if isinstance(term, ChainVar):
        try:
            return env[(term.binder, term.tag, term.slot)]
        except KeyError:
            raise EvaluationError(f"unbound chain variable {term}") from None
    if isinstance(term, SetLit):
        return term.atoms
    if isinstance(term, Empty):
        return frozenset()
    if isinstance(term, Full):
        return alg.full
    if isinstance(term, Union):
        return eval_set(term.left, assign, alg, env) | eval_set(term.right, assign, alg, env)
    if isinstance(term, Inter):
        return eval_set(term.left, assign, alg, env) & eval_set(term.right, assign, alg, env)
    if isinstance(term, Diff):
        return eval_set(term.left, assign, alg, env) - eval_set(term.right, assign, alg, env)
    if isinstance(term, SymDiff):
        return eval_set(term.left, assign, alg, env) ^ eval_set(term.right, assign, alg, env)
    if isinstance(term, Compl):
        return alg.full - eval_set(term.body, assign, alg, env)
    raise TypeError(f"not a set term: {term!r}")


def inter_all(terms):
    terms = list(terms)
    if not terms:
        return Full()
    out = terms[0]
    for t in terms[1:]:
        out = Inter(out, t)
    return out


# ---------------------------------------------------------------------------
# Real-valued measure-algebra formulas


@dataclass(frozen=True)
class Measure:
    term: object


@dataclass(frozen=True)
class Const:
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Scale:
    factor: Fraction
    body: object

    def __post_init__(self):
        f = Fraction(self.factor)
        if f < 0:
            raise ValidationError("scale factor must be non-negative")
        object.__setattr__(self, "factor", f)


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class TruncSub:
    left: object
    right: object


@dataclass(frozen=True)
class Max:
    items: tuple


@dataclass(frozen=True)
class Min:
    items: tuple


@dataclass(frozen=True)
class ChainSpec:
    """Per-tag chain: upper-bound set terms U_0, ..., U_{l-1} over the outer
    variables; the bound chain variables Y_0, ..., Y_{l-1} must satisfy
    Y_j <= U_j intersect (Y_0 ... Y_{j-1})."""

    tag: object
    bounds: tuple  # of set terms

    @property
    def length(self):
        return len(self.bounds)


@dataclass(frozen=True)
class ProfileSpec:
    """Joint upper bound coupling slots across tags:
    the intersection of the named bound variables Y^tag_slot must lie
    inside the bound set.  slots is a tuple of (tag, slot index)."""

    slots: tuple
    bound: object  # set term


@dataclass(frozen=True)
class SupChain:
    binder: int
    chains: tuple  # of ChainSpec
    inner: object
    profiles: tuple = ()  # of ProfileSpec


MbaFormula = (Measure, Const, Scale, Add, TruncSub, Max, Min, SupChain)


def free_set_vars(g):
    """Free SetVarIndex occurrences of a formula (chain variables are bound)."""
    out = set()

    def walk_term(t):
        if isinstance(t, SetVar):
            out.add(t.index)
        elif isinstance(t, (Union, Inter, Diff, SymDiff)):
            walk_term(t.left)
            walk_term(t.right)
        elif isinstance(t, Compl):
            walk_term(t.body)

    def walk(node):
        if isinstance(node, Measure):
            walk_term(node.term)
        elif isinstance(node, Const):
            pass
        elif isinstance(node, Scale):
            walk(node.body)
        elif isinstance(node, (Add, TruncSub)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, (Max, Min)):
            for item in node.items:
                walk(item)
        elif isinstance(node, SupChain):
            for spec in node.chains:
                for b in spec.bounds:
                    walk_term(b)
            for prof in node.profiles:
                walk_term(prof.bound)
            walk(node.inner)
        else:
            raise TypeError(f"not an mba formula: {node!r}")

    walk(g)
    return out


def contains_supchain(g):
    if isinstance(g, SupChain):
        return True
    if isinstance(g, (Measure, Const)):
        return False
    if isinstance(g, Scale):
        return contains_supchain(g.body)
    if isinstance(g, (Add, TruncSub)):
        return contains_supchain(g.left) or contains_supchain(g.right)
    if isinstance(g, (Max, Min)):
        return any(contains_supchain(i) for i in g.items)
    raise TypeError(f"not an mba formula: {g!r}")


def value_bound(g):
    """Syntactic upper bound on the value of g under any assignment."""
    if isinstance(g, Measure):
        return Fraction(1)
    if isinstance(g, Const):
        return g.value
    if isinstance(g, Scale):
        return g.factor * value_bound(g.body)
    if isinstance(g, Add):
        return value_bound(g.left) + value_bound(g.right)
    if isinstance(g, TruncSub):
        return value_bound(g.left)
    if isinstance(g, (Max, Min)):
        return max(value_bound(item) for item in g.items)
    if isinstance(g, SupChain):
        return value_bound(g.inner)
    raise TypeError(f"not an mba formula: {g!r}")


def _feasible_chain_tuples(bounds_values, alg):
    """All nested tuples (Y_0,...,Y_{l-1}) with Y_j within U_j and all
    previous Y's, in deterministic bitmask order."""

    def rec(j, prefix, allowed):
        if j == len(bounds_values):
            yield tuple(prefix)
            return
        cap = allowed & bounds_values[j]
        for y in alg.subsets(cap):
            yield from rec(j + 1, prefix + [y], cap & y)

    yield from rec(0, [], alg.full)


def chain_enumeration_count(bounds_values, alg):
    """Number of feasible tuples for one evaluated chain.

    A nested tuple is determined by a per-atom depth bounded by the first
    bound set excluding the atom, so the count is a product over atoms.
    """
    count = 1
    for a in alg.atoms:
        cap = len(bounds_values)
        for j, u in enumerate(bounds_values):
            if a not in u:
                cap = j
                break
        count *= cap + 1
    return count


def supchain_search_size(g, assign, alg):
    """Total feasible-tuple count of the outermost SupChain under assign."""
    total = 1
    for spec in g.chains:
        values = [eval_set(b, assign, alg) for b in spec.bounds]
        total *= chain_enumeration_count(values, alg)
    return total


def eval_mba(g, assign, alg, mode=MAXIMAL):
    """Exact value of g under the assignment.

    SupChain semantics: supremum of the inner value over all bound tuples
    respecting the chain constraints and the joint profile constraints.
    Mode `enumerate` searches the whole feasible region; mode `maximal`
    substitutes per-atom maximal feasible membership patterns (requires
    the evaluated bound chains to be decreasing), which reduces to
    substituting the single maximal feasible element when there are no
    profile constraints.  The modes agree whenever the inner formula is
    coordinatewise increasing and the bounds are decreasing.
    """
    if mode not in (ENUMERATE, MAXIMAL):
        raise EvaluationError(f"unknown mode {mode!r}")
    return _eval(g, assign, alg, mode, {})


def _eval(g, assign, alg, mode, env):
    if isinstance(g, Measure):
        return alg.measure(eval_set(g.term, assign, alg, env))
    if isinstance(g, Const):
        return g.value
    if isinstance(g, Scale):
        return g.factor * _eval(g.body, assign, alg, mode, env)
    if isinstance(g, Add):
        return _eval(g.left, assign, alg, mode, env) + _eval(g.right, assign, alg, mode, env)
    if isinstance(g, TruncSub):
        v = _eval(g.left, assign, alg, mode, env) - _eval(g.right, assign, alg, mode, env)
        return max(Fraction(0), v)
    if isinstance(g, Max):
        return max(_eval(item, assign, alg, mode, env) for item in g.items)
    if isinstance(g, Min):
        return min(_eval(item, assign, alg, mode, env) for item in g.items)
    if isinstance(g, SupChain):
        return _eval_supchain(g, assign, alg, mode, env)
    raise TypeError(f"not an mba formula: {g!r}")


def _eval_supchain(g, assign, alg, mode, env):
    bounds = []
    for spec in g.chains:
        values = [eval_set(b, assign, alg, env) for b in spec.bounds]
        bounds.append(values)
    tag_pos = {spec.tag: i for i, spec in enumerate(g.chains)}
    profile_values = []
    for prof in g.profiles:
        for tag, slot in prof.slots:
            if tag not in tag_pos:
                raise EvaluationError(f"profile references unknown tag {tag!r}")
            if not 0 <= slot < len(bounds[tag_pos[tag]]):
                raise EvaluationError(f"profile slot {slot} out of range for tag {tag!r}")
        profile_values.append((prof.slots, eval_set(prof.bound, assign, alg, env)))
    if mode == MAXIMAL:
        for spec, values in zip(g.chains, bounds):
            prev = alg.full
            for u in values:
                if not u <= prev:
                    raise ChainError(
                        f"evaluated bound chain for tag {spec.tag!r} is not decreasing"
                    )
                prev = u
        return _eval_supchain_maximal(g, assign, alg, env, bounds, tag_pos, profile_values)
    best = None
    for combo in itertools.product(
        *[_feasible_chain_tuples(values, alg) for values in bounds]
    ):
        ok = True
        for slots, w in profile_values:
            meet = alg.full
            for tag, slot in slots:
                meet = meet & combo[tag_pos[tag]][slot]
            if not meet <= w:
                ok = False
                break
        if not ok:
            continue
        inner_env = dict(env)
        for spec, ys in zip(g.chains, combo):
            for slot, y in enumerate(ys):
                inner_env[(g.binder, spec.tag, slot)] = y
        v = _eval(g.inner, assign, alg, mode, inner_env)
        if best is None or v > best:
            best = v
    if best is None:
        raise EvaluationError("SupChain has an empty feasible region")
    return best


def _maximal_depth_vectors(caps, forbidden):
    """Maximal vectors v with 0 <= v[i] <= caps[i] avoiding every forbidden
    pattern: v is infeasible when some pattern ((i, j), ...) has v[i] > j in
    all its coordinates.  The feasible set is downward closed, so its
    maximal elements exist and are computed by branching on violations."""
    memo = {}

    def violated(v):
        for pattern in forbidden:
            if all(v[i] > j for i, j in pattern):
                return pattern
        return None

    def rec(v):
        if v in memo:
            return memo[v]
        pattern = violated(v)
        if pattern is None:
            out = {v}
        else:
            out = set()
            for i, j in pattern:
                if v[i] > j:
                    reduced = list(v)
                    reduced[i] = j
                    out |= rec(tuple(reduced))
        memo[v] = out
        return out

    candidates = rec(tuple(caps))
    return sorted(
        v for v in candidates
        if not any(w != v and all(wi >= vi for wi, vi in zip(w, v)) for w in candidates)
    )


def _eval_supchain_maximal(g, assign, alg, env, bounds, tag_pos, profile_values):
    """Supremum via per-atom maximal feasible patterns.

    All constraints are pointwise: an atom's membership pattern is a
    per-tag prefix depth capped by the first excluding bound, and a
    profile forbids jointly exceeding its slots outside its bound set.
    For an inner formula increasing in the chain variables the supremum
    is attained with every atom at one of its maximal feasible depth
    vectors, independently across atoms."""
    per_atom = []
    for a in alg.atoms:
        caps = []
        for values in bounds:
            depth = len(values)
            for j, u in enumerate(values):
                if a not in u:
                    depth = j
                    break
            caps.append(depth)
        forbidden = []
        for slots, w in profile_values:
            if a not in w:
                forbidden.append(tuple((tag_pos[tag], slot) for tag, slot in slots))
        per_atom.append(_maximal_depth_vectors(caps, forbidden))
    best = None
    for combo in itertools.product(*per_atom):
        inner_env = dict(env)
        for i, spec in enumerate(g.chains):
            for slot in range(len(bounds[i])):
                inner_env[(g.binder, spec.tag, slot)] = frozenset(
                    a for a, vec in zip(alg.atoms, combo) if vec[i] > slot
                )
        v = _eval(g.inner, assign, alg, MAXIMAL, inner_env)
        if best is None or v > best:
            best = v
    return best


def substitute_set_vars(g, mapping):
    """Replace free set variables by set terms (chain variables untouched)."""

    def sub_term(t):
        if isinstance(t, SetVar):
            return mapping.get(t.index, t)
        if isinstance(t, (Union, Inter, Diff, SymDiff)):
            return type(t)(sub_term(t.left), sub_term(t.right))
        if isinstance(t, Compl):
            return Compl(sub_term(t.body))
        return t

    def sub(node):
        if isinstance(node, Measure):
            return Measure(sub_term(node.term))
        if isinstance(node, Const):
            return node
        if isinstance(node, Scale):
            return Scale(node.factor, sub(node.body))
        if isinstance(node, (Add, TruncSub)):
            return type(node)(sub(node.left), sub(node.right))
        if isinstance(node, (Max, Min)):
            return type(node)(tuple(sub(item) for item in node.items))
        if isinstance(node, SupChain):
            chains = tuple(
                ChainSpec(spec.tag, tuple(sub_term(b) for b in spec.bounds))
                for spec in node.chains
            )
            profiles = tuple(
                ProfileSpec(prof.slots, sub_term(prof.bound))
                for prof in node.profiles
            )
            return SupChain(node.binder, chains, sub(node.inner), profiles)
        raise TypeError(f"not an mba formula: {node!r}")

    return sub(g)


# ---------------------------------------------------------------------------
# Monotonicity checking


@dataclass(frozen=True)
class MonotoneCounterexample:
    low: dict
    high: dict
    low_value: Fraction
    high_value: Fraction


def _comparable_pairs(alg):
    """All (A, B) with A <= B: each atom is in neither, B only, or both."""
    atoms = alg.atoms
    for choice in itertools.product(range(3), repeat=len(atoms)):
        low = frozenset(a for a, c in zip(atoms, choice) if c == 2)
        high = frozenset(a for a, c in zip(atoms, choice) if c >= 1)
        yield low, high


def check_monotone(g, alg, trials=200, seed=0, mode=MAXIMAL, exhaustive=None,
                   exhaustive_limit=100_000):
    """Verify g is coordinatewise increasing on alg.

    Returns None on pass, or the first MonotoneCounterexample found.
    Exhaustive over all comparable assignment pairs when the search space
    is small enough (or forced via `exhaustive`); otherwise samples
    `trials` seeded random pairs.
    """
    variables = sorted(free_set_vars(g), key=var_sort_key)
    if not variables:
        return None
    if exhaustive is None:
        exhaustive = 3 ** (len(alg.atoms) * len(variables)) <= exhaustive_limit

    def test(pairs):
        low = {v: p[0] for v, p in zip(variables, pairs)}
        high = {v: p[1] for v, p in zip(variables, pairs)}
        lv = eval_mba(g, low, alg, mode)
        hv = eval_mba(g, high, alg, mode)
        if lv > hv:
            return MonotoneCounterexample(low, high, lv, hv)
        return None

    if exhaustive:
        all_pairs = list(_comparable_pairs(alg))
        for combo in itertools.product(all_pairs, repeat=len(variables)):
            ce = test(combo)
            if ce is not None:
                return ce
        return None
    if trials < 1:
        raise EvaluationError("trials must be >= 1")
    rng = random.Random(seed)
    atoms = list(alg.atoms)
    for _ in range(trials):
        pairs = []
        for _v in variables:
            choice = [rng.randrange(3) for _a in atoms]
            low = frozenset(a for a, c in zip(atoms, choice) if c == 2)
            high = frozenset(a for a, c in zip(atoms, choice) if c >= 1)
            pairs.append((low, high))
        ce = test(pairs)
        if ce is not None:
            return ce
    return None


# ---------------------------------------------------------------------------
# Definability formulas and distance oracles


def chain_var(tag, slot, length):
    return SetVarIndex(tag, Fraction(slot, length), True)


def phi_chain(bounds, tag="X"):
    """Distance-bound formula for the chain set of a decreasing tuple U.

    phi_U(X) = max over slots m of mu(X_m minus the intersection of the
    earlier X's) + mu(X_m minus U_m); the m = 0 term reduces to
    mu(X_0 minus U_0).  Zero set = the chain set of U.
    """
    bounds = [frozenset(u) for u in bounds]
    _require_decreasing(bounds)
    length = len(bounds)
    items = []
    for m in range(length):
        x_m = SetVar(chain_var(tag, m, length))
        prev = [SetVar(chain_var(tag, j, length)) for j in range(m)]
        nested = Measure(Diff(x_m, inter_all(prev)))
        outside = Measure(Diff(x_m, SetLit(bounds[m])))
        items.append(Add(nested, outside))
    return Max(tuple(items))


def _require_decreasing(bounds):
    if not bounds:
        raise ChainError("empty chain")
    for j in range(1, len(bounds)):
        if not bounds[j] <= bounds[j - 1]:
            raise ChainError(f"bound chain not decreasing at slot {j}")


def dist_to_chain_set(xs, bounds, alg):
    """Exact max-metric distance from the tuple xs to the chain set of
    bounds, with a nearest witness (first in enumeration order)."""
    bounds = [frozenset(u) for u in bounds]
    _require_decreasing(bounds)
    xs = [frozenset(x) for x in xs]
    if len(xs) != len(bounds):
        raise ChainError("tuple length does not match chain length")
    best = None
    witness = None
    for ys in _feasible_chain_tuples(bounds, alg):
        d = alg.d_tuple(xs, ys)
        if best is None or d < best:
            best = d
            witness = ys
    return best, witness


def psi_multichain(chains):
    """Max over tags of phi_chain; zero set is the product of the per-tag
    chain sets.  `chains` maps tag -> decreasing bound list."""
    if not chains:
        raise ChainError("empty chain family")
    items = []
    for tag in sorted(chains, key=str):
        items.append(phi_chain(chains[tag], tag=tag))
    return Max(tuple(items))


def simple_definables():
    """The two warm-up definability formulas.

    phi(X1,X2) = mu(X1 minus X2) witnesses definability of inclusion pairs;
    psi(X1,X2,X3) = mu((X1 inter X2) symdiff X3) witnesses definability of
    intersection triples.
    """
    x1 = SetVar(SetVarIndex("X1", 0))
    x2 = SetVar(SetVarIndex("X2", 0))
    x3 = SetVar(SetVarIndex("X3", 0))
    phi = Measure(Diff(x1, x2))
    psi = Measure(SymDiff(Inter(x1, x2), x3))
    return phi, psi
