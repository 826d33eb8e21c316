"""Constructors for the characteristic formulas: the law-description
formula, team-component bound, cardinality bounds, the non-extension
formula, the uniformity disjunction, causal-influence and direct-cause
formulas, and the endogeneity formula.

All constructors range value tuples in signature order, so their output
is byte-deterministic.  Each one checks an exact size estimate against a
node budget before building anything.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Optional

from .core import (Assignment, CausalTeam, FunctionSystem,
                   GeneralizedCausalTeam, Signature, Team, canonicalize,
                   count_function_systems, enumerate_assignments,
                   enumerate_function_systems, enumerate_representatives,
                   quotient_cardinality, to_generalized)
from .errors import BudgetExceededError, ModelError
from .syntax import (And, Cf, Eq, Formula, Neg, TensorOr, big_and, big_gor,
                     big_or, bottom, con)

DEFAULT_NODE_BUDGET = 1_000_000


def node_budget() -> int:
    """The configured node budget (CTLAB_BUDGET_NODES overrides)."""
    return int(os.environ.get("CTLAB_BUDGET_NODES", DEFAULT_NODE_BUDGET))


def _guard(what: str, estimate: int, budget: Optional[int]) -> None:
    limit = node_budget() if budget is None else budget
    if estimate > limit:
        raise BudgetExceededError(what, estimate, limit)


def _range_product(sig: Signature, vars: Iterable[str]) -> int:
    return reduce(lambda a, v: a * len(sig.range_of(v)), vars, 1)


@dataclass(frozen=True)
class CharFormula:
    """A built formula together with which constructor produced it."""

    formula: Formula
    constructor: str
    params: tuple

    def __str__(self) -> str:
        from .syntax import format_formula
        return format_formula(self.formula)


# ---------------------------------------------------------------------------
# The law-description formula
# ---------------------------------------------------------------------------

def _value_tuples(sig: Signature, vars: tuple[str, ...]):
    return itertools.product(*[sig.range_of(v) for v in vars])


def _eta(sig: Signature, system: FunctionSystem, var: str) -> list[Formula]:
    """All assignments behave exactly as the function for var prescribes:
    under every total intervention on the other variables, var takes the
    table value of its parents."""
    parents = system.parents_of(var)
    w_vars = tuple(v for v in sig.variables
                   if v != var and v not in parents)
    conjuncts = []
    for w in _value_tuples(sig, w_vars):
        for p in _value_tuples(sig, parents):
            ante = tuple(zip(w_vars, w)) + tuple(zip(parents, p))
            out_idx = system.evaluate_idx(
                var, [sig.value_index(pv, t) for pv, t in zip(parents, p)])
            conjuncts.append(Cf(ante, Eq(var, sig.range_of(var)[out_idx])))
    return conjuncts


def _xi(sig: Signature, var: str) -> list[Formula]:
    """var is untouched by interventions on all the other variables."""
    w_vars = tuple(v for v in sig.variables if v != var)
    conjuncts = []
    for val in sig.range_of(var):
        for w in _value_tuples(sig, w_vars):
            ante = tuple(zip(w_vars, w))
            conjuncts.append(
                TensorOr(Neg(Eq(var, val)), Cf(ante, Eq(var, val))))
    return conjuncts


def estimate_phi_size(system: FunctionSystem) -> int:
    sig = system.signature
    essential = [v for v in system.endogenous if not system.is_constant(v)]
    total = 0
    for var in sig.variables:
        if var in essential:
            total += (_range_product(sig, [w for w in sig.variables
                                           if w != var]) *
                      (len(sig.variables) + 2))
        else:
            total += (len(sig.range_of(var)) *
                      _range_product(sig, [w for w in sig.variables
                                           if w != var]) *
                      (len(sig.variables) + 4))
    return total


def build_phi(system: FunctionSystem, sig: Optional[Signature] = None,
              budget: Optional[int] = None) -> CharFormula:
    """The CO formula defining the system's similarity class: eta clauses
    for its non-constant endogenous variables, xi clauses elsewhere."""
    sig = system.signature if sig is None else sig
    _guard("law-description formula", estimate_phi_size(system), budget)
    essential = {v for v in system.endogenous if not system.is_constant(v)}
    parts: list[Formula] = []
    for v in sig.variables:
        if v in essential:
            parts.extend(_eta(sig, system, v))
    for v in sig.variables:
        if v not in essential:
            parts.extend(_xi(sig, v))
    return CharFormula(big_and(parts), "phi", (system,))


# ---------------------------------------------------------------------------
# Team-component and cardinality formulas
# ---------------------------------------------------------------------------

def build_theta(rows: Iterable[Assignment], sig: Signature,
                budget: Optional[int] = None) -> CharFormula:
    """Satisfied exactly by the teams whose component is a subset of rows;
    the empty set yields the contradiction."""
    rows = sorted(set(rows), key=Assignment.sort_key)
    _guard("team-component formula",
           max(1, len(rows)) * (len(sig.variables) + 1), budget)
    if not rows:
        return CharFormula(bottom(sig), "theta", ())
    disjuncts = [big_and([Eq(v, s.value(v)) for v in sig.variables])
                 for s in rows]
    return CharFormula(big_or(disjuncts), "theta", tuple(rows))


def estimate_mu_size(sig: Signature) -> int:
    return sum(_range_product(sig, [w for w in sig.variables if w != v]) *
               (len(sig.variables) + 2) for v in sig.variables)


def build_mu(sig: Signature, budget: Optional[int] = None) -> CharFormula:
    """On singleton-component teams: all laws agree up to dummy arguments
    (every total intervention on the others leaves each variable constant)."""
    _guard("uniformity-core formula", estimate_mu_size(sig), budget)
    conjuncts = []
    for var in sig.variables:
        w_vars = tuple(v for v in sig.variables if v != var)
        for w in _value_tuples(sig, w_vars):
            conjuncts.append(Cf(tuple(zip(w_vars, w)), con(var)))
    return CharFormula(big_and(conjuncts), "mu", ())


def build_chi(sig: Signature, budget: Optional[int] = None) -> CharFormula:
    """Quotient cardinality at most one."""
    mu = build_mu(sig, budget).formula
    return CharFormula(big_and([mu] + [con(v) for v in sig.variables]),
                       "chi", ())


def build_chi_k(sig: Signature, k: int,
                budget: Optional[int] = None) -> CharFormula:
    """Quotient cardinality at most k (component cardinality on causal
    teams); k = 0 is the contradiction."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return CharFormula(bottom(sig), "chi_k", (0,))
    _guard("cardinality formula", k * (estimate_mu_size(sig) + 8), budget)
    chi = build_chi(sig, budget).formula
    return CharFormula(big_or([chi] * k), "chi_k", (k,))


# ---------------------------------------------------------------------------
# The non-extension formula
# ---------------------------------------------------------------------------

def _class_members(team: GeneralizedCausalTeam):
    return {(s, canonicalize(f)) for s, f in team.members}


def build_xi(team: Team, budget: Optional[int] = None,
             reduced: bool = True) -> CharFormula:
    """Satisfied by S exactly when team cannot be embedded into S up to
    equivalence.  With reduced=True the law disjunct ranges over one
    representative per similarity class (equivalent and exponentially
    smaller); the unreduced variant ranges over every function system."""
    if isinstance(team, CausalTeam):
        gct = to_generalized(team)
    else:
        gct = team
    if gct.is_empty():
        raise ModelError("the non-extension formula needs a nonempty team")
    sig = gct.signature
    k = quotient_cardinality(gct) - 1
    if reduced:
        systems = enumerate_representatives(sig)
    else:
        _guard("function-system sweep", count_function_systems(sig),
               200_000 if budget is None else budget)
        systems = enumerate_function_systems(sig)
    classes = _class_members(gct)
    component = gct.team_component()
    chi_k = build_chi_k(sig, k, budget).formula
    comp_rows = [s for s in enumerate_assignments(sig) if s not in component]
    theta_comp = build_theta(comp_rows, sig, budget).formula
    third = []
    for s in sorted(component, key=Assignment.sort_key):
        for f in systems:
            if (s, canonicalize(f)) in classes:
                continue
            third.append(And(build_theta([s], sig, budget).formula,
                             build_phi(f, sig, budget).formula))
    formula = big_or([chi_k, theta_comp] + third)
    return CharFormula(formula, "xi", (gct, reduced))


# ---------------------------------------------------------------------------
# The uniformity disjunction
# ---------------------------------------------------------------------------

def build_unf(sig: Signature, budget: Optional[int] = None) -> CharFormula:
    """Global disjunction of the law-description formulas, one per
    similarity class of the recursive systems: defines uniformity over
    generalized teams and is valid over causal teams."""
    _guard("function-system sweep", count_function_systems(sig),
           200_000 if budget is None else budget)
    reps = enumerate_representatives(sig)
    _guard("uniformity disjunction",
           sum(estimate_phi_size(r) for r in reps), budget)
    return CharFormula(
        big_gor([build_phi(r, sig, budget).formula for r in reps]),
        "unf", ())


# ---------------------------------------------------------------------------
# Causal-influence formulas
# ---------------------------------------------------------------------------

def _distinct_pairs(values: tuple[str, ...]):
    return [(a, b) for a in values for b in values if a != b]


def estimate_leadsto_size(x: str, y: str, sig: Signature) -> int:
    others = [v for v in sig.variables if v not in (x, y)]
    n_ctx = sum(_range_product(sig, combo)
                for size in range(len(others) + 1)
                for combo in itertools.combinations(others, size))
    nx = len(sig.range_of(x))
    ny = len(sig.range_of(y))
    return n_ctx * nx * (nx - 1) * ny * (ny - 1) * (len(sig.variables) + 6)


def build_leadsto(x: str, y: str, sig: Signature,
                  budget: Optional[int] = None) -> CharFormula:
    """x causally affects y: after some (possibly null) intervention on
    other variables, forcing x differently can change y."""
    if x == y:
        raise ModelError("causal influence needs two distinct variables")
    sig.index(x), sig.index(y)
    _guard("causal-influence formula", estimate_leadsto_size(x, y, sig),
           budget)
    others = [v for v in sig.variables if v not in (x, y)]
    disjuncts = []
    for size in range(len(others) + 1):
        for z_vars in itertools.combinations(others, size):
            for z in _value_tuples(sig, z_vars):
                for xv, xv2 in _distinct_pairs(sig.range_of(x)):
                    for yv, yv2 in _distinct_pairs(sig.range_of(y)):
                        inner = And(Cf(((x, xv),), Eq(y, yv)),
                                    Cf(((x, xv2),), Eq(y, yv2)))
                        disjuncts.append(Cf(tuple(zip(z_vars, z)), inner))
    return CharFormula(big_or(disjuncts), "leadsto", (x, y))


def estimate_direct_cause_size(x: str, v: str, sig: Signature) -> int:
    others = [w for w in sig.variables if w not in (x, v)]
    nx = len(sig.range_of(x))
    nv = len(sig.range_of(v))
    return (_range_product(sig, others) * nx * (nx - 1) * nv * (nv - 1) *
            2 * (len(sig.variables) + 2))


def build_direct_cause(x: str, v: str, sig: Signature,
                       budget: Optional[int] = None) -> CharFormula:
    """x is a direct cause of v: holding all other variables fixed, some
    change of x changes v."""
    if x == v:
        raise ModelError("direct cause needs two distinct variables")
    sig.index(x), sig.index(v)
    _guard("direct-cause formula", estimate_direct_cause_size(x, v, sig),
           budget)
    w_vars = tuple(u for u in sig.variables if u not in (x, v))
    disjuncts = []
    for w in _value_tuples(sig, w_vars):
        ctx = tuple(zip(w_vars, w))
        for xv, xv2 in _distinct_pairs(sig.range_of(x)):
            for vv, vv2 in _distinct_pairs(sig.range_of(v)):
                disjuncts.append(
                    And(Cf(ctx + ((x, xv),), Eq(v, vv)),
                        Cf(ctx + ((x, xv2),), Eq(v, vv2))))
    return CharFormula(big_or(disjuncts), "direct_cause", (x, v))


def build_beta_en(v: str, sig: Signature,
                  budget: Optional[int] = None) -> CharFormula:
    """v is endogenous via a non-constant function: some other variable
    is a direct cause of it."""
    sig.index(v)
    others = [x for x in sig.variables if x != v]
    if not others:
        raise ModelError("endogeneity formula needs a second variable")
    _guard("endogeneity formula",
           sum(estimate_direct_cause_size(x, v, sig) for x in others),
           budget)
    return CharFormula(
        big_or([build_direct_cause(x, v, sig, budget).formula
                for x in others]),
        "beta_en", (v,))
