"""Resolution and instantiation normal forms, and the exact entailment
decision procedures for both semantics.

A formula is equivalent (over generalized teams) to the global disjunction
of a finite set of CO formulas: its resolutions when it uses global
disjunction, its full instantiations when it uses dependence atoms.
Entailment then reduces, through the disjunction property, to flat
entailments between CO formulas, decided by a sweep over the deterministic
causal models of the signature.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from typing import Iterator, Optional, Sequence

from .core import (CausalTeam, FunctionSystem, GeneralizedCausalTeam,
                   Signature, canonicalize, enumerate_representatives,
                   sem_reduced)
from .charform import build_phi, count_function_systems
from .errors import BudgetExceededError, ModelError
from .semantics import SatContext, _sat, singleton_cts, singleton_gcts
from .syntax import (And, Cf, Dep, Eq, Formula, GlobalOr, Neg, TensorOr,
                     big_and, big_gor, big_or, classify, con,
                     conj_of_equalities, is_constancy, subformulas, top)

DEFAULT_DISJUNCT_BUDGET = 100_000


@dataclass(frozen=True)
class DisjunctSet:
    """A finite set of CO formulas whose global disjunction is equivalent
    to the source formula (over generalized causal teams)."""

    members: tuple[Formula, ...]

    def __post_init__(self):
        for m in self.members:
            if classify(m) != "CO":
                raise ModelError("disjunct sets may only contain CO formulas")

    def as_formula(self) -> Formula:
        return big_gor(list(self.members))


def _dedup(formulas: Iterator[Formula],
           budget: Optional[int] = None) -> tuple[Formula, ...]:
    limit = DEFAULT_DISJUNCT_BUDGET if budget is None else budget
    seen = []
    seen_set = set()
    for f in formulas:
        if f not in seen_set:
            seen_set.add(f)
            seen.append(f)
            if len(seen) > limit:
                raise BudgetExceededError("disjunct set", len(seen), limit)
    return tuple(seen)


# ---------------------------------------------------------------------------
# Resolutions
# ---------------------------------------------------------------------------

def count_resolutions(phi: Formula) -> int:
    if isinstance(phi, (Eq, Neg)):
        return 1
    if isinstance(phi, Dep):
        raise ModelError("resolutions are defined on dependence-free formulas")
    if isinstance(phi, (And, TensorOr)):
        return count_resolutions(phi.left) * count_resolutions(phi.right)
    if isinstance(phi, GlobalOr):
        return count_resolutions(phi.left) + count_resolutions(phi.right)
    if isinstance(phi, Cf):
        return count_resolutions(phi.body)
    raise TypeError(type(phi).__name__)


def iter_resolutions(phi: Formula) -> Iterator[Formula]:
    """The resolutions, lazily: global disjunctions split, the other
    connectives distribute."""
    if isinstance(phi, (Eq, Neg)):
        yield phi
    elif isinstance(phi, Dep):
        raise ModelError("resolutions are defined on dependence-free formulas")
    elif isinstance(phi, (And, TensorOr)):
        node = type(phi)
        for a in iter_resolutions(phi.left):
            for b in iter_resolutions(phi.right):
                yield node(a, b)
    elif isinstance(phi, GlobalOr):
        yield from iter_resolutions(phi.left)
        yield from iter_resolutions(phi.right)
    elif isinstance(phi, Cf):
        for a in iter_resolutions(phi.body):
            yield Cf(phi.antecedent, a)
    else:
        raise TypeError(type(phi).__name__)


def resolutions(phi: Formula, budget: Optional[int] = None) -> DisjunctSet:
    if classify(phi) not in ("CO", "COV"):
        raise ModelError("resolutions need a dependence-free formula")
    return DisjunctSet(_dedup(iter_resolutions(phi), budget))


# ---------------------------------------------------------------------------
# Instantiations
# ---------------------------------------------------------------------------

def _rewrite(phi: Formula, leaf) -> Formula:
    if isinstance(phi, (Eq, Dep)):
        return leaf(phi)
    if isinstance(phi, Neg):
        return phi  # CO body: no dependence atom inside
    if isinstance(phi, (And, TensorOr, GlobalOr)):
        return type(phi)(_rewrite(phi.left, leaf), _rewrite(phi.right, leaf))
    if isinstance(phi, Cf):
        return Cf(phi.antecedent, _rewrite(phi.body, leaf))
    raise TypeError(type(phi).__name__)


def _dep_to_constancy(node, sig: Signature):
    if isinstance(node, Dep) and node.args:
        disjuncts = []
        for combo in itertools.product(*[sig.range_of(v) for v in node.args]):
            eqs = conj_of_equalities(tuple(zip(node.args, combo)))
            disjuncts.append(And(eqs, con(node.target)))
        return big_or(disjuncts)
    return node


def star_translate(phi: Formula, sig: Signature) -> Formula:
    """Replace every proper dependence atom by the equivalent disjunction
    over the argument values with a constancy atom; constancy atoms stay."""
    if classify(phi) not in ("CO", "COD"):
        raise ModelError("the star translation is for COD formulas")
    return _rewrite(phi, lambda n: _dep_to_constancy(n, sig))


def constancy_occurrences(phi: Formula) -> list[str]:
    """Variables of the constancy-atom occurrences, preorder order."""
    return [node.target for node in subformulas(phi) if is_constancy(node)]


def _instantiate(phi: Formula, values: Iterator[str]) -> Formula:
    def leaf(node):
        if is_constancy(node):
            return Eq(node.target, next(values))
        return node
    return _rewrite(phi, leaf)


def count_instantiations(phi: Formula, sig: Signature) -> int:
    starred = star_translate(phi, sig)
    return reduce(lambda a, v: a * len(sig.range_of(v)),
                  constancy_occurrences(starred), 1)


def iter_instantiations(phi: Formula, sig: Signature) -> Iterator[Formula]:
    """All full instantiations of the star translation: one CO formula per
    choice of a value for every constancy-atom occurrence."""
    starred = star_translate(phi, sig)
    occs = constancy_occurrences(starred)
    for combo in itertools.product(*[sig.range_of(v) for v in occs]):
        yield _instantiate(starred, iter(combo))


def instantiations(phi: Formula, sig: Signature,
                   budget: Optional[int] = None) -> DisjunctSet:
    return DisjunctSet(_dedup(iter_instantiations(phi, sig), budget))


# ---------------------------------------------------------------------------
# The unifier
# ---------------------------------------------------------------------------

def _gor_of_values(var: str, sig: Signature) -> Formula:
    return big_gor([Eq(var, v) for v in sig.range_of(var)])


def iter_normal_disjuncts(phi: Formula, sig: Signature) -> Iterator[Formula]:
    kind = classify(phi)
    if kind == "CO":
        yield phi
    elif kind == "COV":
        yield from iter_resolutions(phi)
    elif kind == "COD":
        yield from iter_instantiations(phi, sig)
    else:
        # outside both official languages: eliminate dependence atoms via
        # their constancy normal form, then constancy atoms via the global
        # disjunction over values, and resolve.  Verified at bound only.
        dep_free = _rewrite(star_translate_mixed(phi, sig),
                            lambda n: (_gor_of_values(n.target, sig)
                                       if is_constancy(n) else n))
        yield from iter_resolutions(dep_free)


def star_translate_mixed(phi: Formula, sig: Signature) -> Formula:
    """The star translation without the language check, for the unifier."""
    return _rewrite(phi, lambda n: _dep_to_constancy(n, sig))


def count_normal_disjuncts(phi: Formula, sig: Signature) -> int:
    kind = classify(phi)
    if kind == "CO":
        return 1
    if kind == "COV":
        return count_resolutions(phi)
    if kind == "COD":
        return count_instantiations(phi, sig)
    dep_free = _rewrite(star_translate_mixed(phi, sig),
                        lambda n: (_gor_of_values(n.target, sig)
                                   if is_constancy(n) else n))
    return count_resolutions(dep_free)


def normal_disjuncts(phi: Formula, sig: Signature,
                     budget: Optional[int] = None) -> DisjunctSet:
    """A disjunct set equivalent to phi over generalized causal teams."""
    return DisjunctSet(_dedup(iter_normal_disjuncts(phi, sig), budget))


# ---------------------------------------------------------------------------
# Flat entailment and the decision procedures
# ---------------------------------------------------------------------------

def flat_entails(gamma: Sequence[Formula], beta: Formula, sig: Signature,
                 ctx: Optional[SatContext] = None) -> bool:
    """Entailment between CO formulas: every deterministic causal model
    (singleton team) satisfying gamma satisfies beta.  Coincides with both
    the causal and the generalized entailment."""
    for f in list(gamma) + [beta]:
        if classify(f) != "CO":
            raise ModelError("flat entailment needs CO formulas")
    if ctx is None:
        ctx = SatContext(semantics="g")
    for unit in singleton_gcts(sig):
        if all(_sat(unit, g, ctx) for g in gamma) and not _sat(unit, beta, ctx):
            return False
    return True


@dataclass
class EntailmentResult:
    holds: bool
    semantics: str
    countermodel: Optional[object] = None  # a team, when holds is False


def _gamma_formula(gamma: Sequence[Formula], sig: Signature) -> Formula:
    return big_and(list(gamma)) if gamma else top(sig)


def decide_entails(gamma: Sequence[Formula], psi: Formula, sig: Signature,
                   semantics: str = "g",
                   ctx: Optional[SatContext] = None,
                   budget: Optional[int] = None,
                   want_countermodel: bool = False,
                   jobs: int = 1) -> EntailmentResult:
    """Exact entailment over the chosen semantics.

    Generalized: every normal disjunct of the conjoined premises must
    flat-entail some normal disjunct of the conclusion.  Causal: the same
    after conjoining each premise disjunct with every law-description
    representative (the uniformity disjunction).  With jobs > 1 the
    per-disjunct checks run on a thread pool (all state is pure).
    """
    if semantics not in ("c", "g"):
        raise ValueError("semantics must be 'c' or 'g'")
    for f in list(gamma) + [psi]:
        if classify(f) == "NONE":
            raise ModelError("formula mixes global disjunction and "
                             "dependence atoms")
    if ctx is None:
        ctx = SatContext(semantics="g")
    limit = DEFAULT_DISJUNCT_BUDGET if budget is None else budget
    conj = _gamma_formula(gamma, sig)
    n_gamma = count_normal_disjuncts(conj, sig)
    if n_gamma > limit:
        raise BudgetExceededError("premise disjuncts", n_gamma, limit)
    nd_psi = normal_disjuncts(psi, sig, budget).members
    if semantics == "c":
        _check_rep_budget(sig, budget)
        reps = enumerate_representatives(sig)
        phis = [build_phi(rep, sig).formula for rep in reps]
        cases = ((g, rep, phi) for g in iter_normal_disjuncts(conj, sig)
                 for rep, phi in zip(reps, phis))
    else:
        cases = ((g, None, None) for g in iter_normal_disjuncts(conj, sig))

    def check(case):
        g, rep, phi_rep = case
        left = [g] if phi_rep is None else [g, phi_rep]
        ok = any(flat_entails(left, b, sig, ctx) for b in nd_psi)
        return ok, case

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(check, cases)
            for ok, case in results:
                if not ok:
                    return _failure(case, sig, ctx, semantics,
                                    want_countermodel)
    else:
        for case in cases:
            ok, case = check(case)
            if not ok:
                return _failure(case, sig, ctx, semantics,
                                want_countermodel)
    return EntailmentResult(True, semantics)


def _failure(case, sig, ctx, semantics, want_countermodel):
    g, rep, _ = case
    if not want_countermodel:
        return EntailmentResult(False, semantics)
    cm = (_gct_countermodel(g, sig, ctx) if rep is None
          else _ct_countermodel(g, rep, sig, ctx))
    return EntailmentResult(False, semantics, cm)


def _check_rep_budget(sig: Signature, budget: Optional[int]) -> None:
    count = count_function_systems(sig)
    limit = 200_000 if budget is None else budget
    if count > limit:
        raise BudgetExceededError("function-system sweep", count, limit)


def _gct_countermodel(g: Formula, sig: Signature,
                      ctx: SatContext) -> GeneralizedCausalTeam:
    members = [m for m, unit in zip(sem_reduced(sig), singleton_gcts(sig))
               if _sat(unit, g, ctx)]
    return GeneralizedCausalTeam.of(sig, members)


def _ct_countermodel(g: Formula, rep: FunctionSystem, sig: Signature,
                     ctx: SatContext) -> CausalTeam:
    cctx = SatContext(semantics="c")
    rows = [t.sorted_rows()[0] for t in singleton_cts(sig)
            if t.law == rep and _sat(t, g, cctx)]
    return CausalTeam.of(sig, rows, rep if rows else None)


def decide_valid(psi: Formula, sig: Signature, semantics: str = "g",
                 ctx: Optional[SatContext] = None) -> bool:
    return decide_entails([], psi, sig, semantics, ctx).holds


# ---------------------------------------------------------------------------
# Disjunction property and incompatibility
# ---------------------------------------------------------------------------

@dataclass
class DisjunctionReport:
    entails_disjunction: bool
    left: bool
    right: bool

    @property
    def holds(self) -> bool:
        """The disjunction property instance: premises entailing the global
        disjunction entail one disjunct."""
        return (not self.entails_disjunction) or self.left or self.right

    @property
    def surviving(self) -> Optional[str]:
        if not self.entails_disjunction:
            return None
        if self.left:
            return "left"
        if self.right:
            return "right"
        return None


def check_disjunction_property(delta: Sequence[Formula], phi: Formula,
                               psi: Formula, sig: Signature,
                               ctx: Optional[SatContext] = None
                               ) -> DisjunctionReport:
    """Over generalized teams with flat (CO) premises: if delta entails
    phi \\\\/ psi then it entails phi or entails psi.

    The disjuncts may come from different languages; the disjunction is
    evaluated through the union of their normal disjunct sets, which is
    the normal form of the global disjunction itself.
    """
    for f in delta:
        if classify(f) != "CO":
            raise ModelError("the disjunction property needs flat premises")
    if ctx is None:
        ctx = SatContext(semantics="g")
    both = _dedup(itertools.chain(iter_normal_disjuncts(phi, sig),
                                  iter_normal_disjuncts(psi, sig)))
    whole = any(flat_entails(list(delta), b, sig, ctx) for b in both)
    left = decide_entails(list(delta), phi, sig, "g", ctx)
    right = decide_entails(list(delta), psi, sig, "g", ctx)
    return DisjunctionReport(whole, left.holds, right.holds)


def incompatible(phi: Formula, psi: Formula, sig: Signature,
                 ctx: Optional[SatContext] = None) -> bool:
    """No pair of nonempty causal teams with similar laws satisfies phi
    and psi respectively; decided by a singleton sweep, which suffices by
    downward closure."""
    if classify(phi) == "NONE" or classify(psi) == "NONE":
        raise ModelError("unsupported mixed-language formula")
    cctx = SatContext(semantics="c") if ctx is None else ctx
    sat_phi: set[FunctionSystem] = set()
    sat_psi: set[FunctionSystem] = set()
    for team in singleton_cts(sig):
        if _sat(team, phi, cctx):
            sat_phi.add(team.law)
        if _sat(team, psi, cctx):
            sat_psi.add(team.law)
    return not (sat_phi & sat_psi)
