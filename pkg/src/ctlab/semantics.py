"""Satisfaction over causal and generalized causal teams, flatness checks,
and bounded brute-force entailment oracles.

Tensor disjunction is decided by the complement trick: T satisfies
phi \\/ psi iff some subset S of T satisfies phi while T minus S satisfies
psi; this is sound and complete because every formula here is downward
closed.  When one disjunct is a CO formula the split is found in linear
time through flatness; both shortcuts can be disabled for cross-checking.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

from .core import (CausalTeam, GeneralizedCausalTeam, Signature,
                   Team, enumerate_assignments, enumerate_representatives,
                   is_compatible, sem_reduced)
from .errors import BudgetExceededError, ModelError
from .intervention import InterventionSpec, intervene
from .syntax import (And, Cf, Dep, Eq, Formula, GlobalOr, Neg, TensorOr,
                     classify)

_MISS = object()


@dataclass
class SatContext:
    """Evaluation context: semantics selector plus a memo cache.

    Cache entries are pure facts keyed by (team, formula); eviction or
    sharing never changes results.  `team_cap` bounds the exponential
    tensor-disjunction split."""

    semantics: str = "g"
    team_cap: int = 12
    use_flat_shortcut: bool = True
    memo: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.semantics not in ("c", "g"):
            raise ValueError("semantics must be 'c' or 'g'")


def team_kind(team: Team) -> str:
    return "c" if isinstance(team, CausalTeam) else "g"


def units(team: Team) -> list[Team]:
    """The singleton subteams, in deterministic order."""
    if isinstance(team, CausalTeam):
        return [CausalTeam(team.signature, frozenset((s,)), team.law)
                for s in team.sorted_rows()]
    return [GeneralizedCausalTeam(team.signature, frozenset((m,)))
            for m in team.sorted_members()]


def _members(team: Team):
    if isinstance(team, CausalTeam):
        return team.sorted_rows()
    return team.sorted_members()


def _subteam(team: Team, chosen) -> Team:
    if isinstance(team, CausalTeam):
        return CausalTeam.of(team.signature, chosen, team.law)
    return GeneralizedCausalTeam.of(team.signature, chosen)


def satisfies(team: Team, phi: Formula, ctx: Optional[SatContext] = None) -> bool:
    """The satisfaction relation of the team's kind (exact)."""
    if ctx is None:
        ctx = SatContext(semantics=team_kind(team))
    elif ctx.semantics != team_kind(team):
        raise ModelError(
            f"context selects '{ctx.semantics}' semantics but the team is "
            f"of kind '{team_kind(team)}'")
    if classify(phi) == "NONE":
        raise ModelError("formula mixes global disjunction and dependence "
                         "atoms; it belongs to no supported language")
    if not team.is_recursive():
        raise ModelError("satisfaction is defined over recursive teams only")
    return _sat(team, phi, ctx)


def _sat(team: Team, phi: Formula, ctx: SatContext) -> bool:
    if team.is_empty():
        return True
    key = (team, phi)
    hit = ctx.memo.get(key, _MISS)
    if hit is not _MISS:
        return hit
    value = _sat_raw(team, phi, ctx)
    ctx.memo[key] = value
    return value


def _sat_raw(team: Team, phi: Formula, ctx: SatContext) -> bool:
    sig = team.signature
    if isinstance(phi, Eq):
        want = sig.value_index(phi.var, phi.value)
        idx = sig.index(phi.var)
        return all(s.values[idx] == want for s in team.team_component())
    if isinstance(phi, Dep):
        rows = list(team.team_component())
        arg_idx = [sig.index(v) for v in phi.args]
        tgt = sig.index(phi.target)
        seen: dict[tuple, int] = {}
        for s in rows:
            lhs = tuple(s.values[i] for i in arg_idx)
            prev = seen.setdefault(lhs, s.values[tgt])
            if prev != s.values[tgt]:
                return False
        return True
    if isinstance(phi, Neg):
        return all(not _sat(u, phi.body, ctx) for u in units(team))
    if isinstance(phi, And):
        return _sat(team, phi.left, ctx) and _sat(team, phi.right, ctx)
    if isinstance(phi, GlobalOr):
        return _sat(team, phi.left, ctx) or _sat(team, phi.right, ctx)
    if isinstance(phi, Cf):
        spec = InterventionSpec(sig, phi.antecedent)
        if not spec.is_consistent:
            return True
        return _sat(intervene(team, spec), phi.body, ctx)
    if isinstance(phi, TensorOr):
        return _sat_tensor(team, phi, ctx)
    raise TypeError(f"unknown formula node {type(phi).__name__}")


def _flat_rest(team: Team, alpha: Formula, ctx: SatContext) -> Team:
    """The members whose singletons falsify the CO formula alpha."""
    rest = [m for u, m in zip(units(team), _members(team))
            if not _sat(u, alpha, ctx)]
    return _subteam(team, rest)


def _sat_tensor(team: Team, phi: TensorOr, ctx: SatContext) -> bool:
    if ctx.use_flat_shortcut:
        # a flat disjunct admits a canonical maximal split
        if classify(phi.left) == "CO":
            return _sat(_flat_rest(team, phi.left, ctx), phi.right, ctx)
        if classify(phi.right) == "CO":
            return _sat(_flat_rest(team, phi.right, ctx), phi.left, ctx)
    members = _members(team)
    n = len(members)
    if n > ctx.team_cap:
        raise BudgetExceededError("tensor-disjunction split", n, ctx.team_cap)
    for mask in range(1 << n):
        part = [m for i, m in enumerate(members) if mask >> i & 1]
        rest = [m for i, m in enumerate(members) if not mask >> i & 1]
        if (_sat(_subteam(team, part), phi.left, ctx)
                and _sat(_subteam(team, rest), phi.right, ctx)):
            return True
    return False


def is_flat(phi: Formula, sig: Signature, scope: Iterable[Team],
            ctx: Optional[SatContext] = None) -> bool:
    """True iff, throughout the scope, team satisfaction coincides with
    satisfaction by every singleton subteam."""
    for team in scope:
        local = ctx
        if local is None or local.semantics != team_kind(team):
            local = SatContext(semantics=team_kind(team))
        whole = _sat(team, phi, local)
        pointwise = all(_sat(u, phi, local) for u in units(team))
        if whole != pointwise:
            return False
    return True


# ---------------------------------------------------------------------------
# Team universes (deduplicated up to equivalence)
# ---------------------------------------------------------------------------

def _subsets(items: Sequence, max_size: Optional[int]) -> Iterator[tuple]:
    top = len(items) if max_size is None else min(max_size, len(items))
    for size in range(top + 1):
        yield from itertools.combinations(items, size)


def count_teams(sig: Signature, semantics: str,
                max_rows: Optional[int] = None) -> int:
    """How many teams enumerate_teams would yield."""
    from math import comb
    if semantics == "g":
        n = len(sem_reduced(sig))
        top = n if max_rows is None else min(max_rows, n)
        return sum(comb(n, k) for k in range(top + 1))
    total = 1  # the empty team
    for rep in enumerate_representatives(sig):
        n = sum(1 for s in enumerate_assignments(sig) if is_compatible(s, rep))
        top = n if max_rows is None else min(max_rows, n)
        total += sum(comb(n, k) for k in range(1, top + 1))
    return total


def enumerate_teams(sig: Signature, semantics: str,
                    max_rows: Optional[int] = None,
                    budget: int = 1_000_000) -> Iterator[Team]:
    """All teams of the selected kind up to equivalence, sizes ascending.

    Every team over sig is equivalent to exactly one enumerated team
    (laws are replaced by their similarity representatives), so sweeps
    over this universe decide entailment exactly when max_rows is None.
    """
    needed = count_teams(sig, semantics, max_rows)
    if needed > budget:
        raise BudgetExceededError("team enumeration", needed, budget)
    if semantics == "g":
        base = sem_reduced(sig)
        for combo in _subsets(base, max_rows):
            yield GeneralizedCausalTeam.of(sig, combo)
        return
    yield CausalTeam.empty(sig)
    assignments = enumerate_assignments(sig)
    for rep in enumerate_representatives(sig):
        compat = [s for s in assignments if is_compatible(s, rep)]
        for size in range(1, (len(compat) if max_rows is None
                              else min(max_rows, len(compat))) + 1):
            for combo in itertools.combinations(compat, size):
                yield CausalTeam.of(sig, combo, rep)


def singleton_gcts(sig: Signature) -> list[GeneralizedCausalTeam]:
    return [GeneralizedCausalTeam.of(sig, (m,)) for m in sem_reduced(sig)]


def singleton_cts(sig: Signature) -> list[CausalTeam]:
    return [CausalTeam.of(sig, (s,), f) for s, f in sem_reduced(sig)]


# ---------------------------------------------------------------------------
# Bounded brute-force oracles
# ---------------------------------------------------------------------------

def find_countermodel_bounded(gamma: Sequence[Formula], psi: Formula,
                              sig: Signature, max_rows: Optional[int],
                              ctx: Optional[SatContext] = None,
                              budget: int = 1_000_000) -> Optional[Team]:
    """A team with at most max_rows members satisfying gamma but not psi,
    or None if no such team exists at the bound."""
    if ctx is None:
        ctx = SatContext()
    for team in enumerate_teams(sig, ctx.semantics, max_rows, budget):
        if all(_sat(team, g, ctx) for g in gamma) and not _sat(team, psi, ctx):
            return team
    return None


def entails_bounded(gamma: Sequence[Formula], psi: Formula, sig: Signature,
                    max_rows: Optional[int],
                    ctx: Optional[SatContext] = None,
                    budget: int = 1_000_000) -> bool:
    """True iff every team over sig with at most max_rows members that
    satisfies gamma also satisfies psi.  With max_rows=None the sweep
    covers one representative per equivalence class of teams, which makes
    the verdict exact for the chosen semantics."""
    return find_countermodel_bounded(gamma, psi, sig, max_rows, ctx,
                                     budget) is None


def equivalent_bounded(phi: Formula, psi: Formula, sig: Signature,
                       max_rows: Optional[int],
                       ctx: Optional[SatContext] = None) -> bool:
    return (entails_bounded([phi], psi, sig, max_rows, ctx)
            and entails_bounded([psi], phi, sig, max_rows, ctx))
