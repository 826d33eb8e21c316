"""Constructive definability: emit a CO formula for a flat class of teams
and a COD formula for a class closed under embeddability, plus closure
computation and exhaustive verification.

Classes are stored and compared up to equivalence: every member team is
normalized by replacing its laws with their similarity representatives,
so equivalence coincides with equality and the embeddability order with
set inclusion.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .charform import build_phi, build_theta, build_xi
from .core import (CausalTeam, GeneralizedCausalTeam, Signature, Team,
                   enumerate_representatives, normalize_ct, normalize_gct,
                   sem_reduced, to_generalized, union_causal_teams)
from .errors import BudgetExceededError, ModelError
from .semantics import SatContext, _sat, enumerate_teams
from .syntax import And, Formula, big_or, top

DEFAULT_SEM_CAP = 14


@dataclass(frozen=True)
class TeamClass:
    """An explicit finite set of teams over one signature, one kind."""

    kind: str  # 'c' | 'g'
    signature: Signature
    teams: frozenset[Team]

    @staticmethod
    def of(kind: str, sig: Signature, teams: Iterable[Team]) -> "TeamClass":
        if kind not in ("c", "g"):
            raise ValueError("kind must be 'c' or 'g'")
        normalized = set()
        for t in teams:
            if t.signature != sig:
                raise ModelError("team over a different signature")
            if kind == "c":
                if not isinstance(t, CausalTeam):
                    raise ModelError("kind 'c' needs causal teams")
                normalized.add(normalize_ct(t))
            else:
                if not isinstance(t, GeneralizedCausalTeam):
                    raise ModelError("kind 'g' needs generalized teams")
                normalized.add(normalize_gct(t))
        return TeamClass(kind, sig, frozenset(normalized))

    def __contains__(self, team: Team) -> bool:
        if self.kind == "c":
            return normalize_ct(team) in self.teams
        return normalize_gct(team) in self.teams

    def is_empty(self) -> bool:
        return not self.teams


def _subteams(team: Team) -> Iterable[Team]:
    if isinstance(team, CausalTeam):
        rows = sorted(team.rows, key=lambda a: a.sort_key())
        for size in range(len(rows) + 1):
            for combo in itertools.combinations(rows, size):
                yield CausalTeam.of(team.signature, combo, team.law)
        return
    members = team.sorted_members()
    for size in range(len(members) + 1):
        for combo in itertools.combinations(members, size):
            yield GeneralizedCausalTeam.of(team.signature, combo)


def close_under_succeq(kls: TeamClass) -> TeamClass:
    """Add every team embeddable into a member: all subteams, up to
    equivalence (members are already normalized)."""
    out = set(kls.teams)
    for team in kls.teams:
        out.update(_subteams(team))
    return TeamClass(kls.kind, kls.signature, frozenset(out))


def check_closure(kls: TeamClass, mode: str) -> bool:
    """mode 'downward_equiv': closed under embeddability (subteams up to
    equivalence).  mode 'flat': additionally contains the empty team and
    is closed under the defined unions."""
    if mode not in ("flat", "downward_equiv"):
        raise ValueError("mode must be 'flat' or 'downward_equiv'")
    teams = kls.teams
    for team in teams:
        for sub in _subteams(team):
            if sub not in teams:
                return False
    if mode == "downward_equiv":
        return True
    empty = (CausalTeam.empty(kls.signature) if kls.kind == "c"
             else GeneralizedCausalTeam.empty(kls.signature))
    if empty not in teams:
        return False
    for a in teams:
        for b in teams:
            if kls.kind == "g":
                union = GeneralizedCausalTeam(
                    kls.signature, a.members | b.members)
            else:
                if not (a.is_empty() or b.is_empty() or a.law == b.law):
                    continue  # dissimilar laws: the union is undefined
                union = union_causal_teams(a, b)
            if union not in teams:
                return False
    return True


def _class_union_members(kls: TeamClass) -> frozenset:
    members = set()
    for team in kls.teams:
        if isinstance(team, CausalTeam):
            members.update(to_generalized(team).members)
        else:
            members.update(team.members)
    return frozenset(members)


def synthesize_co(kls: TeamClass) -> Formula:
    """A CO formula defining a nonempty flat class closed under
    equivalence: per law representative, the union's component bound
    conjoined with the law description."""
    if kls.is_empty():
        raise ModelError("synthesis needs a nonempty class")
    if not check_closure(kls, "flat"):
        raise ModelError("the class is not flat")
    sig = kls.signature
    union = _class_union_members(kls)
    disjuncts = []
    for rep in enumerate_representatives(sig):
        rows = [s for s, f in union if f == rep]
        disjuncts.append(And(build_theta(rows, sig).formula,
                             build_phi(rep, sig).formula))
    return big_or(disjuncts)


def synthesize_cod(kls: TeamClass, sem_cap: int = DEFAULT_SEM_CAP,
                   budget: int = 1_000_000) -> Formula:
    """A COD formula defining a nonempty class closed under embeddability:
    the conjunction of the non-extension formulas of the excluded teams."""
    if kls.is_empty():
        raise ModelError("synthesis needs a nonempty class")
    if not check_closure(kls, "downward_equiv"):
        raise ModelError("the class is not closed under embeddability")
    sig = kls.signature
    n = len(sem_reduced(sig))
    if n > sem_cap:
        raise BudgetExceededError("deterministic-model universe", n, sem_cap)
    conjuncts = []
    for team in enumerate_teams(sig, kls.kind, None, budget):
        if team.is_empty() or team in kls:
            continue
        conjuncts.append(build_xi(team).formula)
    if not conjuncts:
        return top(sig)
    out = conjuncts[0]
    for c in conjuncts[1:]:
        out = And(out, c)
    return out


def verify_defines(phi: Formula, kls: TeamClass, sig: Signature,
                   ctx: Optional[SatContext] = None,
                   budget: int = 1_000_000) -> bool:
    """Exhaustively check that the teams satisfying phi are exactly the
    class, over one representative per equivalence class of teams."""
    if ctx is None or ctx.semantics != kls.kind:
        ctx = SatContext(semantics=kls.kind)
    for team in enumerate_teams(sig, kls.kind, None, budget):
        if _sat(team, phi, ctx) != (team in kls):
            return False
    return True
