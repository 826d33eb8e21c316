"""The do(X=x) operator on assignments and (generalized) causal teams.

Intervening detaches the targeted variables from their laws, forces the
given values, and recomputes every remaining endogenous variable by one
topological pass over the post-intervention graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .core import (Assignment, CausalTeam, FunctionSystem,
                   GeneralizedCausalTeam, Signature, is_compatible)
from .errors import ModelError, SignatureError


@dataclass(frozen=True)
class InterventionSpec:
    """An ordered list of (variable, value token) pairs.

    Repeats are allowed; the spec is inconsistent when one variable is
    paired with two distinct values.  All operations here reject
    inconsistent specs; only the counterfactual semantic clause consumes
    inconsistency (as vacuous truth).
    """

    signature: Signature
    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        for var, tok in self.pairs:
            self.signature.value_index(var, tok)  # validates both

    @property
    def is_consistent(self) -> bool:
        seen: dict[str, str] = {}
        for var, tok in self.pairs:
            if seen.setdefault(var, tok) != tok:
                return False
        return True

    def targets(self) -> frozenset[str]:
        return frozenset(var for var, _ in self.pairs)

    def forced_values(self) -> dict[str, int]:
        """Variable -> forced value index; requires consistency."""
        if not self.is_consistent:
            raise ModelError("inconsistent intervention")
        return {var: self.signature.value_index(var, tok)
                for var, tok in self.pairs}


@lru_cache(maxsize=None)
def restrict_system(system: FunctionSystem,
                    removed: frozenset[str]) -> FunctionSystem:
    """The system restricted to the endogenous variables outside `removed`."""
    return FunctionSystem(
        system.signature,
        tuple((v, law) for v, law in system.laws if v not in removed))


def intervene_assignment(s: Assignment, system: FunctionSystem,
                         spec: InterventionSpec
                         ) -> tuple[Assignment, FunctionSystem]:
    """Intervention on a single assignment; returns the rewritten
    assignment together with the restricted system."""
    if s.signature != system.signature or s.signature != spec.signature:
        raise SignatureError("mismatched signatures")
    system.require_recursive()
    forced = spec.forced_values()
    post = restrict_system(system, spec.targets())
    sig = s.signature
    values = list(s.values)
    for var, idx in forced.items():
        values[sig.index(var)] = idx
    for var in post.topological_order():
        values[sig.index(var)] = post.evaluate_on(var, values)
    return Assignment(sig, tuple(values)), post


def intervene_causal_team(team: CausalTeam,
                          spec: InterventionSpec) -> CausalTeam:
    """Pointwise image of the rows under do(spec), with the restricted law.
    Rows that collide after the intervention merge (teams are sets)."""
    if not spec.is_consistent:
        raise ModelError("inconsistent intervention")
    if team.is_empty():
        return team
    rows = set()
    post = None
    for s in team.rows:
        s2, post = intervene_assignment(s, team.law, spec)
        rows.add(s2)
    return CausalTeam.of(team.signature, rows, post)


def intervene_gct(team: GeneralizedCausalTeam,
                  spec: InterventionSpec) -> GeneralizedCausalTeam:
    """Pointwise image, each member rewritten by its own law."""
    if not spec.is_consistent:
        raise ModelError("inconsistent intervention")
    members = set()
    for s, f in team.members:
        members.add(intervene_assignment(s, f, spec))
    return GeneralizedCausalTeam.of(team.signature, members)


def intervene(team, spec: InterventionSpec):
    if isinstance(team, CausalTeam):
        return intervene_causal_team(team, spec)
    return intervene_gct(team, spec)
