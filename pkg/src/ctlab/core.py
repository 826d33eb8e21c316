"""Signatures, assignments, function systems, and (generalized) causal teams.

Everything here is immutable and hashable; operations are pure functions.
Value tokens are opaque strings mapped to dense indices per variable, and
every structural function is stored as a dense table indexed by the
mixed-radix encoding of its parent tuple.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache, cached_property
from typing import Iterable, Optional, Sequence

from .errors import CycleError, ModelError, SignatureError


@dataclass(frozen=True)
class Signature:
    """A finite set of variables, each with a finite nonempty range of values.

    Variable order is fixed and is used as the lexicographic order for
    parent sequences and for all deterministic enumerations.
    """

    variables: tuple[str, ...]
    ranges: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if not self.variables:
            raise SignatureError("signature needs at least one variable")
        if len(set(self.variables)) != len(self.variables):
            raise SignatureError("duplicate variable names")
        if len(self.ranges) != len(self.variables):
            raise SignatureError("one range per variable required")
        for var, rng in zip(self.variables, self.ranges):
            if not rng:
                raise SignatureError(f"empty range for {var}")
            if len(set(rng)) != len(rng):
                raise SignatureError(f"duplicate value tokens for {var}")

    @staticmethod
    def of(spec: dict[str, Sequence[str]]) -> "Signature":
        """Build from a {variable: [tokens...]} mapping (insertion order)."""
        return Signature(tuple(spec.keys()),
                         tuple(tuple(v) for v in spec.values()))

    @cached_property
    def _index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.variables)}

    def index(self, var: str) -> int:
        try:
            return self._index[var]
        except KeyError:
            raise SignatureError(f"unknown variable {var!r}") from None

    def has_variable(self, var: str) -> bool:
        return var in self._index

    def range_of(self, var: str) -> tuple[str, ...]:
        return self.ranges[self.index(var)]

    def value_index(self, var: str, token: str) -> int:
        rng = self.range_of(var)
        try:
            return rng.index(token)
        except ValueError:
            raise SignatureError(
                f"value {token!r} not in range of {var}") from None

    def sorted_vars(self, vars: Iterable[str]) -> tuple[str, ...]:
        """The given variables in signature order."""
        return tuple(sorted(set(vars), key=self.index))


@dataclass(frozen=True)
class Assignment:
    """A total map variable -> value, stored as dense value indices."""

    signature: Signature
    values: tuple[int, ...]

    def __post_init__(self):
        sig = self.signature
        if len(self.values) != len(sig.variables):
            raise ModelError("assignment must cover every variable")
        for i, v in enumerate(self.values):
            if not 0 <= v < len(sig.ranges[i]):
                raise ModelError(
                    f"value index {v} out of range for {sig.variables[i]}")

    @staticmethod
    def of(sig: Signature, tokens: dict[str, str]) -> "Assignment":
        if set(tokens) != set(sig.variables):
            raise ModelError("assignment must mention exactly the variables")
        return Assignment(
            sig, tuple(sig.value_index(v, tokens[v]) for v in sig.variables))

    def value(self, var: str) -> str:
        return self.signature.range_of(var)[self.values[self.signature.index(var)]]

    def value_idx(self, var: str) -> int:
        return self.values[self.signature.index(var)]

    def tokens(self) -> dict[str, str]:
        return {v: self.value(v) for v in self.signature.variables}

    def sort_key(self) -> tuple[int, ...]:
        return self.values


def enumerate_assignments(sig: Signature) -> list[Assignment]:
    """All assignments over sig, in mixed-radix order (last variable fastest)."""
    index_ranges = [range(len(r)) for r in sig.ranges]
    return [Assignment(sig, combo) for combo in itertools.product(*index_ranges)]


def _mixed_radix_index(digits: Sequence[int], radices: Sequence[int]) -> int:
    idx = 0
    for d, r in zip(digits, radices):
        idx = idx * r + d
    return idx


@dataclass(frozen=True)
class Law:
    """One structural function: parent list (signature order) plus dense table.

    table[i] is the value index assigned to the parent tuple whose
    mixed-radix encoding (last parent fastest) is i.
    """

    parents: tuple[str, ...]
    table: tuple[int, ...]


@dataclass(frozen=True)
class FunctionSystem:
    """A system of structural functions; keys of `laws` are the endogenous set."""

    signature: Signature
    laws: tuple[tuple[str, Law], ...]

    def __post_init__(self):
        sig = self.signature
        seen = set()
        for var, law in self.laws:
            idx = sig.index(var)
            if var in seen:
                raise ModelError(f"two laws for {var}")
            seen.add(var)
            if var in law.parents:
                raise ModelError(f"{var} cannot be its own parent")
            par_idx = [sig.index(p) for p in law.parents]
            if par_idx != sorted(par_idx):
                raise ModelError(f"parents of {var} not in signature order")
            size = 1
            for p in law.parents:
                size *= len(sig.range_of(p))
            if len(law.table) != size:
                raise ModelError(f"table for {var} must cover every parent tuple")
            nvals = len(sig.ranges[idx])
            if any(not 0 <= t < nvals for t in law.table):
                raise ModelError(f"table value out of range for {var}")
        order = [sig.index(v) for v, _ in self.laws]
        if order != sorted(order):
            raise ModelError("laws must be listed in signature order")

    @staticmethod
    def of(sig: Signature,
           laws: dict[str, tuple[Sequence[str], dict[tuple[str, ...], str]]]
           ) -> "FunctionSystem":
        """Build from {var: (parents, {parent-token-tuple: value-token})}."""
        entries = []
        for var in sorted(laws, key=sig.index):
            parents, mapping = laws[var]
            parents = sig.sorted_vars(parents)
            radices = [len(sig.range_of(p)) for p in parents]
            size = 1
            for r in radices:
                size *= r
            table = [0] * size
            combos = list(itertools.product(*[sig.range_of(p) for p in parents]))
            if set(mapping) != set(combos):
                raise ModelError(f"table for {var} must cover every parent tuple")
            for combo in combos:
                digits = [sig.value_index(p, t) for p, t in zip(parents, combo)]
                table[_mixed_radix_index(digits, radices)] = \
                    sig.value_index(var, mapping[combo])
            entries.append((var, Law(parents, tuple(table))))
        return FunctionSystem(sig, tuple(entries))

    @cached_property
    def _law_map(self) -> dict[str, Law]:
        return dict(self.laws)

    @property
    def endogenous(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.laws)

    @property
    def exogenous(self) -> tuple[str, ...]:
        endo = set(self.endogenous)
        return tuple(v for v in self.signature.variables if v not in endo)

    def is_endogenous(self, var: str) -> bool:
        return var in self._law_map

    def parents_of(self, var: str) -> tuple[str, ...]:
        return self._law_map[var].parents

    def law_of(self, var: str) -> Law:
        return self._law_map[var]

    def evaluate_idx(self, var: str, parent_idx: Sequence[int]) -> int:
        """Value index of var for the given parent value indices."""
        return self._law_map[var].table[
            _mixed_radix_index(parent_idx, self._radices[var])]

    def evaluate_on(self, var: str, values: Sequence[int]) -> int:
        """Value index of var given a full vector of value indices."""
        sig = self.signature
        law = self._law_map[var]
        return self.evaluate_idx(var, [values[sig.index(p)] for p in law.parents])

    @cached_property
    def _radices(self) -> dict[str, tuple[int, ...]]:
        sig = self.signature
        return {v: tuple(len(sig.range_of(p)) for p in law.parents)
                for v, law in self.laws}

    @cached_property
    def is_recursive(self) -> bool:
        return self.topological_order() is not None

    def topological_order(self) -> Optional[tuple[str, ...]]:
        """Endogenous variables in dependency order, or None on a cycle.

        Deterministic: Kahn's algorithm with signature-order tie-break.
        """
        if "_topo" in self.__dict__:
            return self.__dict__["_topo"]
        sig = self.signature
        endo = list(self.endogenous)
        endo_set = set(endo)
        indeg = {v: sum(1 for p in self.parents_of(v) if p in endo_set)
                 for v in endo}
        order: list[str] = []
        ready = sorted((v for v in endo if indeg[v] == 0), key=sig.index)
        while ready:
            v = ready.pop(0)
            order.append(v)
            changed = False
            for w in endo:
                if indeg[w] > 0 and v in self.parents_of(w):
                    indeg[w] -= 1
                    if indeg[w] == 0:
                        ready.append(w)
                        changed = True
            if changed:
                ready.sort(key=sig.index)
        result = tuple(order) if len(order) == len(endo) else None
        object.__setattr__(self, "_topo", result)
        return result

    def require_recursive(self) -> None:
        if not self.is_recursive:
            raise CycleError("function system has a cyclic graph")

    def edges(self) -> list[tuple[str, str]]:
        """The induced graph: (parent, child) pairs."""
        return [(p, v) for v, law in self.laws for p in law.parents]

    def is_constant(self, var: str) -> bool:
        """True iff var is endogenous and its law outputs a single value."""
        law = self._law_map.get(var)
        if law is None:
            return False
        return len(set(law.table)) <= 1

    def constant_endogenous(self) -> tuple[str, ...]:
        return tuple(v for v in self.endogenous if self.is_constant(v))

    def sort_key(self):
        sig = self.signature
        return tuple((sig.index(v), tuple(sig.index(p) for p in law.parents),
                      law.table) for v, law in self.laws)


def is_compatible(s: Assignment, system: FunctionSystem) -> bool:
    """True iff s(V) = F_V(s(parents)) for every endogenous V."""
    if s.signature != system.signature:
        raise SignatureError("assignment and system over different signatures")
    return all(s.values[s.signature.index(v)] == system.evaluate_on(v, s.values)
               for v in system.endogenous)


# ---------------------------------------------------------------------------
# Similarity up to dummy arguments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalLaw:
    """Canonical form of a system under similarity: the non-constant
    endogenous variables with dummy parents pruned from list and table."""

    signature: Signature
    entries: tuple[tuple[str, tuple[str, ...], tuple[int, ...]], ...]

    def sort_key(self):
        sig = self.signature
        return tuple((sig.index(v), tuple(sig.index(p) for p in ps), table)
                     for v, ps, table in self.entries)


def dummy_parents(system: FunctionSystem, var: str) -> frozenset[str]:
    """Parents of var whose value never influences the output.

    A parent is dummy iff, with all other parents fixed (in every way),
    varying it never changes the function value.
    """
    if not system.is_endogenous(var):
        raise ModelError(f"{var} is exogenous")
    sig = system.signature
    law = system.law_of(var)
    radices = [len(sig.range_of(p)) for p in law.parents]
    dummies = []
    for i, p in enumerate(law.parents):
        other_ranges = [range(r) for j, r in enumerate(radices) if j != i]
        is_dummy = True
        for rest in itertools.product(*other_ranges):
            outs = set()
            for pv in range(radices[i]):
                digits = list(rest[:i]) + [pv] + list(rest[i:])
                outs.add(law.table[_mixed_radix_index(digits, radices)])
            if len(outs) > 1:
                is_dummy = False
                break
        if is_dummy:
            dummies.append(p)
    return frozenset(dummies)


def canonicalize(system: FunctionSystem) -> CanonicalLaw:
    """Canonical form; two systems are similar iff their forms are equal."""
    cached = system.__dict__.get("_canon")
    if cached is not None:
        return cached
    sig = system.signature
    entries = []
    for var in system.endogenous:
        if system.is_constant(var):
            continue
        law = system.law_of(var)
        dummies = dummy_parents(system, var)
        kept = tuple(p for p in law.parents if p not in dummies)
        kept_ranges = [sig.range_of(p) for p in kept]
        table = []
        for combo in itertools.product(*[range(len(r)) for r in kept_ranges]):
            full = []
            it = iter(combo)
            for p in law.parents:
                full.append(0 if p in dummies else next(it))
            table.append(system.evaluate_idx(var, full))
        entries.append((var, kept, tuple(table)))
    result = CanonicalLaw(sig, tuple(entries))
    object.__setattr__(system, "_canon", result)
    return result


def similar(f: FunctionSystem, g: FunctionSystem) -> bool:
    """Equivalence up to dummy arguments and constant/exogenous status."""
    if f.signature != g.signature:
        raise SignatureError("systems over different signatures")
    return canonicalize(f) == canonicalize(g)


def canonical_member(canon: CanonicalLaw) -> FunctionSystem:
    """The function system realizing a canonical law directly: the listed
    variables are endogenous with the pruned laws, everything else exogenous."""
    return FunctionSystem(
        canon.signature,
        tuple((v, Law(ps, table)) for v, ps, table in canon.entries))


def representative(system: FunctionSystem) -> FunctionSystem:
    """The canonical representative of system's similarity class."""
    return canonical_member(canonicalize(system))


# ---------------------------------------------------------------------------
# Teams
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CausalTeam:
    """A set of assignments sharing one function system they are all
    compatible with.  The empty team is a distinguished value with no law."""

    signature: Signature
    rows: frozenset[Assignment]
    law: Optional[FunctionSystem]

    def __post_init__(self):
        if self.rows:
            if self.law is None:
                raise ModelError("nonempty causal team needs a law")
            if self.law.signature != self.signature:
                raise SignatureError("law over a different signature")
            for s in self.rows:
                if s.signature != self.signature:
                    raise SignatureError("row over a different signature")
                if not is_compatible(s, self.law):
                    raise ModelError("row incompatible with the law")
        elif self.law is not None:
            raise ModelError("the empty causal team carries no law")

    @staticmethod
    def of(sig: Signature, rows: Iterable[Assignment],
           law: Optional[FunctionSystem]) -> "CausalTeam":
        rows = frozenset(rows)
        return CausalTeam(sig, rows, law if rows else None)

    @staticmethod
    def empty(sig: Signature) -> "CausalTeam":
        return CausalTeam(sig, frozenset(), None)

    def is_empty(self) -> bool:
        return not self.rows

    def is_recursive(self) -> bool:
        return self.law is None or self.law.is_recursive

    def sorted_rows(self) -> list[Assignment]:
        return sorted(self.rows, key=Assignment.sort_key)

    def team_component(self) -> frozenset[Assignment]:
        return self.rows

    def subteam(self, rows: Iterable[Assignment]) -> "CausalTeam":
        rows = frozenset(rows)
        if not rows <= self.rows:
            raise ModelError("not a subset of the team component")
        return CausalTeam.of(self.signature, rows, self.law)


Member = tuple[Assignment, FunctionSystem]


@dataclass(frozen=True)
class GeneralizedCausalTeam:
    """A set of (assignment, function system) pairs, each compatible."""

    signature: Signature
    members: frozenset[Member]

    def __post_init__(self):
        for s, f in self.members:
            if s.signature != self.signature or f.signature != self.signature:
                raise SignatureError("member over a different signature")
            if not is_compatible(s, f):
                raise ModelError("member assignment incompatible with its law")

    @staticmethod
    def of(sig: Signature, members: Iterable[Member]) -> "GeneralizedCausalTeam":
        return GeneralizedCausalTeam(sig, frozenset(members))

    @staticmethod
    def empty(sig: Signature) -> "GeneralizedCausalTeam":
        return GeneralizedCausalTeam(sig, frozenset())

    def is_empty(self) -> bool:
        return not self.members

    def is_recursive(self) -> bool:
        return all(f.is_recursive for _, f in self.members)

    def team_component(self) -> frozenset[Assignment]:
        return frozenset(s for s, _ in self.members)

    def registry(self) -> list[FunctionSystem]:
        """The distinct function systems, in deterministic order."""
        return sorted({f for _, f in self.members}, key=FunctionSystem.sort_key)

    def sorted_members(self) -> list[Member]:
        return sorted(self.members,
                      key=lambda m: (m[0].sort_key(), m[1].sort_key()))

    def subteam(self, members: Iterable[Member]) -> "GeneralizedCausalTeam":
        members = frozenset(members)
        if not members <= self.members:
            raise ModelError("not a subset of the team")
        return GeneralizedCausalTeam(self.signature, members)


Team = CausalTeam | GeneralizedCausalTeam


def to_generalized(team: CausalTeam) -> GeneralizedCausalTeam:
    if team.is_empty():
        return GeneralizedCausalTeam.empty(team.signature)
    return GeneralizedCausalTeam.of(
        team.signature, ((s, team.law) for s in team.rows))


def to_causal(team: GeneralizedCausalTeam) -> CausalTeam:
    if team.is_empty():
        return CausalTeam.empty(team.signature)
    registry = team.registry()
    if len(registry) > 1:
        raise ModelError("team has more than one function component")
    return CausalTeam.of(team.signature, team.team_component(), registry[0])


def _normalized_members(team: GeneralizedCausalTeam) -> frozenset[Member]:
    """Members with each law replaced by its similarity representative."""
    return frozenset((s, representative(f)) for s, f in team.members)


def team_equivalent(a: Team, b: Team) -> bool:
    """Indistinguishability for the languages (same team components per
    similarity class of the laws)."""
    if a.signature != b.signature:
        raise SignatureError("teams over different signatures")
    if isinstance(a, CausalTeam) != isinstance(b, CausalTeam):
        raise ModelError("teams of different kinds")
    if isinstance(a, CausalTeam):
        if a.is_empty() or b.is_empty():
            return a.is_empty() and b.is_empty()
        return a.rows == b.rows and similar(a.law, b.law)
    return _normalized_members(a) == _normalized_members(b)


def preceq(a: Team, b: Team) -> bool:
    """a is equivalent to some causal subteam of b; the empty team precedes
    everything."""
    if a.signature != b.signature:
        raise SignatureError("teams over different signatures")
    if isinstance(a, CausalTeam) != isinstance(b, CausalTeam):
        raise ModelError("teams of different kinds")
    if a.is_empty():
        return True
    if b.is_empty():
        return False
    if isinstance(a, CausalTeam):
        return a.rows <= b.rows and similar(a.law, b.law)
    return _normalized_members(a) <= _normalized_members(b)


def union_causal_teams(a: CausalTeam, b: CausalTeam) -> CausalTeam:
    """Union of similar causal teams: the shared non-constant endogenous
    variables keep their functions, restricted to the common parents."""
    if a.signature != b.signature:
        raise SignatureError("teams over different signatures")
    if a.is_empty():
        return b
    if b.is_empty():
        return a
    f, g = a.law, b.law
    if not similar(f, g):
        raise ModelError("union requires similar teams")
    sig = a.signature
    entries = []
    for var in f.endogenous:
        if f.is_constant(var):
            continue
        # var is in En(G)\Cn(G) too, since the laws are similar
        common = tuple(p for p in f.parents_of(var) if p in g.parents_of(var))
        radices = [len(sig.range_of(p)) for p in common]
        table = []
        for combo in itertools.product(*[range(r) for r in radices]):
            it = iter(combo)
            full = [next(it) if p in common else 0 for p in f.parents_of(var)]
            table.append(f.evaluate_idx(var, full))
        entries.append((var, Law(common, tuple(table))))
    h = FunctionSystem(sig, tuple(entries))
    return CausalTeam.of(sig, a.rows | b.rows, h)


def union_gcts(a: GeneralizedCausalTeam,
               b: GeneralizedCausalTeam) -> GeneralizedCausalTeam:
    if a.signature != b.signature:
        raise SignatureError("teams over different signatures")
    return GeneralizedCausalTeam(a.signature, a.members | b.members)


def restrict_to_similar(team: GeneralizedCausalTeam,
                        system: FunctionSystem) -> GeneralizedCausalTeam:
    """The subteam whose laws are similar to the given system."""
    canon = canonicalize(system)
    return GeneralizedCausalTeam(
        team.signature,
        frozenset(m for m in team.members if canonicalize(m[1]) == canon))


def quotient_cardinality(team: Team) -> int:
    """Number of members up to pairwise equivalence (same assignment,
    similar law); for a causal team this is the number of rows."""
    if isinstance(team, CausalTeam):
        return len(team.rows)
    return len({(s, canonicalize(f)) for s, f in team.members})


def is_uniform(team: Team) -> bool:
    """All laws pairwise similar; the empty team is uniform."""
    if isinstance(team, CausalTeam):
        return True
    return len({canonicalize(f) for _, f in team.members}) <= 1


# ---------------------------------------------------------------------------
# Finite universes
# ---------------------------------------------------------------------------

def count_function_systems(sig: Signature) -> int:
    """|F_sigma| computed arithmetically (cyclic systems included);
    saturates at 10**18 so oversized signatures fail fast."""
    cap = 10 ** 18
    total = 1
    for var in sig.variables:
        others = [v for v in sig.variables if v != var]
        nvals = len(sig.range_of(var))
        options = 1
        for size in range(len(others) + 1):
            for parents in itertools.combinations(others, size):
                rows = 1
                for p in parents:
                    rows *= len(sig.range_of(p))
                if rows > 60:
                    return cap
                options += nvals ** rows
                if options > cap:
                    return cap
        total *= options
        if total > cap:
            return cap
    return total


ENUMERATION_BUDGET = 200_000


def _enumeration_guard(sig: Signature) -> None:
    from .errors import BudgetExceededError
    count = count_function_systems(sig)
    if count > ENUMERATION_BUDGET:
        raise BudgetExceededError("function-system sweep", count,
                                  ENUMERATION_BUDGET)


def _variable_options(sig: Signature, var: str) -> list[Optional[Law]]:
    """None (exogenous) plus every law for var, in deterministic order."""
    options: list[Optional[Law]] = [None]
    others = [v for v in sig.variables if v != var]
    nvals = len(sig.range_of(var))
    for size in range(len(others) + 1):
        for parents in itertools.combinations(others, size):
            parents = sig.sorted_vars(parents)
            rows = 1
            for p in parents:
                rows *= len(sig.range_of(p))
            for table in itertools.product(range(nvals), repeat=rows):
                options.append(Law(parents, table))
    return options


def enumerate_function_systems(sig: Signature,
                               recursive_only: bool = False
                               ) -> list[FunctionSystem]:
    """Every function system over sig exactly once, deterministic order.

    Refuses signatures whose system count exceeds the enumeration budget.
    """
    _enumeration_guard(sig)
    per_var = [_variable_options(sig, v) for v in sig.variables]
    systems = []
    for combo in itertools.product(*per_var):
        laws = tuple((v, law) for v, law in zip(sig.variables, combo)
                     if law is not None)
        system = FunctionSystem(sig, laws)
        if recursive_only and not system.is_recursive:
            continue
        systems.append(system)
    return systems


def enumerate_sem(sig: Signature) -> list[Member]:
    """All compatible (assignment, recursive system) pairs."""
    assignments = enumerate_assignments(sig)
    return [(s, f) for f in enumerate_function_systems(sig, recursive_only=True)
            for s in assignments if is_compatible(s, f)]


@lru_cache(maxsize=None)
def enumerate_representatives(sig: Signature) -> tuple[FunctionSystem, ...]:
    """One canonical representative per similarity class of the recursive
    systems, ordered by the canonical form's structural key."""
    canons = {canonicalize(f)
              for f in enumerate_function_systems(sig, recursive_only=True)}
    return tuple(canonical_member(c)
                 for c in sorted(canons, key=CanonicalLaw.sort_key))


@lru_cache(maxsize=None)
def sem_reduced(sig: Signature) -> tuple[Member, ...]:
    """enumerate_sem deduplicated up to equivalence: one member per
    (assignment, similarity class), carried by the class representative."""
    out = []
    for rep in enumerate_representatives(sig):
        for s in enumerate_assignments(sig):
            if is_compatible(s, rep):
                out.append((s, rep))
    return tuple(out)


def normalize_gct(team: GeneralizedCausalTeam) -> GeneralizedCausalTeam:
    """The equivalent team over sem_reduced (laws replaced by representatives)."""
    return GeneralizedCausalTeam(team.signature, _normalized_members(team))


def normalize_ct(team: CausalTeam) -> CausalTeam:
    """The equivalent causal team carried by the law's representative."""
    if team.is_empty():
        return team
    return CausalTeam.of(team.signature, team.rows, representative(team.law))
