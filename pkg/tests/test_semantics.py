import random

import pytest

from ctlab.core import (Assignment, CausalTeam, FunctionSystem,
                        GeneralizedCausalTeam, enumerate_assignments,
                        enumerate_function_systems, enumerate_sem,
                        is_compatible, sem_reduced, team_equivalent,
                        to_generalized)
from ctlab.intervention import InterventionSpec, intervene_causal_team
from ctlab.semantics import (SatContext, enumerate_teams, entails_bounded,
                             equivalent_bounded, find_countermodel_bounded,
                             is_flat, satisfies, singleton_cts,
                             singleton_gcts, units)
from ctlab.syntax import (And, Cf, Dep, Eq, GlobalOr, Neg, TensorOr, big_or,
                          classify, con, parse)

from oracles import brute_satisfies
from test_core import chain_law


def rand_formula(rng, sig, depth, language="ANY"):
    kinds = ["eq"]
    if language in ("ANY", "COD"):
        kinds += ["con", "dep"]
    if depth > 0:
        kinds += ["neg", "and", "or", "cf"]
        if language in ("ANY", "COV"):
            kinds.append("gor")
    k = rng.choice(kinds)
    var = rng.choice(sig.variables)
    if k == "eq":
        return Eq(var, rng.choice(sig.range_of(var)))
    if k == "con":
        return con(var)
    if k == "dep":
        return Dep((rng.choice(sig.variables),), var)
    if k == "neg":
        return Neg(rand_formula(rng, sig, depth - 1, "CO"))
    if k == "and":
        return And(rand_formula(rng, sig, depth - 1, language),
                   rand_formula(rng, sig, depth - 1, language))
    if k == "or":
        return TensorOr(rand_formula(rng, sig, depth - 1, language),
                        rand_formula(rng, sig, depth - 1, language))
    if k == "gor":
        return GlobalOr(rand_formula(rng, sig, depth - 1, language),
                        rand_formula(rng, sig, depth - 1, language))
    ante = tuple((v, rng.choice(sig.range_of(v)))
                 for v in rng.sample(list(sig.variables),
                                     rng.randint(1, min(2,
                                                        len(sig.variables)))))
    return Cf(ante, rand_formula(rng, sig, depth - 1, language))


def well_classed(rng, sig, depth, language="ANY"):
    while True:
        phi = rand_formula(rng, sig, depth, language)
        if classify(phi) != "NONE":
            return phi


def rand_gct(rng, sig, max_members=3):
    sem = sem_reduced(sig)
    return GeneralizedCausalTeam.of(
        sig, rng.sample(list(sem), rng.randint(0, max_members)))


class TestWorkedJudgments:
    @pytest.fixture()
    def team(self, chain_sig):
        f = chain_law(chain_sig)
        rows = [Assignment.of(chain_sig,
                              {"U": "0", "X": "0", "Y": "1", "Z": "2"}),
                Assignment.of(chain_sig,
                              {"U": "1", "X": "1", "Y": "2", "Z": "6"})]
        return CausalTeam.of(chain_sig, rows, f)

    def test_worked_judgments(self, team, chain_sig):
        ctx = SatContext(semantics="c")
        cases = [("(X=1) []-> Y=2", True),
                 ("dep(Y; Z)", True),
                 ("!Y=2 \\/ Y=2", True),
                 ("!Y=2 \\\\/ Y=2", False),
                 ("X=1 => Y=2", True)]
        for text, want in cases:
            assert satisfies(team, parse(text, chain_sig), ctx) is want

    def test_intervention_breaks_dependence(self, team, chain_sig):
        post = intervene_causal_team(
            team, InterventionSpec(chain_sig, (("X", "1"),)))
        assert not satisfies(post, parse("dep(Y; Z)", chain_sig))

    def test_empty_team_satisfies_everything(self, chain_sig):
        empty = CausalTeam.empty(chain_sig)
        rng = random.Random(0)
        for _ in range(25):
            phi = well_classed(rng, chain_sig, 2)
            assert satisfies(empty, phi)


class TestClosureProperties:
    def test_downward_closure_and_invariance(self, sig2):
        rng = random.Random(21)
        ctx = SatContext(semantics="g")
        sem = enumerate_sem(sig2)
        for _ in range(120):
            phi = well_classed(rng, sig2, 2)
            members = rng.sample(sem, rng.randint(0, 3))
            team = GeneralizedCausalTeam.of(sig2, members)
            if satisfies(team, phi, ctx):
                sub = GeneralizedCausalTeam.of(
                    sig2, rng.sample(members, rng.randint(0, len(members))))
                assert satisfies(sub, phi, ctx)
            # equivalence invariance via law normalization
            variant = GeneralizedCausalTeam.of(
                sig2, [(s, _variant(rng, f)) for s, f in members])
            if team_equivalent(team, variant):
                assert satisfies(team, phi, ctx) == \
                    satisfies(variant, phi, ctx)

    def test_co_flatness_and_union_closure(self, sig2):
        rng = random.Random(22)
        ctx = SatContext(semantics="g")
        sem = sem_reduced(sig2)
        for _ in range(80):
            alpha = well_classed(rng, sig2, 2, "CO")
            a = rand_gct(rng, sig2)
            b = rand_gct(rng, sig2)
            flat = all(satisfies(u, alpha, ctx) for u in units(a))
            assert satisfies(a, alpha, ctx) == flat
            if satisfies(a, alpha, ctx) and satisfies(b, alpha, ctx):
                union = GeneralizedCausalTeam.of(sig2,
                                                 a.members | b.members)
                assert satisfies(union, alpha, ctx)

    def test_flat_shortcut_agrees_with_brute_force(self, sig2):
        rng = random.Random(23)
        ctx = SatContext(semantics="g")
        for _ in range(60):
            phi = well_classed(rng, sig2, 2)
            team = rand_gct(rng, sig2)
            assert satisfies(team, phi, ctx) == brute_satisfies(team, phi)

    def test_is_flat(self, sig2):
        gcts = list(enumerate_teams(sig2, "g", 3))
        assert is_flat(parse("(X=1) []-> Y=1", sig2), sig2, gcts)
        assert is_flat(parse("!X=1 \\/ Y=0", sig2), sig2, gcts)
        # con(Y) on a two-row team: satisfied pointwise, not as a team
        assert not is_flat(con("Y"), sig2, gcts)
        assert not is_flat(Dep(("X",), "Y"), sig2, gcts)


class TestIdentification:
    def test_ct_iff_generalized(self, sig2):
        rng = random.Random(31)
        cctx = SatContext(semantics="c")
        gctx = SatContext(semantics="g")
        teams = list(enumerate_teams(sig2, "c", 3))
        for _ in range(100):
            phi = well_classed(rng, sig2, 2)
            team = rng.choice(teams)
            assert satisfies(team, phi, cctx) == \
                satisfies(to_generalized(team), phi, gctx)

    def test_boxright_free_depends_on_component_only(self, sig2):
        rng = random.Random(32)
        ctx = SatContext(semantics="g")
        assignments = enumerate_assignments(sig2)
        systems = enumerate_function_systems(sig2, recursive_only=True)
        done = 0
        while done < 80:
            phi = well_classed(rng, sig2, 2)
            if not _boxright_free(phi):
                continue
            rows = rng.sample(assignments, rng.randint(0, 3))
            teams = []
            for _ in range(2):
                members = []
                for s in rows:
                    fs = [f for f in systems if is_compatible(s, f)]
                    members.append((s, rng.choice(fs)))
                teams.append(GeneralizedCausalTeam.of(sig2, members))
            a, b = teams
            if a.team_component() == b.team_component():
                assert satisfies(a, phi, ctx) == satisfies(b, phi, ctx)
                done += 1

    def test_negation_is_pointwise_in_both_semantics(self, sig2):
        f = FunctionSystem(sig2, ())
        every = enumerate_assignments(sig2)
        rows = [s for s in every if s.value("X") == "0"][:1] + \
            [s for s in every if s.value("X") == "1"][:1]
        ct = CausalTeam.of(sig2, rows, f)
        alpha = Eq("X", "0")
        # one row satisfies alpha and one does not, so neither the atom
        # nor its pointwise negation holds on the team
        assert not satisfies(ct, Neg(alpha))
        assert not satisfies(ct, alpha)


class TestDefinabilityEquations:
    def test_dep_via_constancy(self, sig2):
        # dep(X; Y) == \/_x (X=x /\ con(Y))
        dep = Dep(("X",), "Y")
        expansion = big_or([And(Eq("X", x), con("Y"))
                            for x in sig2.range_of("X")])
        assert equivalent_bounded(dep, expansion, sig2, None)

    def test_con_via_global_disjunction(self, sig2):
        lhs = con("Y")
        rhs = big_or([])if False else GlobalOr(Eq("Y", "0"), Eq("Y", "1"))
        assert equivalent_bounded(lhs, rhs, sig2, None)


class TestBoundedOracle:
    def test_reflexive(self, sig2):
        rng = random.Random(41)
        ctx = SatContext(semantics="g")
        for _ in range(10):
            phi = well_classed(rng, sig2, 2)
            assert entails_bounded([phi], phi, sig2, 3, ctx)

    def test_equality_entails_constancy(self, sig2):
        assert entails_bounded([Eq("X", "1")], con("X"), sig2, None)
        assert not entails_bounded([con("X")], Eq("X", "1"), sig2, None)
        cm = find_countermodel_bounded([con("X")], Eq("X", "1"), sig2, None)
        assert cm is not None
        assert satisfies(cm, con("X")) and not satisfies(cm, Eq("X", "1"))

    def test_team_universes_deduplicated(self, sig2):
        gcts = list(enumerate_teams(sig2, "g", 2))
        assert len(gcts) == len(set(gcts))
        cts = list(enumerate_teams(sig2, "c", None))
        assert len(cts) == len(set(cts))
        assert sum(1 for t in cts if t.is_empty()) == 1

    def test_singletons_match_sem(self, sig2):
        assert len(singleton_gcts(sig2)) == len(sem_reduced(sig2)) == 12
        assert len(singleton_cts(sig2)) == 12


def _variant(rng, f):
    from ctlab.core import canonical_member, canonicalize
    return rng.choice([f, canonical_member(canonicalize(f))])


def _boxright_free(phi):
    from ctlab.syntax import is_boxright_free
    return is_boxright_free(phi)


class TestConcurrency:
    def test_shared_context_across_threads(self, sig2):
        from concurrent.futures import ThreadPoolExecutor
        rng = random.Random(71)
        ctx = SatContext(semantics="g")
        cases = [(rand_gct(rng, sig2), well_classed(rng, sig2, 2))
                 for _ in range(40)]
        serial = [satisfies(t, f, SatContext(semantics="g"))
                  for t, f in cases]
        with ThreadPoolExecutor(max_workers=4) as pool:
            parallel = list(pool.map(
                lambda c: satisfies(c[0], c[1], ctx), cases))
        assert serial == parallel


class TestCausalUnionClosure:
    def test_co_formulas_closed_under_defined_unions(self, sig2):
        from ctlab.core import (canonical_member, canonicalize,
                                enumerate_function_systems, is_compatible,
                                union_causal_teams)
        rng = random.Random(81)
        cctx = SatContext(semantics="c")
        systems = enumerate_function_systems(sig2, recursive_only=True)
        assignments = enumerate_assignments(sig2)
        checked = 0
        while checked < 60:
            f = rng.choice(systems)
            g = rng.choice([f, canonical_member(canonicalize(f))])
            rows_f = [s for s in assignments if is_compatible(s, f)]
            rows_g = [s for s in assignments if is_compatible(s, g)]
            a = CausalTeam.of(sig2, rng.sample(rows_f,
                                               rng.randint(0, len(rows_f))),
                              f if rows_f else None)
            b = CausalTeam.of(sig2, rng.sample(rows_g,
                                               rng.randint(0, len(rows_g))),
                              g if rows_g else None)
            alpha = well_classed(rng, sig2, 2, "CO")
            if satisfies(a, alpha, cctx) and satisfies(b, alpha, cctx):
                assert satisfies(union_causal_teams(a, b), alpha, cctx)
                checked += 1
