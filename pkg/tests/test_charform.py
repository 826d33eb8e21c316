import itertools
import random

import pytest

from ctlab.charform import (build_beta_en, build_chi, build_chi_k,
                            build_direct_cause, build_leadsto, build_mu,
                            build_phi, build_theta, build_unf, build_xi)
from ctlab.core import (Assignment, CausalTeam, FunctionSystem,
                        GeneralizedCausalTeam, Signature, canonicalize,
                        enumerate_assignments, enumerate_representatives,
                        is_uniform, preceq, quotient_cardinality,
                        sem_reduced, similar, to_generalized)
from ctlab.errors import BudgetExceededError, ModelError
from ctlab.semantics import SatContext, enumerate_teams, satisfies
from ctlab.syntax import format_formula, parse

from test_core import chain_law


@pytest.fixture(scope="module")
def gctx():
    return SatContext(semantics="g")


def small_gcts(sig, max_members=3):
    return [GeneralizedCausalTeam.of(sig, combo)
            for k in range(max_members + 1)
            for combo in itertools.combinations(sem_reduced(sig), k)]


class TestPhi:
    def test_characterizes_similarity_class(self, sig2, gctx):
        teams = small_gcts(sig2)
        for rep in enumerate_representatives(sig2):
            phi = build_phi(rep).formula
            canon = canonicalize(rep)
            for team in teams:
                want = all(canonicalize(f) == canon
                           for _, f in team.members)
                assert satisfies(team, phi, gctx) is want

    def test_own_team_satisfies(self, sig2):
        for s, f in sem_reduced(sig2):
            team = CausalTeam.of(sig2, [s], f)
            assert satisfies(team, build_phi(f).formula,
                             SatContext(semantics="c"))

    def test_similar_systems_same_class(self, sig2, gctx):
        from ctlab.core import enumerate_function_systems
        systems = enumerate_function_systems(sig2, recursive_only=True)
        teams = small_gcts(sig2, 2)
        rng = random.Random(4)
        for _ in range(10):
            f, g = rng.sample(systems, 2)
            if not similar(f, g):
                continue
            pf, pg = build_phi(f).formula, build_phi(g).formula
            for team in teams:
                assert satisfies(team, pf, gctx) == \
                    satisfies(team, pg, gctx)

    def test_reparses(self, sig2):
        for rep in enumerate_representatives(sig2):
            phi = build_phi(rep).formula
            assert parse(format_formula(phi), sig2) == phi


class TestTheta:
    def test_subset_characterization(self, sig2, gctx):
        teams = small_gcts(sig2)
        assignments = enumerate_assignments(sig2)
        for k in (0, 1, 2, 4):
            for rows in itertools.combinations(assignments, k):
                theta = build_theta(rows, sig2).formula
                for team in teams:
                    want = team.team_component() <= set(rows)
                    assert satisfies(team, theta, gctx) is want

    def test_full_component_always_satisfied(self, sig2, gctx):
        theta = build_theta(enumerate_assignments(sig2), sig2).formula
        for team in small_gcts(sig2, 2):
            assert satisfies(team, theta, gctx)

    def test_empty_is_bottom(self, sig2):
        from ctlab.syntax import bottom
        assert build_theta([], sig2).formula == bottom(sig2)


class TestCardinality:
    def test_mu_on_singletons(self, sig2, gctx):
        mu = build_mu(sig2).formula
        sem = sem_reduced(sig2)
        for (s, f), (t, g) in itertools.combinations(sem, 2):
            if s != t:
                continue
            team = GeneralizedCausalTeam.of(sig2, [(s, f), (t, g)])
            assert satisfies(team, mu, gctx) is is_uniform(team)

    def test_chi_k_quotient(self, sig2, gctx):
        teams = small_gcts(sig2)
        for k in range(4):
            chik = build_chi_k(sig2, k).formula
            for team in teams:
                want = quotient_cardinality(team) <= k
                assert satisfies(team, chik, gctx) is want

    def test_chi_k_on_causal_teams_counts_rows(self, sig2):
        cctx = SatContext(semantics="c")
        chi2 = build_chi_k(sig2, 2).formula
        for team in enumerate_teams(sig2, "c", None):
            assert satisfies(team, chi2, cctx) is (len(team.rows) <= 2)

    def test_chi_simplifies_over_causal_teams(self, sig2):
        from ctlab.syntax import big_and, con
        cctx = SatContext(semantics="c")
        chi = build_chi(sig2).formula
        cons = big_and([con(v) for v in sig2.variables])
        for team in enumerate_teams(sig2, "c", None):
            assert satisfies(team, chi, cctx) == \
                satisfies(team, cons, cctx)

    def test_negative_k_rejected(self, sig2):
        with pytest.raises(ValueError):
            build_chi_k(sig2, -1)


class TestXi:
    def test_non_embeddability(self, sig2, gctx):
        small = [t for t in small_gcts(sig2, 2) if not t.is_empty()]
        teams = small_gcts(sig2)
        for target in small:
            xi = build_xi(target).formula
            for team in teams:
                assert satisfies(team, xi, gctx) is not preceq(target, team)

    def test_empty_satisfies_everything(self, sig2, gctx):
        target = small_gcts(sig2, 1)[1]
        xi = build_xi(target).formula
        assert satisfies(GeneralizedCausalTeam.empty(sig2), xi, gctx)

    def test_self_never_satisfies(self, sig2, gctx):
        for target in small_gcts(sig2, 2):
            if target.is_empty():
                continue
            assert not satisfies(target, build_xi(target).formula, gctx)

    def test_reduced_matches_unreduced(self, sig2, gctx):
        targets = [t for t in small_gcts(sig2, 1) if not t.is_empty()]
        teams = small_gcts(sig2, 2)
        for target in targets[:4]:
            red = build_xi(target, reduced=True).formula
            full = build_xi(target, reduced=False).formula
            for team in teams:
                assert satisfies(team, red, gctx) == \
                    satisfies(team, full, gctx)

    def test_causal_team_via_identification(self, sig2):
        cctx = SatContext(semantics="c")
        cts = [t for t in enumerate_teams(sig2, "c", 2)]
        targets = [t for t in cts if not t.is_empty()][:6]
        for target in targets:
            xi = build_xi(target).formula
            for team in cts:
                assert satisfies(team, xi, cctx) is not preceq(target, team)

    def test_empty_target_rejected(self, sig2):
        with pytest.raises(ModelError):
            build_xi(GeneralizedCausalTeam.empty(sig2))


class TestUnf:
    def test_every_causal_team_satisfies(self, sig2):
        unf = build_unf(sig2).formula
        cctx = SatContext(semantics="c")
        for team in enumerate_teams(sig2, "c", None):
            assert satisfies(team, unf, cctx)

    def test_defines_uniformity(self, sig2, gctx):
        unf = build_unf(sig2).formula
        for team in small_gcts(sig2):
            assert satisfies(team, unf, gctx) is is_uniform(team)

    def test_mixed_class_witness(self, sig2, gctx):
        unf = build_unf(sig2).formula
        sem = sem_reduced(sig2)
        witness = next(
            GeneralizedCausalTeam.of(sig2, [a, b])
            for a, b in itertools.combinations(sem, 2)
            if canonicalize(a[1]) != canonicalize(b[1]))
        assert not satisfies(witness, unf, gctx)


class TestCausalInfluence:
    def test_chain_law_affects(self, chain_sig):
        # X feeds Y through an injective table, so X leads to Y
        f = chain_law(chain_sig)
        s = Assignment.of(chain_sig, {"U": "0", "X": "0", "Y": "1",
                                      "Z": "2"})
        team = CausalTeam.of(chain_sig, [s], f)
        phi = build_leadsto("X", "Y", chain_sig).formula
        assert satisfies(team, phi, SatContext(semantics="c"))

    def test_exogenous_everywhere_never_endogenous(self, sig2):
        f = FunctionSystem(sig2, ())
        cctx = SatContext(semantics="c")
        for s in enumerate_assignments(sig2):
            team = CausalTeam.of(sig2, [s], f)
            for v in sig2.variables:
                assert not satisfies(team, build_beta_en(v, sig2).formula,
                                     cctx)

    def test_beta_en_detects_nonconstant_law(self, sig2):
        f = FunctionSystem.of(sig2, {"Y": (("X",), {("0",): "0",
                                                    ("1",): "1"})})
        cctx = SatContext(semantics="c")
        s = next(a for a in enumerate_assignments(sig2)
                 if a.value("X") == a.value("Y"))
        team = CausalTeam.of(sig2, [s], f)
        assert satisfies(team, build_beta_en("Y", sig2).formula, cctx)
        assert not satisfies(team, build_beta_en("X", sig2).formula, cctx)

    def test_single_variable_rejected(self):
        sig = Signature.of({"A": ["0", "1"]})
        with pytest.raises(ModelError):
            build_leadsto("A", "A", sig)
        with pytest.raises(ModelError):
            build_beta_en("A", sig)

    def test_direct_cause_matches_leadsto_on_two_vars(self, sig2):
        # with no third variable, the full-context direct-cause disjuncts
        # are a subset of the leadsto ones; semantic verdicts coincide on
        # singleton teams
        cctx = SatContext(semantics="c")
        dc = build_direct_cause("X", "Y", sig2).formula
        lead = build_leadsto("X", "Y", sig2).formula
        for s, f in sem_reduced(sig2):
            team = CausalTeam.of(sig2, [s], f)
            assert satisfies(team, dc, cctx) == satisfies(team, lead, cctx)


class TestBudgets:
    def test_unf_refuses_large_signature(self, chain_sig):
        with pytest.raises(BudgetExceededError):
            build_unf(chain_sig)

    def test_theta_respects_budget(self, sig2):
        with pytest.raises(BudgetExceededError):
            build_theta(enumerate_assignments(sig2), sig2, budget=3)

    def test_golden_bytes(self, sig2):
        # byte-determinism lock for representative constructors
        assert format_formula(build_chi_k(sig2, 0).formula) \
            == "X=0 /\\ !X=0"
        mu = format_formula(build_mu(sig2).formula)
        assert mu == ("((Y=0) []-> con(X)) /\\ ((Y=1) []-> con(X)) /\\ "
                      "((X=0) []-> con(Y)) /\\ ((X=1) []-> con(Y))")
        rep0 = enumerate_representatives(sig2)[0]
        assert format_formula(build_phi(rep0).formula) == (
            "(!X=0 \\/ ((Y=0) []-> X=0)) /\\ (!X=0 \\/ ((Y=1) []-> X=0)) /\\"
            " (!X=1 \\/ ((Y=0) []-> X=1)) /\\ (!X=1 \\/ ((Y=1) []-> X=1)) "
            "/\\ (!Y=0 \\/ ((X=0) []-> Y=0)) /\\ (!Y=0 \\/ ((X=1) []-> Y=0))"
            " /\\ (!Y=1 \\/ ((X=0) []-> Y=1)) /\\ (!Y=1 \\/ ((X=1) []-> "
            "Y=1))")
