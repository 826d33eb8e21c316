"""Acceptance criteria, one test per criterion.

Run with `pytest tests/test_acceptance.py -s` to see one line per
criterion; each also asserts its runtime budget.
"""

import itertools
import random
import time
from pathlib import Path

import pytest

from ctlab.calculus import ALL_RULES, check_derivation
from ctlab.charform import build_phi, build_theta, build_chi_k, build_unf, \
    build_xi
from ctlab.core import (GeneralizedCausalTeam,
                        Signature, canonicalize, enumerate_assignments,
                        enumerate_function_systems,
                        enumerate_representatives, enumerate_sem,
                        is_compatible, preceq, quotient_cardinality,
                        sem_reduced, team_equivalent, to_generalized,
                        union_gcts)
from ctlab.decision import (check_disjunction_property, decide_entails,
                            decide_valid, instantiations, resolutions)
from ctlab.fuzz import rule_soundness_fuzz
from ctlab.golden import golden_derived_rules
from ctlab.io import dumps, load_team, team_to_obj
from ctlab.intervention import InterventionSpec, intervene
from ctlab.semantics import (SatContext, entails_bounded, enumerate_teams,
                             satisfies, units, _sat)
from ctlab.syntax import (Neg, big_gor, big_or, classify, is_boxright_free,
                          parse)

from test_semantics import rand_formula, well_classed

DATA = Path(__file__).parent / "data"

SIG2 = Signature.of({"X": ["0", "1"], "Y": ["0", "1"]})
SIG1T = Signature.of({"A": ["0", "1", "2"]})

GCTX = SatContext(semantics="g")
CCTX = SatContext(semantics="c")


def report(n, name, t0, budget):
    dt = time.time() - t0
    print(f"ACCEPTANCE {n:2d} ({name}): PASS in {dt:.1f}s "
          f"[budget {budget}s]")
    assert dt < budget


def small_teams(sig, size):
    return [GeneralizedCausalTeam.of(sig, c)
            for k in range(size + 1)
            for c in itertools.combinations(sem_reduced(sig), k)]


def test_01_golden_interventions():
    t0 = time.time()
    ct = load_team(str(DATA / "exct.json"))
    done = intervene(ct, InterventionSpec(ct.signature, (("X", "1"),)))
    got = dumps(team_to_obj(done))
    assert got.encode() == (DATA / "golden" / "exct_do_x1.json").read_bytes()
    rows = {tuple(r.tokens().values()) for r in done.rows}
    assert rows == {("0", "1", "2", "5"), ("1", "1", "2", "6")}

    gct = load_team(str(DATA / "exgct.json"))
    done = intervene(gct, InterventionSpec(gct.signature, (("Y", "1"),)))
    got = dumps(team_to_obj(done))
    assert got.encode() == \
        (DATA / "golden" / "exgct_do_y1.json").read_bytes()
    assert {tuple(s.tokens().values()) for s, _ in done.members} == \
        {("2", "1", "4"), ("2", "1", "3"), ("1", "1", "2")}
    report(1, "golden interventions", t0, 1)


def test_02_golden_satisfaction():
    t0 = time.time()
    team = load_team(str(DATA / "exct.json"))
    sig = team.signature
    judgments = [("(X=1) []-> Y=2", True),
                 ("dep(Y; Z)", True),
                 ("!Y=2 \\/ Y=2", True),
                 ("!Y=2 \\\\/ Y=2", False),
                 ("X=1 => Y=2", True)]
    for text, want in judgments:
        assert satisfies(team, parse(text, sig), CCTX) is want, text
    post = intervene(team, InterventionSpec(sig, (("X", "1"),)))
    assert satisfies(post, parse("dep(Y; Z)", sig), CCTX) is False
    report(2, "golden satisfaction", t0, 1)


def test_03_closure_suite():
    t0 = time.time()
    rng = random.Random(103)
    for sig in (SIG2, SIG1T):
        sem = enumerate_sem(sig)
        by_class = {}
        for s, f in sem:
            by_class.setdefault((s, canonicalize(f)), []).append((s, f))
        empty = GeneralizedCausalTeam.empty(sig)
        for _ in range(500):
            phi = well_classed(rng, sig, 2)
            members = rng.sample(sem, rng.randint(0, 3))
            team = GeneralizedCausalTeam.of(sig, members)
            # empty team property
            assert _sat(empty, phi, GCTX)
            # downward closure
            if _sat(team, phi, GCTX):
                sub = GeneralizedCausalTeam.of(
                    sig, rng.sample(members, rng.randint(0,
                                                         len(members))))
                assert _sat(sub, phi, GCTX)
            # equivalence invariance: swap laws within their classes
            variant = GeneralizedCausalTeam.of(
                sig, [rng.choice(by_class[(s, canonicalize(f))])
                      for s, f in members])
            if team_equivalent(team, variant):
                assert _sat(team, phi, GCTX) == _sat(variant, phi, GCTX)
            # CO flatness and union closure
            if classify(phi) == "CO":
                flat = all(_sat(u, phi, GCTX) for u in units(team))
                assert _sat(team, phi, GCTX) == flat
                other = GeneralizedCausalTeam.of(
                    sig, rng.sample(sem, rng.randint(0, 2)))
                if _sat(team, phi, GCTX) and _sat(other, phi, GCTX):
                    assert _sat(union_gcts(team, other), phi, GCTX)
    report(3, "closure suite", t0, 30)


def test_04_phi_characterization():
    t0 = time.time()
    assert len(sem_reduced(SIG2)) <= 12
    teams = small_teams(SIG2, 4)
    reps = enumerate_representatives(SIG2)
    for rep in reps:
        phi = build_phi(rep).formula
        canon = canonicalize(rep)
        for team in teams:
            want = all(canonicalize(f) == canon for _, f in team.members)
            assert satisfies(team, phi, GCTX) is want
    report(4, f"phi characterization ({len(reps)} classes, "
              f"{len(teams)} teams)", t0, 60)


def test_05_theta_chi_xi_characterizations():
    t0 = time.time()
    teams3 = small_teams(SIG2, 3)
    teams4 = small_teams(SIG2, 4)
    assignments = enumerate_assignments(SIG2)
    # component bound
    for k in range(len(assignments) + 1):
        for rows in itertools.combinations(assignments, k):
            theta = build_theta(rows, SIG2).formula
            for team in teams3:
                assert satisfies(team, theta, GCTX) is \
                    (team.team_component() <= set(rows))
    # cardinality bound
    for k in range(6):
        chik = build_chi_k(SIG2, k).formula
        for team in teams4:
            assert satisfies(team, chik, GCTX) is \
                (quotient_cardinality(team) <= k)
    for team in enumerate_teams(SIG2, "c", None):
        assert satisfies(team, build_chi_k(SIG2, 2).formula, CCTX) is \
            (len(team.rows) <= 2)
    # non-extension
    targets = [t for t in small_teams(SIG2, 2) if not t.is_empty()]
    for target in targets:
        xi = build_xi(target).formula
        for team in teams3:
            assert satisfies(team, xi, GCTX) is not preceq(target, team)
    cts = list(enumerate_teams(SIG2, "c", 2))
    for target in (t for t in cts if not t.is_empty()):
        xi = build_xi(target).formula
        for team in cts:
            assert satisfies(team, xi, CCTX) is not preceq(target, team)
    report(5, "theta/chi/xi characterizations", t0, 60)


def test_06_normal_forms():
    t0 = time.time()
    rng = random.Random(106)
    teams = small_teams(SIG2, 3)
    for _ in range(50):
        phi = well_classed(rng, SIG2, 2, "COV")
        expanded = big_gor(list(resolutions(phi).members))
        for team in teams:
            assert satisfies(team, phi, GCTX) == \
                satisfies(team, expanded, GCTX)
    for _ in range(50):
        phi = well_classed(rng, SIG2, 2, "COD")
        expanded = big_gor(list(instantiations(phi, SIG2).members))
        for team in teams:
            assert satisfies(team, phi, GCTX) == \
                satisfies(team, expanded, GCTX)
    report(6, "normal forms (100 formulas)", t0, 60)


def test_07_disjunction_property():
    t0 = time.time()
    rng = random.Random(107)
    non_vacuous = 0
    for _ in range(100):
        delta = [well_classed(rng, SIG2, 1, "CO")
                 for _ in range(rng.randint(0, 2))]
        phi = well_classed(rng, SIG2, 1)
        psi = well_classed(rng, SIG2, 1)
        rep = check_disjunction_property(delta, phi, psi, SIG2, GCTX)
        assert rep.holds
        non_vacuous += rep.entails_disjunction
    assert non_vacuous >= 10
    # failure over causal teams: the uniformity disjunction is valid
    # while no single law description is
    assert len(enumerate_representatives(SIG2)) >= 2
    assert decide_valid(build_unf(SIG2).formula, SIG2, "c", GCTX)
    for rep in enumerate_representatives(SIG2):
        assert not decide_valid(build_phi(rep).formula, SIG2, "c", GCTX)
    report(7, f"disjunction property ({non_vacuous} non-vacuous)", t0, 30)


def test_08_collapse_lemma():
    t0 = time.time()
    reps = enumerate_representatives(SIG2)
    phis = [build_phi(r).formula for r in reps]
    from ctlab.decision import incompatible
    for a, b in itertools.combinations(phis, 2):
        assert incompatible(a, b, SIG2)
    tensor, gdisj = big_or(phis), big_gor(phis)
    for team in enumerate_teams(SIG2, "c", None):
        assert satisfies(team, tensor, CCTX) == \
            satisfies(team, gdisj, CCTX)
    witness = next(
        t for t in small_teams(SIG2, 2)
        if len({canonicalize(f) for _, f in t.members}) == 2)
    assert satisfies(witness, tensor, GCTX)
    assert not satisfies(witness, gdisj, GCTX)
    report(8, "collapse lemma with counterexample", t0, 30)


def test_09_decision_oracle_agreement():
    t0 = time.time()
    rng = random.Random(109)
    shared = SatContext(semantics="g")
    bctx = {"g": SatContext(semantics="g"), "c": SatContext(semantics="c")}
    for sem_name in ("g", "c"):
        for _ in range(200):
            sig = SIG1T if rng.random() < 0.7 else SIG2
            gamma = [well_classed(rng, sig, 2)
                     for _ in range(rng.randint(0, 2))]
            psi = well_classed(rng, sig, 2)
            got = decide_entails(gamma, psi, sig, sem_name, shared).holds
            want = entails_bounded(gamma, psi, sig, None, bctx[sem_name])
            assert got == want, (sem_name, gamma, psi)
    # derived-rule statements are semantically confirmed
    for golden in golden_derived_rules():
        assert decide_entails(list(golden.premises), golden.conclusion,
                              golden.signature, "g", shared).holds
    report(9, "decision vs oracle (400 instances)", t0, 120)


def test_10_calculus():
    t0 = time.time()
    for golden in golden_derived_rules():
        res = check_derivation(golden.derivation, golden.system,
                               golden.signature)
        assert res.ok, golden.name
    meta_sig = {"or-E", "neg-I", "RAA", "boxright-Rpl_A", "boxright-Rpl_C",
                "or-Rpl", "vvee-E", "ConE", "DepI"}
    for rule in sorted(ALL_RULES):
        if rule in ("hyp",):
            continue
        sig = SIG1T if rule in meta_sig else SIG2
        rep = rule_soundness_fuzz(rule, sig, trials=200, team_cap=2,
                                  seed=110)
        assert rep.ok, (rule, rep.violations[0].detail if rep.violations
                        else None)
        assert rep.non_vacuous > 0, rule
    # Recur instances exhaustively valid on the two-variable signature
    from ctlab.charform import build_leadsto
    for x, y in (("X", "Y"), ("Y", "X")):
        lead = build_leadsto(x, y, SIG2).formula
        anti = Neg(build_leadsto(y, x, SIG2).formula)
        for team in enumerate_teams(SIG2, "g", 3):
            if satisfies(team, lead, GCTX):
                assert satisfies(team, anti, GCTX)
    report(10, "calculus goldens + rule fuzzing", t0, 120)


def test_11_synthesis_round_trip():
    t0 = time.time()
    rng = random.Random(111)
    from ctlab.synthesis import (TeamClass, close_under_succeq,
                                 synthesize_co, synthesize_cod,
                                 verify_defines)
    universe = list(enumerate_teams(SIG1T, "g"))
    for _ in range(20):
        seed = rng.sample(universe, rng.randint(1, 3))
        kls = close_under_succeq(TeamClass.of("g", SIG1T, seed))
        phi = synthesize_cod(kls)
        assert verify_defines(phi, kls, SIG1T)
    sem2 = sem_reduced(SIG2)
    for _ in range(20):
        members = rng.sample(sem2, rng.randint(0, 4))
        teams = [GeneralizedCausalTeam.of(SIG2, c)
                 for k in range(len(members) + 1)
                 for c in itertools.combinations(members, k)]
        kls = TeamClass.of("g", SIG2, teams)
        phi = synthesize_co(kls)
        assert verify_defines(phi, kls, SIG2)
    report(11, "synthesis round-trips (20 + 20)", t0, 180)


def test_12_boxright_free_invariance():
    t0 = time.time()
    rng = random.Random(112)
    assignments = enumerate_assignments(SIG2)
    systems = enumerate_function_systems(SIG2, recursive_only=True)
    compat = {s: [f for f in systems if is_compatible(s, f)]
              for s in assignments}
    done = 0
    while done < 500:
        phi = rand_formula(rng, SIG2, 2)
        if classify(phi) == "NONE" or not is_boxright_free(phi):
            continue
        rows = rng.sample(assignments, rng.randint(0, 3))
        a = GeneralizedCausalTeam.of(
            SIG2, [(s, rng.choice(compat[s])) for s in rows])
        b = GeneralizedCausalTeam.of(
            SIG2, [(s, rng.choice(compat[s])) for s in rows])
        assert _sat(a, phi, GCTX) == _sat(b, phi, GCTX)
        done += 1
    report(12, "law-swap invariance (500 cases)", t0, 30)
