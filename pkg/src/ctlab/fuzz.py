"""Semantic soundness fuzzing for every calculus rule.

Premise-only rules get random schema instances whose premises must entail
their conclusion over a bounded team sweep.  Rules that discharge
hypotheses are fuzzed at the entailment level, the level at which their
soundness claim lives: sampled entailment triples must validate the
rule's meta-implication, with the side conditions checked exactly
(max_rows=None), so a reported violation is always genuine.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

from .charform import build_leadsto, build_phi, build_unf, build_xi
from .core import (GeneralizedCausalTeam, Signature, canonicalize,
                   enumerate_representatives, sem_reduced)
from .errors import CtlabError
from .semantics import SatContext, _sat, enumerate_teams
from .syntax import (And, Cf, Dep, Eq, Formula, GlobalOr, Neg, TensorOr,
                     big_or, bottom, classify, con, conj_of_equalities,
                     format_formula, is_boxright_free, replace_occurrence,
                     subformulas, top)

_RULE_SEMANTICS = {"FunE": "c", "Unf-vvee": "c", "Unf-D": "c"}

_META_RULES = {"or-E", "neg-I", "RAA", "boxright-Rpl_A", "boxright-Rpl_C",
               "or-Rpl", "vvee-E", "ConE", "DepI", "FunE"}


@dataclass
class FuzzViolation:
    rule: str
    detail: str


@dataclass
class FuzzReport:
    rule: str
    semantics: str
    trials: int
    non_vacuous: int = 0
    violations: list[FuzzViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


@lru_cache(maxsize=None)
def _universe(sig: Signature, semantics: str,
              max_rows: Optional[int]) -> tuple:
    return tuple(enumerate_teams(sig, semantics, max_rows))


class _Fuzzer:
    def __init__(self, sig: Signature, rng: random.Random, semantics: str,
                 team_cap: int, ctx: SatContext):
        self.sig = sig
        self.rng = rng
        self.semantics = semantics
        self.team_cap = team_cap
        self.ctx = ctx
        self.pool_co = self._pool("CO")
        self.pool_cov = self._pool("COV")
        self.pool_cod = self._pool("COD")

    # -- sampling ------------------------------------------------------

    def var(self) -> str:
        return self.rng.choice(self.sig.variables)

    def value(self, var: str) -> str:
        return self.rng.choice(self.sig.range_of(var))

    def wide_var(self) -> Optional[str]:
        cands = [v for v in self.sig.variables
                 if len(self.sig.range_of(v)) >= 2]
        return self.rng.choice(cands) if cands else None

    def eq(self) -> Eq:
        v = self.var()
        return Eq(v, self.value(v))

    def antecedent(self, max_len: int = 2,
                   consistent: Optional[bool] = None) -> tuple:
        while True:
            n = self.rng.randint(1, max_len)
            pairs = tuple((e.var, e.value) for e in
                          (self.eq() for _ in range(n)))
            seen: dict[str, str] = {}
            ok = True
            for var, val in pairs:
                if seen.setdefault(var, val) != val:
                    ok = False
            if consistent is None or ok == consistent:
                return pairs

    def rand(self, language: str, depth: int) -> Formula:
        atoms = ["eq"]
        if language in ("COD",):
            atoms += ["con", "dep"]
        kinds = atoms + (["neg", "and", "or", "cf"] if depth > 0 else [])
        if language == "COV" and depth > 0:
            kinds.append("gor")
        k = self.rng.choice(kinds)
        if k == "eq":
            return self.eq()
        if k == "con":
            return con(self.var())
        if k == "dep":
            return Dep((self.var(),), self.var())
        if k == "neg":
            return Neg(self.rand("CO", depth - 1))
        if k == "and":
            return And(self.rand(language, depth - 1),
                       self.rand(language, depth - 1))
        if k == "or":
            return TensorOr(self.rand(language, depth - 1),
                            self.rand(language, depth - 1))
        if k == "gor":
            return GlobalOr(self.rand(language, depth - 1),
                            self.rand(language, depth - 1))
        return Cf(self.antecedent(), self.rand(language, depth - 1))

    def _pool(self, language: str) -> list[Formula]:
        staples = [top(self.sig), bottom(self.sig)]
        staples += [big_or([Eq(v, t) for t in self.sig.range_of(v)])
                    for v in self.sig.variables]
        return staples + [self.rand(language, 2) for _ in range(40)]

    def pick(self, language: str) -> Formula:
        pool = {"CO": self.pool_co, "COV": self.pool_cov,
                "COD": self.pool_cod}[language]
        return self.rng.choice(pool)

    def gamma(self, language: str) -> list[Formula]:
        return [self.pick(language) for _ in range(self.rng.randint(0, 2))]

    # -- entailment ----------------------------------------------------

    def entails(self, gamma: Sequence[Formula], psi: Formula,
                exact: bool) -> bool:
        teams = _universe(self.sig, self.semantics,
                          None if exact else self.team_cap)
        for team in teams:
            if (all(_sat(team, g, self.ctx) for g in gamma)
                    and not _sat(team, psi, self.ctx)):
                return False
        return True


def _lang_of_rule(rule: str) -> str:
    if rule in ("vvee-I", "vvee-E", "or-vvee-Dst", "boxright-vvee-Dst",
                "Unf-vvee"):
        return "COV"
    if rule in ("ConI", "ConE", "DepE", "DepI", "Unf-D"):
        return "COD"
    if rule in ("or-Com", "or-Ass", "or-Rpl", "boxright-or-Dst", "FunE"):
        return "COV"
    return "CO"


def _direct_instance(f: _Fuzzer, rule: str):
    """A (premises, conclusion) sample of a premise-only rule, or None
    when the signature cannot host an instance."""
    rng, sig = f.rng, f.sig
    lang = _lang_of_rule(rule)
    if rule == "hyp":
        phi = f.pick(lang)
        return [phi], phi
    if rule == "ValDef":
        v = f.var()
        return [], big_or([Eq(v, t) for t in sig.range_of(v)])
    if rule == "ValUnq":
        v = f.wide_var()
        if v is None:
            return None
        x, x2 = rng.sample(list(sig.range_of(v)), 2)
        return [Eq(v, x)], Neg(Eq(v, x2))
    if rule == "and-I":
        a, b = f.pick(lang), f.pick(lang)
        return [a, b], And(a, b)
    if rule == "and-E":
        a, b = f.pick(lang), f.pick(lang)
        return [And(a, b)], rng.choice([a, b])
    if rule == "or-I":
        a, b = f.pick(lang), f.pick(lang)
        return [a], rng.choice([TensorOr(a, b), TensorOr(b, a)])
    if rule == "neg-E":
        a = f.pick("CO")
        return [a, Neg(a)], f.pick(lang)
    if rule == "boxright-Eff":
        ante = f.antecedent()
        var, val = rng.choice(ante)
        return [], Cf(ante, Eq(var, val))
    if rule == "boxright-I":
        ante = f.antecedent(consistent=None)
        theta = f.pick(lang)
        if not is_boxright_free(theta):
            theta = f.eq()
        return [conj_of_equalities(ante), theta], Cf(ante, theta)
    if rule == "ex-falso-boxright":
        v = f.wide_var()
        if v is None:
            return None
        x, x2 = rng.sample(list(sig.range_of(v)), 2)
        ante = f.antecedent() + ((v, x), (v, x2))
        return [], Cf(ante, f.pick(lang))
    if rule == "boxright-botE":
        ante = f.antecedent(consistent=True)
        return [Cf(ante, bottom(sig))], f.pick(lang)
    if rule == "boxright-and-I":
        ante = f.antecedent()
        a, b = f.pick(lang), f.pick(lang)
        return [Cf(ante, a), Cf(ante, b)], Cf(ante, And(a, b))
    if rule == "neg-boxright-E":
        ante = f.antecedent()
        a = f.pick("CO")
        return [Neg(Cf(ante, a))], Cf(ante, Neg(a))
    if rule == "boxright-Extr":
        outer = f.antecedent(consistent=True)
        inner = f.antecedent()
        phi = f.pick(lang)
        kept = tuple(p for p in outer
                     if p[0] not in {v for v, _ in inner})
        return [Cf(outer, Cf(inner, phi))], Cf(kept + inner, phi)
    if rule == "boxright-Exp":
        if len(sig.variables) < 2:
            return None
        v1, v2 = rng.sample(list(sig.variables), 2)
        e1 = ((v1, f.value(v1)),)
        e2 = ((v2, f.value(v2)),)
        phi = f.pick(lang)
        return [Cf(e1 + e2, phi)], Cf(e1, Cf(e2, phi))
    if rule == "Recur":
        if len(sig.variables) < 2:
            return None
        k = rng.randint(2, min(3, len(sig.variables)))
        chain = rng.sample(list(sig.variables), k)
        prem = [build_leadsto(chain[i], chain[i + 1], sig).formula
                for i in range(k - 1)]
        return prem, Neg(build_leadsto(chain[-1], chain[0], sig).formula)
    if rule == "or-Com":
        a, b = f.pick(lang), f.pick(lang)
        return [TensorOr(a, b)], TensorOr(b, a)
    if rule == "or-Ass":
        a, b, c = f.pick(lang), f.pick(lang), f.pick(lang)
        return [TensorOr(TensorOr(a, b), c)], TensorOr(a, TensorOr(b, c))
    if rule == "boxright-or-Dst":
        ante = f.antecedent()
        a, b = f.pick(lang), f.pick(lang)
        folded = Cf(ante, TensorOr(a, b))
        split = TensorOr(Cf(ante, a), Cf(ante, b))
        return rng.choice([([folded], split), ([split], folded)])
    if rule == "vvee-I":
        a, b = f.pick(lang), f.pick(lang)
        return [a], rng.choice([GlobalOr(a, b), GlobalOr(b, a)])
    if rule == "or-vvee-Dst":
        a, b, c = f.pick(lang), f.pick(lang), f.pick(lang)
        return ([TensorOr(a, GlobalOr(b, c))],
                GlobalOr(TensorOr(a, b), TensorOr(a, c)))
    if rule == "boxright-vvee-Dst":
        ante = f.antecedent()
        a, b = f.pick(lang), f.pick(lang)
        return ([Cf(ante, GlobalOr(a, b))],
                GlobalOr(Cf(ante, a), Cf(ante, b)))
    if rule == "ConI":
        e = f.eq()
        return [e], con(e.var)
    if rule == "DepE":
        n = rng.randint(1, min(2, len(sig.variables)))
        args = tuple(rng.sample(list(sig.variables), n))
        target = f.var()
        return ([Dep(args, target)] + [con(v) for v in args], con(target))
    if rule == "Unf-vvee":
        return [], build_unf(sig).formula
    if rule == "Unf-D":
        pairs = [(m, n) for m in sem_reduced(sig) for n in sem_reduced(sig)
                 if canonicalize(m[1]) != canonicalize(n[1])]
        if not pairs:
            return None
        m, n = rng.choice(pairs)
        team = GeneralizedCausalTeam.of(sig, (m, n))
        return [], build_xi(team).formula
    raise CtlabError(f"no direct fuzzer for rule {rule!r}")


def _meta_trial(f: _Fuzzer, rule: str):
    """(conditions, conclusion) where each element is a (gamma, formula)
    judgment; soundness means: all conditions valid => conclusion valid."""
    rng, sig = f.rng, f.sig
    lang = _lang_of_rule(rule)
    gamma = f.gamma(lang)
    if rule == "or-E":
        a, b = f.pick(lang), f.pick(lang)
        alpha = f.pick("CO")
        return ([(gamma + [a], alpha), (gamma + [b], alpha),
                 (gamma, TensorOr(a, b))], (gamma, alpha))
    if rule == "neg-I":
        alpha = f.pick("CO")
        return ([(gamma + [alpha], bottom(sig))], (gamma, Neg(alpha)))
    if rule == "RAA":
        alpha = f.pick("CO")
        return ([(gamma + [Neg(alpha)], bottom(sig))], (gamma, alpha))
    if rule == "boxright-Rpl_A":
        e1 = f.antecedent()
        style = rng.random()
        if style < 0.5:
            e2 = tuple(rng.sample(list(e1), len(e1)))
        elif style < 0.8:
            e2 = e1 + (rng.choice(e1),)
        else:
            e2 = f.antecedent()
        phi = f.pick(lang)
        c1, c2 = conj_of_equalities(e1), conj_of_equalities(e2)
        return ([([c1], c2), ([c2], c1), (gamma, Cf(e1, phi))],
                (gamma, Cf(e2, phi)))
    if rule == "boxright-Rpl_C":
        ante = f.antecedent()
        a, b = f.pick(lang), f.pick(lang)
        return ([([a], b), (gamma, Cf(ante, a))], (gamma, Cf(ante, b)))
    if rule == "or-Rpl":
        a, b, c = f.pick(lang), f.pick(lang), f.pick(lang)
        return ([(gamma + [a], c), (gamma, TensorOr(a, b))],
                (gamma, TensorOr(c, b)))
    if rule == "vvee-E":
        a, b = f.pick(lang), f.pick(lang)
        c = f.pick(lang)
        return ([(gamma + [a], c), (gamma + [b], c),
                 (gamma, GlobalOr(a, b))], (gamma, c))
    if rule == "ConE":
        host = f.pick("COD")
        cons = [n.target for n in subformulas(host)
                if isinstance(n, Dep) and not n.args]
        if not cons:
            host = And(host, con(f.var()))
            cons = [n.target for n in subformulas(host)
                    if isinstance(n, Dep) and not n.args]
        var = cons[0]
        psi = f.pick("COD")
        conds = [(gamma + [replace_occurrence(host, con(var), 1,
                                              Eq(var, val))], psi)
                 for val in sig.range_of(var)]
        return (conds, (gamma + [host], psi))
    if rule == "DepI":
        n = rng.randint(1, min(2, len(sig.variables)))
        args = tuple(rng.sample(list(sig.variables), n))
        target = f.var()
        return ([(gamma + [con(v) for v in args], con(target))],
                (gamma, Dep(args, target)))
    if rule == "FunE":
        psi = f.pick("COD" if rng.random() < 0.5 else "COV")
        conds = [(gamma + [build_phi(rep, sig).formula], psi)
                 for rep in enumerate_representatives(sig)]
        return (conds, (gamma, psi))
    raise CtlabError(f"no meta fuzzer for rule {rule!r}")


def rule_soundness_fuzz(rule: str, sig: Signature, trials: int = 200,
                        team_cap: int = 3, seed: int = 0,
                        semantics: Optional[str] = None,
                        ctx: Optional[SatContext] = None) -> FuzzReport:
    """Fuzz one rule; the report lists violations (expected none).

    FunE and the uniformity axioms are checked under causal-team
    semantics, everything else under the generalized semantics unless
    overridden.
    """
    if semantics is None:
        semantics = _RULE_SEMANTICS.get(rule, "g")
    if ctx is None:
        ctx = SatContext(semantics=semantics)
    rng = random.Random(seed)
    fz = _Fuzzer(sig, rng, semantics, team_cap, ctx)
    report = FuzzReport(rule, semantics, trials)
    meta = rule in _META_RULES
    for _ in range(trials):
        if meta:
            conds, concl = _meta_trial(fz, rule)
            if not all(fz.entails(g, p, exact=True) for g, p in conds):
                continue
            report.non_vacuous += 1
            if not fz.entails(concl[0], concl[1], exact=True):
                report.violations.append(FuzzViolation(
                    rule, _describe(conds, concl)))
        else:
            inst = _direct_instance(fz, rule)
            if inst is None:
                continue
            premises, conclusion = inst
            report.non_vacuous += 1
            if not fz.entails(premises, conclusion, exact=False):
                report.violations.append(FuzzViolation(
                    rule, _describe([(premises, conclusion)],
                                    (premises, conclusion))))
    return report


def _describe(conds, concl) -> str:
    def fmt(j):
        gamma, phi = j
        left = ", ".join(format_formula(g) for g in gamma)
        return f"{left} |= {format_formula(phi)}"
    return "; ".join(fmt(c) for c in conds) + " => " + fmt(concl)
