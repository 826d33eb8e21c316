"""Natural-deduction systems over both semantics: rule registry,
derivation checker, and JSON serialization of proof trees.

Rule names use ASCII transliterations of the usual labels: `boxright-`
for the counterfactual arrow, `vvee-` for global disjunction, `or-` for
tensor disjunction, `neg-`/`and-` for the propositional connectives
(e.g. `boxright-Rpl_A`, `vvee-E`, `ex-falso-boxright`).  Hypothesis
leaves use rule `hyp` with a label; discharging rules list the labels
they close, positionally.  Quantified-family rules (`ConE` over a value
range, `FunE` over the law representatives) carry one subderivation per
instance and the checker verifies exhaustiveness against the signature.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

from .charform import build_leadsto, build_phi, build_unf, build_xi
from .core import (GeneralizedCausalTeam, Signature, canonicalize,
                   enumerate_representatives, quotient_cardinality)
from .errors import ProofError
from .intervention import InterventionSpec
from .io import team_from_obj, team_to_obj
from .syntax import (And, Cf, Dep, Eq, Formula, GlobalOr, Neg, TensorOr,
                     big_or, bottom, classify, conj_of_equalities,
                     format_formula, is_boxright_free, is_constancy, parse,
                     replace_occurrence)

SYSTEMS = ("co-g", "cov-g", "cod-g", "cov-c", "cod-c")

_LANG = {"co-g": ("CO",), "cov-g": ("CO", "COV"), "cov-c": ("CO", "COV"),
         "cod-g": ("CO", "COD"), "cod-c": ("CO", "COD")}


@dataclass
class Derivation:
    """A proof-tree node: rule name, conclusion, child derivations,
    discharge labels, and rule-specific payload."""

    rule: str
    conclusion: Formula
    premises: list["Derivation"] = field(default_factory=list)
    discharge: tuple[str, ...] = ()
    params: dict = field(default_factory=dict)


def hyp(label: str, phi: Formula) -> Derivation:
    return Derivation("hyp", phi, params={"label": label})


Assumptions = frozenset[tuple[str, Formula]]


@dataclass
class CheckResult:
    ok: bool
    conclusion: Optional[Formula] = None
    assumptions: Assumptions = frozenset()
    error: Optional[str] = None
    path: Optional[str] = None


class _Fail(Exception):
    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason


def _antecedent_consistent(ante: tuple[tuple[str, str], ...],
                           sig: Signature) -> bool:
    return InterventionSpec(sig, ante).is_consistent


def _discharge(opens: Assumptions, label: str, phi: Formula,
               path: str) -> Assumptions:
    for lab, f in opens:
        if lab == label and f != phi:
            raise _Fail(path, f"label {label!r} is bound to {format_formula(f)}"
                        f", expected {format_formula(phi)}")
    return frozenset((lab, f) for lab, f in opens if lab != label)


def _closed(opens: Assumptions, path: str, what: str) -> None:
    if opens:
        labs = ", ".join(sorted(lab for lab, _ in opens))
        raise _Fail(path, f"{what} must not have undischarged assumptions "
                    f"(open: {labs})")


def _expect(cond: bool, path: str, reason: str) -> None:
    if not cond:
        raise _Fail(path, reason)


# --- rule checkers --------------------------------------------------------
# each takes (node, premise (conclusion, opens) pairs, sig, path) and
# returns the node's open assumptions

def _n_premises(node, prem, path, n):
    _expect(len(prem) == n, path, f"{node.rule} takes {n} premise(s)")


def _merge(*opens: Assumptions) -> Assumptions:
    out: frozenset = frozenset()
    for o in opens:
        out |= o
    return out


def _ck_hyp(node, prem, sig, path):
    _n_premises(node, prem, path, 0)
    label = node.params.get("label")
    _expect(isinstance(label, str) and label != "", path,
            "hypothesis needs a label")
    return frozenset(((label, node.conclusion),))


def _ck_valdef(node, prem, sig, path):
    _n_premises(node, prem, path, 0)
    var = node.params.get("var")
    _expect(var is not None and sig.has_variable(var), path,
            "ValDef needs a variable")
    want = big_or([Eq(var, v) for v in sig.range_of(var)])
    _expect(node.conclusion == want, path,
            "conclusion must be the value-range disjunction")
    return frozenset()


def _ck_valunq(node, prem, sig, path):
    _n_premises(node, prem, path, 1)
    p = prem[0][0]
    _expect(isinstance(p, Eq), path, "premise must be an equality")
    c = node.conclusion
    _expect(isinstance(c, Neg) and isinstance(c.body, Eq)
            and c.body.var == p.var and c.body.value != p.value, path,
            "conclusion must negate a different value for the same variable")
    return prem[0][1]


def _ck_and_i(node, prem, sig, path):
    _n_premises(node, prem, path, 2)
    _expect(node.conclusion == And(prem[0][0], prem[1][0]), path,
            "conclusion must conjoin the premises in order")
    return _merge(prem[0][1], prem[1][1])


def _ck_and_e(node, prem, sig, path):
    _n_premises(node, prem, path, 1)
    p = prem[0][0]
    _expect(isinstance(p, And), path, "premise must be a conjunction")
    _expect(node.conclusion in (p.left, p.right), path,
            "conclusion must be one conjunct")
    return prem[0][1]


def _ck_or_i(node, prem, sig, path):
    _n_premises(node, prem, path, 1)
    c = node.conclusion
    _expect(isinstance(c, TensorOr) and prem[0][0] in (c.left, c.right),
            path, "conclusion must be a disjunction with the premise on "
            "one side")
    return prem[0][1]


def _ck_or_e(node, prem, sig, path):
    _n_premises(node, prem, path, 3)
    major = prem[0][0]
    _expect(isinstance(major, TensorOr), path,
            "major premise must be a tensor disjunction")
    _expect(len(node.discharge) == 2, path, "or-E discharges two labels")
    _expect(prem[1][0] == node.conclusion and prem[2][0] == node.conclusion,
            path, "both minor premises must conclude the conclusion")
    _expect(classify(node.conclusion) == "CO", path,
            "or-E is restricted to CO conclusions")
    left = _discharge(prem[1][1], node.discharge[0], major.left, path)
    right = _discharge(prem[2][1], node.discharge[1], major.right, path)
    return _merge(prem[0][1], left, right)


def _ck_neg_i(node, prem, sig, path):
    _n_premises(node, prem, path, 1)
    _expect(prem[0][0] == bottom(sig), path,
            "the subderivation must conclude the contradiction")
    c = node.conclusion
    _expect(isinstance(c, Neg), path, "conclusion must be a negation")
    _expect(len(node.discharge) == 1, path, "neg-I discharges one label")
    return _discharge(prem[0][1], node.discharge[0], c.body, path)


def _ck_neg_e(node, prem, sig, path):
    _n_premises(node, prem, path, 2)
    _expect(prem[1][0] == Neg(prem[0][0]), path,
            "premises must be a formula and its negation")
    return _merge(prem[0][1], prem[1][1])


def _ck_raa(node, prem, sig, path):
    _n_premises(node, prem, path, 1)
    _expect(prem[0][0] == bottom(sig), path,
            "the subderivation must conclude the contradiction")
    _expect(classify(node.conclusion) == "CO", path,
            "RAA is restricted to CO conclusions")
    _expect(len(node.discharge) == 1, path, "RAA discharges one label")
    return _discharge(prem[0][1], node.discharge[0], Neg(node.conclusion),
                      path)


def _ck_eff(node, prem, sig, path):
    _n_premises(node, prem, path, 0)
    c = node.conclusion
    _expect(isinstance(c, Cf) and isinstance(c.body, Eq)
            and (c.body.var, c.body.value) in c.antecedent, path,
            "conclusion must force an equality from its own antecedent")
    return frozenset()


def _ck_boxright_i(node, prem, sig, path):
    _n_premises(node, prem, path, 2)
    c = node.conclusion
    _expect(isinstance(c, Cf) and len(c.antecedent) > 0, path,
            "conclusion must be a counterfactual")
    _expect(prem[0][0] == conj_of_equalities(c.antecedent), path,
            "first premise must be the antecedent conjunction")
    _expect(prem[1][0] == c.body, path,
            "second premise must be the consequent")
    _expect(is_boxright_free(c.body), path,
            "conjunction conditionalization needs a counterfactual-free "
            "consequent")
    return _merge(prem[0][1], prem[1][1])


def _ck_ex_falso(node, prem, sig, path):
    _n_premises(node, prem, path, 0)
    c = node.conclusion
    _expect(isinstance(c, Cf)
            and not _antecedent_consistent(c.antecedent, sig), path,
            "conclusion must have an inconsistent antecedent")
    return frozenset()


def _ck_bot_e(node, prem, sig, path):
    _n_premises(node, prem, path, 1)
    p = prem[0][0]
    _expect(isinstance(p, Cf) and p.body == bottom(sig), path,
            "premise must force the contradiction")
    _expect(_antecedent_consistent(p.antecedent, sig), path,
            "the antecedent must be consistent")
    return prem[0][1]


def _ck_rpl_a(node, prem, sig, path):
    _n_premises(node, prem, path, 3)
    p = prem[0][0]
    c = node.conclusion
    _expect(isinstance(p, Cf) and isinstance(c, Cf) and p.body == c.body,
            path, "premise and conclusion must share the consequent")
    _expect(len(node.discharge) == 2, path,
            "boxright-Rpl_A discharges two labels")
    old = conj_of_equalities(p.antecedent) if p.antecedent else None
    new = conj_of_equalities(c.antecedent) if c.antecedent else None
    _expect(old is not None and new is not None, path,
            "antecedent replacement needs nonempty antecedents")
    _expect(prem[1][0] == new, path,
            "first subderivation must derive the new antecedent")
    _expect(prem[2][0] == old, path,
            "second subderivation must derive the old antecedent")
    d1 = _discharge(prem[1][1], node.discharge[0], old, path)
    d2 = _discharge(prem[2][1], node.discharge[1], new, path)
    _closed(d1, path, "the replacement subderivation")
    _closed(d2, path, "the replacement subderivation")
    return prem[0][1]


def _ck_rpl_c(node, prem, sig, path):
    _n_premises(node, prem, path, 2)
    p = prem[0][0]
    c = node.conclusion
    _expect(isinstance(p, Cf) and isinstance(c, Cf)
            and p.antecedent == c.antecedent, path,
            "premise and conclusion must share the antecedent")
    _expect(prem[1][0] == c.body, path,
            "the subderivation must conclude the new consequent")
    _expect(len(node.discharge) == 1, path,
            "boxright-Rpl_C discharges one label")
    d = _discharge(prem[1][1], node.discharge[0], p.body, path)
    _closed(d, path, "the replacement subderivation")
    return prem[0][1]


def _ck_boxright_and_i(node, prem, sig, path):
    _n_premises(node, prem, path, 2)
    a, b = prem[0][0], prem[1][0]
    c = node.conclusion
    _expect(isinstance(a, Cf) and isinstance(b, Cf) and isinstance(c, Cf)
            and a.antecedent == b.antecedent == c.antecedent
            and c.body == And(a.body, b.body), path,
            "conclusion must conjoin the consequents under the shared "
            "antecedent")
    return _merge(prem[0][1], prem[1][1])


def _ck_neg_boxright_e(node, prem, sig, path):
    _n_premises(node, prem, path, 1)
    p = prem[0][0]
    c = node.conclusion
    _expect(isinstance(p, Neg) and isinstance(p.body, Cf), path,
            "premise must be a negated counterfactual")
    _expect(isinstance(c, Cf) and c.antecedent == p.body.antecedent
            and c.body == Neg(p.body.body), path,
            "conclusion must push the negation into the consequent")
    return prem[0][1]


def _ck_extr(node, prem, sig, path):
    _n_premises(node, prem, path, 1)
    p = prem[0][0]
    c = node.conclusion
    _expect(isinstance(p, Cf) and isinstance(p.body, Cf), path,
            "premise must be a nested counterfactual")
    _expect(_antecedent_consistent(p.antecedent, sig), path,
            "the outer antecedent must be consistent")
    inner = p.body
    y_vars = {v for v, _ in inner.antecedent}
    kept = tuple(pair for pair in p.antecedent if pair[0] not in y_vars)
    _expect(isinstance(c, Cf)
            and c.antecedent == kept + inner.antecedent
            and c.body == inner.body, path,
            "conclusion must merge the antecedents, dropping the shadowed "
            "conjuncts")
    return prem[0][1]


def _ck_exp(node, prem, sig, path):
    _n_premises(node, prem, path, 1)
    p = prem[0][0]
    c = node.conclusion
    _expect(isinstance(p, Cf) and isinstance(c, Cf)
            and isinstance(c.body, Cf), path,
            "conclusion must be a nested counterfactual")
    outer, inner = c.antecedent, c.body.antecedent
    _expect(outer + inner == p.antecedent, path,
            "the antecedents must concatenate to the premise antecedent")
    _expect(not ({v for v, _ in outer} & {v for v, _ in inner}), path,
            "exportation needs disjoint variable sets")
    _expect(c.body.body == p.body, path, "the consequent must be preserved")
    return prem[0][1]


def _ck_recur(node, prem, sig, path):
    chain = tuple(node.params.get("chain", ()))
    _expect(len(chain) >= 2, path, "the chain needs at least two variables")
    _n_premises(node, prem, path, len(chain) - 1)
    for i in range(len(chain) - 1):
        want = build_leadsto(chain[i], chain[i + 1], sig).formula
        _expect(prem[i][0] == want, path,
                f"premise {i} must state that {chain[i]} causally affects "
                f"{chain[i + 1]}")
    want = Neg(build_leadsto(chain[-1], chain[0], sig).formula)
    _expect(node.conclusion == want, path,
            "conclusion must deny the closing causal influence")
    return _merge(*(o for _, o in prem))


def _ck_or_com(node, prem, sig, path):
    _n_premises(node, prem, path, 1)
    p = prem[0][0]
    _expect(isinstance(p, TensorOr)
            and node.conclusion == TensorOr(p.right, p.left), path,
            "conclusion must swap the disjuncts")
    return prem[0][1]


def _ck_or_ass(node, prem, sig, path):
    _n_premises(node, prem, path, 1)
    p = prem[0][0]
    ok = (isinstance(p, TensorOr) and isinstance(p.left, TensorOr)
          and node.conclusion == TensorOr(p.left.left,
                                          TensorOr(p.left.right, p.right)))
    _expect(ok, path, "conclusion must reassociate to the right")
    return prem[0][1]


def _ck_or_rpl(node, prem, sig, path):
    _n_premises(node, prem, path, 2)
    major = prem[0][0]
    c = node.conclusion
    _expect(isinstance(major, TensorOr) and isinstance(c, TensorOr)
            and c.right == major.right, path,
            "conclusion must keep the right disjunct")
    _expect(prem[1][0] == c.left, path,
            "the subderivation must conclude the new left disjunct")
    _expect(len(node.discharge) == 1, path, "or-Rpl discharges one label")
    sub = _discharge(prem[1][1], node.discharge[0], major.left, path)
    return _merge(prem[0][1], sub)


def _ck_boxright_or_dst(node, prem, sig, path):
    _n_premises(node, prem, path, 1)
    p, c = prem[0][0], node.conclusion

    def folded(cf, split):
        return (isinstance(cf, Cf) and isinstance(cf.body, TensorOr)
                and isinstance(split, TensorOr)
                and split == TensorOr(Cf(cf.antecedent, cf.body.left),
                                      Cf(cf.antecedent, cf.body.right)))
    _expect(folded(p, c) or folded(c, p), path,
            "must distribute the counterfactual over a tensor disjunction "
            "(either direction)")
    return prem[0][1]


def _ck_vvee_i(node, prem, sig, path):
    _n_premises(node, prem, path, 1)
    c = node.conclusion
    _expect(isinstance(c, GlobalOr) and prem[0][0] in (c.left, c.right),
            path, "conclusion must be a global disjunction with the premise "
            "on one side")
    return prem[0][1]


def _ck_vvee_e(node, prem, sig, path):
    _n_premises(node, prem, path, 3)
    major = prem[0][0]
    _expect(isinstance(major, GlobalOr), path,
            "major premise must be a global disjunction")
    _expect(len(node.discharge) == 2, path, "vvee-E discharges two labels")
    _expect(prem[1][0] == node.conclusion and prem[2][0] == node.conclusion,
            path, "both minor premises must conclude the conclusion")
    left = _discharge(prem[1][1], node.discharge[0], major.left, path)
    right = _discharge(prem[2][1], node.discharge[1], major.right, path)
    return _merge(prem[0][1], left, right)


def _ck_or_vvee_dst(node, prem, sig, path):
    _n_premises(node, prem, path, 1)
    p = prem[0][0]
    ok = (isinstance(p, TensorOr) and isinstance(p.right, GlobalOr)
          and node.conclusion == GlobalOr(TensorOr(p.left, p.right.left),
                                          TensorOr(p.left, p.right.right)))
    _expect(ok, path, "must distribute tensor over global disjunction")
    return prem[0][1]


def _ck_boxright_vvee_dst(node, prem, sig, path):
    _n_premises(node, prem, path, 1)
    p = prem[0][0]
    ok = (isinstance(p, Cf) and isinstance(p.body, GlobalOr)
          and node.conclusion == GlobalOr(Cf(p.antecedent, p.body.left),
                                          Cf(p.antecedent, p.body.right)))
    _expect(ok, path,
            "must distribute the counterfactual over a global disjunction")
    return prem[0][1]


def _ck_con_i(node, prem, sig, path):
    _n_premises(node, prem, path, 1)
    p = prem[0][0]
    _expect(isinstance(p, Eq), path, "premise must be an equality")
    _expect(node.conclusion == Dep((), p.var), path,
            "conclusion must be the constancy atom of the premise variable")
    return prem[0][1]


def _ck_dep_e(node, prem, sig, path):
    _expect(len(prem) >= 1, path, "DepE needs a dependence premise")
    dep = prem[0][0]
    _expect(isinstance(dep, Dep) and dep.args, path,
            "first premise must be a proper dependence atom")
    _n_premises(node, prem, path, 1 + len(dep.args))
    for i, var in enumerate(dep.args):
        _expect(prem[1 + i][0] == Dep((), var), path,
                f"premise {i + 1} must be the constancy atom of {var}")
    _expect(node.conclusion == Dep((), dep.target), path,
            "conclusion must be the constancy atom of the target")
    return _merge(*(o for _, o in prem))


def _ck_con_e(node, prem, sig, path):
    var = node.params.get("var")
    occ = node.params.get("occurrence", 1)
    _expect(var is not None and sig.has_variable(var), path,
            "ConE needs the constancy variable")
    rng = sig.range_of(var)
    _n_premises(node, prem, path, 1 + len(rng))
    _expect(len(node.discharge) == len(rng), path,
            "ConE discharges one label per value")
    major = prem[0][0]
    opens = prem[0][1]
    for i, val in enumerate(rng):
        try:
            inst = replace_occurrence(major, Dep((), var), occ, Eq(var, val))
        except Exception:
            raise _Fail(path, f"the major premise lacks occurrence {occ} of "
                        f"con({var})")
        _expect(prem[1 + i][0] == node.conclusion, path,
                f"instance {i} must conclude the conclusion")
        opens = _merge(opens, _discharge(prem[1 + i][1], node.discharge[i],
                                         inst, path))
    return opens


def _ck_dep_i(node, prem, sig, path):
    _n_premises(node, prem, path, 1)
    c = node.conclusion
    _expect(isinstance(c, Dep), path, "conclusion must be a dependence atom")
    _expect(prem[0][0] == Dep((), c.target), path,
            "the subderivation must conclude the target's constancy atom")
    _expect(len(node.discharge) == len(c.args), path,
            "DepI discharges one constancy hypothesis per argument")
    opens = prem[0][1]
    for label, var in zip(node.discharge, c.args):
        opens = _discharge(opens, label, Dep((), var), path)
    return opens


def _ck_fun_e(node, prem, sig, path):
    reps = enumerate_representatives(sig)
    _n_premises(node, prem, path, len(reps))
    _expect(len(node.discharge) == len(reps), path,
            "FunE discharges one label per law representative")
    opens: Assumptions = frozenset()
    for i, rep in enumerate(reps):
        _expect(prem[i][0] == node.conclusion, path,
                f"instance {i} must conclude the conclusion")
        phi = build_phi(rep, sig).formula
        opens = _merge(opens, _discharge(prem[i][1], node.discharge[i],
                                         phi, path))
    return opens


def _ck_unf_vvee(node, prem, sig, path):
    _n_premises(node, prem, path, 0)
    _expect(node.conclusion == build_unf(sig).formula, path,
            "conclusion must be the uniformity disjunction")
    return frozenset()


def _ck_unf_d(node, prem, sig, path):
    _n_premises(node, prem, path, 0)
    team = node.params.get("team")
    _expect(isinstance(team, GeneralizedCausalTeam), path,
            "Unf-D carries a two-member generalized team")
    _expect(len(team.members) == 2, path,
            "Unf-D carries a two-member generalized team")
    (s, f), (t, g) = team.sorted_members()
    _expect(canonicalize(f) != canonicalize(g), path,
            "the two laws must be dissimilar")
    _expect(node.conclusion == build_xi(team).formula, path,
            "conclusion must be the team's non-extension formula")
    return frozenset()


_Checker = Callable[[Derivation, list, Signature, str], Assumptions]

_CO_RULES: dict[str, _Checker] = {
    "hyp": _ck_hyp, "ValDef": _ck_valdef, "ValUnq": _ck_valunq,
    "and-I": _ck_and_i, "and-E": _ck_and_e, "or-I": _ck_or_i,
    "or-E": _ck_or_e, "neg-I": _ck_neg_i, "neg-E": _ck_neg_e,
    "RAA": _ck_raa, "boxright-Eff": _ck_eff, "boxright-I": _ck_boxright_i,
    "ex-falso-boxright": _ck_ex_falso, "boxright-botE": _ck_bot_e,
    "boxright-Rpl_A": _ck_rpl_a, "boxright-Rpl_C": _ck_rpl_c,
    "boxright-and-I": _ck_boxright_and_i,
    "neg-boxright-E": _ck_neg_boxright_e, "boxright-Extr": _ck_extr,
    "boxright-Exp": _ck_exp, "Recur": _ck_recur,
}

_SHARED_OR: dict[str, _Checker] = {
    "or-Com": _ck_or_com, "or-Ass": _ck_or_ass, "or-Rpl": _ck_or_rpl,
    "boxright-or-Dst": _ck_boxright_or_dst,
}

_COV_ONLY: dict[str, _Checker] = {
    "vvee-I": _ck_vvee_i, "vvee-E": _ck_vvee_e,
    "or-vvee-Dst": _ck_or_vvee_dst,
    "boxright-vvee-Dst": _ck_boxright_vvee_dst,
}

_COD_ONLY: dict[str, _Checker] = {
    "ConI": _ck_con_i, "ConE": _ck_con_e, "DepE": _ck_dep_e,
    "DepI": _ck_dep_i,
}

RULES_BY_SYSTEM: dict[str, dict[str, _Checker]] = {
    "co-g": dict(_CO_RULES),
    "cov-g": {**_CO_RULES, **_SHARED_OR, **_COV_ONLY},
    "cod-g": {**_CO_RULES, **_SHARED_OR, **_COD_ONLY},
}
RULES_BY_SYSTEM["cov-c"] = {**RULES_BY_SYSTEM["cov-g"],
                            "FunE": _ck_fun_e, "Unf-vvee": _ck_unf_vvee}
RULES_BY_SYSTEM["cod-c"] = {**RULES_BY_SYSTEM["cod-g"],
                            "FunE": _ck_fun_e, "Unf-D": _ck_unf_d}

ALL_RULES = sorted(set().union(*(RULES_BY_SYSTEM[s] for s in SYSTEMS)))


def check_derivation(d: Derivation, system: str,
                     sig: Signature) -> CheckResult:
    """Accept exactly the rule-conforming trees of the given system;
    on failure reports the offending node's path and the reason."""
    if system not in RULES_BY_SYSTEM:
        raise ProofError(f"unknown system {system!r}; "
                         f"choose from {', '.join(SYSTEMS)}")
    rules = RULES_BY_SYSTEM[system]
    langs = _LANG[system]

    def walk(node: Derivation, path: str) -> Assumptions:
        checker = rules.get(node.rule)
        if checker is None:
            raise _Fail(path, f"rule {node.rule!r} is not part of {system}")
        if classify(node.conclusion) not in langs:
            raise _Fail(path, "conclusion is outside the system's language")
        prem = [(child.conclusion, walk(child, f"{path}.{i}"))
                for i, child in enumerate(node.premises)]
        return checker(node, prem, sig, path)

    try:
        opens = walk(d, "0")
    except _Fail as exc:
        return CheckResult(False, error=exc.reason, path=exc.path)
    return CheckResult(True, conclusion=d.conclusion, assumptions=opens)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def derivation_to_obj(d: Derivation) -> dict:
    obj: dict = {"rule": d.rule, "conclusion": format_formula(d.conclusion)}
    if d.premises:
        obj["premises"] = [derivation_to_obj(p) for p in d.premises]
    if d.discharge:
        obj["discharge"] = list(d.discharge)
    params = {}
    for key, value in d.params.items():
        if key == "team":
            params[key] = team_to_obj(value, embed_signature=False)
        elif key == "chain":
            params[key] = list(value)
        else:
            params[key] = value
    if params:
        obj["params"] = params
    return obj


def derivation_from_obj(obj: dict, sig: Signature) -> Derivation:
    try:
        rule = obj["rule"]
        conclusion = parse(obj["conclusion"], sig)
    except KeyError as exc:
        raise ProofError(f"derivation node missing {exc}") from None
    premises = [derivation_from_obj(p, sig) for p in obj.get("premises", [])]
    params = dict(obj.get("params", {}))
    if "team" in params:
        team = team_from_obj(dict(params["team"], kind="generalized"), sig)
        params["team"] = team
    if "chain" in params:
        params["chain"] = tuple(params["chain"])
    return Derivation(rule, conclusion, premises,
                      tuple(obj.get("discharge", ())), params)


def dumps_derivation(d: Derivation) -> str:
    return json.dumps(derivation_to_obj(d), indent=2) + "\n"


def loads_derivation(text: str, sig: Signature) -> Derivation:
    return derivation_from_obj(json.loads(text), sig)
