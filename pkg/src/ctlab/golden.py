"""Golden derivations: the derived rules reconstructed as concrete proof
trees that must pass the checker, plus the monotone-substitution
derivation transformer.

Each fixture records the system it lives in, the open assumptions it is
allowed to keep, and the entailment statement it witnesses (confirmed
semantically by the decision procedure in the test suite).
"""

from __future__ import annotations

from dataclasses import dataclass

from .calculus import Derivation, hyp
from .core import Signature
from .syntax import (And, Cf, Dep, Eq, Formula, GlobalOr, Neg, TensorOr,
                     big_or, bottom, con, count_occurrences)

SIG2 = Signature.of({"A": ["0", "1"], "B": ["0", "1"]})
SIG3 = Signature.of({"A": ["0", "1"], "B": ["0", "1"], "C": ["0", "1"]})


@dataclass
class GoldenRule:
    name: str
    system: str
    signature: Signature
    derivation: Derivation
    premises: tuple[Formula, ...]   # expected open assumptions
    conclusion: Formula


class _Labels:
    def __init__(self, prefix: str = "h"):
        self.prefix = prefix
        self.n = 0

    def fresh(self) -> str:
        self.n += 1
        return f"{self.prefix}{self.n}"


# --- small derivation combinators ------------------------------------------

def _and_e(d: Derivation, which: str) -> Derivation:
    f = d.conclusion
    assert isinstance(f, And)
    return Derivation("and-E", f.left if which == "l" else f.right, [d])


def _and_i(a: Derivation, b: Derivation) -> Derivation:
    return Derivation("and-I", And(a.conclusion, b.conclusion), [a, b])


def _or_i(d: Derivation, other: Formula, side: str) -> Derivation:
    f = (TensorOr(d.conclusion, other) if side == "l"
         else TensorOr(other, d.conclusion))
    return Derivation("or-I", f, [d])


def _or_com(d: Derivation) -> Derivation:
    f = d.conclusion
    assert isinstance(f, TensorOr)
    return Derivation("or-Com", TensorOr(f.right, f.left), [d])


def _or_rpl(major: Derivation, sub: Derivation, label: str) -> Derivation:
    f = major.conclusion
    assert isinstance(f, TensorOr)
    return Derivation("or-Rpl", TensorOr(sub.conclusion, f.right),
                      [major, sub], discharge=(label,))


def _neg_e(pos: Derivation, neg: Derivation, out: Formula) -> Derivation:
    return Derivation("neg-E", out, [pos, neg])


def _neg_i(sub: Derivation, label: str, alpha: Formula) -> Derivation:
    return Derivation("neg-I", Neg(alpha), [sub], discharge=(label,))


def _rpl_c(major: Derivation, sub: Derivation, label: str) -> Derivation:
    f = major.conclusion
    assert isinstance(f, Cf)
    return Derivation("boxright-Rpl_C", Cf(f.antecedent, sub.conclusion),
                      [major, sub], discharge=(label,))


def _boxright_and_i(a: Derivation, b: Derivation) -> Derivation:
    fa, fb = a.conclusion, b.conclusion
    assert isinstance(fa, Cf) and isinstance(fb, Cf)
    return Derivation("boxright-and-I",
                      Cf(fa.antecedent, And(fa.body, fb.body)), [a, b])


def _vvee_i(d: Derivation, other: Formula, side: str) -> Derivation:
    f = (GlobalOr(d.conclusion, other) if side == "l"
         else GlobalOr(other, d.conclusion))
    return Derivation("vvee-I", f, [d])


def _vvee_e(major: Derivation, sub1: Derivation, l1: str,
            sub2: Derivation, l2: str) -> Derivation:
    return Derivation("vvee-E", sub1.conclusion, [major, sub1, sub2],
                      discharge=(l1, l2))


def _or_e(major: Derivation, sub1: Derivation, l1: str,
          sub2: Derivation, l2: str) -> Derivation:
    return Derivation("or-E", sub1.conclusion, [major, sub1, sub2],
                      discharge=(l1, l2))


# --- reusable constructions -------------------------------------------------

def _de_morgan_or(labels: _Labels, d_label: str, phi: Formula,
                  psi: Formula, sig: Signature) -> Derivation:
    """[d: phi \\/ psi] |- !(!phi /\\ !psi); the only open label is d."""
    bot = bottom(sig)
    m = labels.fresh()
    hm = hyp(m, And(Neg(phi), Neg(psi)))
    lp, lq = labels.fresh(), labels.fresh()
    left = _neg_e(hyp(lp, phi), _and_e(hm, "l"), bot)
    right = _neg_e(hyp(lq, psi), _and_e(hm, "r"), bot)
    bottom_from_cases = _or_e(hyp(d_label, TensorOr(phi, psi)),
                              left, lp, right, lq)
    return _neg_i(bottom_from_cases, m, And(Neg(phi), Neg(psi)))


def _neg_into_boxright(labels: _Labels, d: Derivation,
                       sig: Signature) -> Derivation:
    """From E []-> !alpha derive !(E []-> alpha) (consistent E)."""
    f = d.conclusion
    assert isinstance(f, Cf) and isinstance(f.body, Neg)
    alpha = f.body.body
    bot = bottom(sig)
    la = labels.fresh()
    assume = hyp(la, Cf(f.antecedent, alpha))
    both = _boxright_and_i(d, assume)
    ld = labels.fresh()
    hm = hyp(ld, And(Neg(alpha), alpha))
    explode = _neg_e(_and_e(hm, "r"), _and_e(hm, "l"), bot)
    forced = _rpl_c(both, explode, ld)
    blown = Derivation("boxright-botE", bot, [forced])
    return _neg_i(blown, la, Cf(f.antecedent, alpha))


def _boxright_or_split(labels: _Labels, d: Derivation, phi: Formula,
                       psi: Formula, sig: Signature) -> Derivation:
    """From E []-> (phi \\/ psi) derive (E []-> phi) \\/ (E []-> psi),
    inside the base system (consistent E, CO disjuncts)."""
    f = d.conclusion
    assert isinstance(f, Cf) and f.body == TensorOr(phi, psi)
    ante = f.antecedent
    bot = bottom(sig)
    dl = labels.fresh()
    n1 = _rpl_c(d, _de_morgan_or(labels, dl, phi, psi, sig), dl)
    n2 = _neg_into_boxright(labels, n1, sig)  # !(E []-> (!phi /\ !psi))
    goal = TensorOr(Cf(ante, phi), Cf(ante, psi))
    r = labels.fresh()
    hr = hyp(r, Neg(goal))

    def denial(body: Formula, side: str) -> Derivation:
        la = labels.fresh()
        ha = hyp(la, Cf(ante, body))
        disj = _or_i(ha, Cf(ante, psi) if side == "l" else Cf(ante, phi),
                     side)
        return _neg_i(_neg_e(disj, hr, bot), la, Cf(ante, body))

    t1 = Derivation("neg-boxright-E", Cf(ante, Neg(phi)),
                    [denial(phi, "l")])
    t2 = Derivation("neg-boxright-E", Cf(ante, Neg(psi)),
                    [denial(psi, "r")])
    t3 = _boxright_and_i(t1, t2)
    clash = _neg_e(t3, n2, bot)
    return Derivation("RAA", goal, [clash], discharge=(r,))


def _dist_and_or(labels: _Labels, d: Derivation) -> Derivation:
    """From phi /\\ (psi \\/ chi) derive (phi /\\ psi) \\/ (phi /\\ chi),
    using or-Rpl and or-Com only (no or-E side condition)."""
    f = d.conclusion
    assert isinstance(f, And) and isinstance(f.right, TensorOr)
    phi, psi, chi = f.left, f.right.left, f.right.right
    m1 = labels.fresh()
    r1 = _or_rpl(_and_e(d, "r"), _and_i(_and_e(d, "l"), hyp(m1, psi)), m1)
    m2 = labels.fresh()
    r2 = _or_rpl(_or_com(r1), _and_i(_and_e(d, "l"), hyp(m2, chi)), m2)
    return _or_com(r2)


# --- the fixtures -----------------------------------------------------------

def _weak_modus_ponens() -> GoldenRule:
    labels = _Labels("w")
    alpha, beta = Eq("A", "0"), Eq("B", "1")
    h1 = hyp("h1", alpha)
    h2 = hyp("h2", TensorOr(Neg(alpha), beta))
    l1, l2 = labels.fresh(), labels.fresh()
    minor1 = _neg_e(h1, hyp(l1, Neg(alpha)), beta)
    d = _or_e(h2, minor1, l1, hyp(l2, beta), l2)
    return GoldenRule("weak-modus-ponens", "co-g", SIG2, d,
                      (alpha, h2.conclusion), beta)


def _uniqueness() -> GoldenRule:
    ante = (("A", "0"),)
    h1 = hyp("h1", Cf(ante, Eq("B", "0")))
    sub = Derivation("ValUnq", Neg(Eq("B", "1")), [hyp("u1", Eq("B", "0"))])
    d = _rpl_c(h1, sub, "u1")
    return GoldenRule("uniqueness", "co-g", SIG2, d,
                      (h1.conclusion,), d.conclusion)


def _composition() -> GoldenRule:
    ante = (("A", "0"),)
    h1 = hyp("h1", Cf(ante, Eq("B", "1")))
    h2 = hyp("h2", Cf(ante, Eq("C", "1")))
    n1 = _boxright_and_i(h1, h2)
    hm = hyp("m1", And(Eq("B", "1"), Eq("C", "1")))
    inner = Derivation("boxright-I", Cf((("B", "1"),), Eq("C", "1")),
                       [_and_e(hm, "l"), _and_e(hm, "r")])
    n2 = _rpl_c(n1, inner, "m1")
    n3 = Derivation("boxright-Extr", Cf((("A", "0"), ("B", "1")),
                                        Eq("C", "1")), [n2])
    return GoldenRule("composition", "co-g", SIG3, n3,
                      (h1.conclusion, h2.conclusion), n3.conclusion)


def _extraction_of_conjuncts() -> GoldenRule:
    ante = (("A", "0"),)
    body = And(Eq("B", "0"), Eq("B", "1"))
    h1 = hyp("h1", Cf(ante, body))
    d = _rpl_c(h1, _and_e(hyp("m1", body), "l"), "m1")
    return GoldenRule("extraction-of-conjuncts", "co-g", SIG2, d,
                      (h1.conclusion,), d.conclusion)


def _negation_shift() -> GoldenRule:
    labels = _Labels("n")
    h1 = hyp("h1", Cf((("A", "0"),), Neg(Eq("B", "0"))))
    d = _neg_into_boxright(labels, h1, SIG2)
    return GoldenRule("counterfactual-negation-shift", "co-g", SIG2, d,
                      (h1.conclusion,), d.conclusion)


def _cf_or_distribution() -> list[GoldenRule]:
    labels = _Labels("d")
    ante = (("A", "0"),)
    phi, psi = Eq("B", "0"), Eq("B", "1")
    h = hyp("h1", Cf(ante, TensorOr(phi, psi)))
    ltr = _boxright_or_split(labels, h, phi, psi, SIG2)

    major = hyp("h1", TensorOr(Cf(ante, phi), Cf(ante, psi)))
    l1, l2 = labels.fresh(), labels.fresh()
    m1, m2 = labels.fresh(), labels.fresh()
    minor1 = _rpl_c(hyp(l1, Cf(ante, phi)), _or_i(hyp(m1, phi), psi, "l"),
                    m1)
    minor2 = _rpl_c(hyp(l2, Cf(ante, psi)), _or_i(hyp(m2, psi), phi, "r"),
                    m2)
    rtl = _or_e(major, minor1, l1, minor2, l2)
    return [GoldenRule("counterfactual-or-distribution", "co-g", SIG2, ltr,
                       (h.conclusion,), ltr.conclusion),
            GoldenRule("counterfactual-or-distribution-inverse", "co-g",
                       SIG2, rtl, (major.conclusion,), rtl.conclusion)]


def _definiteness() -> GoldenRule:
    labels = _Labels("f")
    ante = (("A", "0"),)
    eff = Derivation("boxright-Eff", Cf(ante, Eq("A", "0")), [])
    valdef = Derivation("ValDef", big_or([Eq("B", "0"), Eq("B", "1")]), [],
                        params={"var": "B"})
    lv = labels.fresh()
    n2 = _rpl_c(eff, valdef, lv)  # vacuous discharge of A=0
    d = _boxright_or_split(labels, n2, Eq("B", "0"), Eq("B", "1"), SIG2)
    return GoldenRule("definiteness", "co-g", SIG2, d, (), d.conclusion)


def _gor_commutativity() -> GoldenRule:
    phi, psi = Eq("A", "0"), Cf((("A", "1"),), Eq("B", "1"))
    h = hyp("h1", GlobalOr(phi, psi))
    l1, l2 = "c1", "c2"
    d = _vvee_e(h, _vvee_i(hyp(l1, phi), psi, "r"), l1,
                _vvee_i(hyp(l2, psi), phi, "l"), l2)
    return GoldenRule("gor-commutativity", "cov-g", SIG2, d,
                      (h.conclusion,), d.conclusion)


def _gor_associativity() -> GoldenRule:
    labels = _Labels("a")
    a, b, c = Eq("A", "0"), Eq("B", "1"), Eq("A", "1")
    h = hyp("h1", GlobalOr(GlobalOr(a, b), c))
    goal = GlobalOr(a, GlobalOr(b, c))
    li = labels.fresh()
    l1, l2 = labels.fresh(), labels.fresh()
    inner = _vvee_e(hyp(li, GlobalOr(a, b)),
                    _vvee_i(hyp(l1, a), GlobalOr(b, c), "l"), l1,
                    _vvee_i(_vvee_i(hyp(l2, b), c, "l"), a, "r"), l2)
    lc = labels.fresh()
    outer = _vvee_e(h, inner, li,
                    _vvee_i(_vvee_i(hyp(lc, c), b, "r"), a, "r"), lc)
    assert outer.conclusion == goal
    return GoldenRule("gor-associativity", "cov-g", SIG2, outer,
                      (h.conclusion,), goal)


def _and_gor_distribution() -> list[GoldenRule]:
    labels = _Labels("g")
    phi, psi, chi = Eq("A", "0"), Eq("B", "0"), Eq("B", "1")
    h = hyp("h1", And(phi, GlobalOr(psi, chi)))
    l1, l2 = labels.fresh(), labels.fresh()
    ltr = _vvee_e(_and_e(h, "r"),
                  _vvee_i(_and_i(_and_e(h, "l"), hyp(l1, psi)),
                          And(phi, chi), "l"), l1,
                  _vvee_i(_and_i(_and_e(h, "l"), hyp(l2, chi)),
                          And(phi, psi), "r"), l2)

    h2 = hyp("h1", GlobalOr(And(phi, psi), And(phi, chi)))
    m1, m2 = labels.fresh(), labels.fresh()
    k1 = hyp(m1, And(phi, psi))
    back1 = _and_i(_and_e(k1, "l"), _vvee_i(_and_e(k1, "r"), chi, "l"))
    k2 = hyp(m2, And(phi, chi))
    back2 = _and_i(_and_e(k2, "l"), _vvee_i(_and_e(k2, "r"), psi, "r"))
    rtl = _vvee_e(h2, back1, m1, back2, m2)
    return [GoldenRule("and-gor-distribution", "cov-g", SIG2, ltr,
                       (h.conclusion,), ltr.conclusion),
            GoldenRule("and-gor-distribution-inverse", "cov-g", SIG2, rtl,
                       (h2.conclusion,), rtl.conclusion)]


def _and_or_distribution() -> GoldenRule:
    labels = _Labels("t")
    phi, psi, chi = Eq("A", "0"), Eq("B", "0"), Eq("B", "1")
    h = hyp("h1", And(phi, TensorOr(psi, chi)))
    d = _dist_and_or(labels, h)
    return GoldenRule("and-or-distribution", "cov-g", SIG2, d,
                      (h.conclusion,), d.conclusion)


def _or_gor_distribution() -> list[GoldenRule]:
    labels = _Labels("v")
    phi, psi, chi = Eq("A", "0"), Eq("B", "0"), Eq("B", "1")
    h = hyp("h1", TensorOr(phi, GlobalOr(psi, chi)))
    ltr = Derivation("or-vvee-Dst",
                     GlobalOr(TensorOr(phi, psi), TensorOr(phi, chi)), [h])

    h2 = hyp("h1", GlobalOr(TensorOr(phi, psi), TensorOr(phi, chi)))

    def back(disj: Formula, inner: Formula, other: Formula,
             side: str, label: str) -> Derivation:
        com1 = _or_com(hyp(label, disj))
        m = labels.fresh()
        rpl = _or_rpl(com1, _vvee_i(hyp(m, inner), other, side), m)
        return _or_com(rpl)

    m1, m2 = labels.fresh(), labels.fresh()
    rtl = _vvee_e(h2, back(TensorOr(phi, psi), psi, chi, "l", m1), m1,
                  back(TensorOr(phi, chi), chi, psi, "r", m2), m2)
    return [GoldenRule("or-gor-distribution", "cov-g", SIG2, ltr,
                       (h.conclusion,), ltr.conclusion),
            GoldenRule("or-gor-distribution-inverse", "cov-g", SIG2, rtl,
                       (h2.conclusion,), rtl.conclusion)]


def _cf_gor_distribution() -> list[GoldenRule]:
    labels = _Labels("w")
    ante = (("A", "0"),)
    psi, chi = Eq("B", "0"), Eq("B", "1")
    h = hyp("h1", Cf(ante, GlobalOr(psi, chi)))
    ltr = Derivation("boxright-vvee-Dst",
                     GlobalOr(Cf(ante, psi), Cf(ante, chi)), [h])

    h2 = hyp("h1", GlobalOr(Cf(ante, psi), Cf(ante, chi)))
    l1, l2 = labels.fresh(), labels.fresh()
    m1, m2 = labels.fresh(), labels.fresh()
    rtl = _vvee_e(h2,
                  _rpl_c(hyp(l1, Cf(ante, psi)),
                         _vvee_i(hyp(m1, psi), chi, "l"), m1), l1,
                  _rpl_c(hyp(l2, Cf(ante, chi)),
                         _vvee_i(hyp(m2, chi), psi, "r"), m2), l2)
    return [GoldenRule("cf-gor-distribution", "cov-g", SIG2, ltr,
                       (h.conclusion,), ltr.conclusion),
            GoldenRule("cf-gor-distribution-inverse", "cov-g", SIG2, rtl,
                       (h2.conclusion,), rtl.conclusion)]


def _dep_instance() -> GoldenRule:
    h1 = hyp("h1", Dep(("A",), "B"))
    h2 = hyp("h2", Eq("A", "0"))
    coni = Derivation("ConI", con("A"), [h2])
    d = Derivation("DepE", con("B"), [h1, coni])
    return GoldenRule("dep-to-constancy", "cod-g", SIG2, d,
                      (h1.conclusion, h2.conclusion), d.conclusion)


def _dep_normal_form_ltr(labels: _Labels, dep_deriv: Derivation
                         ) -> Derivation:
    """From dep(A;B) derive (A=0 /\\ con(B)) \\/ (A=1 /\\ con(B))."""
    valdef = Derivation("ValDef", big_or([Eq("A", "0"), Eq("A", "1")]), [],
                        params={"var": "A"})
    paired = _and_i(dep_deriv, valdef)
    split = _dist_and_or(labels, paired)

    def refine(label: str, value: str) -> Derivation:
        k = hyp(label, And(dep_deriv.conclusion, Eq("A", value)))
        coni = Derivation("ConI", con("A"), [_and_e(k, "r")])
        depe = Derivation("DepE", con("B"), [_and_e(k, "l"), coni])
        return _and_i(_and_e(k, "r"), depe)

    m1 = labels.fresh()
    r1 = _or_rpl(split, refine(m1, "0"), m1)
    m2 = labels.fresh()
    r2 = _or_rpl(_or_com(r1), refine(m2, "1"), m2)
    return _or_com(r2)


def _dep_normal_form_rtl(labels: _Labels, disj_label: str) -> Derivation:
    """From (A=0 /\\ con(B)) \\/ (A=1 /\\ con(B)) derive dep(A; B)."""
    def d_formula(y0, y1) -> Formula:
        left = Eq("B", y0) if y0 is not None else con("B")
        right = Eq("B", y1) if y1 is not None else con("B")
        return TensorOr(And(Eq("A", "0"), left), And(Eq("A", "1"), right))

    def innermost(x: str, ax_label: str, d2_label: str,
                  y0: str, y1: str) -> Derivation:
        # from A=x and the fully instantiated disjunction, conclude con(B)
        want = y0 if x == "0" else y1
        paired = _and_i(hyp(ax_label, Eq("A", x)),
                        hyp(d2_label, d_formula(y0, y1)))
        split = _dist_and_or(labels, paired)
        minors = []
        lab = []
        for value, yv in (("0", y0), ("1", y1)):
            ml = labels.fresh()
            lab.append(ml)
            k = hyp(ml, And(Eq("A", x), And(Eq("A", value), Eq("B", yv))))
            if value == x:
                minors.append(_and_e(_and_e(k, "r"), "r"))
            else:
                unq = Derivation("ValUnq", Neg(Eq("A", value)),
                                 [_and_e(k, "l")])
                minors.append(_neg_e(_and_e(_and_e(k, "r"), "l"), unq,
                                     Eq("B", want)))
        got_b = _or_e(split, minors[0], lab[0], minors[1], lab[1])
        return Derivation("ConI", con("B"), [got_b])

    def middle(x: str, ax_label: str) -> Derivation:
        # eliminate both con(B) occurrences of the open disjunction
        def level2(y0: str, g_label: str) -> Derivation:
            insts, labs = [], []
            for y1 in ("0", "1"):
                dl = labels.fresh()
                labs.append(dl)
                insts.append(innermost(x, ax_label, dl, y0, y1))
            return Derivation("ConE", con("B"),
                              [hyp(g_label, d_formula(y0, None))] + insts,
                              discharge=tuple(labs),
                              params={"var": "B", "occurrence": 1})

        insts, labs = [], []
        for y0 in ("0", "1"):
            gl = labels.fresh()
            labs.append(gl)
            insts.append(level2(y0, gl))
        return Derivation("ConE", con("B"),
                          [hyp(disj_label, d_formula(None, None))] + insts,
                          discharge=tuple(labs),
                          params={"var": "B", "occurrence": 1})

    lc = labels.fresh()
    insts, labs = [], []
    for x in ("0", "1"):
        al = labels.fresh()
        labs.append(al)
        insts.append(middle(x, al))
    cone = Derivation("ConE", con("B"), [hyp(lc, con("A"))] + insts,
                      discharge=tuple(labs),
                      params={"var": "A", "occurrence": 1})
    return Derivation("DepI", Dep(("A",), "B"), [cone], discharge=(lc,))


def _dep_normal_form() -> list[GoldenRule]:
    labels = _Labels("q")
    h = hyp("h1", Dep(("A",), "B"))
    ltr = _dep_normal_form_ltr(labels, h)
    rtl = _dep_normal_form_rtl(labels, "h1")
    disj = TensorOr(And(Eq("A", "0"), con("B")),
                    And(Eq("A", "1"), con("B")))
    return [GoldenRule("dep-normal-form", "cod-g", SIG2, ltr,
                       (h.conclusion,), ltr.conclusion),
            GoldenRule("dep-normal-form-inverse", "cod-g", SIG2, rtl,
                       (disj,), Dep(("A",), "B"))]


def _star_equivalence() -> list[GoldenRule]:
    labels = _Labels("s")
    dep = Dep(("A",), "B")
    disj = TensorOr(And(Eq("A", "0"), con("B")),
                    And(Eq("A", "1"), con("B")))
    phi = TensorOr(dep, Eq("A", "0"))
    starred = TensorOr(disj, Eq("A", "0"))

    m1 = labels.fresh()
    ltr = _or_rpl(hyp("h1", phi),
                  _dep_normal_form_ltr(labels, hyp(m1, dep)), m1)
    m2 = labels.fresh()
    rtl = _or_rpl(hyp("h1", starred), _dep_normal_form_rtl(labels, m2), m2)
    return [GoldenRule("star-translation", "cod-g", SIG2, ltr, (phi,),
                       starred),
            GoldenRule("star-translation-inverse", "cod-g", SIG2, rtl,
                       (starred,), phi)]


def golden_derived_rules() -> list[GoldenRule]:
    """Every derived-rule fixture; each passes check_derivation in its
    system and each statement is semantically valid."""
    out = [
        _weak_modus_ponens(), _uniqueness(), _composition(),
        _extraction_of_conjuncts(), _negation_shift(),
        *_cf_or_distribution(), _definiteness(),
        _gor_commutativity(), _gor_associativity(),
        *_and_gor_distribution(), _and_or_distribution(),
        *_or_gor_distribution(), *_cf_gor_distribution(),
        _dep_instance(), *_dep_normal_form(), *_star_equivalence(),
    ]
    return out


# ---------------------------------------------------------------------------
# Monotone substitution
# ---------------------------------------------------------------------------

def monotone_substitution(d: Derivation, theta: Formula, k: int,
                          sub: Derivation, sub_label: str,
                          labels: _Labels | None = None) -> Derivation:
    """Given a derivation d of phi and a derivation sub of theta' whose
    only open assumption is (sub_label, theta), build a derivation of phi
    with the k-th occurrence of theta replaced by theta'.

    The occurrence must be positive: not under a negation and not inside
    a counterfactual antecedent.
    """
    if labels is None:
        labels = _Labels("ms")
    theta_new = sub.conclusion

    def graft(node: Derivation, replacement: Derivation) -> Derivation:
        if node.rule == "hyp" and node.params.get("label") == sub_label:
            return replacement
        return Derivation(node.rule, node.conclusion,
                          [graft(p, replacement) for p in node.premises],
                          node.discharge, node.params)

    def walk(cur: Derivation, phi: Formula, kk: int) -> Derivation:
        if phi == theta and kk == 1:
            return graft(sub, cur)
        if isinstance(phi, And):
            n_left = count_occurrences(phi.left, theta)
            if kk <= n_left:
                return _and_i(walk(_and_e(cur, "l"), phi.left, kk),
                              _and_e(cur, "r"))
            return _and_i(_and_e(cur, "l"),
                          walk(_and_e(cur, "r"), phi.right, kk - n_left))
        if isinstance(phi, TensorOr):
            n_left = count_occurrences(phi.left, theta)
            if kk <= n_left:
                m = labels.fresh()
                return _or_rpl(cur, walk(hyp(m, phi.left), phi.left, kk), m)
            m = labels.fresh()
            flipped = _or_rpl(_or_com(cur),
                              walk(hyp(m, phi.right), phi.right, kk - n_left),
                              m)
            return _or_com(flipped)
        if isinstance(phi, GlobalOr):
            n_left = count_occurrences(phi.left, theta)
            l1, l2 = labels.fresh(), labels.fresh()
            if kk <= n_left:
                new_left = walk(hyp(l1, phi.left), phi.left, kk)
                goal_right = GlobalOr(new_left.conclusion, phi.right)
                return _vvee_e(cur, _vvee_i(new_left, phi.right, "l"), l1,
                               _vvee_i(hyp(l2, phi.right),
                                       new_left.conclusion, "r"), l2)
            new_right = walk(hyp(l2, phi.right), phi.right, kk - n_left)
            return _vvee_e(cur,
                           _vvee_i(hyp(l1, phi.left),
                                   new_right.conclusion, "l"), l1,
                           _vvee_i(new_right, phi.left, "r"), l2)
        if isinstance(phi, Cf):
            m = labels.fresh()
            inner = walk(hyp(m, phi.body), phi.body, kk)
            return _rpl_c(cur, inner, m)
        raise ValueError("the occurrence is not positive in the formula")

    total = count_occurrences(d.conclusion, theta)
    if not 1 <= k <= total:
        raise ValueError(f"the formula has {total} occurrence(s) of the "
                         f"target")
    return walk(d, d.conclusion, k)
