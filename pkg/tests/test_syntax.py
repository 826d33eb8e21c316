import pytest
from hypothesis import given, settings, strategies as st

from ctlab.core import Signature
from ctlab.errors import ParseError
from ctlab.syntax import (And, Cf, Dep, Eq, GlobalOr, Neg, TensorOr,
                          big_and, big_or, bottom, classify, con,
                          count_occurrences, desugar_selective,
                          format_formula, formula_size, is_boxright_free,
                          parse, read_formula_lines, replace_occurrence,
                          top, validate_formula)

SIG = Signature.of({"X": ["0", "1"], "Y": ["1", "2"], "Z": ["0", "1"]})


class TestParse:
    def test_counterfactual(self):
        phi = parse("(X=1) []-> Y=2", SIG)
        assert phi == Cf((("X", "1"),), Eq("Y", "2"))

    def test_dependence_atom(self):
        assert parse("dep(Y; Z)", SIG) == Dep(("Y",), "Z")
        assert parse("dep(; Z)", SIG) == Dep((), "Z")
        assert parse("con(Z)", SIG) == Dep((), "Z")

    def test_negated_dependence_rejected(self):
        with pytest.raises(ParseError):
            parse("!dep(Y;Z)", SIG)
        with pytest.raises(ParseError):
            Neg(con("Z"))

    def test_precedence(self):
        phi = parse("!X=1 /\\ Y=2 \\/ Z=0 \\\\/ X=0", SIG)
        assert phi == GlobalOr(
            TensorOr(And(Neg(Eq("X", "1")), Eq("Y", "2")), Eq("Z", "0")),
            Eq("X", "0"))

    def test_conditionals_right_associative(self):
        phi = parse("(X=1) []-> (Y=2) []-> Z=0", SIG)
        assert phi == Cf((("X", "1"),), Cf((("Y", "2"),), Eq("Z", "0")))

    def test_multi_conjunct_antecedent(self):
        phi = parse("(X=1 & Y=2 & X=0) []-> Z=1", SIG)
        assert phi.antecedent == (("X", "1"), ("Y", "2"), ("X", "0"))

    def test_bare_equality_antecedent(self):
        assert parse("X=1 []-> Y=2", SIG) == parse("(X=1) []-> Y=2", SIG)

    def test_empty_antecedent(self):
        phi = parse("() []-> X=1", SIG)
        assert phi == Cf((), Eq("X", "1"))

    def test_errors(self):
        for text in ["X=7", "Q=1", "X=1 \\/", "dep(Y Z)", "(X=1 & Y=2)",
                     "X=1 @ Y=2", "()"]:
            with pytest.raises(ParseError):
                parse(text, SIG)

    def test_selective_sugar(self):
        phi = parse("X=1 => Y=2", SIG)
        assert phi == TensorOr(Neg(Eq("X", "1")), Eq("Y", "2"))
        with pytest.raises(ParseError):
            parse("con(Z) => Y=2", SIG)

    def test_formula_file(self):
        text = "# comment\nX=1\n\nY=2 # trailing\n"
        assert read_formula_lines(text, SIG) == [Eq("X", "1"), Eq("Y", "2")]


class TestClassify:
    def test_basic(self):
        assert classify(Eq("X", "1")) == "CO"
        assert classify(con("Z")) == "COD"
        assert classify(GlobalOr(Eq("X", "1"), Eq("X", "0"))) == "COV"
        assert classify(GlobalOr(Eq("X", "1"), con("Z"))) == "NONE"

    def test_nested(self):
        phi = Cf((("X", "1"),), And(Dep(("Y",), "Z"), Eq("X", "0")))
        assert classify(phi) == "COD"


class TestPrinting:
    def test_spec_examples_round_trip(self):
        texts = ["(X=1) []-> Y=2", "dep(Y; Z)", "con(Z)",
                 "!Y=2 \\/ Y=2", "X=1 /\\ (Y=2 \\/ Z=0)",
                 "(X=1 & Y=2) []-> (Z=0) []-> X=0",
                 "() []-> X=1", "!(X=1 /\\ Y=2)"]
        for text in texts:
            phi = parse(text, SIG)
            assert parse(format_formula(phi), SIG) == phi

    def test_canonical_form(self):
        assert format_formula(parse("X = 1  =>  Y = 2", SIG)) \
            == "!X=1 \\/ Y=2"


def formulas(sig, depth=3):
    """Hypothesis strategy for well-formed formulas over sig."""
    var_vals = [(v, t) for v in sig.variables for t in sig.range_of(v)]
    eqs = st.sampled_from(var_vals).map(lambda p: Eq(*p))
    deps = st.tuples(
        st.lists(st.sampled_from(sig.variables), max_size=2),
        st.sampled_from(sig.variables)).map(
            lambda p: Dep(tuple(p[0]), p[1]))
    antecedents = st.lists(st.sampled_from(var_vals), min_size=0,
                           max_size=2).map(tuple)

    def extend(children):
        co_child = children.filter(lambda f: classify(f) == "CO")
        return st.one_of(
            st.tuples(children, children).map(lambda p: And(*p)),
            st.tuples(children, children).map(lambda p: TensorOr(*p)),
            st.tuples(children, children).map(lambda p: GlobalOr(*p)),
            co_child.map(Neg),
            st.tuples(antecedents, children).map(lambda p: Cf(*p)),
        )

    return st.recursive(st.one_of(eqs, deps), extend, max_leaves=8)


@settings(max_examples=150, deadline=None)
@given(formulas(SIG))
def test_print_parse_identity(phi):
    assert parse(format_formula(phi), SIG) == phi


@settings(max_examples=100, deadline=None)
@given(formulas(SIG))
def test_validate_accepts_generated(phi):
    validate_formula(phi, SIG)
    assert formula_size(phi) >= 1


class TestReplaceOccurrence:
    def test_indexed_occurrence(self):
        # con(X) \/ (Y=y []-> con(X)), replacing occurrence 2 with X=x
        phi = TensorOr(con("X"), Cf((("Y", "2"),), con("X")))
        got = replace_occurrence(phi, con("X"), 2, Eq("X", "1"))
        assert got == TensorOr(con("X"), Cf((("Y", "2"),), Eq("X", "1")))

    def test_single_occurrence_is_substitution(self):
        phi = And(Eq("X", "1"), con("Z"))
        got = replace_occurrence(phi, con("Z"), 1, Eq("Z", "0"))
        assert got == And(Eq("X", "1"), Eq("Z", "0"))

    def test_count_exceeded(self):
        with pytest.raises(ParseError):
            replace_occurrence(Eq("X", "1"), con("Z"), 1, Eq("Z", "0"))

    @settings(max_examples=80, deadline=None)
    @given(formulas(SIG), st.integers(min_value=1, max_value=3))
    def test_round_trip(self, phi, k):
        theta, psi = con("Z"), Eq("Z", "0")
        n = count_occurrences(phi, theta)
        if n < k or count_occurrences(phi, psi) > 0:
            return
        there = replace_occurrence(phi, theta, k, psi)
        assert count_occurrences(there, psi) == 1
        back = replace_occurrence(there, psi, 1, theta)
        assert back == phi


class TestSugar:
    def test_bottom_and_top(self):
        bot = bottom(SIG)
        assert bot == And(Eq("X", "0"), Neg(Eq("X", "0")))
        assert top(SIG) == Neg(bot)

    def test_desugar_matches_parser(self):
        alpha, phi = Eq("X", "1"), con("Z")
        assert desugar_selective(alpha, phi) == TensorOr(Neg(alpha), phi)

    def test_boxright_free(self):
        assert is_boxright_free(parse("X=1 /\\ !Y=2", SIG))
        assert not is_boxright_free(parse("(X=1) []-> Y=2", SIG))


class TestSelectiveEquivalences:
    def test_bottom_antecedent_always_satisfied(self):
        from ctlab.semantics import SatContext, enumerate_teams, satisfies
        sig = Signature.of({"X": ["0", "1"], "Y": ["0", "1"]})
        phi = desugar_selective(bottom(sig), Eq("Y", "0"))
        ctx = SatContext(semantics="g")
        for team in enumerate_teams(sig, "g", 3):
            assert satisfies(team, phi, ctx)

    def test_bottom_consequent_acts_as_negation(self):
        from ctlab.semantics import SatContext, enumerate_teams, satisfies
        sig = Signature.of({"X": ["0", "1"], "Y": ["0", "1"]})
        alpha = Eq("X", "1")
        lhs = desugar_selective(alpha, bottom(sig))
        ctx = SatContext(semantics="g")
        for team in enumerate_teams(sig, "g", 3):
            assert satisfies(team, lhs, ctx) == \
                satisfies(team, Neg(alpha), ctx)
