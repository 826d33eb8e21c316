"""Formula AST, concrete grammar, parser, printer, and classification.

Concrete grammar (ASCII):

    X=v                    equality atom
    !phi                   negation (CO bodies only)
    phi /\\ psi             conjunction
    phi \\/ psi             tensor disjunction
    phi \\\\/ psi            global disjunction
    (X=x & Y=y) []-> phi   interventionist counterfactual (antecedent may
               be empty: `() []-> phi`; a bare equality LHS also parses)
    alpha => phi           selective implication, sugar for !alpha \\/ phi
    dep(X1,...,Xn ; Y)     dependence atom
    con(Y)                 constancy atom, alias for dep(; Y)

Precedence: ! > /\\ > \\/ > \\\\/ > []->, =>.  Binary connectives are
left-associative, the conditionals right-associative.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from typing import Iterator, Optional

from .core import Signature
from .errors import ParseError


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

class Formula:
    """Base class for formula nodes; all nodes are immutable and hashable."""
    __match_args__ = ()


@dataclass(frozen=True)
class Eq(Formula):
    var: str
    value: str


@dataclass(frozen=True)
class Neg(Formula):
    body: Formula

    def __post_init__(self):
        if classify(self.body) != "CO":
            raise ParseError("negation is restricted to CO bodies")


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class TensorOr(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class GlobalOr(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Dep(Formula):
    args: tuple[str, ...]
    target: str


@dataclass(frozen=True)
class Cf(Formula):
    """Counterfactual: antecedent is a list of (variable, value) pairs,
    kept flat so inconsistency detection and intervention are direct."""
    antecedent: tuple[tuple[str, str], ...]
    body: Formula


def _cached_hash(self) -> int:
    h = self.__dict__.get("_hash")
    if h is None:
        h = hash((type(self).__name__,)
                 + tuple(getattr(self, f.name)
                         for f in dataclasses.fields(self)))
        object.__setattr__(self, "_hash", h)
    return h


for _cls in (Eq, Neg, And, TensorOr, GlobalOr, Dep, Cf):
    _cls.__hash__ = _cached_hash  # type: ignore[assignment]


def con(var: str) -> Dep:
    """The constancy atom con(Y) = dep(; Y)."""
    return Dep((), var)


def is_constancy(phi: Formula) -> bool:
    return isinstance(phi, Dep) and not phi.args


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

def classify(phi: Formula) -> str:
    """CO / COD / COV / NONE depending on which extensions occur."""
    has_dep = has_gor = False
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, Dep):
            has_dep = True
        elif isinstance(node, GlobalOr):
            has_gor = True
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, (And, TensorOr)):
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, Neg):
            stack.append(node.body)
        elif isinstance(node, Cf):
            stack.append(node.body)
    if has_dep and has_gor:
        return "NONE"
    if has_dep:
        return "COD"
    if has_gor:
        return "COV"
    return "CO"


def is_boxright_free(phi: Formula) -> bool:
    return not any(isinstance(n, Cf) for n in subformulas(phi))


def subformulas(phi: Formula) -> Iterator[Formula]:
    """Preorder, left-to-right traversal of all subformula occurrences."""
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, (And, TensorOr, GlobalOr)):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, Neg):
            stack.append(node.body)
        elif isinstance(node, Cf):
            stack.append(node.body)


def formula_size(phi: Formula) -> int:
    """Node count (antecedent equalities each count once)."""
    n = 0
    for node in subformulas(phi):
        n += 1
        if isinstance(node, Cf):
            n += len(node.antecedent)
    return n


def validate_formula(phi: Formula, sig: Signature) -> None:
    """Check every atom against the signature; raises ParseError."""
    for node in subformulas(phi):
        if isinstance(node, Eq):
            try:
                sig.value_index(node.var, node.value)
            except Exception as exc:
                raise ParseError(str(exc)) from None
        elif isinstance(node, Dep):
            for v in node.args + (node.target,):
                if not sig.has_variable(v):
                    raise ParseError(f"unknown variable {v!r}")
        elif isinstance(node, Cf):
            for var, tok in node.antecedent:
                try:
                    sig.value_index(var, tok)
                except Exception as exc:
                    raise ParseError(str(exc)) from None


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def big_and(parts: list[Formula]) -> Formula:
    """Left-associated conjunction chain; parts must be nonempty."""
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def big_or(parts: list[Formula]) -> Formula:
    if not parts:
        raise ValueError("empty disjunction")
    out = parts[0]
    for p in parts[1:]:
        out = TensorOr(out, p)
    return out


def big_gor(parts: list[Formula]) -> Formula:
    if not parts:
        raise ValueError("empty global disjunction")
    out = parts[0]
    for p in parts[1:]:
        out = GlobalOr(out, p)
    return out


def conj_of_equalities(pairs: tuple[tuple[str, str], ...]) -> Formula:
    """The conjunction formula X1=x1 /\\ ... /\\ Xn=xn (n >= 1)."""
    return big_and([Eq(v, t) for v, t in pairs])


def bottom(sig: Signature) -> Formula:
    """X=x /\\ !(X=x) for the first variable and value; holds only on the
    empty team."""
    var = sig.variables[0]
    val = sig.ranges[0][0]
    return And(Eq(var, val), Neg(Eq(var, val)))


def top(sig: Signature) -> Formula:
    return Neg(bottom(sig))


def desugar_selective(antecedent: Formula, body: Formula) -> Formula:
    """alpha => phi  becomes  !alpha \\/ phi (alpha must be CO)."""
    if classify(antecedent) != "CO":
        raise ParseError("selective implication needs a CO antecedent")
    return TensorOr(Neg(antecedent), body)


# ---------------------------------------------------------------------------
# Occurrence-indexed substitution
# ---------------------------------------------------------------------------

def count_occurrences(phi: Formula, theta: Formula) -> int:
    return sum(1 for node in subformulas(phi) if node == theta)


def replace_occurrence(phi: Formula, theta: Formula, k: int,
                       psi: Formula) -> Formula:
    """Replace the k-th occurrence (preorder, 1-based) of theta in phi."""
    if k < 1:
        raise ValueError("occurrence index is 1-based")
    counter = [0]

    def walk(node: Formula) -> Optional[Formula]:
        # returns the rewritten node, or None when the target is not below
        if node == theta:
            counter[0] += 1
            if counter[0] == k:
                return psi
            return None
        if isinstance(node, (And, TensorOr, GlobalOr)):
            left = walk(node.left)
            if left is not None:
                return type(node)(left, node.right)
            right = walk(node.right)
            if right is not None:
                return type(node)(node.left, right)
            return None
        if isinstance(node, Neg):
            body = walk(node.body)
            return None if body is None else Neg(body)
        if isinstance(node, Cf):
            body = walk(node.body)
            return None if body is None else Cf(node.antecedent, body)
        return None

    result = walk(phi)
    if result is None:
        raise ParseError(
            f"formula has only {counter[0]} occurrence(s) of the target")
    return result


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

_LEVEL_COND, _LEVEL_GOR, _LEVEL_TOR, _LEVEL_AND, _LEVEL_ATOM = 0, 1, 2, 3, 4


def _level(phi: Formula) -> int:
    if isinstance(phi, Cf):
        return _LEVEL_COND
    if isinstance(phi, GlobalOr):
        return _LEVEL_GOR
    if isinstance(phi, TensorOr):
        return _LEVEL_TOR
    if isinstance(phi, And):
        return _LEVEL_AND
    return _LEVEL_ATOM


def format_formula(phi: Formula) -> str:
    """Canonical concrete syntax; parse(format_formula(phi)) == phi."""
    return "".join(_fmt(phi, _LEVEL_COND))


def _fmt(phi: Formula, min_level: int) -> list[str]:
    # iterative on left spines of the binary chains to keep recursion shallow
    out: list[str] = []
    if isinstance(phi, Eq):
        out.append(f"{phi.var}={phi.value}")
        return out
    if isinstance(phi, Dep):
        if not phi.args:
            out.append(f"con({phi.target})")
        else:
            out.append(f"dep({','.join(phi.args)}; {phi.target})")
        return out
    if isinstance(phi, Neg):
        body = phi.body
        if isinstance(body, (Eq, Dep, Neg)):
            out.append("!")
            out.extend(_fmt(body, _LEVEL_ATOM))
        else:
            out.append("!(")
            out.extend(_fmt(body, _LEVEL_COND))
            out.append(")")
        return out
    if isinstance(phi, Cf):
        ante = " & ".join(f"{v}={t}" for v, t in phi.antecedent)
        parts = [f"({ante}) []-> "] + _fmt(phi.body, _LEVEL_COND)
        if min_level > _LEVEL_COND:
            return ["("] + parts + [")"]
        return parts
    ops = {And: " /\\ ", TensorOr: " \\/ ", GlobalOr: " \\\\/ "}
    op = ops[type(phi)]
    level = _level(phi)
    chain = []
    node: Formula = phi
    while type(node) is type(phi):
        chain.append(node.right)
        node = node.left
    chain.append(node)
    chain.reverse()
    parts = _fmt(chain[0], level)
    for item in chain[1:]:
        parts.append(op)
        parts.extend(_fmt(item, level + 1))
    if min_level > level:
        return ["("] + parts + [")"]
    return parts


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_SYMBOLS = ("[]->", "\\\\/", "=>", "/\\", "\\/", "(", ")", "=", "!", "&",
            ";", ",")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*|[0-9]+")


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(("sym", sym))
                i += len(sym)
                break
        else:
            m = _IDENT.match(text, i)
            if not m:
                raise ParseError(f"lexical error at {text[i:i + 10]!r}")
            tokens.append(("ident", m.group()))
            i = m.end()
    return tokens


class _AntecedentList:
    """Placeholder for `(X=x & Y=y)` or `()`; only legal before `[]->`."""

    def __init__(self, pairs):
        self.pairs = pairs


class _Parser:
    def __init__(self, tokens: list[tuple[str, str]], sig: Signature):
        self.tokens = tokens
        self.pos = 0
        self.sig = sig

    def peek(self) -> Optional[str]:
        if self.pos < len(self.tokens):
            kind, val = self.tokens[self.pos]
            return val if kind == "sym" else kind
        return None

    def at_sym(self, sym: str) -> bool:
        return (self.pos < len(self.tokens)
                and self.tokens[self.pos] == ("sym", sym))

    def eat_sym(self, sym: str) -> None:
        if not self.at_sym(sym):
            raise ParseError(f"expected {sym!r} at token {self.pos}")
        self.pos += 1

    def eat_ident(self) -> str:
        if self.pos >= len(self.tokens) or self.tokens[self.pos][0] != "ident":
            raise ParseError(f"expected a name at token {self.pos}")
        val = self.tokens[self.pos][1]
        self.pos += 1
        return val

    def parse(self) -> Formula:
        phi = self.cond()
        if self.pos != len(self.tokens):
            raise ParseError(f"trailing input at token {self.pos}")
        if isinstance(phi, _AntecedentList):
            raise ParseError("antecedent list without []->")
        return phi

    def cond(self):
        lhs = self.gor()
        if self.at_sym("[]->"):
            self.pos += 1
            body = self.cond()
            if isinstance(body, _AntecedentList):
                raise ParseError("antecedent list without []->")
            return Cf(self._as_antecedent(lhs), body)
        if self.at_sym("=>"):
            self.pos += 1
            body = self.cond()
            if isinstance(body, _AntecedentList):
                raise ParseError("antecedent list without []->")
            if isinstance(lhs, _AntecedentList):
                lhs = self._as_formula(lhs)
            return desugar_selective(lhs, body)
        return lhs

    def _as_antecedent(self, lhs) -> tuple[tuple[str, str], ...]:
        if isinstance(lhs, _AntecedentList):
            return lhs.pairs
        pairs = []
        node = lhs
        chain = []
        while isinstance(node, And):
            chain.append(node.right)
            node = node.left
        chain.append(node)
        for part in reversed(chain):
            if not isinstance(part, Eq):
                raise ParseError(
                    "a counterfactual antecedent must be a conjunction "
                    "of equalities")
            pairs.append((part.var, part.value))
        return tuple(pairs)

    def _as_formula(self, lst: _AntecedentList) -> Formula:
        if not lst.pairs:
            raise ParseError("empty antecedent is only legal before []->")
        return conj_of_equalities(lst.pairs)

    def _binary(self, sub, sym: str, node_cls):
        lhs = sub()
        while self.at_sym(sym):
            self.pos += 1
            if isinstance(lhs, _AntecedentList):
                lhs = self._as_formula(lhs)
            rhs = sub()
            if isinstance(rhs, _AntecedentList):
                rhs = self._as_formula(rhs)
            lhs = node_cls(lhs, rhs)
        return lhs

    def gor(self):
        return self._binary(self.tor, "\\\\/", GlobalOr)

    def tor(self):
        return self._binary(self.conj, "\\/", TensorOr)

    def conj(self):
        return self._binary(self.neg, "/\\", And)

    def neg(self):
        if self.at_sym("!"):
            self.pos += 1
            body = self.neg()
            if isinstance(body, _AntecedentList):
                body = self._as_formula(body)
            try:
                return Neg(body)
            except ParseError:
                raise ParseError("negation is restricted to CO formulas")
        return self.atom()

    def atom(self):
        if self.at_sym("("):
            self.pos += 1
            if self.at_sym(")"):
                self.pos += 1
                return _AntecedentList(())
            inner = self.cond()
            if self.at_sym("&"):
                pairs = [self._require_eq(inner)]
                while self.at_sym("&"):
                    self.pos += 1
                    pairs.append(self._require_eq(self.cond()))
                self.eat_sym(")")
                return _AntecedentList(tuple(pairs))
            self.eat_sym(")")
            return inner
        name = self.eat_ident()
        if name == "dep" and self.at_sym("("):
            self.pos += 1
            args = []
            if not self.at_sym(";"):
                args.append(self._variable())
                while self.at_sym(","):
                    self.pos += 1
                    args.append(self._variable())
            self.eat_sym(";")
            target = self._variable()
            self.eat_sym(")")
            return Dep(tuple(args), target)
        if name == "con" and self.at_sym("("):
            self.pos += 1
            target = self._variable()
            self.eat_sym(")")
            return Dep((), target)
        return self._equality(name)

    def _require_eq(self, phi) -> tuple[str, str]:
        if isinstance(phi, Eq):
            return (phi.var, phi.value)
        raise ParseError("only equalities are allowed in an antecedent list")

    def _variable(self) -> str:
        name = self.eat_ident()
        if not self.sig.has_variable(name):
            raise ParseError(f"unknown variable {name!r}")
        return name

    def _equality(self, name: str) -> Eq:
        if not self.sig.has_variable(name):
            raise ParseError(f"unknown variable {name!r}")
        self.eat_sym("=")
        value = self.eat_ident()
        if value not in self.sig.range_of(name):
            raise ParseError(f"value {value!r} not in range of {name}")
        return Eq(name, value)


def parse(text: str, sig: Signature) -> Formula:
    """Parse a formula over the given signature."""
    phi = _Parser(_tokenize(text), sig).parse()
    validate_formula(phi, sig)
    return phi


def read_formula_lines(text: str, sig: Signature) -> list[Formula]:
    """One formula per line; blank lines and `#` comments are skipped."""
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse(line, sig))
    return out
