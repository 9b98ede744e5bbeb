"""First-order formulas over the language of dynamical Boolean algebras.

Terms are built from 0, 1 and variables by meet, join, complement and powers
of the distinguished automorphism alpha.  Atomic formulas are equality and
the lattice order.  Concrete syntax is s-expressions:

    term    := 0 | 1 | x | (meet t t) | (join t t) | (comp t)
             | (a t) | (ainv t) | (apow k t)
    formula := (= t t) | (le t t) | (not f) | (and f ...) | (or f ...)
             | (implies f f) | (exists x f) | (forall x f)

``(a t)`` and ``(ainv t)`` abbreviate ``(apow 1 t)`` and ``(apow -1 t)``.
``and`` / ``or`` take any number of arguments; the empty conjunction is true
and the empty disjunction false.  ``parse_formula`` and ``to_sexpr`` are
mutually inverse on the canonical printed form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Tuple, Union

from ..core import FinquoError


class ParseError(FinquoError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


# --- terms -----------------------------------------------------------------


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Meet:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Join:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Comp:
    arg: "Term"


@dataclass(frozen=True)
class Alpha:
    power: int
    arg: "Term"


Term = Union[Zero, One, Var, Meet, Join, Comp, Alpha]


# --- formulas --------------------------------------------------------------


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Le:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: Tuple["Formula", ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Or:
    args: Tuple["Formula", ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Eq, Le, Not, And, Or, Implies, Exists, Forall]

RESERVED = {
    "meet", "join", "comp", "a", "ainv", "apow",
    "=", "le", "not", "and", "or", "implies", "exists", "forall",
    "0", "1",
}


# --- printing --------------------------------------------------------------


def to_sexpr(node: Union[Term, Formula]) -> str:
    if isinstance(node, Zero):
        return "0"
    if isinstance(node, One):
        return "1"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Meet):
        return f"(meet {to_sexpr(node.left)} {to_sexpr(node.right)})"
    if isinstance(node, Join):
        return f"(join {to_sexpr(node.left)} {to_sexpr(node.right)})"
    if isinstance(node, Comp):
        return f"(comp {to_sexpr(node.arg)})"
    if isinstance(node, Alpha):
        if node.power == 1:
            return f"(a {to_sexpr(node.arg)})"
        if node.power == -1:
            return f"(ainv {to_sexpr(node.arg)})"
        return f"(apow {node.power} {to_sexpr(node.arg)})"
    if isinstance(node, Eq):
        return f"(= {to_sexpr(node.left)} {to_sexpr(node.right)})"
    if isinstance(node, Le):
        return f"(le {to_sexpr(node.left)} {to_sexpr(node.right)})"
    if isinstance(node, Not):
        return f"(not {to_sexpr(node.arg)})"
    if isinstance(node, And):
        inner = " ".join(to_sexpr(f) for f in node.args)
        return f"(and {inner})" if inner else "(and)"
    if isinstance(node, Or):
        inner = " ".join(to_sexpr(f) for f in node.args)
        return f"(or {inner})" if inner else "(or)"
    if isinstance(node, Implies):
        return f"(implies {to_sexpr(node.left)} {to_sexpr(node.right)})"
    if isinstance(node, Exists):
        return f"(exists {node.var} {to_sexpr(node.body)})"
    if isinstance(node, Forall):
        return f"(forall {node.var} {to_sexpr(node.body)})"
    raise TypeError(f"not an AST node: {node!r}")


# --- parsing ---------------------------------------------------------------

_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")


def _tokenize(text: str) -> list[tuple[str, int, int]]:
    out = []
    for match in _TOKEN_RE.finditer(text):
        start = match.start()
        line = text.count("\n", 0, start) + 1
        col = start - text.rfind("\n", 0, start)
        out.append((match.group(), line, col))
    return out


class _TokenStream:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.end_line = text.count("\n") + 1
        self.end_col = len(text) - text.rfind("\n")

    def peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return None

    def next(self, what: str):
        tok = self.peek()
        if tok is None:
            raise ParseError(f"unexpected end of input, expected {what}",
                             self.end_line, self.end_col)
        self.pos += 1
        return tok


def _is_var_name(tok: str) -> bool:
    return tok not in RESERVED and re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok) is not None


def _parse_term(ts: _TokenStream) -> Term:
    tok, line, col = ts.next("a term")
    if tok == "0":
        return Zero()
    if tok == "1":
        return One()
    if tok != "(":
        if _is_var_name(tok):
            return Var(tok)
        raise ParseError(f"expected a term, got {tok!r}", line, col)
    head, hline, hcol = ts.next("a term operator")
    if head == "meet" or head == "join":
        left = _parse_term(ts)
        right = _parse_term(ts)
        _expect_close(ts, head)
        return Meet(left, right) if head == "meet" else Join(left, right)
    if head == "comp":
        arg = _parse_term(ts)
        _expect_close(ts, head)
        return Comp(arg)
    if head == "a" or head == "ainv":
        arg = _parse_term(ts)
        _expect_close(ts, head)
        return Alpha(1 if head == "a" else -1, arg)
    if head == "apow":
        ktok, kline, kcol = ts.next("an integer power")
        try:
            k = int(ktok)
        except ValueError:
            raise ParseError(f"expected an integer power, got {ktok!r}", kline, kcol)
        arg = _parse_term(ts)
        _expect_close(ts, head)
        return Alpha(k, arg)
    raise ParseError(f"unknown term operator {head!r}", hline, hcol)


def _expect_close(ts: _TokenStream, head: str) -> None:
    tok, line, col = ts.next(f"')' closing ({head} ...)")
    if tok != ")":
        raise ParseError(f"expected ')' closing ({head} ...), got {tok!r}", line, col)


def _parse_formula(ts: _TokenStream, bound: frozenset) -> Formula:
    tok, line, col = ts.next("a formula")
    if tok != "(":
        raise ParseError(f"expected a formula, got {tok!r}", line, col)
    head, hline, hcol = ts.next("a formula operator")
    if head == "=" or head == "le":
        left = _parse_term(ts)
        right = _parse_term(ts)
        _expect_close(ts, head)
        node: Formula = Eq(left, right) if head == "=" else Le(left, right)
        _check_bound_terms((left, right), bound, hline, hcol)
        return node
    if head == "not":
        arg = _parse_formula(ts, bound)
        _expect_close(ts, head)
        return Not(arg)
    if head == "and" or head == "or":
        args = []
        while True:
            tok2 = ts.peek()
            if tok2 is None:
                raise ParseError(f"unterminated ({head} ...)", hline, hcol)
            if tok2[0] == ")":
                ts.next(")")
                break
            args.append(_parse_formula(ts, bound))
        return And(tuple(args)) if head == "and" else Or(tuple(args))
    if head == "implies":
        left = _parse_formula(ts, bound)
        right = _parse_formula(ts, bound)
        _expect_close(ts, head)
        return Implies(left, right)
    if head == "exists" or head == "forall":
        vtok, vline, vcol = ts.next("a variable name")
        if not _is_var_name(vtok):
            raise ParseError(f"expected a variable name, got {vtok!r}", vline, vcol)
        body = _parse_formula(ts, bound | {vtok})
        _expect_close(ts, head)
        return Exists(vtok, body) if head == "exists" else Forall(vtok, body)
    raise ParseError(f"unknown formula operator {head!r}", hline, hcol)


def _check_bound_terms(terms, bound: frozenset, line: int, col: int) -> None:
    for t in terms:
        for name in term_vars(t):
            if name not in bound:
                raise ParseError(f"unbound variable {name!r}", line, col)


def parse_formula(text: str, allow_free: bool = False) -> Formula:
    """Parse a formula; by default every variable must be quantifier-bound."""
    ts = _TokenStream(text)
    bound: frozenset = frozenset(_var_tokens(text)) if allow_free else frozenset()
    node = _parse_formula(ts, bound)
    extra = ts.peek()
    if extra is not None:
        raise ParseError(f"trailing input {extra[0]!r}", extra[1], extra[2])
    return node


def _var_tokens(text: str) -> set:
    # Pre-scan for atoms that look like variables; used only by allow_free.
    return {tok for tok, _, _ in _tokenize(text) if _is_var_name(tok)}


def free_var_names(text: str) -> set:
    """Variables occurring free in the formula, binder-aware."""

    def walk(f: Formula, bound: frozenset) -> set:
        if isinstance(f, (Eq, Le)):
            return (term_vars(f.left) | term_vars(f.right)) - bound
        if isinstance(f, Not):
            return walk(f.arg, bound)
        if isinstance(f, (And, Or)):
            out: set = set()
            for g in f.args:
                out |= walk(g, bound)
            return out
        if isinstance(f, Implies):
            return walk(f.left, bound) | walk(f.right, bound)
        return walk(f.body, bound | {f.var})

    return walk(parse_formula(text, allow_free=True), frozenset())


def parse_term(text: str) -> Term:
    ts = _TokenStream(text)
    node = _parse_term(ts)
    extra = ts.peek()
    if extra is not None:
        raise ParseError(f"trailing input {extra[0]!r}", extra[1], extra[2])
    return node


# --- structural measures ---------------------------------------------------


def term_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, (Meet, Join)):
        return term_vars(t.left) | term_vars(t.right)
    if isinstance(t, (Comp, Alpha)):
        return term_vars(t.arg)
    return set()


def quantifier_rank(f: Formula) -> int:
    if isinstance(f, (Eq, Le)):
        return 0
    if isinstance(f, Not):
        return quantifier_rank(f.arg)
    if isinstance(f, (And, Or)):
        return max((quantifier_rank(g) for g in f.args), default=0)
    if isinstance(f, Implies):
        return max(quantifier_rank(f.left), quantifier_rank(f.right))
    if isinstance(f, (Exists, Forall)):
        return 1 + quantifier_rank(f.body)
    raise TypeError(f"not a formula: {f!r}")


def term_depth(t: Term) -> int:
    """Operator depth, counting each alpha step once: apow k adds |k|."""
    if isinstance(t, (Zero, One, Var)):
        return 0
    if isinstance(t, (Meet, Join)):
        return 1 + max(term_depth(t.left), term_depth(t.right))
    if isinstance(t, Comp):
        return 1 + term_depth(t.arg)
    if isinstance(t, Alpha):
        return max(abs(t.power), 1) + term_depth(t.arg)
    raise TypeError(f"not a term: {t!r}")


def atomic_term_depth(f: Formula) -> int:
    """Largest term depth occurring in an atomic subformula."""
    if isinstance(f, (Eq, Le)):
        return max(term_depth(f.left), term_depth(f.right))
    if isinstance(f, Not):
        return atomic_term_depth(f.arg)
    if isinstance(f, (And, Or)):
        return max((atomic_term_depth(g) for g in f.args), default=0)
    if isinstance(f, Implies):
        return max(atomic_term_depth(f.left), atomic_term_depth(f.right))
    if isinstance(f, (Exists, Forall)):
        return atomic_term_depth(f.body)
    raise TypeError(f"not a formula: {f!r}")
