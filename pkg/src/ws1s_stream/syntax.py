"""Surface syntax and abstract syntax trees for WS1S formulas.

The concrete grammar is a small MONA-flavoured keyword language::

    formula := quantified | iff
    quantified := ("ex1" | "ex2" | "all1" | "all2") ident ":" formula
    iff     := implies ("<->" implies)*          (sugar, desugared here)
    implies := or ("->" implies)?                (right associative)
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "~" unary | quantified | atom
    atom    := ident "in" ident | ident "sub" ident | ident "<" ident
             | ident "=" ident ("+" "1")? | "(" formula ")"

First-order versus second-order is decided by the binder (``ex1`` vs
``ex2``) and, for free variables, by spelling: a lowercase first letter
means first-order, an uppercase one second-order.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .errors import KindError, ParseError, UnboundVariableError


class Kind(enum.Enum):
    FIRST_ORDER = 1
    SECOND_ORDER = 2

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class VarId:
    name: str
    kind: Kind

    _NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

    def __post_init__(self):
        if not self._NAME_RE.match(self.name):
            raise ValueError(f"invalid variable name {self.name!r}")


def var_from_name(name: str) -> VarId:
    """Free-variable kind convention: lowercase initial = first-order."""
    kind = Kind.FIRST_ORDER if name[0].islower() else Kind.SECOND_ORDER
    return VarId(name, kind)


# --- AST nodes -------------------------------------------------------------

@dataclass(frozen=True)
class In:
    x: VarId
    y: VarId


@dataclass(frozen=True)
class Less:
    x: VarId
    y: VarId


@dataclass(frozen=True)
class Succ:
    """x = y + 1."""

    x: VarId
    y: VarId


@dataclass(frozen=True)
class EqFo:
    x: VarId
    y: VarId


@dataclass(frozen=True)
class Sub:
    y: VarId
    z: VarId


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: VarId
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: VarId
    body: "Formula"


Formula = In | Less | Succ | EqFo | Sub | Not | And | Or | Implies | Exists | Forall

ATOM_TYPES = (In, Less, Succ, EqFo, Sub)


def _check_atom_kinds(node, line=0, col=0):
    def need(v: VarId, kind: Kind, role: str):
        if v.kind is not kind:
            wanted = "first-order" if kind is Kind.FIRST_ORDER else "second-order"
            where = f"{line}:{col}: " if line else ""
            raise KindError(f"{where}{v.name} must be {wanted} in {role}")

    if isinstance(node, In):
        need(node.x, Kind.FIRST_ORDER, "'in' left position")
        need(node.y, Kind.SECOND_ORDER, "'in' right position")
    elif isinstance(node, Sub):
        need(node.y, Kind.SECOND_ORDER, "'sub' left position")
        need(node.z, Kind.SECOND_ORDER, "'sub' right position")
    else:
        need(node.x, Kind.FIRST_ORDER, type(node).__name__)
        need(node.y, Kind.FIRST_ORDER, type(node).__name__)


def validate_kinds(f: Formula) -> None:
    """Check kind-correctness of every atom in an AST built by hand."""
    if isinstance(f, ATOM_TYPES):
        _check_atom_kinds(f)
    elif isinstance(f, Not):
        validate_kinds(f.body)
    elif isinstance(f, (And, Or, Implies)):
        validate_kinds(f.left)
        validate_kinds(f.right)
    elif isinstance(f, (Exists, Forall)):
        validate_kinds(f.body)
    else:
        raise TypeError(f"not a formula node: {f!r}")


# --- tokenizer -------------------------------------------------------------

_KEYWORDS = {"ex1", "ex2", "all1", "all2", "in", "sub"}

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
      | (?P<num>[0-9]+)
      | (?P<iff><->)
      | (?P<arrow>->)
      | (?P<op>[()&|~<=+:])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    type: str  # ident | num | kw | one of the literal operators | eof
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(line, col, "a token", text[pos])
        lexeme = m.group(0)
        if m.lastgroup == "ws":
            for ch in lexeme:
                if ch == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
        else:
            if m.lastgroup == "ident":
                ttype = "kw" if lexeme in _KEYWORDS else "ident"
            elif m.lastgroup == "num":
                ttype = "num"
            elif m.lastgroup == "iff":
                ttype = "<->"
            elif m.lastgroup == "arrow":
                ttype = "->"
            else:
                ttype = lexeme
            tokens.append(_Token(ttype, lexeme, line, col))
            col += len(lexeme)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


# --- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, allow_free: bool):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.allow_free = allow_free
        self.scope: dict[str, VarId] = {}   # binder-introduced, innermost wins
        self.free_seen: dict[str, VarId] = {}
        self.binder_names: set[str] = set()

    _TOKEN_DESC = {"ident": "a variable name", "num": "a number", "kw": "a keyword"}

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self, ttype: str) -> _Token:
        tok = self.peek()
        if tok.type != ttype:
            raise ParseError(tok.line, tok.col,
                             self._TOKEN_DESC.get(ttype, f"'{ttype}'"),
                             tok.text or None)
        self.pos += 1
        return tok

    def parse(self) -> Formula:
        f = self.formula()
        tok = self.peek()
        if tok.type != "eof":
            raise ParseError(tok.line, tok.col, "end of input", tok.text)
        return f

    def formula(self) -> Formula:
        left = self.implies()
        while self.peek().type == "<->":
            self.take("<->")
            right = self.implies()
            left = And(Implies(left, right), Implies(right, left))
        return left

    def implies(self) -> Formula:
        left = self.or_()
        if self.peek().type == "->":
            self.take("->")
            return Implies(left, self.implies())
        return left

    def or_(self) -> Formula:
        left = self.and_()
        while self.peek().type == "|":
            self.take("|")
            left = Or(left, self.and_())
        return left

    def and_(self) -> Formula:
        left = self.unary()
        while self.peek().type == "&":
            self.take("&")
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.type == "~":
            self.take("~")
            return Not(self.unary())
        if tok.type == "kw" and tok.text in ("ex1", "ex2", "all1", "all2"):
            return self.quantified()
        return self.atom()

    def quantified(self) -> Formula:
        kw = self.take("kw")
        name_tok = self.take("ident")
        name = name_tok.text
        if name in self.scope or name in self.free_seen or name in self.binder_names:
            raise ParseError(name_tok.line, name_tok.col,
                             "a fresh variable name (shadowing is not allowed)", name)
        kind = Kind.FIRST_ORDER if kw.text.endswith("1") else Kind.SECOND_ORDER
        var = VarId(name, kind)
        self.take(":")
        self.scope[name] = var
        self.binder_names.add(name)
        try:
            body = self.formula()
        finally:
            del self.scope[name]
        return Exists(var, body) if kw.text.startswith("ex") else Forall(var, body)

    def variable(self) -> tuple[VarId, _Token]:
        tok = self.take("ident")
        name = tok.text
        if name in self.scope:
            return self.scope[name], tok
        if name in self.binder_names:
            raise ParseError(tok.line, tok.col,
                             f"a variable in scope ({name!r} is bound elsewhere)", name)
        if not self.allow_free:
            raise UnboundVariableError(f"{tok.line}:{tok.col}: free variable {name!r}")
        var = self.free_seen.get(name)
        if var is None:
            var = var_from_name(name)
            self.free_seen[name] = var
        return var, tok

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.type == "(":
            self.take("(")
            f = self.formula()
            self.take(")")
            return f
        if tok.type != "ident":
            raise ParseError(tok.line, tok.col, "a variable or '('", tok.text or None)
        left, left_tok = self.variable()
        op = self.peek()
        if op.type == "kw" and op.text == "in":
            self.take("kw")
            right, _ = self.variable()
            node = In(left, right)
        elif op.type == "kw" and op.text == "sub":
            self.take("kw")
            right, _ = self.variable()
            node = Sub(left, right)
        elif op.type == "<":
            self.take("<")
            right, _ = self.variable()
            node = Less(left, right)
        elif op.type == "=":
            self.take("=")
            right, _ = self.variable()
            if self.peek().type == "+":
                self.take("+")
                one = self.take("num")
                if one.text != "1":
                    raise ParseError(one.line, one.col, "'1'", one.text)
                node = Succ(left, right)
            else:
                node = EqFo(left, right)
        else:
            raise ParseError(op.line, op.col, "'in', 'sub', '<' or '='", op.text or None)
        _check_atom_kinds(node, left_tok.line, left_tok.col)
        return node


def parse(text: str, *, allow_free: bool = True) -> Formula:
    """Parse concrete syntax into an AST; positions in errors are 1-based."""
    return _Parser(text, allow_free).parse()


# --- printing --------------------------------------------------------------

_PREC_QUANT = 0
_PREC_IMPLIES = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_NOT = 4
_PREC_ATOM = 5


def _print(f: Formula, ctx: int) -> str:
    if isinstance(f, In):
        s, p = f"{f.x.name} in {f.y.name}", _PREC_ATOM
    elif isinstance(f, Sub):
        s, p = f"{f.y.name} sub {f.z.name}", _PREC_ATOM
    elif isinstance(f, Less):
        s, p = f"{f.x.name} < {f.y.name}", _PREC_ATOM
    elif isinstance(f, Succ):
        s, p = f"{f.x.name} = {f.y.name} + 1", _PREC_ATOM
    elif isinstance(f, EqFo):
        s, p = f"{f.x.name} = {f.y.name}", _PREC_ATOM
    elif isinstance(f, Not):
        s, p = "~" + _print(f.body, _PREC_NOT), _PREC_NOT
    elif isinstance(f, And):
        s, p = f"{_print(f.left, _PREC_AND)} & {_print(f.right, _PREC_AND + 1)}", _PREC_AND
    elif isinstance(f, Or):
        s, p = f"{_print(f.left, _PREC_OR)} | {_print(f.right, _PREC_OR + 1)}", _PREC_OR
    elif isinstance(f, Implies):
        s, p = f"{_print(f.left, _PREC_IMPLIES + 1)} -> {_print(f.right, _PREC_IMPLIES)}", _PREC_IMPLIES
    elif isinstance(f, (Exists, Forall)):
        kw = ("ex" if isinstance(f, Exists) else "all") + \
            ("1" if f.var.kind is Kind.FIRST_ORDER else "2")
        s, p = f"{kw} {f.var.name}: {_print(f.body, _PREC_QUANT)}", _PREC_QUANT
    else:
        raise TypeError(f"not a formula node: {f!r}")
    return f"({s})" if p < ctx else s


def print_formula(f: Formula) -> str:
    """Render an AST back to concrete syntax with minimal parentheses."""
    return _print(f, _PREC_QUANT)


# --- normalization ---------------------------------------------------------

def normalize(f: Formula) -> Formula:
    """Rewrite to the {atom, Not, And, Exists} core, preserving semantics."""
    if isinstance(f, ATOM_TYPES):
        return f
    if isinstance(f, Not):
        return Not(normalize(f.body))
    if isinstance(f, And):
        return And(normalize(f.left), normalize(f.right))
    if isinstance(f, Or):
        return Not(And(Not(normalize(f.left)), Not(normalize(f.right))))
    if isinstance(f, Implies):
        return Not(And(normalize(f.left), Not(normalize(f.right))))
    if isinstance(f, Exists):
        return Exists(f.var, normalize(f.body))
    if isinstance(f, Forall):
        return Not(Exists(f.var, Not(normalize(f.body))))
    raise TypeError(f"not a formula node: {f!r}")


# --- variable metadata -----------------------------------------------------

def free_vars(f: Formula) -> list[VarId]:
    """Free variables in first-occurrence order of a preorder traversal."""
    seen: list[VarId] = []
    bound: list[str] = []

    def visit(node: Formula):
        if isinstance(node, ATOM_TYPES):
            pair = (node.x, node.y) if not isinstance(node, Sub) else (node.y, node.z)
            for v in pair:
                if v.name not in bound and v not in seen:
                    seen.append(v)
        elif isinstance(node, Not):
            visit(node.body)
        elif isinstance(node, (And, Or, Implies)):
            visit(node.left)
            visit(node.right)
        elif isinstance(node, (Exists, Forall)):
            bound.append(node.var.name)
            visit(node.body)
            bound.pop()
        else:
            raise TypeError(f"not a formula node: {node!r}")

    visit(f)
    return seen


def quantifier_count(f: Formula, kind: Kind | None = None) -> int:
    if isinstance(f, ATOM_TYPES):
        return 0
    if isinstance(f, Not):
        return quantifier_count(f.body, kind)
    if isinstance(f, (And, Or, Implies)):
        return quantifier_count(f.left, kind) + quantifier_count(f.right, kind)
    if isinstance(f, (Exists, Forall)):
        here = 1 if kind is None or f.var.kind is kind else 0
        return here + quantifier_count(f.body, kind)
    raise TypeError(f"not a formula node: {f!r}")
