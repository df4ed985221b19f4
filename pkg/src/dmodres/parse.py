"""Parser for the operator input language.

Grammar (EBNF)::

    items   = item { ";" item } ;
    item    = vector | expr ;
    vector  = "[" expr { "," expr } "]" ;
    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = ("+" | "-") unary | power ;
    power   = atom [ "^" INTEGER ] ;
    atom    = NUMBER | NAME | "(" expr ")" ;

NAME is one of x1..xn, t (or t1..tp), dx1..dxn, dt (or dt1..dtp), h, and s
when a univariate polynomial in s is parsed.  Division is only allowed by a
nonzero constant.  Products are noncommutative and are normal-ordered on
elaboration.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .weyl import Operator, Signature

MAX_EXPONENT = 1000


class ParseError(ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset


@dataclass(frozen=True)
class Num:
    value: Fraction
    offset: int = 0


@dataclass(frozen=True)
class Var:
    name: str
    offset: int = 0


@dataclass(frozen=True)
class Neg:
    arg: object
    offset: int = 0


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    offset: int = 0


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int
    offset: int = 0


@dataclass(frozen=True)
class Vector:
    items: tuple
    offset: int = 0


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()\[\],;]))")


def tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            off = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[off]!r}", off)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, off = self.peek()
        if val != value or kind != "op":
            what = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {value!r}, found {what}", off)
        return self.take()

    def items(self):
        out = [self.item()]
        while self.peek()[1] == ";" and self.peek()[0] == "op":
            self.take()
            out.append(self.item())
        self.finish()
        return out

    def finish(self):
        kind, val, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r}", off)

    def item(self):
        if self.peek()[1] == "[":
            off = self.take()[2]
            items = [self.expr()]
            while self.peek()[1] == ",":
                self.take()
                items.append(self.expr())
            self.expect("]")
            return Vector(tuple(items), off)
        return self.expr()

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            _, op, off = self.take()
            node = BinOp(op, node, self.term(), off)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            _, op, off = self.take()
            node = BinOp(op, node, self.unary(), off)
        return node

    def unary(self):
        kind, val, off = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            arg = self.unary()
            return Neg(arg, off) if val == "-" else arg
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            kind, val, off = self.peek()
            if kind != "num":
                what = "end of input" if kind == "end" else repr(val)
                raise ParseError(f"exponent must be a nonnegative integer, found {what}", off)
            self.take()
            e = int(val)
            if e > MAX_EXPONENT:
                raise ParseError(f"exponent {e} exceeds {MAX_EXPONENT}", off)
            return Pow(base, e, off)
        return base

    def atom(self):
        kind, val, off = self.peek()
        if kind == "num":
            self.take()
            return Num(Fraction(int(val)), off)
        if kind == "name":
            self.take()
            return Var(val, off)
        if kind == "op" and val == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"expected a number, variable or '(', found {what}", off)


def parse(text: str):
    """Parse a single expression or vector into an AST."""
    p = _Parser(text)
    node = p.item()
    p.finish()
    return node


def parse_items(text: str):
    return _Parser(text).items()


class ElaborationError(ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


def elaborate(node, sig: Signature):
    """Evaluate an AST to an Operator (or a list of Operators for a vector)."""
    if isinstance(node, Vector):
        return [elaborate(i, sig) for i in node.items]
    if isinstance(node, Num):
        return Operator.const(sig, node.value)
    if isinstance(node, Var):
        try:
            return Operator.gen(sig, node.name)
        except KeyError:
            raise ElaborationError(f"unknown variable {node.name!r}", node.offset) from None
    if isinstance(node, Neg):
        return -elaborate(node.arg, sig)
    if isinstance(node, Pow):
        return elaborate(node.base, sig) ** node.exp
    if isinstance(node, BinOp):
        a = elaborate(node.left, sig)
        b = elaborate(node.right, sig)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        c = b.terms.get(sig.one()) if len(b.terms) == 1 else None
        if c is None:
            raise ElaborationError("division by a non-constant", node.offset)
        return a / c
    raise TypeError(f"not an AST node: {node!r}")


def parse_operator(text: str, sig: Signature) -> Operator:
    node = parse(text)
    if isinstance(node, Vector):
        raise ParseError("expected an expression, found a vector", node.offset)
    return elaborate(node, sig)


def parse_vectors(text: str, sig: Signature) -> list:
    """Semicolon-separated expressions/vectors -> list of coordinate lists."""
    out = []
    for node in parse_items(text):
        v = elaborate(node, sig)
        out.append(v if isinstance(v, list) else [v])
    return out


def _rename(node, old: str, new: str):
    if isinstance(node, Var):
        if node.name != old:
            raise ParseError(f"only the variable {old} is allowed, found {node.name!r}", node.offset)
        return Var(new, node.offset)
    if isinstance(node, Neg):
        return Neg(_rename(node.arg, old, new), node.offset)
    if isinstance(node, Pow):
        return Pow(_rename(node.base, old, new), node.exp, node.offset)
    if isinstance(node, BinOp):
        return BinOp(node.op, _rename(node.left, old, new), _rename(node.right, old, new), node.offset)
    if isinstance(node, Vector):
        raise ParseError("expected an expression, found a vector", node.offset)
    return node


def parse_univariate(text: str, var: str = "s") -> dict:
    """Polynomial in one variable -> {degree: Fraction}."""
    sig = Signature(0, 1, homogenized=False, commutative=True)
    op = elaborate(_rename(parse(text), var, "t"), sig)
    return {m[0]: c for m, c in op.terms.items()}


def parse_rationals(text: str) -> list:
    try:
        return [Fraction(v.strip()) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ParseError(f"bad rational list {text!r}", 0) from exc
