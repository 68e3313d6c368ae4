"""Tiny expression language for user-supplied functions of ``x``.

Grammar (standard precedence, ``^`` right-associative)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | "x" | NAME "(" expr ")" | "(" expr ")"

Supported calls: exp, log, sin, cos, sqrt, abs.  Parsing compiles straight to
a tree of numpy closures.
"""

import re

import numpy as np

from .errors import ExpressionSyntaxError, UnknownIdentifier
from .funcs import numeric_spec

_CALLS = {
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
    "sqrt": np.sqrt,
    "abs": np.abs,
}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


def _tokenize(src):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {src[pos]!r}", _byte(src, pos))
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


def _byte(src, pos):
    return len(src[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, src):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def fail(self, what):
        kind, text, pos = self.tok
        found = "end of input" if kind == "end" else repr(text)
        raise ExpressionSyntaxError(f"expected {what}, found {found}", _byte(self.src, pos))

    def take(self, text):
        if self.tok[1] == text and self.tok[0] == "op":
            self.i += 1
            return True
        return False

    def parse(self):
        node = self.expr()
        if self.tok[0] != "end":
            self.fail("operator or end of input")
        return node

    def expr(self):
        node = self.term()
        while True:
            if self.take("+"):
                node = _binary(np.add, node, self.term())
            elif self.take("-"):
                node = _binary(np.subtract, node, self.term())
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            if self.take("*"):
                node = _binary(np.multiply, node, self.unary())
            elif self.take("/"):
                node = _binary(np.divide, node, self.unary())
            else:
                return node

    def unary(self):
        if self.take("-"):
            inner = self.unary()
            return lambda x: -inner(x)
        return self.power()

    def power(self):
        base = self.atom()
        if self.take("^"):
            return _binary(np.power, base, self.unary())
        return base

    def atom(self):
        kind, text, pos = self.tok
        if kind == "num":
            self.i += 1
            value = float(text)
            return lambda x: np.full_like(x, value, dtype=float)
        if kind == "name":
            self.i += 1
            if text == "x":
                return lambda x: x
            if text not in _CALLS:
                raise UnknownIdentifier(f"unknown identifier {text!r}", _byte(self.src, pos))
            if not self.take("("):
                self.fail("'(' after function name")
            arg = self.expr()
            if not self.take(")"):
                self.fail("')'")
            fn = _CALLS[text]
            return lambda x: fn(arg(x))
        if self.take("("):
            node = self.expr()
            if not self.take(")"):
                self.fail("')'")
            return node
        self.fail("number, 'x', function call or '('")


def _binary(op, lhs, rhs):
    return lambda x: op(lhs(x), rhs(x))


def compile_expression(src):
    """Compile ``src`` to a vectorised callable of ``x``."""
    tree = _Parser(src).parse()

    def f(x):
        arr = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = tree(arr)
        return out if np.ndim(out) else float(out)

    return f


def parse_expression(src):
    """Parse ``src`` into a FunctionSpec whose f'' is numeric."""
    return numeric_spec(f"expr:{src}", compile_expression(src))
