"""Concrete syntax: parsing and printing of types and terms.

Grammar::

    Type ::= "o" | Type "->" Type | "(" Type ")"          (arrows associate right)
    Term ::= ident | "\\" ident ":" Type "." Term | Term Term | "(" Term ")"

``λ`` is accepted as a synonym for the backslash.
"""
from __future__ import annotations

import re
from typing import List, Optional, Tuple

from .kernel import (
    App,
    Arrow,
    Const,
    Hole,
    Lam,
    LambdaError,
    O,
    Signature,
    SimpleType,
    Term,
    TermTypeError,
    Var,
    canonical_names,
    normalize,
)


class ParseError(LambdaError, ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<lam>\\|λ)|(?P<punct>[():.])|(?P<ident>#?[A-Za-z0-9_]+))"
)


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        value = m.group(kind)
        if kind == "ident" and not re.match(r"#?[A-Za-z]|#", value):
            raise ParseError(f"bad identifier {value!r}", m.start(kind))
        out.append((kind, value, m.start(kind)))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def take(self, value: Optional[str] = None, kind: Optional[str] = None):
        k, v, pos = self.tok
        if (value is not None and v != value) or (kind is not None and k != kind):
            want = value or kind
            got = v or "end of input"
            raise ParseError(f"expected {want!r}, got {got!r}", pos)
        self.i += 1
        return v

    def expect_end(self):
        if self.tok[0] != "eof":
            raise ParseError(f"unexpected {self.tok[1]!r}", self.tok[2])

    # types
    def type_(self) -> SimpleType:
        left = self.type_atom()
        if self.tok[0] == "arrow":
            self.i += 1
            return Arrow(left, self.type_())
        return left

    def type_atom(self) -> SimpleType:
        k, v, pos = self.tok
        if k == "ident" and v == "o":
            self.i += 1
            return O
        if v == "(" and k == "punct":
            self.i += 1
            ty = self.type_()
            self.take(")")
            return ty
        raise ParseError(f"expected a type, got {v or 'end of input'!r}", pos)

    # terms
    def term(self, env, sig) -> Term:
        if self.tok[0] == "lam":
            return self.lam(env, sig)
        head = self.atom(env, sig)
        while True:
            k, v, pos = self.tok
            if k == "lam":
                arg = self.lam(env, sig)
            elif k == "ident" or (k == "punct" and v == "("):
                arg = self.atom(env, sig)
            else:
                return head
            try:
                head = App(head, arg)
            except TermTypeError as e:
                raise ParseError(f"type error: {e}", pos) from None

    def lam(self, env, sig) -> Term:
        self.i += 1
        name = self.take(kind="ident")
        self.take(":")
        ty = self.type_()
        self.take(".")
        body = self.term({**env, name: ty}, sig)
        return Lam(name, ty, body)

    def atom(self, env, sig) -> Term:
        k, v, pos = self.tok
        if k == "punct" and v == "(":
            self.i += 1
            t = self.term(env, sig)
            self.take(")")
            return t
        if k == "ident":
            self.i += 1
            if v in env:
                return Var(v, env[v])
            if v in sig:
                return Const(v)
            raise ParseError(f"unknown identifier {v!r}", pos)
        raise ParseError(f"expected a term, got {v or 'end of input'!r}", pos)


def parse_type(text: str) -> SimpleType:
    p = _Parser(text)
    ty = p.type_()
    p.expect_end()
    return ty


def parse_raw(text: str, sig: Signature) -> Term:
    """Parse without normalizing."""
    p = _Parser(text)
    t = p.term({}, set(sig))
    p.expect_end()
    return t


def parse_term(text: str, sig: Signature) -> Term:
    """Parse and bring to canonical (beta-normal, eta-long) form."""
    return normalize(parse_raw(text, sig))


def print_type(ty: SimpleType) -> str:
    return str(ty)


def print_term(t: Term, canonical: bool = True) -> str:
    if canonical:
        t = canonical_names(t)
    return _show(t)


def _show(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, Hole):
        return f"[]{t.index}"
    if isinstance(t, Lam):
        return f"\\{t.var}:{t.var_type}. {_show(t.body)}"
    fun = _show(t.fun)
    if isinstance(t.fun, Lam):
        fun = f"({fun})"
    arg = _show(t.arg)
    if isinstance(t.arg, (App, Lam)):
        arg = f"({arg})"
    return f"{fun} {arg}"
