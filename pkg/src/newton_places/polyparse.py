"""Parser for polynomial expressions in ``t``.

Grammar::

    expr  := term (("+" | "-") term)*
    term  := unary (("*" | "/") unary)*
    unary := ("+" | "-") unary | power
    power := atom ("^" INTEGER)?
    atom  := INTEGER | "t" | "(" expr ")"

Division is only allowed by nonzero constants, so ``1/2`` and ``(t+1)/3``
are fine and ``1/t`` is not.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .exact_algebra import RationalPoly


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, offset: int, text: str):
        super().__init__(f"{message} at offset {offset}: {text!r}")
        self.offset = offset
        self.text = text


_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+[eE]\d+)|(\d+)|(t)|([-+*/^()]))")


@dataclass
class _Tok:
    kind: str
    value: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolynomialSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastindex)
        if m.group(1):
            raise PolynomialSyntaxError("non-rational literal", start, text)
        if m.group(2):
            toks.append(_Tok("int", m.group(2), start))
        elif m.group(3):
            toks.append(_Tok("t", "t", start))
        else:
            toks.append(_Tok("op", m.group(4), start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str):
        raise PolynomialSyntaxError(msg, self.cur.offset, self.text)

    def accept(self, op: str) -> bool:
        if self.cur.kind == "op" and self.cur.value == op:
            self.i += 1
            return True
        return False

    def parse(self) -> RationalPoly:
        out = self.expr()
        if self.cur.kind != "end":
            self.error(f"unexpected {self.cur.value!r}")
        return out

    def expr(self) -> RationalPoly:
        acc = self.term()
        while True:
            if self.accept("+"):
                acc = acc + self.term()
            elif self.accept("-"):
                acc = acc - self.term()
            else:
                return acc

    def term(self) -> RationalPoly:
        acc = self.unary()
        while True:
            if self.accept("*"):
                acc = acc * self.unary()
            elif self.cur.kind == "op" and self.cur.value == "/":
                at = self.cur.offset
                self.i += 1
                div = self.unary()
                if div.degree != 0:
                    raise PolynomialSyntaxError("division by a non-constant", at, self.text)
                acc = acc / div.lc
            else:
                return acc

    def unary(self) -> RationalPoly:
        if self.accept("-"):
            return -self.unary()
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> RationalPoly:
        base = self.atom()
        if self.accept("^"):
            if self.cur.kind != "int":
                self.error("expected a non-negative integer exponent")
            k = int(self.cur.value)
            self.i += 1
            return base ** k
        return base

    def atom(self) -> RationalPoly:
        tok = self.cur
        if tok.kind == "int":
            self.i += 1
            return RationalPoly((Fraction(int(tok.value)),))
        if tok.kind == "t":
            self.i += 1
            return RationalPoly.t()
        if self.accept("("):
            inner = self.expr()
            if not self.accept(")"):
                self.error("expected ')'")
            return inner
        if tok.kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected {tok.value!r}")


def parse_polynomial(text: str) -> RationalPoly:
    return _Parser(text).parse()


def parse_rational(text: str) -> Fraction:
    """``"3"``, ``"-2/5"``; no decimals."""
    text = text.strip()
    if not re.fullmatch(r"[-+]?\d+(/\d+)?", text):
        raise ValueError(f"not a rational number: {text!r}")
    q = Fraction(text)
    return q
