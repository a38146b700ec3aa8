"""Recursive-descent parser for the identity DSL.

Grammar (``#`` starts a comment)::

    catalog := item*
    item    := ("id" | "family") NAME "for" "n" ">=" INT ":" expr "==" expr ";"
             | "cert" NAME ":" "f" "=" expr "," "H" "=" expr
                   ["," "boundary"] ["," "target" "=" expr] ";"
             | "rel" NAME ":" expr "-" expr "==" expr "*" factor ";"
             | "induct" NAME ":" NAME "by" NAME "," "step" INT ","
                   "shift" subst "," "target" subst ";"
             | "transport" NAME ":" NAME "->" NAME "by" subst ";"
    subst   := "[" VAR "->" expr ("," VAR "->" expr)* "]"
    expr    := ["-"] term (("+" | "-") term)*
    term    := factor (("*" | "/") factor)*
    factor  := base ["^" exponent]
    base    := INT | "q" | "a" | "b" | "(" expr ")"
             | "poch" "(" expr ";" step ";" affine ")"
             | "phi" "(" "[" list "]" ";" "[" list "]" ";" step ";" expr ";" affine ")"
             | "phiterm" "(" same as phi, last field is the term index ")"
             | "qcat" "(" affine ["," "negq"] ")" | "cat" "(" affine ")"
             | "sum" "(" NAME "," affine "," affine ";" expr ")"
    step    := ["-"] INT          (base q^INT)  | expr   (any signed monomial)

Products and quotients of signed monomials fold into a single monomial
node while parsing, so series parameters can be written naturally
(``q^(1-2*n)/(a*b)``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..qseries import AffineInt, AffineParam, step_base
from .ast import (
    FAMILY, IDENTITY, INTEGER, BinOp, Cat, CertificateSpec, Const, IdentitySpec,
    InductionSpec, Mono, Node, Phi, PhiTerm, Poch, Pow, QCat, RelationSpec, Sum,
    TransportSpec, contains_variables,
)


class DSLError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}" if line else message)


class DSLSyntaxError(DSLError):
    pass


class NonAffineExponent(DSLError):
    pass


class UnknownSymbol(DSLError):
    pass


class DuplicateSpec(DSLError):
    pass


KEYWORDS = {"poch", "phi", "phiterm", "qcat", "cat", "sum"}
VARS = ("q", "a", "b")

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|>=|->|[-+*/^()\[\];,:=])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str  # int | name | op | eof
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def _fold_mul(x: Node, y: Node) -> Node:
    if isinstance(x, Mono) and isinstance(y, Mono):
        return Mono(x.param * y.param)
    return BinOp("*", x, y)


def _fold_div(x: Node, y: Node) -> Node:
    if isinstance(x, Mono) and isinstance(y, Mono):
        return Mono(x.param * y.param.inverse())
    if isinstance(x, Const) and isinstance(y, Const) and y.value:
        return Const(x.value / y.value)
    return BinOp("/", x, y)


def _fold_neg(x: Node) -> Node:
    if isinstance(x, Mono):
        return Mono(x.param * AffineParam.of(-1))
    if isinstance(x, Const):
        return Const(-x.value)
    return BinOp("*", Const(Fraction(-1)), x)


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0
        self.k_names: list[str] = []  # innermost last; names bound to the k slot

    # -- token helpers --------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def error(self, msg: str, tok: Token | None = None, cls=DSLSyntaxError):
        tok = tok or self.tok
        return cls(msg, tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "name") and self.tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        t = self.tok
        self.i += 1
        return t

    def expect_name(self) -> str:
        if self.tok.kind != "name":
            raise self.error(f"expected a name, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t.text

    def expect_int(self) -> int:
        neg = self.accept("-")
        if self.tok.kind != "int":
            raise self.error(f"expected an integer, found {self.tok.text or 'end of input'!r}")
        v = int(self.tok.text)
        self.i += 1
        return -v if neg else v

    # -- items ----------------------------------------------------------

    def parse_catalog(self) -> list:
        items = []
        seen = set()
        while self.tok.kind != "eof":
            name_tok = self.tokens[self.i + 1] if self.i + 1 < len(self.tokens) else self.tok
            item = self.parse_item()
            if item.id in seen:
                raise self.error(f"duplicate spec id {item.id!r}", name_tok, DuplicateSpec)
            seen.add(item.id)
            items.append(item)
        return items

    def parse_item(self):
        head = self.tok
        word = self.expect_name()
        if word in ("id", "family"):
            return self._identity(word)
        if word == "cert":
            return self._cert()
        if word == "rel":
            return self._rel()
        if word == "induct":
            return self._induct()
        if word == "transport":
            return self._transport()
        raise self.error(f"unknown item keyword {word!r}", head)

    def _identity(self, word: str) -> IdentitySpec:
        name = self.expect_name()
        self.expect("for")
        self.expect("n")
        self.expect(">=")
        n_min = self.expect_int()
        if n_min < 0:
            raise self.error("n_min must be nonnegative", self.peek(-1))
        self.expect(":")
        self.k_names = ["k"] if word == "family" else []
        lhs = self.expr()
        self.expect("==")
        rhs = self.expr()
        self.expect(";")
        self.k_names = []
        if word == "family":
            kind = FAMILY
        elif contains_variables(lhs) or contains_variables(rhs):
            kind = IDENTITY
        else:
            kind = INTEGER
        return IdentitySpec(name, lhs, rhs, n_min, kind)

    def _cert(self) -> CertificateSpec:
        name = self.expect_name()
        self.expect(":")
        self.k_names = ["k"]
        self.expect("f")
        self.expect("=")
        f = self.expr()
        self.expect(",")
        self.expect("H")
        self.expect("=")
        h = self.expr()
        boundary = False
        target = None
        while self.accept(","):
            if self.accept("boundary"):
                boundary = True
            elif self.accept("target"):
                self.expect("=")
                self.k_names = []
                target = self.expr()
                self.k_names = ["k"]
            else:
                raise self.error("expected 'boundary' or 'target'")
        self.expect(";")
        self.k_names = []
        return CertificateSpec(name, f, h, boundary, target)

    def _rel(self) -> RelationSpec:
        name = self.expect_name()
        self.expect(":")
        self.k_names = ["k"]
        start = self.tok
        left = self.expr()
        if not (isinstance(left, BinOp) and left.op == "-"):
            raise self.error("relation left side must be a difference of two terms", start)
        self.expect("==")
        start = self.tok
        right = self.expr()
        if not (isinstance(right, BinOp) and right.op == "*"):
            raise self.error("relation right side must be multiplier * term", start)
        self.expect(";")
        self.k_names = []
        return RelationSpec(name, left.left, left.right, right.left, right.right)

    def _subst(self) -> tuple[tuple[str, AffineParam], ...]:
        self.expect("[")
        pairs = {}
        while True:
            var_tok = self.tok
            var = self.expect_name()
            if var not in VARS:
                raise self.error(f"substitution variable must be q, a or b, not {var!r}", var_tok, UnknownSymbol)
            self.expect("->")
            t = self.tok
            target = self.expr()
            if not isinstance(target, Mono):
                raise self.error("substitution target must be a signed monomial", t)
            if not all(x.is_const() for x in (target.param.sign, target.param.eq, target.param.ea, target.param.eb)):
                raise self.error("substitution target must not depend on n or k", t)
            pairs[var] = target.param
            if not self.accept(","):
                break
        self.expect("]")
        return tuple(sorted(pairs.items()))

    def _induct(self) -> InductionSpec:
        name = self.expect_name()
        self.expect(":")
        ident = self.expect_name()
        self.expect("by")
        rel = self.expect_name()
        self.expect(",")
        self.expect("step")
        step = self.expect_int()
        self.expect(",")
        self.expect("shift")
        shift = self._subst()
        self.expect(",")
        self.expect("target")
        target = self._subst()
        self.expect(";")
        return InductionSpec(name, ident, rel, step, shift, target, n_min=step)

    def _transport(self) -> TransportSpec:
        name = self.expect_name()
        self.expect(":")
        src = self.expect_name()
        self.expect("->")
        dst = self.expect_name()
        self.expect("by")
        m = self._subst()
        self.expect(";")
        return TransportSpec(name, src, dst, m)

    # -- expressions ----------------------------------------------------

    def expr(self) -> Node:
        neg = self.accept("-")
        node = self.term()
        if neg:
            node = _fold_neg(node)
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.at("*") or self.at("/"):
            op = self.tok.text
            self.i += 1
            rhs = self.factor()
            node = _fold_mul(node, rhs) if op == "*" else _fold_div(node, rhs)
        return node

    def factor(self) -> Node:
        base = self.base()
        if self.accept("^"):
            e = self.exponent()
            if isinstance(base, Mono):
                p = base.param.power(e)
                if p is None:
                    raise self.error("exponent is not affine", self.peek(-1), NonAffineExponent)
                return Mono(p)
            if isinstance(base, Const) and base.value == -1 and not e.is_const():
                return Mono(AffineParam(e))
            return Pow(base, e)
        return base

    def base(self) -> Node:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return Const(Fraction(int(t.text)))
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "name":
            if t.text in VARS:
                self.i += 1
                return Mono(AffineParam.of(1, **{t.text: 1}))
            if t.text in KEYWORDS and self.peek().text == "(":
                self.i += 2
                node = getattr(self, "_" + t.text)()
                self.expect(")")
                return node
            raise self.error(f"unknown symbol {t.text!r}", t, UnknownSymbol)
        raise self.error(f"unexpected {t.text or 'end of input'!r}")

    def _monomial(self) -> AffineParam:
        t = self.tok
        if t.kind == "op" and t.text in (";", ",", "]", ")"):
            raise self.error("empty field")
        node = self.expr()
        if not isinstance(node, Mono):
            raise self.error("expected a signed monomial", t)
        return node.param

    def _step(self) -> AffineParam:
        t = self.tok
        if t.kind == "op" and t.text in (";", ",", ")"):
            raise self.error("empty field")
        save = self.i
        neg = self.accept("-")
        if self.tok.kind == "int" and self.peek().text == ";":
            v = int(self.tok.text)
            self.i += 1
            return step_base(-v if neg else v)
        self.i = save
        return self._monomial()

    def _plist(self) -> tuple[AffineParam, ...]:
        self.expect("[")
        out = []
        if not self.at("]"):
            out.append(self._monomial())
            while self.accept(","):
                out.append(self._monomial())
        self.expect("]")
        return tuple(out)

    def _poch(self) -> Poch:
        x = self._monomial()
        self.expect(";")
        base = self._step()
        self.expect(";")
        return Poch(x, base, self.affine())

    def _series_fields(self):
        nums = self._plist()
        self.expect(";")
        dens = self._plist()
        self.expect(";")
        base = self._step()
        self.expect(";")
        z = self._monomial()
        self.expect(";")
        return nums, dens, base, z, self.affine()

    def _phi(self) -> Phi:
        return Phi(*self._series_fields())

    def _phiterm(self) -> PhiTerm:
        return PhiTerm(*self._series_fields())

    def _qcat(self) -> QCat:
        idx = self.affine()
        negq = False
        if self.accept(","):
            self.expect("negq")
            negq = True
        return QCat(idx, negq)

    def _cat(self) -> Cat:
        return Cat(self.affine())

    def _sum(self) -> Sum:
        var_tok = self.tok
        var = self.expect_name()
        if var in VARS or var in KEYWORDS or var == "n":
            raise self.error(f"{var!r} cannot be a summation index", var_tok)
        self.expect(",")
        lo = self.affine()
        self.expect(",")
        hi = self.affine()
        self.expect(";")
        self.k_names.append(var)
        try:
            body = self.expr()
        finally:
            self.k_names.pop()
        return Sum(var, lo, hi, body)

    # -- affine integers --------------------------------------------------

    def exponent(self) -> AffineInt:
        t = self.tok
        if self.accept("("):
            a = self.affine()
            self.expect(")")
            return a
        neg = self.accept("-")
        if self.tok.kind == "int":
            v = AffineInt(int(self.tok.text))
            self.i += 1
        elif self.tok.kind == "name":
            v = self._affine_name()
        else:
            raise self.error("expected an exponent", t)
        if self.at("^"):
            raise self.error("exponent is not affine", self.tok, NonAffineExponent)
        return -v if neg else v

    def _affine_name(self) -> AffineInt:
        t = self.tok
        self.i += 1
        if t.text == "n":
            return AffineInt(0, 1)
        if self.k_names and t.text == self.k_names[-1]:
            return AffineInt(0, 0, 1)
        raise self.error(f"unknown index {t.text!r}", t, UnknownSymbol)

    def affine(self) -> AffineInt:
        t = self.tok
        if t.kind == "op" and t.text in (";", ",", ")", "]"):
            raise self.error("empty field")
        neg = self.accept("-")
        acc = self._aterm()
        if neg:
            acc = -acc
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            rhs = self._aterm()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def _aterm(self) -> AffineInt:
        acc = self._afactor()
        while self.at("*") or self.at("/") or self.at("^"):
            t = self.tok
            if t.text != "*":
                raise self.error(f"{t.text!r} is not allowed in an affine exponent", t, NonAffineExponent)
            self.i += 1
            rhs = self._afactor()
            prod = acc.times(rhs)
            if prod is None:
                raise self.error("exponent is not affine", t, NonAffineExponent)
            acc = prod
        return acc

    def _afactor(self) -> AffineInt:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return AffineInt(int(t.text))
        if t.kind == "name":
            return self._affine_name()
        if self.accept("("):
            v = self.affine()
            self.expect(")")
            return v
        if self.accept("-"):
            return -self._afactor()
        raise self.error(f"expected an affine expression, found {t.text or 'end of input'!r}")


def parse(text: str) -> list:
    """Parse DSL text into a list of spec records (in source order)."""
    return Parser(text).parse_catalog()


def parse_expr(text: str, k_name: str | None = None) -> Node:
    p = Parser(text)
    if k_name:
        p.k_names = [k_name]
    node = p.expr()
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r}")
    return node
