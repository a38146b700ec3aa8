"""Exact arithmetic over Q(q, a, b).

Sparse Laurent polynomials keyed by exponent vectors, rational functions
compared by cross multiplication, a factored fraction type used for the
heavy series work, and evaluation into a prime field.

Exponent vectors are stored internally as a single packed integer
``e_q * S**2 + e_a * S + e_b`` with balanced digits, so multiplying two
monomials is one integer addition.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple, Union

Coeff = Union[int, Fraction]

VARIABLES = ("q", "a", "b")
MERSENNE_61 = (1 << 61) - 1

_SHIFT = 21
_S = 1 << _SHIFT
_H = _S >> 1
_MASK = _S - 1


class AlgebraError(ArithmeticError):
    pass


class DivisionByZeroFunction(AlgebraError, ZeroDivisionError):
    pass


class Pole(AlgebraError):
    """A denominator vanished at the sampled field point."""


class CoefficientDenominatorDivisibleByP(AlgebraError):
    """A rational coefficient has no image mod p; resample the prime."""


def _norm(c: Coeff) -> Coeff:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def pack(eq: int, ea: int, eb: int) -> int:
    if not (-_H <= eq < _H and -_H <= ea < _H and -_H <= eb < _H):
        raise OverflowError(f"exponent out of range: {(eq, ea, eb)}")
    return (eq << (2 * _SHIFT)) + (ea << _SHIFT) + eb


def unpack(key: int) -> tuple[int, int, int]:
    eb = ((key + _H) & _MASK) - _H
    key = (key - eb) >> _SHIFT
    ea = ((key + _H) & _MASK) - _H
    eq = (key - ea) >> _SHIFT
    return eq, ea, eb


class ExpVec(NamedTuple):
    q: int = 0
    a: int = 0
    b: int = 0

    @property
    def key(self) -> int:
        return pack(self.q, self.a, self.b)

    @classmethod
    def from_key(cls, key: int) -> ExpVec:
        return cls(*unpack(key))

    def order_key(self) -> tuple[int, int, int, int]:
        return (abs(self.q) + abs(self.a) + abs(self.b), self.q, self.a, self.b)

    def __add__(self, other):  # type: ignore[override]
        return ExpVec(self.q + other.q, self.a + other.a, self.b + other.b)


@lru_cache(maxsize=1 << 16)
def _order_of(key: int) -> tuple[int, int, int, int]:
    eq, ea, eb = unpack(key)
    return (abs(eq) + abs(ea) + abs(eb), eq, ea, eb)


class LaurentPoly:
    """Sparse Laurent polynomial in q, a, b with rational coefficients.

    Immutable. Coefficients are ``int`` where possible and ``Fraction``
    otherwise; zero coefficients are never stored.
    """

    __slots__ = ("_t", "_hash")

    def __init__(self, terms=None):
        t: dict[int, Coeff] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for e, c in items:
                k = e if isinstance(e, int) else ExpVec(*e).key
                c = _norm(Fraction(c) if not isinstance(c, (int, Fraction)) else c)
                v = t.get(k, 0) + c
                if v:
                    t[k] = _norm(v)
                else:
                    t.pop(k, None)
        self._t = t
        self._hash = None

    @classmethod
    def _raw(cls, t: dict[int, Coeff]) -> LaurentPoly:
        p = cls.__new__(cls)
        p._t = t
        p._hash = None
        return p

    @classmethod
    def const(cls, c: Coeff) -> LaurentPoly:
        c = _norm(Fraction(c)) if not isinstance(c, int) else c
        return cls._raw({0: c} if c else {})

    @classmethod
    def monomial(cls, c: Coeff = 1, eq: int = 0, ea: int = 0, eb: int = 0) -> LaurentPoly:
        c = _norm(Fraction(c)) if not isinstance(c, int) else c
        return cls._raw({pack(eq, ea, eb): c} if c else {})

    @classmethod
    def var(cls, name: str) -> LaurentPoly:
        e = [0, 0, 0]
        e[VARIABLES.index(name)] = 1
        return cls.monomial(1, *e)

    # -- inspection ---------------------------------------------------

    def terms(self) -> dict[ExpVec, Coeff]:
        return {ExpVec.from_key(k): self._t[k] for k in self._keys_sorted()}

    def _keys_sorted(self) -> list[int]:
        return sorted(self._t, key=_order_of)

    def __iter__(self) -> Iterator[tuple[ExpVec, Coeff]]:
        for k in self._keys_sorted():
            yield ExpVec.from_key(k), self._t[k]

    def __len__(self) -> int:
        return len(self._t)

    def __bool__(self) -> bool:
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_value(self) -> Coeff:
        return self._t.get(0, 0)

    def leading(self) -> tuple[ExpVec, Coeff]:
        k = max(self._t, key=_order_of)
        return ExpVec.from_key(k), self._t[k]

    def min_exponents(self) -> ExpVec:
        vs = [unpack(k) for k in self._t]
        return ExpVec(min(v[0] for v in vs), min(v[1] for v in vs), min(v[2] for v in vs))

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self._t == other._t
        if isinstance(other, (int, Fraction)):
            return self._t == ({0: other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    # -- ring operations ----------------------------------------------

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly._raw({k: -v for k, v in self._t.items()})

    def __add__(self, other) -> LaurentPoly:
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if len(self._t) < len(other._t):
            self, other = other, self
        t = dict(self._t)
        for k, v in other._t.items():
            s = t.get(k, 0) + v
            if s:
                t[k] = _norm(s) if type(s) is Fraction else s
            else:
                del t[k]
        return LaurentPoly._raw(t)

    __radd__ = __add__

    def __sub__(self, other) -> LaurentPoly:
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> LaurentPoly:
        return _coerce(other) - self

    def __mul__(self, other) -> LaurentPoly:
        other = _coerce(other)
        if other is NotImplemented:
            return other
        a, b = self._t, other._t
        if not a or not b:
            return ZERO
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (m, c), = b.items()
            if type(c) is int:
                return LaurentPoly._raw({k + m: v * c for k, v in a.items()})
            return LaurentPoly._raw({k + m: _norm(v * c) for k, v in a.items()})
        t: dict[int, Coeff] = {}
        get = t.get
        for m, c in b.items():
            for k, v in a.items():
                kk = k + m
                t[kk] = get(kk, 0) + v * c
        return LaurentPoly._raw({k: _norm(v) for k, v in t.items() if v})

    __rmul__ = __mul__

    def __pow__(self, e: int) -> LaurentPoly:
        if e < 0:
            if not self.is_monomial():
                raise ValueError("negative power of a non-monomial Laurent polynomial")
            (k, c), = self._t.items()
            return LaurentPoly._raw({-k * (-e): _norm(Fraction(1, 1) / c ** (-e))})
        result = ONE
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def scale(self, c: Coeff) -> LaurentPoly:
        if not c:
            return ZERO
        return LaurentPoly._raw({k: _norm(v * c) for k, v in self._t.items()})

    def shift(self, e: ExpVec | int) -> LaurentPoly:
        m = e if isinstance(e, int) else e.key
        return LaurentPoly._raw({k + m: v for k, v in self._t.items()})

    def substitute(self, mapping: dict[str, tuple[int, ExpVec]]) -> LaurentPoly:
        return poly_substitute(self, mapping)

    def eval_mod(self, pt: FieldPoint) -> int:
        return poly_eval_mod(self, pt)

    def __repr__(self):
        return f"LaurentPoly({poly_to_text(self)!r})"

    def __str__(self):
        return poly_to_text(self)


def _coerce(x):
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentPoly.const(x)
    return NotImplemented


ZERO = LaurentPoly._raw({})
ONE = LaurentPoly._raw({0: 1})


def poly_arith(op: str, x: LaurentPoly, y: LaurentPoly | int | None = None) -> LaurentPoly:
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "neg":
        return -x
    if op == "pow":
        if not isinstance(y, int) or y < 0:
            raise ValueError("pow needs a nonnegative integer exponent")
        return x ** y
    raise ValueError(f"unknown operation {op!r}")


def mul_binomial(p: LaurentPoly, c0: Coeff, m0: int, c1: Coeff, m1: int) -> LaurentPoly:
    """p * (c0*x^m0 + c1*x^m1) for packed monomials m0 != m1."""
    t = {k + m0: v * c0 for k, v in p._t.items()}
    get = t.get
    for k, v in p._t.items():
        kk = k + m1
        s = get(kk, 0) + v * c1
        if s:
            t[kk] = s
        else:
            del t[kk]
    if type(c0) is not int or type(c1) is not int:
        t = {k: _norm(v) for k, v in t.items()}
    return LaurentPoly._raw(t)


def multiply_factors(p: LaurentPoly, factors: Iterable[LaurentPoly]) -> LaurentPoly:
    for f in factors:
        if p.is_zero():
            return p
        if len(f._t) == 2:
            (m0, c0), (m1, c1) = f._t.items()
            p = mul_binomial(p, c0, m0, c1, m1)
        else:
            p = p * f
    return p


# -- substitution and modular evaluation --------------------------------

def _monomial_image(e: tuple[int, int, int], mapping) -> tuple[int, int]:
    sign = 1
    key = 0
    for v, ev in zip(VARIABLES, e):
        if not ev:
            continue
        s, target = mapping.get(v, (1, ExpVec(*[int(v == w) for w in VARIABLES])))
        t = target if isinstance(target, ExpVec) else ExpVec(*target)
        if s < 0 and ev % 2:
            sign = -sign
        key += pack(t.q * ev, t.a * ev, t.b * ev)
    return sign, key


def poly_substitute(p: LaurentPoly, mapping: dict[str, tuple[int, ExpVec]]) -> LaurentPoly:
    """Apply the ring homomorphism sending each variable to ``sign * monomial``.

    Variables missing from ``mapping`` are left fixed.
    """
    t: dict[int, Coeff] = {}
    for k, c in p._t.items():
        sign, kk = _monomial_image(unpack(k), mapping)
        v = t.get(kk, 0) + (c if sign > 0 else -c)
        if v:
            t[kk] = v
        else:
            t.pop(kk, None)
    return LaurentPoly._raw(t)


@dataclass(frozen=True)
class FieldPoint:
    p: int
    q: int
    a: int = 1
    b: int = 1

    def __post_init__(self):
        for name in VARIABLES:
            if getattr(self, name) % self.p == 0:
                raise ValueError(f"{name} must be nonzero mod p")

    def values(self) -> tuple[int, int, int]:
        return self.q, self.a, self.b


def coeff_mod(c: Coeff, p: int) -> int:
    if type(c) is int:
        return c % p
    if c.denominator % p == 0:
        raise CoefficientDenominatorDivisibleByP(f"denominator of {c} divisible by {p}")
    return c.numerator * pow(c.denominator, -1, p) % p


def poly_eval_mod(poly: LaurentPoly, pt: FieldPoint) -> int:
    p = pt.p
    cache: dict[tuple[int, int], int] = {}

    def power(i: int, e: int) -> int:
        r = cache.get((i, e))
        if r is None:
            r = pow(pt.values()[i], e, p)
            cache[(i, e)] = r
        return r

    total = 0
    for k, c in poly._t.items():
        eq, ea, eb = unpack(k)
        total += coeff_mod(c, p) * power(0, eq) * power(1, ea) * power(2, eb)
    return total % p


# -- rational functions ------------------------------------------------

class RatFunc:
    """Quotient of two Laurent polynomials.

    Normalized on construction: the common monomial content of numerator
    and denominator is removed and the denominator's leading coefficient
    (largest monomial in canonical order) is 1. No polynomial GCD is taken.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = _coerce(num)
        den = ONE if den is None else _coerce(den)
        if den.is_zero():
            raise DivisionByZeroFunction("zero denominator")
        if num.is_zero():
            self.num, self.den = ZERO, ONE
            return
        m = min_exponents_of(num, den)
        if m != ExpVec(0, 0, 0):
            shift = -m.key
            num, den = num.shift(shift), den.shift(shift)
        _, lc = den.leading()
        if lc != 1:
            inv = Fraction(1) / lc
            num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den

    @classmethod
    def const(cls, c: Coeff) -> RatFunc:
        return cls(LaurentPoly.const(c))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        other = _rf(other)
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_rf(other))

    def __rsub__(self, other):
        return _rf(other) - self

    def __mul__(self, other):
        other = _rf(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def recip(self) -> RatFunc:
        if self.num.is_zero():
            raise DivisionByZeroFunction("reciprocal of the zero function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        return self * _rf(other).recip()

    def __rtruediv__(self, other):
        return _rf(other) * self.recip()

    def __pow__(self, e: int) -> RatFunc:
        if e < 0:
            return self.recip() ** (-e)
        return RatFunc(self.num ** e, self.den ** e)

    def equals(self, other) -> bool:
        return rf_equal(self, _rf(other))

    def __eq__(self, other):
        # structural; use rf_equal for mathematical equality
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def substitute(self, mapping) -> RatFunc:
        return RatFunc(poly_substitute(self.num, mapping), poly_substitute(self.den, mapping))

    def eval_mod(self, pt: FieldPoint) -> int:
        return rf_eval_mod(self, pt)

    def __repr__(self):
        return f"RatFunc({rf_serialize(self)!r})"

    def __str__(self):
        return rf_serialize(self)


def _rf(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    return RatFunc(x)


def min_exponents_of(*polys: LaurentPoly) -> ExpVec:
    mins = [p.min_exponents() for p in polys if not p.is_zero()]
    return ExpVec(min(m.q for m in mins), min(m.a for m in mins), min(m.b for m in mins))


def rf_arith(op: str, f: RatFunc, g: RatFunc | None = None) -> RatFunc:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    if op == "recip":
        return f.recip()
    raise ValueError(f"unknown operation {op!r}")


def cross_difference(f: RatFunc, g: RatFunc) -> LaurentPoly:
    return f.num * g.den - g.num * f.den


def rf_equal(f: RatFunc, g: RatFunc) -> bool:
    return cross_difference(f, g).is_zero()


def rf_eval_mod(f: RatFunc, pt: FieldPoint) -> int:
    d = poly_eval_mod(f.den, pt)
    if d == 0:
        raise Pole(f"denominator vanishes at {pt}")
    return poly_eval_mod(f.num, pt) * pow(d, -1, pt.p) % pt.p


# -- canonical text ----------------------------------------------------

def _coeff_text(c: Coeff) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _monomial_text(e: ExpVec) -> str:
    parts = []
    for v, x in zip(VARIABLES, e):
        if x == 1:
            parts.append(v)
        elif x:
            parts.append(f"{v}^{x}")
    return "*".join(parts)


def poly_to_text(p: LaurentPoly) -> str:
    if p.is_zero():
        return "0"
    out = []
    for i, (e, c) in enumerate(p):
        neg = c < 0
        mag = -c if neg else c
        mono = _monomial_text(e)
        if not mono:
            body = _coeff_text(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_coeff_text(mag)}*{mono}"
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def _wrap(p: LaurentPoly) -> str:
    if p.is_constant() and Fraction(p.constant_value()).denominator == 1:
        return poly_to_text(p)
    return f"({poly_to_text(p)})"


def rf_serialize(f: RatFunc) -> str:
    return f"{_wrap(f.num)}/{_wrap(f.den)}"


_FACTOR_RE = re.compile(r"^(?:(\d+)(?:/(\d+))?)$|^([qab])(?:\^(-?\d+))?$")


def poly_from_text(text: str) -> LaurentPoly:
    """Parse the output of :func:`poly_to_text`."""
    s = text.strip()
    if s == "0":
        return ZERO
    # split on + / - that separate terms (a '-' after '^' belongs to the exponent)
    terms: list[tuple[int, str]] = []
    sign, start, i = 1, 0, 0
    if s.startswith("-"):
        sign, start, i = -1, 1, 1
    while i <= len(s):
        if i == len(s) or (s[i] in "+-" and s[i - 1] != "^" and i > start):
            chunk = s[start:i].strip()
            if not chunk:
                raise ValueError(f"malformed polynomial text: {text!r}")
            terms.append((sign, chunk))
            if i < len(s):
                sign = 1 if s[i] == "+" else -1
            start = i + 1
        i += 1
    t: dict[int, Coeff] = {}
    for sign, chunk in terms:
        coef: Coeff = 1
        e = [0, 0, 0]
        for f in chunk.split("*"):
            m = _FACTOR_RE.match(f.strip())
            if not m:
                raise ValueError(f"malformed factor {f!r} in {text!r}")
            if m.group(1):
                coef = _norm(Fraction(int(m.group(1)), int(m.group(2) or 1)))
            else:
                e[VARIABLES.index(m.group(3))] += int(m.group(4) or 1)
        k = pack(*e)
        v = t.get(k, 0) + sign * coef
        if v:
            t[k] = _norm(v)
        else:
            t.pop(k, None)
    return LaurentPoly._raw(t)


def rf_parse(text: str) -> RatFunc:
    """Inverse of :func:`rf_serialize`."""
    text = text.strip()
    num, den = _split_top(text)
    return RatFunc(poly_from_text(_unwrap(num)), poly_from_text(_unwrap(den)))


def _split_top(text: str) -> tuple[str, str]:
    if text.startswith("("):
        depth = 0
        for i, ch in enumerate(text):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    if text[i + 1:i + 2] != "/":
                        break
                    return text[:i + 1], text[i + 2:]
        raise ValueError(f"not a serialized rational function: {text!r}")
    # bare integer numerator
    head, sep, tail = text.partition("/")
    if not sep:
        raise ValueError(f"not a serialized rational function: {text!r}")
    return head, tail


def _unwrap(s: str) -> str:
    s = s.strip()
    if s.startswith("(") and s.endswith(")"):
        return s[1:-1]
    return s


# -- factored fractions ------------------------------------------------

@lru_cache(maxsize=1 << 16)
def normalize_atom(poly: LaurentPoly) -> tuple[Coeff, int, LaurentPoly]:
    """Split ``poly`` as ``c * x^m * atom`` with atom content-free and monic.

    Returns ``(c, packed m, atom)``.
    """
    m = poly.min_exponents().key
    shifted = poly.shift(-m) if m else poly
    _, lc = shifted.leading()
    atom = shifted if lc == 1 else shifted.scale(Fraction(1) / lc)
    return lc, m, atom


@lru_cache(maxsize=1 << 16)
def binomial_atom(sign: int, key: int) -> tuple[Coeff, int, LaurentPoly | None]:
    """Factor ``1 - sign * x^key`` as ``c * x^m * atom``.

    A constant binomial yields ``atom=None`` and ``c`` in {0, 2}.
    """
    if key == 0:
        return 1 - sign, 0, None
    return normalize_atom(LaurentPoly._raw({0: 1, key: -sign}))


class FactoredFraction:
    """``coeff * prod(atom ** mult)`` with atoms monic, content-free, 2+ terms.

    Multiplication merges atom multiplicities, so repeated Pochhammer
    factors cancel without any polynomial division. Addition factors out
    the common atom powers and expands only the leftovers.
    """

    __slots__ = ("coeff", "atoms")

    def __init__(self, coeff: LaurentPoly, atoms: dict[LaurentPoly, int] | None = None):
        self.coeff = coeff
        self.atoms = {} if coeff.is_zero() or not atoms else {a: e for a, e in atoms.items() if e}

    @classmethod
    def from_poly(cls, p: LaurentPoly) -> FactoredFraction:
        if len(p) <= 1:
            return cls(p)
        c, m, atom = normalize_atom(p)
        return cls(LaurentPoly._raw({m: c}), {atom: 1})

    @classmethod
    def from_ratfunc(cls, f: RatFunc) -> FactoredFraction:
        return cls.from_poly(f.num) / cls.from_poly(f.den)

    @classmethod
    def const(cls, c: Coeff) -> FactoredFraction:
        return cls(LaurentPoly.const(c))

    @classmethod
    def binomial(cls, sign: int, key: int) -> FactoredFraction:
        """The factor ``1 - sign * x^key``."""
        c, m, atom = binomial_atom(sign, key)
        if atom is None:
            return cls(LaurentPoly.const(c))
        return cls(LaurentPoly._raw({m: c}), {atom: 1})

    def is_zero(self) -> bool:
        return self.coeff.is_zero()

    def __mul__(self, other: FactoredFraction) -> FactoredFraction:
        if self.is_zero() or other.is_zero():
            return FactoredFraction(ZERO)
        atoms = dict(self.atoms)
        for a, e in other.atoms.items():
            atoms[a] = atoms.get(a, 0) + e
        return FactoredFraction(self.coeff * other.coeff, atoms)

    def inverse(self) -> FactoredFraction:
        if self.is_zero():
            raise DivisionByZeroFunction("inverse of the zero function")
        atoms = {a: -e for a, e in self.atoms.items()}
        if self.coeff.is_monomial():
            (k, c), = self.coeff._t.items()
            return FactoredFraction(LaurentPoly._raw({-k: _norm(Fraction(1) / c)}), atoms)
        c, m, atom = normalize_atom(self.coeff)
        atoms[atom] = atoms.get(atom, 0) - 1
        return FactoredFraction(LaurentPoly._raw({-m: _norm(Fraction(1) / c)}), atoms)

    def __truediv__(self, other: FactoredFraction) -> FactoredFraction:
        return self * other.inverse()

    def __pow__(self, e: int) -> FactoredFraction:
        if e < 0:
            return self.inverse() ** (-e)
        result = FactoredFraction(ONE)
        for _ in range(e):
            result = result * self
        return result

    def __neg__(self) -> FactoredFraction:
        return FactoredFraction(-self.coeff, self.atoms)

    def __add__(self, other: FactoredFraction) -> FactoredFraction:
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        common: dict[LaurentPoly, int] = {}
        for a in set(self.atoms) | set(other.atoms):
            common[a] = min(self.atoms.get(a, 0), other.atoms.get(a, 0))
        left = multiply_factors(self.coeff, _leftover(self.atoms, common))
        right = multiply_factors(other.coeff, _leftover(other.atoms, common))
        return FactoredFraction(left + right, common)

    def __sub__(self, other: FactoredFraction) -> FactoredFraction:
        return self + (-other)

    def numerator_over(self, common: dict[LaurentPoly, int]) -> LaurentPoly:
        return multiply_factors(self.coeff, _leftover(self.atoms, common))

    def to_ratfunc(self) -> RatFunc:
        num = self.coeff
        den = ONE
        for a, e in sorted(self.atoms.items(), key=lambda ae: len(ae[0])):
            if e > 0:
                num = multiply_factors(num, [a] * e)
            else:
                den = multiply_factors(den, [a] * (-e))
        return RatFunc(num, den)

    def substitute(self, mapping: dict[str, tuple[int, ExpVec]]) -> FactoredFraction:
        """Image under ``poly_substitute``, applied atom by atom."""
        out = FactoredFraction(poly_substitute(self.coeff, mapping))
        for a, e in self.atoms.items():
            out = out * FactoredFraction.from_poly(poly_substitute(a, mapping)) ** e
        return out

    def eval_mod(self, pt: FieldPoint) -> int:
        p = pt.p
        v = poly_eval_mod(self.coeff, pt)
        den = 1
        for a, e in self.atoms.items():
            x = poly_eval_mod(a, pt)
            if e > 0:
                v = v * pow(x, e, p) % p
            else:
                den = den * pow(x, -e, p) % p
        if den == 0:
            raise Pole(f"denominator vanishes at {pt}")
        return v * pow(den, -1, p) % p

    def __repr__(self):
        parts = [f"({self.coeff})"] + [f"({a})^{e}" for a, e in self.atoms.items()]
        return "FactoredFraction(" + " * ".join(parts) + ")"


def _leftover(atoms: dict[LaurentPoly, int], common: dict[LaurentPoly, int]) -> list[LaurentPoly]:
    out = []
    for a, e in atoms.items():
        out.extend([a] * (e - common.get(a, 0)))
    for a, c in common.items():
        if a not in atoms and c < 0:
            out.extend([a] * (-c))
    # smallest first keeps intermediate products small
    out.sort(key=len)
    return out


def factored_equal(f: FactoredFraction, g: FactoredFraction) -> bool:
    """Exact equality via the least common atom denominator."""
    return (f - g).is_zero()
