"""q-Pochhammer symbols, terminating basic hypergeometric series, Catalan numbers.

Series parameters are signed monomials whose exponents are affine in the
outer index ``n`` and the summation index ``k``. Symbolic evaluation goes
through :class:`~qverify.algebra.FactoredFraction`; the ``*_mod`` variants
specialize the same recurrences into a prime field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .algebra import (
    ExpVec,
    FactoredFraction,
    FieldPoint,
    LaurentPoly,
    ONE,
    Pole,
    RatFunc,
    ZERO,
    multiply_factors,
    pack,
    unpack,
)

# An instantiated signed monomial: (sign in {1, -1}, packed exponent).
Mono = tuple[int, int]


class QSeriesError(ArithmeticError):
    pass


class ZeroFactorInNegativeLength(QSeriesError):
    pass


class VanishingDenominatorFactor(QSeriesError):
    pass


@dataclass(frozen=True)
class AffineInt:
    """``c0 + cn*n + ck*k``."""

    c0: int = 0
    cn: int = 0
    ck: int = 0

    def __call__(self, n: int = 0, k: int = 0) -> int:
        return self.c0 + self.cn * n + self.ck * k

    def is_const(self) -> bool:
        return not self.cn and not self.ck

    def __add__(self, other: AffineInt) -> AffineInt:
        return AffineInt(self.c0 + other.c0, self.cn + other.cn, self.ck + other.ck)

    def __neg__(self) -> AffineInt:
        return AffineInt(-self.c0, -self.cn, -self.ck)

    def __sub__(self, other: AffineInt) -> AffineInt:
        return self + (-other)

    def scale(self, c: int) -> AffineInt:
        return AffineInt(self.c0 * c, self.cn * c, self.ck * c)

    def times(self, other: AffineInt) -> AffineInt | None:
        """Product if it stays affine, else None."""
        if self.is_const():
            return other.scale(self.c0)
        if other.is_const():
            return self.scale(other.c0)
        return None

    def mod2(self) -> AffineInt:
        return AffineInt(self.c0 % 2, self.cn % 2, self.ck % 2)

    def shift_n(self, d: int) -> AffineInt:
        """Replace n by n + d."""
        return AffineInt(self.c0 + self.cn * d, self.cn, self.ck)

    def __str__(self):
        return affine_text(self)


def affine_text(x: AffineInt, k_name: str = "k") -> str:
    parts = []
    for coef, name in ((x.cn, "n"), (x.ck, k_name)):
        if not coef:
            continue
        mag = abs(coef)
        body = name if mag == 1 else f"{mag}*{name}"
        parts.append(("-" if coef < 0 else "+") + body)
    if x.c0 or not parts:
        parts.append(("-" if x.c0 < 0 else "+") + str(abs(x.c0)))
    s = "".join(parts)
    return s[1:] if s.startswith("+") else s


ZERO_AFF = AffineInt()


@dataclass(frozen=True)
class AffineParam:
    """``(-1)^sign * q^eq * a^ea * b^eb`` with affine exponents."""

    sign: AffineInt = ZERO_AFF
    eq: AffineInt = ZERO_AFF
    ea: AffineInt = ZERO_AFF
    eb: AffineInt = ZERO_AFF

    def __post_init__(self):
        object.__setattr__(self, "sign", self.sign.mod2())

    @classmethod
    def of(cls, sign: int = 1, q=0, a=0, b=0) -> AffineParam:
        def aff(x):
            return x if isinstance(x, AffineInt) else AffineInt(x)
        return cls(AffineInt(0 if sign > 0 else 1), aff(q), aff(a), aff(b))

    def __call__(self, n: int = 0, k: int = 0) -> Mono:
        s = 1 if self.sign(n, k) % 2 == 0 else -1
        return s, pack(self.eq(n, k), self.ea(n, k), self.eb(n, k))

    def __mul__(self, other: AffineParam) -> AffineParam:
        return AffineParam(self.sign + other.sign, self.eq + other.eq, self.ea + other.ea, self.eb + other.eb)

    def inverse(self) -> AffineParam:
        return AffineParam(self.sign, -self.eq, -self.ea, -self.eb)

    def power(self, e: AffineInt) -> AffineParam | None:
        parts = [x.times(e) for x in (self.sign, self.eq, self.ea, self.eb)]
        if any(p is None for p in parts):
            return None
        return AffineParam(*parts)

    def is_identity(self) -> bool:
        return all(x == ZERO_AFF for x in (self.sign, self.eq, self.ea, self.eb))

    def shift_n(self, d: int) -> AffineParam:
        return AffineParam(*(x.shift_n(d) for x in (self.sign, self.eq, self.ea, self.eb)))


def step_base(s: int) -> AffineParam:
    return AffineParam.of(1, s)


@dataclass(frozen=True)
class PhiSpec:
    """Terminating series sum_{k=0}^{N} (nums;base)_k z^k / ((base,dens;base)_k)."""

    nums: tuple[AffineParam, ...]
    dens: tuple[AffineParam, ...]
    base: AffineParam = field(default_factory=lambda: step_base(1))
    z: AffineParam = field(default_factory=lambda: step_base(1))
    length: AffineInt = field(default_factory=lambda: AffineInt(0, 1))

    def instantiate(self, n: int, k: int = 0) -> tuple[list[Mono], list[Mono], Mono, Mono, int]:
        return ([x(n, k) for x in self.nums], [y(n, k) for y in self.dens],
                self.base(n, k), self.z(n, k), self.length(n, k))

    def terminates(self, n: int, k: int = 0) -> bool:
        """True if some numerator parameter equals base^(-N)."""
        nums, _, (bs, bk), _, length = self.instantiate(n, k)
        target = (bs ** abs(length), -bk * length)
        return target in nums


def mono_mul(x: Mono, y: Mono) -> Mono:
    return x[0] * y[0], x[1] + y[1]


def mono_pow(x: Mono, e: int) -> Mono:
    return (x[0] if e % 2 else 1), x[1] * e


def mono_poly(x: Mono) -> LaurentPoly:
    return LaurentPoly._raw({x[1]: x[0]})


# -- symbolic ------------------------------------------------------------

def poch_factored(x: Mono, base: Mono, m: int) -> FactoredFraction:
    """(x; base)_m for any integer m, as a factored fraction."""
    result = FactoredFraction(ONE)
    if m >= 0:
        for i in range(m):
            s, key = mono_mul(x, mono_pow(base, i))
            f = FactoredFraction.binomial(s, key)
            if f.is_zero():
                return f
            result = result * f
        return result
    for i in range(1, -m + 1):
        s, key = mono_mul(x, mono_pow(base, -i))
        f = FactoredFraction.binomial(s, key)
        if f.is_zero():
            raise ZeroFactorInNegativeLength(
                f"factor 1 - x*base^-{i} vanishes in a length-{m} Pochhammer symbol")
        result = result * f
    return result.inverse()


def _as_mono(x) -> Mono:
    if isinstance(x, tuple) and len(x) == 2:
        return x
    if isinstance(x, AffineParam):
        return x()
    if isinstance(x, ExpVec):
        return 1, x.key
    raise TypeError(f"not a monomial: {x!r}")


def pochhammer(x, s: int, m: int) -> RatFunc:
    """(x; q^s)_m. ``x`` is a monomial or an arbitrary RatFunc."""
    if s <= 0:
        raise ValueError("base step must be positive")
    base = (1, pack(s, 0, 0))
    if not isinstance(x, RatFunc):
        return poch_factored(_as_mono(x), base, m).to_ratfunc()
    result = RatFunc(ONE)
    qs = RatFunc(LaurentPoly.monomial(1, s))
    if m >= 0:
        for i in range(m):
            result = result * (1 - x * qs ** i)
        return result
    for i in range(1, -m + 1):
        f = 1 - x * qs ** (-i)
        if f.is_zero():
            raise ZeroFactorInNegativeLength(f"factor {i} vanishes")
        result = result * f
    return result.recip()


def pochhammer_multi(xs, s: int, m: int) -> RatFunc:
    result = RatFunc(ONE)
    for x in xs:
        result = result * pochhammer(x, s, m)
    return result


def _ratio_factors(nums, dens, base, z, k) -> FactoredFraction:
    """term_k / term_{k-1} for k >= 1."""
    r = FactoredFraction(mono_poly(z))
    shift = mono_pow(base, k - 1)
    for x in nums:
        f = FactoredFraction.binomial(*mono_mul(x, shift))
        if f.is_zero():
            return f
        r = r * f
    for y in list(dens) + [base]:
        f = FactoredFraction.binomial(*mono_mul(y, shift))
        if f.is_zero():
            raise VanishingDenominatorFactor(
                f"denominator factor vanishes identically at k={k}")
        r = r / f
    return r


def phi_values_factored(nums, dens, base, z, length) -> FactoredFraction:
    """Sum of the series by term ratios, Horner style.

    With term_k = prod_{j<=k} c_j A_j / B_j the sum is G_N / prod B_j where
    G_k = G_{k-1} B_k + P_k and P_k = P_{k-1} c_j A_j. Every step multiplies
    by a handful of binomials only.
    """
    g = ONE
    p = ONE
    den_atoms: dict[LaurentPoly, int] = {}
    for k in range(1, length + 1):
        r = _ratio_factors(nums, dens, base, z, k)
        if r.is_zero():
            break
        pos = []
        neg = []
        for atom, e in r.atoms.items():
            if e > 0:
                pos.extend([atom] * e)
            else:
                neg.extend([atom] * (-e))
                den_atoms[atom] = den_atoms.get(atom, 0) - e
        p = multiply_factors(p * r.coeff, pos)
        g = multiply_factors(g, neg) + p
    return FactoredFraction(g, {a: -e for a, e in den_atoms.items()})


def phi_factored(spec: PhiSpec, n: int, k: int = 0) -> FactoredFraction:
    nums, dens, base, z, length = spec.instantiate(n, k)
    if length < 0:
        return FactoredFraction(ZERO)
    return phi_values_factored(nums, dens, base, z, length)


def phi(spec: PhiSpec, n: int) -> RatFunc:
    return phi_factored(spec, n).to_ratfunc()


def phi_term_values_factored(nums, dens, base, z, k: int) -> FactoredFraction:
    """The k-th summand from scratch; zero for k < 0."""
    if k < 0:
        return FactoredFraction(ZERO)
    t = FactoredFraction(mono_poly(mono_pow(z, k)))
    for x in nums:
        t = t * poch_factored(x, base, k)
        if t.is_zero():
            return t
    d = poch_factored(base, base, k)
    for y in dens:
        d = d * poch_factored(y, base, k)
    if d.is_zero():
        raise VanishingDenominatorFactor(f"denominator vanishes identically at k={k}")
    return t / d


def phi_term_factored(spec: PhiSpec, n: int, k: int) -> FactoredFraction:
    nums, dens, base, z, _ = spec.instantiate(n, k)
    return phi_term_values_factored(nums, dens, base, z, k)


def phi_term(spec: PhiSpec, n: int, k: int) -> RatFunc:
    return phi_term_factored(spec, n, k).to_ratfunc()


def q_catalan_factored(m: int, negate_q: bool = False) -> FactoredFraction:
    # q^(2m) (-lambda/q; q^2)_m / (q^2; q^2)_m with lambda = 1; q -> -q only flips x
    x = (1 if negate_q else -1, pack(-1, 0, 0))
    base = (1, pack(2, 0, 0))
    head = FactoredFraction(LaurentPoly.monomial(1, 2 * m))
    return head * poch_factored(x, base, m) / poch_factored(base, base, m)


def q_catalan(m: int, negate_q: bool = False) -> RatFunc:
    if m < 0:
        raise ValueError("q-Catalan index must be nonnegative")
    value = q_catalan_factored(m).to_ratfunc()
    if negate_q:
        value = value.substitute({"q": (-1, ExpVec(1, 0, 0))})
    return value


def catalan(m: int) -> int:
    if m < 0:
        raise ValueError("Catalan index must be nonnegative")
    return math.comb(2 * m, m) // (m + 1)


# -- modular -------------------------------------------------------------

class ModContext:
    """Evaluates instantiated monomials at a field point, caching powers."""

    def __init__(self, pt: FieldPoint):
        self.pt = pt
        self.p = pt.p
        self._vals = pt.values()
        self._cache: dict[tuple[int, int], int] = {}

    def _pow(self, i: int, e: int) -> int:
        r = self._cache.get((i, e))
        if r is None:
            r = pow(self._vals[i], e, self.p)
            self._cache[(i, e)] = r
        return r

    def mono(self, x: Mono) -> int:
        s, key = x
        eq, ea, eb = unpack(key)
        v = self._pow(0, eq) * self._pow(1, ea) % self.p * self._pow(2, eb) % self.p
        return v if s > 0 else (-v) % self.p

    def inv(self, v: int) -> int:
        if v % self.p == 0:
            raise Pole(f"division by zero at {self.pt}")
        return pow(v, -1, self.p)


def poch_mod(ctx: ModContext, x: Mono, base: Mono, m: int) -> int:
    p = ctx.p
    xv = ctx.mono(x)
    bv = ctx.mono(base)
    acc = 1
    if m >= 0:
        t = xv
        for _ in range(m):
            acc = acc * (1 - t) % p
            t = t * bv % p
        return acc
    binv = ctx.inv(bv)
    t = xv * binv % p
    for _ in range(-m):
        acc = acc * (1 - t) % p
        t = t * binv % p
    return ctx.inv(acc)


def phi_values_mod(ctx: ModContext, nums, dens, base, z, length: int) -> int:
    p = ctx.p
    xs = [ctx.mono(x) for x in nums]
    ys = [ctx.mono(y) for y in dens]
    bv = ctx.mono(base)
    zv = ctx.mono(z)
    g = 1
    num_acc = 1
    den_acc = 1
    shift = 1  # base^(k-1)
    for k in range(1, length + 1):
        a = zv
        for x in xs:
            a = a * (1 - x * shift) % p
        b = (1 - shift * bv) % p
        for y in ys:
            b = b * (1 - y * shift) % p
        if a == 0:
            break
        num_acc = num_acc * a % p
        g = (g * b + num_acc) % p
        den_acc = den_acc * b % p
        shift = shift * bv % p
    return g * ctx.inv(den_acc) % p


def phi_mod(spec: PhiSpec, n: int, pt: FieldPoint | ModContext, k: int = 0) -> int:
    ctx = pt if isinstance(pt, ModContext) else ModContext(pt)
    nums, dens, base, z, length = spec.instantiate(n, k)
    if length < 0:
        return 0
    return phi_values_mod(ctx, nums, dens, base, z, length)


def phi_term_values_mod(ctx: ModContext, nums, dens, base, z, k: int) -> int:
    if k < 0:
        return 0
    p = ctx.p
    t = pow(ctx.mono(z), k, p)
    for x in nums:
        t = t * poch_mod(ctx, x, base, k) % p
    d = poch_mod(ctx, base, base, k)
    for y in dens:
        d = d * poch_mod(ctx, y, base, k) % p
    return t * ctx.inv(d) % p


def q_catalan_mod(ctx: ModContext, m: int, negate_q: bool = False) -> int:
    x = (1 if negate_q else -1, pack(-1, 0, 0))
    base = (1, pack(2, 0, 0))
    head = ctx.mono((1, pack(2 * m, 0, 0)))
    return head * poch_mod(ctx, x, base, m) % ctx.p * ctx.inv(poch_mod(ctx, base, base, m)) % ctx.p


def denominator_divides_q2_pochhammer(m: int) -> bool:
    """Structural check: q_catalan(m) * (q^2; q^2)_m is a Laurent polynomial."""
    value = q_catalan_factored(m) * poch_factored((1, pack(2, 0, 0)), (1, pack(2, 0, 0)), m)
    return all(e > 0 for e in value.atoms.values())


__all__ = [
    "AffineInt", "AffineParam", "PhiSpec", "ModContext",
    "ZeroFactorInNegativeLength", "VanishingDenominatorFactor",
    "pochhammer", "pochhammer_multi", "phi", "phi_term", "q_catalan", "catalan",
    "poch_factored", "phi_factored", "phi_term_factored", "q_catalan_factored",
    "poch_mod", "phi_mod", "phi_values_mod", "phi_term_values_mod", "q_catalan_mod",
    "step_base",
]
