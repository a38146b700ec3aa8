"""Evaluate expression trees at concrete (n, k) in one of three backends."""

from __future__ import annotations

from fractions import Fraction

from ..algebra import FactoredFraction, LaurentPoly, ZERO, coeff_mod
from ..qseries import (
    ModContext,
    catalan,
    mono_poly,
    phi_term_values_factored,
    phi_term_values_mod,
    phi_values_factored,
    phi_values_mod,
    poch_factored,
    poch_mod,
    q_catalan_factored,
    q_catalan_mod,
)
from .ast import BinOp, Cat, Const, Mono, Node, Phi, PhiTerm, Poch, Pow, QCat, Sum


class SymbolicBackend:
    """Exact values as :class:`FactoredFraction`."""

    def const(self, c: Fraction):
        return FactoredFraction(LaurentPoly.const(c))

    def mono(self, m):
        return FactoredFraction(mono_poly(m))

    def zero(self):
        return FactoredFraction(ZERO)

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def mul(self, x, y):
        return x * y

    def div(self, x, y):
        return x / y

    def pow(self, x, e: int):
        return x ** e

    def poch(self, x, base, m):
        return poch_factored(x, base, m)

    def phi(self, nums, dens, base, z, length):
        if length < 0:
            return self.zero()
        return phi_values_factored(nums, dens, base, z, length)

    def phiterm(self, nums, dens, base, z, k):
        return phi_term_values_factored(nums, dens, base, z, k)

    def qcat(self, m, negq):
        return q_catalan_factored(m, negq)

    def cat(self, m):
        return self.const(Fraction(catalan(m)))


class ModularBackend:
    """Images in F_p at a fixed field point; no symbolic objects are built."""

    def __init__(self, ctx: ModContext):
        self.ctx = ctx
        self.p = ctx.p

    def const(self, c: Fraction):
        return coeff_mod(c, self.p)

    def mono(self, m):
        return self.ctx.mono(m)

    def zero(self):
        return 0

    def add(self, x, y):
        return (x + y) % self.p

    def sub(self, x, y):
        return (x - y) % self.p

    def mul(self, x, y):
        return x * y % self.p

    def div(self, x, y):
        return x * self.ctx.inv(y) % self.p

    def pow(self, x, e: int):
        if e < 0:
            return pow(self.ctx.inv(x), -e, self.p)
        return pow(x, e, self.p)

    def poch(self, x, base, m):
        return poch_mod(self.ctx, x, base, m)

    def phi(self, nums, dens, base, z, length):
        if length < 0:
            return 0
        return phi_values_mod(self.ctx, nums, dens, base, z, length)

    def phiterm(self, nums, dens, base, z, k):
        return phi_term_values_mod(self.ctx, nums, dens, base, z, k)

    def qcat(self, m, negq):
        return q_catalan_mod(self.ctx, m, negq)

    def cat(self, m):
        return catalan(m) % self.p


class ExactBackend:
    """Plain rationals, for identities free of q, a, b."""

    def const(self, c: Fraction):
        return Fraction(c)

    def mono(self, m):
        if m[1] != 0:
            raise TypeError("variables are not allowed in an integer identity")
        return Fraction(m[0])

    def zero(self):
        return Fraction(0)

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def mul(self, x, y):
        return x * y

    def div(self, x, y):
        return x / y

    def pow(self, x, e: int):
        return x ** e

    def _no_series(self, *args):
        raise TypeError("q-series are not allowed in an integer identity")

    poch = phi = phiterm = qcat = _no_series

    def cat(self, m):
        return Fraction(catalan(m))


def evaluate(node: Node, backend, n: int, k: int = 0):
    """Value of ``node`` with the index slots bound to ``n`` and ``k``."""

    def go(x: Node, k: int):
        if isinstance(x, Const):
            return backend.const(x.value)
        if isinstance(x, Mono):
            return backend.mono(x.param(n, k))
        if isinstance(x, BinOp):
            left = go(x.left, k)
            right = go(x.right, k)
            if x.op == "+":
                return backend.add(left, right)
            if x.op == "-":
                return backend.sub(left, right)
            if x.op == "*":
                return backend.mul(left, right)
            return backend.div(left, right)
        if isinstance(x, Pow):
            return backend.pow(go(x.base, k), x.exp(n, k))
        if isinstance(x, Poch):
            return backend.poch(x.x(n, k), x.base(n, k), x.length(n, k))
        if isinstance(x, Phi):
            return backend.phi([p(n, k) for p in x.nums], [p(n, k) for p in x.dens],
                               x.base(n, k), x.z(n, k), x.length(n, k))
        if isinstance(x, PhiTerm):
            return backend.phiterm([p(n, k) for p in x.nums], [p(n, k) for p in x.dens],
                                   x.base(n, k), x.z(n, k), x.index(n, k))
        if isinstance(x, QCat):
            m = x.index(n, k)
            if m < 0:
                raise ValueError(f"q-Catalan index {m} is negative")
            return backend.qcat(m, x.negq)
        if isinstance(x, Cat):
            m = x.index(n, k)
            if m < 0:
                raise ValueError(f"Catalan index {m} is negative")
            return backend.cat(m)
        if isinstance(x, Sum):
            total = backend.zero()
            for i in range(x.lo(n, k), x.hi(n, k) + 1):
                total = backend.add(total, go(x.body, i))
            return total
        raise TypeError(f"unknown node {x!r}")

    return go(node, k)


SYMBOLIC = SymbolicBackend()
EXACT = ExactBackend()

__all__ = ["SymbolicBackend", "ModularBackend", "ExactBackend", "evaluate", "SYMBOLIC", "EXACT"]
