from __future__ import annotations

import random
from fractions import Fraction

import pytest

from qverify.algebra import LaurentPoly, RatFunc

SEED = 20240517


def random_poly(rng: random.Random, terms: int = 4, spread: int = 3, rational: bool = False) -> LaurentPoly:
    out = LaurentPoly.const(0)
    for _ in range(rng.randint(0, terms)):
        c = rng.randint(-5, 5)
        if rational and rng.random() < 0.3:
            c = Fraction(c, rng.randint(1, 4))
        e = [rng.randint(-spread, spread) for _ in range(3)]
        out = out + LaurentPoly.monomial(c, *e)
    return out


def random_nonzero_poly(rng: random.Random, **kw) -> LaurentPoly:
    while True:
        p = random_poly(rng, **kw)
        if not p.is_zero():
            return p


def random_ratfunc(rng: random.Random, **kw) -> RatFunc:
    return RatFunc(random_poly(rng, **kw), random_nonzero_poly(rng, **kw))


@pytest.fixture
def rng():
    return random.Random(SEED)


# Acceptance criteria record one line each here; printed after the run.
ACCEPTANCE: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(ACCEPTANCE[number])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
