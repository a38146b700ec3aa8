"""Symbolic and modular checks for every catalog item kind.

Each check is reduced to a list of equations ``lhs == rhs`` whose sides are
evaluated by a backend. The symbolic backend decides equality exactly; the
modular backend compares images at random points of F_p^3.
"""

from __future__ import annotations

import hashlib
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Callable, Iterable

from .algebra import (
    AlgebraError, ExpVec, FieldPoint, Pole, cross_difference, poly_to_text,
)
from .catalog import (
    FAMILY, INTEGER, Catalog, CertificateSpec, IdentitySpec, InductionSpec,
    RelationSpec, Spec, TransportSpec, apply_subst, builtin_catalog, shift_n,
    spec_n_min, substitute,
)
from .catalog.ast import BinOp, Const, Mono, Node, Poch
from .catalog.evaluate import EXACT, SYMBOLIC, ModularBackend, SymbolicBackend, evaluate
from .qseries import AffineInt, AffineParam, ModContext, QSeriesError

MERSENNE_61 = (1 << 61) - 1
WITNESS_LIMIT = 2000

SYMBOLIC_MODE = "symbolic"
MODULAR_MODE = "modular"
MODES = (SYMBOLIC_MODE, MODULAR_MODE)

PASS, FAIL, ERROR, SKIPPED = "pass", "fail", "error", "skipped"


class PoleRetriesExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class VerifyResult:
    id: str
    n: int
    k: int | None
    mode: str
    status: str
    witness: str | None = None
    ms: int | None = None

    def sort_key(self):
        return (self.id, self.n, -1 if self.k is None else self.k, self.mode)

    def to_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        if not timing:
            d["ms"] = None
        return d


@dataclass(frozen=True)
class ModularConfig:
    prime: int = MERSENNE_61
    trials: int = 20
    seed: int = 42
    max_retries: int = 100

    def __post_init__(self):
        if self.prime < 2 ** 31 or self.prime % 2 == 0 or not _probably_prime(self.prime):
            raise ValueError(f"prime must be an odd prime >= 2^31, got {self.prime}")
        if self.trials < 1 or self.max_retries < 1:
            raise ValueError("trials and max_retries must be positive")


def _probably_prime(p: int) -> bool:
    if p < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if p % small == 0:
            return p == small
    d, r = p - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for base in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(base, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(r - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


# -- equations ---------------------------------------------------------------

Side = Callable[[object], object]


@dataclass(frozen=True)
class Equation:
    label: str
    lhs: Side
    rhs: Side


def _at(node: Node, n: int, k: int = 0) -> Side:
    return lambda be: evaluate(node, be, n, k)


def _sum(sides: Iterable[Side]) -> Side:
    sides = list(sides)

    def go(be):
        total = be.zero()
        for s in sides:
            total = be.add(total, s(be))
        return total
    return go


def _combine(op: str, x: Side, y: Side) -> Side:
    fn = {"+": "add", "-": "sub", "*": "mul", "/": "div"}[op]
    return lambda be: getattr(be, fn)(x(be), y(be))


def _half(x: Side) -> Side:
    return lambda be: be.div(x(be), be.const(2))


def _subst_mapping(m) -> dict[str, tuple[int, ExpVec]]:
    out = {}
    for var, p in m:
        if not all(x.is_const() for x in (p.sign, p.eq, p.ea, p.eb)):
            raise ValueError("substitution targets must be constant monomials")
        sign, key = p(0, 0)
        out[var] = (sign, ExpVec.from_key(key))
    return out


def identity_equations(spec: IdentitySpec, n: int) -> list[Equation]:
    if spec.kind == FAMILY:
        return [Equation(f"k={k}", _at(spec.lhs, n, k), _at(spec.rhs, n, k)) for k in range(n + 1)]
    return [Equation("", _at(spec.lhs, n), _at(spec.rhs, n))]


def certificate_equations(cert: CertificateSpec, n: int) -> list[Equation]:
    f = lambda k: _at(cert.f, n, k)  # noqa: E731
    h = lambda k: _at(cert.h, n, k)  # noqa: E731
    eqs = [Equation(f"pair k={k}", _combine("+", f(k), f(n - k)), _combine("-", h(k), h(k + 1)))
           for k in range(n + 1)]
    if cert.boundary:
        eqs.append(Equation("boundary", h(n + 1), lambda be: be.sub(be.zero(), h(0)(be))))
    total = _sum(f(k) for k in range(n + 1))
    telescoped = _half(_combine("-", h(0), h(n + 1)))
    eqs.append(Equation("sum", total, telescoped))
    if cert.target is not None:
        eqs.append(Equation("target", telescoped, _at(cert.target, n)))
    return eqs


def relation_equations(rel: RelationSpec, n: int) -> list[Equation]:
    mult = _at(rel.multiplier, n)
    eqs = [Equation(f"k={k}", _combine("-", _at(rel.term, n, k), _at(rel.shifted, n, k)),
                    _combine("*", mult, _at(rel.lowered, n, k)))
           for k in range(n + 1)]
    ks = range(n + 1)
    eqs.append(Equation(
        "summed",
        _combine("-", _sum(_at(rel.term, n, k) for k in ks), _sum(_at(rel.shifted, n, k) for k in ks)),
        _combine("*", mult, _sum(_at(rel.lowered, n, k) for k in ks)),
    ))
    return eqs


def induction_nodes(ind: InductionSpec, catalog: Catalog) -> tuple[Node, Node, Node, Node]:
    """(R, R shifted, multiplier, R at the target parameters with n -> n - step)."""
    ident = catalog.lookup(ind.identity)
    rel = catalog.lookup(ind.relation)
    if not isinstance(ident, IdentitySpec) or not isinstance(rel, RelationSpec):
        raise TypeError(f"{ind.id} must reference an identity and a relation")
    r = ident.rhs
    return r, substitute(r, dict(ind.shift)), rel.multiplier, shift_n(substitute(r, dict(ind.target)), -ind.step)


def induction_equations(ind: InductionSpec, n: int, catalog: Catalog) -> list[Equation]:
    # The cleared form M*T == R - R' also covers n where the multiplier vanishes.
    r, r_shift, mult, target = induction_nodes(ind, catalog)
    return [Equation("", _combine("-", _at(r, n), _at(r_shift, n)),
                     _combine("*", _at(mult, n), _at(target, n)))]


def transport_equations(tr: TransportSpec, n: int, catalog: Catalog) -> list[Equation]:
    src = catalog.lookup(tr.source)
    dst = catalog.lookup(tr.dest)
    if not isinstance(src, IdentitySpec) or not isinstance(dst, IdentitySpec):
        raise TypeError(f"{tr.id} must reference two identities")
    mapping = _subst_mapping(tr.subst)
    moved = apply_subst(src, tr.subst)

    def image(node: Node, moved_node: Node, k: int) -> Side:
        def go(be):
            if isinstance(be, SymbolicBackend):
                return evaluate(node, be, n, k).substitute(mapping)
            return evaluate(moved_node, be, n, k)
        return go

    ks = range(n + 1) if src.kind == FAMILY else [0]
    eqs = []
    for k in ks:
        tag = f"k={k} " if src.kind == FAMILY else ""
        eqs.append(Equation(tag + "lhs", image(src.lhs, moved.lhs, k), _at(dst.lhs, n, k)))
        eqs.append(Equation(tag + "rhs", image(src.rhs, moved.rhs, k), _at(dst.rhs, n, k)))
    return eqs


def equations_for(spec: Spec, n: int, catalog: Catalog | None = None) -> list[Equation]:
    catalog = catalog or builtin_catalog()
    if isinstance(spec, IdentitySpec):
        return identity_equations(spec, n)
    if isinstance(spec, CertificateSpec):
        return certificate_equations(spec, n)
    if isinstance(spec, RelationSpec):
        return relation_equations(spec, n)
    if isinstance(spec, InductionSpec):
        return induction_equations(spec, n, catalog)
    if isinstance(spec, TransportSpec):
        return transport_equations(spec, n, catalog)
    raise TypeError(f"unknown spec {spec!r}")


# -- oracles -----------------------------------------------------------------

def _truncate(text: str) -> str:
    return text if len(text) <= WITNESS_LIMIT else text[:WITNESS_LIMIT]


def _symbolic_witness(label: str, lhs, rhs) -> str:
    if not hasattr(lhs, "to_ratfunc"):
        text = f"{lhs} != {rhs}"
    else:
        text = poly_to_text(cross_difference(lhs.to_ratfunc(), rhs.to_ratfunc()))
    return _truncate(f"{label}: {text}" if label else text)


def _is_integer_identity(spec: Spec) -> bool:
    return isinstance(spec, IdentitySpec) and spec.kind == INTEGER


def _run_symbolic(spec: Spec, eqs: list[Equation]) -> tuple[str, str | None]:
    be = EXACT if _is_integer_identity(spec) else SYMBOLIC
    for eq in eqs:
        lhs, rhs = eq.lhs(be), eq.rhs(be)
        if be is EXACT:
            same = lhs == rhs
        else:
            same = (lhs - rhs).is_zero()
        if not same:
            return FAIL, _symbolic_witness(eq.label, lhs, rhs)
    return PASS, None


def field_point(cfg: ModularConfig, spec_id: str, n: int, trial: int, attempt: int) -> FieldPoint:
    """Deterministic point drawn from (seed, id, n, trial, attempt)."""
    digest = hashlib.sha256(f"{cfg.seed}|{spec_id}|{n}|{trial}|{attempt}".encode()).digest()
    rng = random.Random(int.from_bytes(digest, "big"))
    p = cfg.prime
    return FieldPoint(p, rng.randrange(1, p), rng.randrange(1, p), rng.randrange(1, p))


def _run_modular(spec: Spec, n: int, eqs: list[Equation], cfg: ModularConfig) -> tuple[str, str | None]:
    for trial in range(cfg.trials):
        for attempt in range(cfg.max_retries):
            pt = field_point(cfg, spec.id, n, trial, attempt)
            be = ModularBackend(ModContext(pt))
            try:
                for eq in eqs:
                    lhs, rhs = eq.lhs(be), eq.rhs(be)
                    if lhs != rhs:
                        where = f"{eq.label}: " if eq.label else ""
                        return FAIL, (f"{where}p={pt.p} q={pt.q} a={pt.a} b={pt.b} "
                                      f"lhs={lhs} rhs={rhs}")
            except Pole:
                continue
            break
        else:
            raise PoleRetriesExhausted(
                f"{spec.id} at n={n}: {cfg.max_retries} consecutive points hit a pole")
    return PASS, None


def run_check(spec: Spec, n: int, mode: str = SYMBOLIC_MODE, cfg: ModularConfig | None = None,
              catalog: Catalog | None = None) -> VerifyResult:
    """Run the check appropriate for ``spec`` at ``n`` in the given mode."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    catalog = catalog or builtin_catalog()
    cfg = cfg or ModularConfig()
    start = time.perf_counter()
    n_min = spec_n_min(spec, catalog)
    if n < n_min:
        status, witness = SKIPPED, f"n={n} is below n_min={n_min}"
    else:
        try:
            eqs = equations_for(spec, n, catalog)
            if mode == SYMBOLIC_MODE:
                status, witness = _run_symbolic(spec, eqs)
            else:
                status, witness = _run_modular(spec, n, eqs, cfg)
        except (AlgebraError, QSeriesError, PoleRetriesExhausted, ValueError, TypeError,
                KeyError, ZeroDivisionError) as exc:
            status, witness = ERROR, _truncate(f"{type(exc).__name__}: {exc}")
    ms = int(round((time.perf_counter() - start) * 1000))
    return VerifyResult(spec.id, n, None, mode, status, witness, ms)


def verify_symbolic(spec: IdentitySpec, n: int, catalog: Catalog | None = None) -> VerifyResult:
    return run_check(spec, n, SYMBOLIC_MODE, catalog=catalog)


def verify_modular(spec: IdentitySpec, n: int, cfg: ModularConfig | None = None,
                   catalog: Catalog | None = None) -> VerifyResult:
    return run_check(spec, n, MODULAR_MODE, cfg, catalog)


def check_certificate(cert: CertificateSpec, n: int, mode: str = SYMBOLIC_MODE,
                      cfg: ModularConfig | None = None) -> VerifyResult:
    return run_check(cert, n, mode, cfg)


def check_relation(rel: RelationSpec, n: int, mode: str = SYMBOLIC_MODE,
                   cfg: ModularConfig | None = None) -> VerifyResult:
    return run_check(rel, n, mode, cfg)


def check_induction(ind: InductionSpec, n: int, catalog: Catalog | None = None,
                    mode: str = SYMBOLIC_MODE, cfg: ModularConfig | None = None) -> VerifyResult:
    return run_check(ind, n, mode, cfg, catalog)


def check_transport(tr: TransportSpec, n: int, catalog: Catalog | None = None,
                    mode: str = SYMBOLIC_MODE, cfg: ModularConfig | None = None) -> VerifyResult:
    return run_check(tr, n, mode, cfg, catalog)


# -- suites -------------------------------------------------------------------

@dataclass(frozen=True)
class Selection:
    id: str
    lo: int
    hi: int
    mode: str = SYMBOLIC_MODE


def _task(args) -> VerifyResult:
    spec, n, mode, cfg, catalog = args
    return run_check(spec, n, mode, cfg, catalog)


def default_jobs() -> int:
    return os.cpu_count() or 1


def run_suite(selection: Iterable[Selection], cfg: ModularConfig | None = None,
              catalog: Catalog | None = None, jobs: int = 1,
              on_result: Callable[[VerifyResult], None] | None = None) -> list[VerifyResult]:
    """Run every (id, n, mode) in ``selection``; results come back sorted."""
    catalog = catalog or builtin_catalog()
    cfg = cfg or ModularConfig()
    tasks = []
    for sel in selection:
        spec = catalog.lookup(sel.id)
        for n in range(sel.lo, sel.hi + 1):
            tasks.append((spec, n, sel.mode, cfg, catalog))
    results: list[VerifyResult] = []
    if jobs <= 1 or len(tasks) <= 1:
        for t in tasks:
            r = _task(t)
            results.append(r)
            if on_result:
                on_result(r)
    else:
        # Largest n first so the long tasks start early.
        order = sorted(range(len(tasks)), key=lambda i: -tasks[i][1])
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for r in pool.map(_task, [tasks[i] for i in order]):
                results.append(r)
                if on_result:
                    on_result(r)
    return sorted(results, key=VerifyResult.sort_key)


def aggregate(results: Iterable[VerifyResult]) -> str:
    return FAIL if any(r.status in (FAIL, ERROR) for r in results) else PASS


# -- mutations -----------------------------------------------------------------

def _first_rewrite(node: Node, pick: Callable[[Node], Node | None]) -> Node:
    """Rewrite the first node (pre-order) for which ``pick`` returns a replacement."""
    done = False

    def go(x: Node) -> Node:
        nonlocal done
        if done:
            return x
        new = pick(x)
        if new is not None:
            done = True
            return new
        if isinstance(x, BinOp):
            return BinOp(x.op, go(x.left), go(x.right))
        return x

    out = go(node)
    if not done:
        raise ValueError("no node to mutate")
    return out


def mutate_scale(spec: IdentitySpec, factor: Node) -> IdentitySpec:
    return replace(spec, id=spec.id + "~scale", rhs=BinOp("*", spec.rhs, factor))


def mutate_sign(spec: IdentitySpec) -> IdentitySpec:
    return replace(spec, id=spec.id + "~sign", rhs=BinOp("*", Const(-1), spec.rhs))


def mutate_poch_length(spec: IdentitySpec, delta: int = 1) -> IdentitySpec:
    def pick(x):
        if isinstance(x, Poch):
            return Poch(x.x, x.base, x.length + AffineInt(delta))
        return None
    return replace(spec, id=spec.id + "~len", rhs=_first_rewrite(spec.rhs, pick))


def mutate_poch_argument(spec: IdentitySpec, var: str = "q", delta: int = 1) -> IdentitySpec:
    bump = AffineParam.of(1, **{var: delta})

    def pick(x):
        if isinstance(x, Poch):
            return Poch(x.x * bump, x.base, x.length)
        return None
    return replace(spec, id=spec.id + f"~arg{var}", rhs=_first_rewrite(spec.rhs, pick))


def mutate_monomial_sign(spec: IdentitySpec) -> IdentitySpec:
    """Flip the sign of the first monomial argument of a Pochhammer factor."""
    def pick(x):
        if isinstance(x, Poch):
            return Poch(x.x * AffineParam.of(-1), x.base, x.length)
        return None
    return replace(spec, id=spec.id + "~msign", rhs=_first_rewrite(spec.rhs, pick))


def standard_mutants(spec: IdentitySpec) -> list[IdentitySpec]:
    """Small perturbations of the right side; ones that do not apply are skipped."""
    q = Mono(AffineParam.of(1, 1))
    makers = [
        lambda: mutate_scale(spec, q),
        lambda: mutate_sign(spec),
        lambda: mutate_poch_length(spec),
        lambda: mutate_poch_argument(spec, "q"),
        lambda: mutate_poch_argument(spec, "a"),
        lambda: mutate_monomial_sign(spec),
    ]
    out = []
    for make in makers:
        try:
            out.append(make())
        except ValueError:
            pass
    return out


__all__ = [
    "MERSENNE_61", "MODES", "SYMBOLIC_MODE", "MODULAR_MODE", "PASS", "FAIL", "ERROR", "SKIPPED",
    "Equation", "ModularConfig", "PoleRetriesExhausted", "Selection", "VerifyResult",
    "aggregate", "check_certificate", "check_induction", "check_relation", "check_transport",
    "default_jobs", "equations_for", "field_point", "induction_nodes",
    "mutate_monomial_sign", "mutate_poch_argument", "mutate_poch_length", "mutate_scale",
    "mutate_sign", "run_check", "run_suite", "standard_mutants", "verify_modular", "verify_symbolic",
]
