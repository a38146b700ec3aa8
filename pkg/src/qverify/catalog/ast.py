"""Expression trees for the identity DSL, their canonical text, and rewrites."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Union

from ..qseries import AffineInt, AffineParam, affine_text, step_base


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Mono:
    param: AffineParam


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exp: AffineInt


@dataclass(frozen=True)
class Poch:
    x: AffineParam
    base: AffineParam
    length: AffineInt


@dataclass(frozen=True)
class Phi:
    nums: tuple[AffineParam, ...]
    dens: tuple[AffineParam, ...]
    base: AffineParam
    z: AffineParam
    length: AffineInt


@dataclass(frozen=True)
class PhiTerm:
    """The single summand of index ``index`` (zero for negative index)."""

    nums: tuple[AffineParam, ...]
    dens: tuple[AffineParam, ...]
    base: AffineParam
    z: AffineParam
    index: AffineInt


@dataclass(frozen=True)
class QCat:
    index: AffineInt
    negq: bool = False


@dataclass(frozen=True)
class Cat:
    index: AffineInt


@dataclass(frozen=True)
class Sum:
    """sum over var = lo..hi of body; inside body the ``k`` slot is var."""

    var: str
    lo: AffineInt
    hi: AffineInt
    body: "Node"


Node = Union[Const, Mono, BinOp, Pow, Poch, Phi, PhiTerm, QCat, Cat, Sum]

IDENTITY = "identity"
FAMILY = "family"
INTEGER = "integer"


@dataclass(frozen=True)
class IdentitySpec:
    id: str
    lhs: Node
    rhs: Node
    n_min: int
    kind: str = IDENTITY
    notes: str = field(default="", compare=False)


@dataclass(frozen=True)
class CertificateSpec:
    id: str
    f: Node
    h: Node
    boundary: bool = False
    target: Node | None = None
    notes: str = field(default="", compare=False)
    n_min: int = 0


@dataclass(frozen=True)
class RelationSpec:
    """term(n,k) - shifted(n,k) == multiplier(n) * lowered(n,k)."""

    id: str
    term: Node
    shifted: Node
    multiplier: Node
    lowered: Node
    notes: str = field(default="", compare=False)
    n_min: int = 2


SubstMap = tuple[tuple[str, AffineParam], ...]


@dataclass(frozen=True)
class InductionSpec:
    id: str
    identity: str
    relation: str
    step: int
    shift: SubstMap
    target: SubstMap
    notes: str = field(default="", compare=False)
    n_min: int = 2


@dataclass(frozen=True)
class TransportSpec:
    id: str
    source: str
    dest: str
    subst: SubstMap
    notes: str = field(default="", compare=False)
    n_min: int = 0


Spec = Union[IdentitySpec, CertificateSpec, RelationSpec, InductionSpec, TransportSpec]


def spec_kind(spec: Spec) -> str:
    if isinstance(spec, IdentitySpec):
        return spec.kind
    return {
        CertificateSpec: "certificate",
        RelationSpec: "relation",
        InductionSpec: "induction",
        TransportSpec: "transport",
    }[type(spec)]


# -- canonical text ------------------------------------------------------

def _exp_text(x: AffineInt, k_name: str) -> str:
    if x.is_const() and x.c0 >= 0:
        return str(x.c0)
    return f"({affine_text(x, k_name)})"


def param_text(p: AffineParam, k_name: str = "k") -> str:
    parts = []
    for name, e in (("q", p.eq), ("a", p.ea), ("b", p.eb)):
        if e == AffineInt(0):
            continue
        parts.append(name if e == AffineInt(1) else f"{name}^{_exp_text(e, k_name)}")
    body = "*".join(parts) or "q^0"
    if p.sign == AffineInt(0):
        return body
    if p.sign == AffineInt(1):
        return f"(-{body})"
    return f"((-1)^({affine_text(p.sign, k_name)})*{body})"


def _const_text(c: Fraction) -> str:
    if c.denominator == 1 and c >= 0:
        return str(c.numerator)
    return f"({c.numerator}/{c.denominator})" if c.denominator != 1 else f"({c.numerator})"


def _step_text(base: AffineParam, k_name: str) -> str:
    if base.sign == AffineInt(0) and base.ea == AffineInt(0) and base.eb == AffineInt(0) and base.eq.is_const():
        return str(base.eq.c0)
    return param_text(base, k_name)


def _list_text(ps, k_name) -> str:
    return ", ".join(param_text(p, k_name) for p in ps)


def to_text(node: Node, k_name: str = "k") -> str:
    if isinstance(node, Const):
        return _const_text(node.value)
    if isinstance(node, Mono):
        text = param_text(node.param, k_name)
        # a*b as an operand of / must stay grouped
        return f"({text})" if "*" in text and not text.startswith("(") else text
    if isinstance(node, BinOp):
        return f"({to_text(node.left, k_name)} {node.op} {to_text(node.right, k_name)})"
    if isinstance(node, Pow):
        return f"{to_text(node.base, k_name)}^{_exp_text(node.exp, k_name)}"
    if isinstance(node, Poch):
        return (f"poch({param_text(node.x, k_name)}; {_step_text(node.base, k_name)}; "
                f"{affine_text(node.length, k_name)})")
    if isinstance(node, (Phi, PhiTerm)):
        head = "phi" if isinstance(node, Phi) else "phiterm"
        last = node.length if isinstance(node, Phi) else node.index
        return (f"{head}([{_list_text(node.nums, k_name)}]; [{_list_text(node.dens, k_name)}]; "
                f"{_step_text(node.base, k_name)}; {param_text(node.z, k_name)}; {affine_text(last, k_name)})")
    if isinstance(node, QCat):
        return f"qcat({affine_text(node.index, k_name)}{', negq' if node.negq else ''})"
    if isinstance(node, Cat):
        return f"cat({affine_text(node.index, k_name)})"
    if isinstance(node, Sum):
        return (f"sum({node.var}, {affine_text(node.lo, k_name)}, {affine_text(node.hi, k_name)}; "
                f"{to_text(node.body, node.var)})")
    raise TypeError(f"unknown node {node!r}")


def _subst_text(m: SubstMap) -> str:
    return "[" + ", ".join(f"{v} -> {param_text(p)}" for v, p in m) + "]"


def spec_to_text(spec: Spec) -> str:
    if isinstance(spec, IdentitySpec):
        word = "family" if spec.kind == FAMILY else "id"
        return f"{word} {spec.id} for n >= {spec.n_min} :\n    {to_text(spec.lhs)}\n    == {to_text(spec.rhs)} ;"
    if isinstance(spec, CertificateSpec):
        out = f"cert {spec.id} :\n    f = {to_text(spec.f)} ,\n    H = {to_text(spec.h)}"
        if spec.boundary:
            out += " ,\n    boundary"
        if spec.target is not None:
            out += f" ,\n    target = {to_text(spec.target)}"
        return out + " ;"
    if isinstance(spec, RelationSpec):
        return (f"rel {spec.id} :\n    {to_text(spec.term)}\n    - {to_text(spec.shifted)}\n"
                f"    == {to_text(spec.multiplier)} * {to_text(spec.lowered)} ;")
    if isinstance(spec, InductionSpec):
        return (f"induct {spec.id} : {spec.identity} by {spec.relation} , step {spec.step} ,"
                f" shift {_subst_text(spec.shift)} , target {_subst_text(spec.target)} ;")
    if isinstance(spec, TransportSpec):
        return f"transport {spec.id} : {spec.source} -> {spec.dest} by {_subst_text(spec.subst)} ;"
    raise TypeError(f"unknown spec {spec!r}")


# -- rewrites --------------------------------------------------------------

def map_node(node: Node, on_param: Callable[[AffineParam], AffineParam],
             on_affine: Callable[[AffineInt], AffineInt], on_qcat=None) -> Node:
    """Rebuild ``node`` with every parameter and affine integer mapped."""

    def go(x: Node) -> Node:
        if isinstance(x, Const):
            return x
        if isinstance(x, Mono):
            return Mono(on_param(x.param))
        if isinstance(x, BinOp):
            return BinOp(x.op, go(x.left), go(x.right))
        if isinstance(x, Pow):
            return Pow(go(x.base), on_affine(x.exp))
        if isinstance(x, Poch):
            return Poch(on_param(x.x), on_param(x.base), on_affine(x.length))
        if isinstance(x, Phi):
            return Phi(tuple(map(on_param, x.nums)), tuple(map(on_param, x.dens)),
                       on_param(x.base), on_param(x.z), on_affine(x.length))
        if isinstance(x, PhiTerm):
            return PhiTerm(tuple(map(on_param, x.nums)), tuple(map(on_param, x.dens)),
                           on_param(x.base), on_param(x.z), on_affine(x.index))
        if isinstance(x, QCat):
            if on_qcat is not None:
                return on_qcat(x, go)
            return QCat(on_affine(x.index), x.negq)
        if isinstance(x, Cat):
            return Cat(on_affine(x.index))
        if isinstance(x, Sum):
            return Sum(x.var, on_affine(x.lo), on_affine(x.hi), go(x.body))
        raise TypeError(f"unknown node {x!r}")

    return go(node)


def _map_param_affines(p: AffineParam, f: Callable[[AffineInt], AffineInt]) -> AffineParam:
    return AffineParam(f(p.sign), f(p.eq), f(p.ea), f(p.eb))


def shift_n(node: Node, d: int) -> Node:
    """Replace n by n + d throughout."""
    f = lambda x: x.shift_n(d)  # noqa: E731
    return map_node(node, lambda p: _map_param_affines(p, f), f)


def substitute_param(p: AffineParam, m: dict[str, AffineParam]) -> AffineParam:
    out = AffineParam(p.sign)
    for name, e in (("q", p.eq), ("a", p.ea), ("b", p.eb)):
        target = m.get(name)
        if target is None:
            target = AffineParam.of(1, **{name: 1})
        powered = target.power(e)
        if powered is None:
            raise ValueError("substitution targets must have constant exponents")
        out = out * powered
    return out


def qcat_definition(node: QCat) -> Node:
    """q^(2m) (-1/q; q^2)_m / (q^2; q^2)_m, or its image under q -> -q."""
    m = node.index
    x = AffineParam.of(1 if node.negq else -1, -1)
    head = Mono(AffineParam(AffineInt(), m.scale(2)))
    q2 = step_base(2)
    return BinOp("/", BinOp("*", head, Poch(x, q2, m)), Poch(q2, q2, m))


def substitute(node: Node, m: dict[str, AffineParam]) -> Node:
    q_target = m.get("q", AffineParam.of(1, 1))

    def on_qcat(x: QCat, go):
        if q_target == AffineParam.of(1, 1):
            return x
        if q_target == AffineParam.of(-1, 1):
            return QCat(x.index, not x.negq)
        return go(qcat_definition(x))

    return map_node(node, lambda p: substitute_param(p, m), lambda a: a, on_qcat)


def subst_dict(m: SubstMap) -> dict[str, AffineParam]:
    return dict(m)


def apply_subst(spec: IdentitySpec, m: SubstMap | dict[str, AffineParam]) -> IdentitySpec:
    """The identity obtained by substituting signed monomials for q, a, b."""
    d = dict(m)
    return replace(spec, lhs=substitute(spec.lhs, d), rhs=substitute(spec.rhs, d))


def contains_variables(node: Node) -> bool:
    if isinstance(node, (Mono, Poch, Phi, PhiTerm, QCat)):
        return True
    if isinstance(node, BinOp):
        return contains_variables(node.left) or contains_variables(node.right)
    if isinstance(node, Pow):
        return contains_variables(node.base)
    if isinstance(node, Sum):
        return contains_variables(node.body)
    return False


def phi_nodes(node: Node) -> list[Phi]:
    if isinstance(node, Phi):
        return [node]
    if isinstance(node, BinOp):
        return phi_nodes(node.left) + phi_nodes(node.right)
    if isinstance(node, Pow):
        return phi_nodes(node.base)
    if isinstance(node, Sum):
        return phi_nodes(node.body)
    return []
