"""Declarative catalog of identities, certificates, relations and transports."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from ..algebra import FactoredFraction, RatFunc
from .ast import (
    FAMILY, IDENTITY, INTEGER, CertificateSpec, IdentitySpec, InductionSpec, Node,
    RelationSpec, Spec, SubstMap, TransportSpec, apply_subst, phi_nodes, shift_n,
    spec_kind, spec_to_text, substitute, to_text,
)
from .evaluate import EXACT, SYMBOLIC, ModularBackend, evaluate
from .parser import DSLError, DSLSyntaxError, DuplicateSpec, NonAffineExponent, UnknownSymbol, parse, parse_expr


class InstantiationBelowRange(ValueError):
    pass


class UnknownSpec(KeyError):
    pass


# What each built-in entry encodes, in formula form.
ANCHORS = {
    "A1": "4phi3[q^-2n, a, b, q^(1-2n)/ab; q^(2-2n)/a, q^(2-2n)/b, abq; q^2, q^2]"
          " = q^-n (a,b,-q;q)_n (ab;q^2)_n / ((ab;q)_n (a,b;q^2)_n)",
    "C1": "sum_k C_{2k} C_{2n-2k} = 4^n C_n",
    "L1": "A1 at a = q^2: RHS q^-n (1-q^(n+1))(1-bq)(1-bq^2n) / ((1-q)(1-bq^n)(1-bq^(n+1)))",
    "CERT1": "f_k + f_{n-k} = H_k - H_{k+1}, H_{n+1} = -H_0, for the a = q^2 case of A1",
    "REL1": "F_k(n,a,b) - F_k(n,a,b/q^2) = alpha_n F_{k-1}(n-2,aq^2,b)",
    "IND1": "alpha_n^-1 (R(n,a,b) - R(n,a,b/q^2)) = R(n-2,aq^2,b) for the A1 right side R",
    "A2": "4phi3[q^-2n, a, b, q^(3-2n)/ab; q^(2-2n)/a, q^(4-2n)/b, abq; q^2, q^2]"
          " = ... (abq^(2n-2)(b-q^2)+abq^(n-1)(q-1)+q-b) / ...",
    "C2": "sum_k q^2k C_2k(1,-q) C_(2n-2k+1)(1,-q) = q^(2n+2)(1-q^(2n-1))(-q^2;q^2)_(n-1) C_n(1,-q)/(-q;q^2)_(n+1)",
    "L2": "A2 family at a = q^2: RHS (1-q^(n+1))(1-bq)(1-bq^(2n-2))(bq^2n(b-q^2)+bq^(n+1)(q-1)+q-b)/...",
    "CERT2": "f_k + f_{n-k} = H_k - H_{k+1} for the a = q^2 case of T3",
    "S1": "(q^(3-2n)/ab;q^2)_k/(q^(4-2n)/b;q^2)_k split into two (q^(1-2n)/ab;q^2)_k quotients",
    "D1": "A2 series = bq^(2n-2)(1-aq)/(1-abq^(2n-1)) T3 series + (1-bq^(2n-2))/(1-abq^(2n-1)) A1 series",
    "T3": "4phi3[q^-2n, a, b, q^(1-2n)/ab; q^(2-2n)/a, q^(4-2n)/b, abq; q^2, q^2] = two-term closed form",
    "REL2": "F_k(n,a,b) - F_k(n,a/q^2,b) = beta_n F_{k-1}(n-2,a,bq^2)",
    "IND2": "beta_n^-1 (R(n,a,b) - R(n,a/q^2,b)) = R(n-2,a,bq^2) for the T3 right side R",
    "V1": "A1 with (a,b,q) -> (1/a,1/b,1/q): argument q^4, RHS (a,b,-q;q)_n (ab;q^2)_n / ((ab;q)_n (a,b;q^2)_n)",
    "TR1": "A1 -> V1 under (a,b,q) -> (1/a,1/b,1/q)",
    "S2": "(q^(3-2n)/ab;q^2)_k = (1 - q^(1-2n+2k)/ab)/(1 - q^(1-2n)/ab) (q^(1-2n)/ab;q^2)_k",
    "V2": "4phi3[.., q^(3-2n)/ab; .., q^(2-2n)/b, abq; q^2, q^2]"
          " = (a,b,-q;q)_n (ab;q^2)_n / ((1-abq^(2n-1))(ab;q)_(n-1) (a,b;q^2)_n)",
    "V3": "A2 with b -> bq^2: RHS factor (abq^(2n+1)(b-1)+abq^n(q-1)+1-bq)",
    "TR3": "A2 -> V3 under b -> bq^2",
    "V4": "V3 with (a,b,q) -> (1/a,1/b,1/q): RHS factor (abq^2n(bq-1)+bq^n(1-q)+1-b)",
    "TR2": "V3 -> V4 under (a,b,q) -> (1/a,1/b,1/q)",
    "S3": "(aq^2;q^2)_k = (a;q^2)_k/(1-a) - a(a;q^2)_k q^2k/(1-a)",
    "V5": "4phi3[q^-2n, aq^2, bq^2, q^(1-2n)/ab; ..; q^2, q^2]"
          " = q^-n (aq,bq,-q;q)_n (abq^2;q^2)_n / ((1-abq^(2n+1))(abq^2;q)_(n-1)(a,b;q^2)_n)",
    "S4": "(q^-2n;q^2)_k/(q^2;q^2)_k = (q^(-2n-2);q^2)_k/(q^2;q^2)_k + q^(-2n-2)(q^-2n;q^2)_(k-1)/(q^2;q^2)_(k-1)",
    "D2": "4phi3 with q^(-1-2n)/ab split by the q^(-2n-2) shift into a series at n+1 plus a V5 series",
    "V6": "4phi3[q^-2n, a, b, q^(-1-2n)/ab; q^-2n/a, q^-2n/b, abq; q^2, q^2]"
          " = (aq,bq,-q;q)_n (abq^2;q^2)_n / ((abq;q)_n (aq^2,bq^2;q^2)_n)",
}


class Catalog:
    """Ordered, immutable collection of specs keyed by id."""

    def __init__(self, specs, anchors=None):
        self._specs: dict[str, Spec] = {}
        for s in specs:
            if s.id in self._specs:
                raise DuplicateSpec(f"duplicate spec id {s.id!r}")
            self._specs[s.id] = s
        self.anchors = dict(anchors or {})

    def __len__(self):
        return len(self._specs)

    def __iter__(self):
        return iter(self._specs.values())

    def __contains__(self, key):
        return key in self._specs

    def ids(self) -> list[str]:
        return list(self._specs)

    def lookup(self, key: str) -> Spec:
        try:
            return self._specs[key]
        except KeyError:
            raise UnknownSpec(key) from None

    __getitem__ = lookup

    def merged(self, other: Catalog) -> Catalog:
        return Catalog(list(self) + list(other), {**self.anchors, **other.anchors})

    def n_min(self, key: str) -> int:
        return spec_n_min(self.lookup(key), self)

    def to_text(self) -> str:
        return serialize(self)

    def __eq__(self, other):
        if not isinstance(other, Catalog):
            return NotImplemented
        return list(self) == list(other)


def spec_n_min(spec: Spec, catalog: Catalog | None = None) -> int:
    if isinstance(spec, TransportSpec) and catalog is not None:
        return max(catalog.n_min(spec.source), catalog.n_min(spec.dest))
    return spec.n_min


def serialize(catalog: Catalog) -> str:
    return "\n\n".join(spec_to_text(s) for s in catalog) + "\n"


def parse_catalog(text: str) -> Catalog:
    return Catalog(parse(text))


def builtin_source() -> str:
    return resources.files(__package__).joinpath("builtin.dsl").read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def builtin_catalog() -> Catalog:
    return Catalog(parse(builtin_source()), ANCHORS)


def _check_range(spec: IdentitySpec, n: int, k: int | None):
    if n < spec.n_min:
        raise InstantiationBelowRange(f"{spec.id} is stated for n >= {spec.n_min}, got n = {n}")
    if spec.kind == FAMILY:
        if k is None or not 0 <= k <= n:
            raise InstantiationBelowRange(f"{spec.id} needs 0 <= k <= n, got k = {k}")


def instantiate_factored(spec: IdentitySpec, n: int, k: int | None = None) -> tuple[FactoredFraction, FactoredFraction]:
    _check_range(spec, n, k)
    kk = k or 0
    return evaluate(spec.lhs, SYMBOLIC, n, kk), evaluate(spec.rhs, SYMBOLIC, n, kk)


def instantiate(spec: IdentitySpec, n: int, k: int | None = None) -> tuple[RatFunc, RatFunc]:
    """Both sides at ``n`` (and ``k`` for a family) as rational functions."""
    lhs, rhs = instantiate_factored(spec, n, k)
    return lhs.to_ratfunc(), rhs.to_ratfunc()


def instantiate_exact(spec: IdentitySpec, n: int):
    _check_range(spec, n, None)
    return evaluate(spec.lhs, EXACT, n), evaluate(spec.rhs, EXACT, n)


def instantiate_mod(spec: IdentitySpec, n: int, ctx, k: int | None = None) -> tuple[int, int]:
    _check_range(spec, n, k)
    backend = ModularBackend(ctx)
    kk = k or 0
    return evaluate(spec.lhs, backend, n, kk), evaluate(spec.rhs, backend, n, kk)


def terminates(spec: IdentitySpec, n: int, k: int = 0) -> bool:
    """Every phi series in ``spec`` has a numerator parameter base^(-N)."""
    from ..qseries import PhiSpec
    for node in phi_nodes(spec.lhs) + phi_nodes(spec.rhs):
        ps = PhiSpec(node.nums, node.dens, node.base, node.z, node.length)
        if not ps.terminates(n, k):
            return False
    return True


__all__ = [
    "ANCHORS", "Catalog", "CertificateSpec", "DSLError", "DSLSyntaxError", "DuplicateSpec",
    "FAMILY", "IDENTITY", "INTEGER", "IdentitySpec", "InductionSpec", "InstantiationBelowRange",
    "Node", "NonAffineExponent", "RelationSpec", "Spec", "SubstMap", "TransportSpec",
    "UnknownSpec", "UnknownSymbol", "apply_subst", "builtin_catalog", "builtin_source",
    "instantiate", "instantiate_exact", "instantiate_factored", "instantiate_mod",
    "parse", "parse_catalog", "parse_expr", "serialize", "shift_n", "spec_kind",
    "spec_n_min", "spec_to_text", "substitute", "terminates", "to_text",
]
