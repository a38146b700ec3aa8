from __future__ import annotations

from dataclasses import replace

import pytest

from qverify.algebra import ONE, ExpVec, LaurentPoly, RatFunc, rf_equal
from qverify.catalog import (
    FAMILY, IDENTITY, INTEGER, CertificateSpec, DSLSyntaxError, DuplicateSpec, IdentitySpec,
    InductionSpec, InstantiationBelowRange, NonAffineExponent, RelationSpec, TransportSpec,
    UnknownSpec, UnknownSymbol, apply_subst, builtin_catalog, builtin_source, instantiate,
    instantiate_exact, parse, parse_catalog, parse_expr, serialize, terminates,
)
from qverify.catalog.ast import Mono, Phi, Poch, to_text
from qverify.qseries import AffineInt, AffineParam

q = LaurentPoly.var("q")

EXPECTED_IDS = [
    "A1", "L1", "A2", "L2", "T3", "V1", "V2", "V3", "V4", "V5", "V6", "D1", "D2",
    "S1", "S2", "S3", "S4", "C1", "C2", "CERT1", "CERT2", "REL1", "REL2", "IND1", "IND2",
    "TR1", "TR2", "TR3",
]


# -- parsing ---------------------------------------------------------------------------

def test_parse_smoke():
    specs = parse("id A1x for n>=0 : phi([q^(-2*n), a]; [b*q]; 2; q^2; n) == poch(a;1;n) ;")
    assert len(specs) == 1
    s = specs[0]
    assert isinstance(s, IdentitySpec) and s.id == "A1x" and s.kind == IDENTITY
    assert isinstance(s.lhs, Phi) and isinstance(s.rhs, Poch)


def test_parse_kinds():
    text = """
    # comment line
    family F for n >= 1 : poch(a; 2; k) == poch(a; 2; k) ;
    id Z for n >= 0 : sum(j, 0, n; cat(j)) == sum(j, 0, n; cat(j)) ;
    cert C : f = q^k , H = q^k , boundary ;
    rel R : poch(a; 2; k) - poch(a; 2; k) == (1 - q) * poch(a; 2; k-1) ;
    """
    specs = parse(text)
    assert [s.id for s in specs] == ["F", "Z", "C", "R"]
    assert specs[0].kind == FAMILY and specs[0].n_min == 1
    assert specs[1].kind == INTEGER
    assert isinstance(specs[2], CertificateSpec) and specs[2].boundary
    assert isinstance(specs[3], RelationSpec)


def test_parse_folds_monomials():
    node = parse_expr("q^(1-2*n)/(a*b)")
    assert isinstance(node, Mono)
    assert node.param(3, 0) == (1, ExpVec(-5, -1, -1).key)
    neg = parse_expr("-q")
    assert neg.param() == (-1, ExpVec(1, 0, 0).key)


@pytest.mark.parametrize("text, exc, line, col", [
    ("id X for n >= 0 : poch(a;;n) == 1 ;", DSLSyntaxError, 1, 26),
    ("id X for n >= 0 :\n  q^(n*n) == 1 ;", NonAffineExponent, 2, 7),
    ("id X for n >= 0 : c == 1 ;", UnknownSymbol, 1, 19),
    ("id X for n >= 0 : q == 1", DSLSyntaxError, 1, 25),
    ("id X for n >= 0 : q == 1 ; id X for n >= 0 : q == 1 ;", DuplicateSpec, 1, 31),
    ("id X for n >= 0 : q $ 1 ;", DSLSyntaxError, 1, 21),
    ("id X for n >= 0 : q^(k) == 1 ;", UnknownSymbol, 1, 22),
])
def test_parse_errors_are_positioned(text, exc, line, col):
    with pytest.raises(exc) as info:
        parse(text)
    assert (info.value.line, info.value.col) == (line, col)


def test_transport_and_induction_syntax():
    specs = parse("""
        id S for n >= 0 : a == a ;
        id T for n >= 0 : a^(-1) == a^(-1) ;
        transport X : S -> T by [a -> a^(-1), q -> -q] ;
        rel R : poch(a; 2; k) - poch(a; 2; k) == (1 - q) * poch(a; 2; k-1) ;
        induct I : S by R , step 2 , shift [b -> b*q^(-2)] , target [a -> a*q^2] ;
    """)
    tr, ind = specs[2], specs[4]
    assert isinstance(tr, TransportSpec) and tr.source == "S" and tr.dest == "T"
    assert dict(tr.subst)["q"] == AffineParam.of(-1, q=1)
    assert isinstance(ind, InductionSpec) and ind.step == 2


# -- built-in catalog --------------------------------------------------------------------

def test_builtin_contents():
    cat = builtin_catalog()
    assert sorted(cat.ids()) == sorted(EXPECTED_IDS)
    assert len(cat) == len(EXPECTED_IDS)
    assert cat.lookup("A1").n_min == 0
    assert cat.lookup("C2").n_min == 1
    assert cat.lookup("C1").kind == INTEGER
    for fam in ("S1", "S2", "S3", "S4"):
        assert cat.lookup(fam).kind == FAMILY
    with pytest.raises(UnknownSpec):
        cat.lookup("nope")
    assert set(cat.anchors) == set(EXPECTED_IDS)


def test_builtin_round_trip():
    cat = builtin_catalog()
    text = serialize(cat)
    again = parse_catalog(text)
    assert again == cat
    assert serialize(again) == text
    assert parse_catalog(builtin_source()) == cat


def test_node_text_round_trip():
    for spec in builtin_catalog():
        if isinstance(spec, IdentitySpec):
            k = "k"
            assert parse_expr(to_text(spec.lhs), k) == spec.lhs
            assert parse_expr(to_text(spec.rhs), k) == spec.rhs


def test_every_spec_instantiates():
    cat = builtin_catalog()
    for spec in cat:
        if not isinstance(spec, IdentitySpec) or spec.kind == INTEGER:
            continue
        for n in range(spec.n_min, 9):
            ks = range(n + 1) if spec.kind == FAMILY else [None]
            for k in ks:
                instantiate(spec, n, k)
            assert terminates(spec, n)


def test_instantiate_examples():
    cat = builtin_catalog()
    lhs, rhs = instantiate(cat["A1"], 0)
    assert rf_equal(lhs, RatFunc(ONE)) and rf_equal(rhs, RatFunc(ONE))
    lhs, rhs = instantiate(cat["A1"], 1)
    assert rf_equal(lhs, RatFunc(1 + q, q)) and rf_equal(rhs, RatFunc(1 + q, q))
    lhs, rhs = instantiate(cat["A2"], 0)
    assert rf_equal(lhs, RatFunc(ONE)) and rf_equal(rhs, RatFunc(ONE))
    assert instantiate_exact(cat["C1"], 1) == (4, 4)


def test_instantiate_range_errors():
    cat = builtin_catalog()
    with pytest.raises(InstantiationBelowRange):
        instantiate(cat["C2"], 0)
    with pytest.raises(InstantiationBelowRange):
        instantiate(cat["S1"], 3)
    with pytest.raises(InstantiationBelowRange):
        instantiate(cat["S1"], 3, 4)


# -- substitution ----------------------------------------------------------------------------

def subst_map(m):
    return {v: (p()[0], ExpVec.from_key(p()[1])) for v, p in m}


@pytest.mark.parametrize("src, dst, m", [
    ("A1", "V1", (("a", AffineParam.of(1, a=-1)), ("b", AffineParam.of(1, b=-1)), ("q", AffineParam.of(1, q=-1)))),
    ("A2", "V3", (("b", AffineParam.of(1, q=2, b=1)),)),
])
def test_apply_subst_transport_property(src, dst, m):
    cat = builtin_catalog()
    moved = apply_subst(cat[src], m)
    for n in range(5):
        for side_orig, side_moved, side_dst in zip(instantiate(cat[src], n), instantiate(moved, n),
                                                   instantiate(cat[dst], n)):
            assert rf_equal(side_orig.substitute(subst_map(m)), side_moved)
            assert rf_equal(side_moved, side_dst)


def test_apply_subst_identity_map():
    spec = builtin_catalog()["A2"]
    assert apply_subst(spec, ()) == spec


def test_apply_subst_on_qcat():
    spec = builtin_catalog()["C2"]
    neg = (("q", AffineParam.of(-1, q=1)),)
    twice = apply_subst(apply_subst(spec, neg), neg)
    assert twice == spec
    inv = (("q", AffineParam.of(1, q=-1)),)
    moved = apply_subst(spec, inv)
    for n in range(1, 4):
        orig, new = instantiate(spec, n), instantiate(moved, n)
        for x, y in zip(orig, new):
            assert rf_equal(x.substitute({"q": (1, ExpVec(-1, 0, 0))}), y)


def test_catalog_merge_rejects_duplicates():
    cat = builtin_catalog()
    extra = parse_catalog("id A1 for n >= 0 : q == q ;")
    with pytest.raises(DuplicateSpec):
        cat.merged(extra)
    ok = cat.merged(parse_catalog("id NEW for n >= 0 : q == q ;"))
    assert ok.ids()[-1] == "NEW"
    assert replace(ok["NEW"], n_min=0) == ok["NEW"]


def test_affine_int_helpers():
    x = AffineInt(1, -2, 3)
    assert x(4, 1) == 1 - 8 + 3
    assert x.shift_n(2)(4, 1) == x(6, 1)
    assert (x + AffineInt(1))(0, 0) == 2
    assert AffineInt(0, 1).times(AffineInt(0, 1)) is None
