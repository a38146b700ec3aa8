from __future__ import annotations

from dataclasses import replace

import pytest

from qverify.catalog import Catalog, builtin_catalog, parse_catalog, substitute
from qverify.catalog.ast import BinOp, Mono
from qverify.catalog.evaluate import SYMBOLIC, evaluate
from qverify.qseries import AffineParam
from qverify.verifier import (
    ERROR, FAIL, PASS, SKIPPED, ModularConfig, Selection, aggregate, check_certificate,
    check_induction, check_relation, check_transport, field_point, run_check, run_suite,
    standard_mutants, verify_modular, verify_symbolic,
)

CAT = builtin_catalog()
Q = Mono(AffineParam.of(1, q=1))


def test_verify_symbolic_examples():
    assert verify_symbolic(CAT["A1"], 5).status == PASS
    assert verify_symbolic(CAT["C1"], 1).status == PASS
    bad = replace(CAT["A1"], rhs=BinOp("*", CAT["A1"].rhs, Q))
    r = verify_symbolic(bad, 2)
    assert r.status == FAIL and r.witness and len(r.witness) <= 2000


def test_family_checks_every_k():
    spec = CAT["S1"]
    assert verify_symbolic(spec, 4).status == PASS
    broken = replace(spec, rhs=BinOp("+", spec.rhs, Mono(AffineParam.of(1, q=-1))))
    assert verify_symbolic(broken, 4).status == FAIL


def test_verify_modular_examples():
    cfg = ModularConfig()
    assert verify_modular(CAT["A1"], 50, cfg).status == PASS
    bad = replace(CAT["A1"], rhs=BinOp("*", CAT["A1"].rhs, Q))
    r = verify_modular(bad, 50, cfg)
    assert r.status == FAIL and "q=" in r.witness and "lhs=" in r.witness
    r1, r2 = verify_modular(CAT["A2"], 30, cfg), verify_modular(CAT["A2"], 30, cfg)
    assert replace(r1, ms=None) == replace(r2, ms=None)


def test_field_point_is_deterministic():
    cfg = ModularConfig()
    assert field_point(cfg, "A1", 3, 0, 0) == field_point(cfg, "A1", 3, 0, 0)
    assert field_point(cfg, "A1", 3, 0, 0) != field_point(cfg, "A1", 3, 1, 0)
    other = ModularConfig(seed=7)
    assert field_point(cfg, "A1", 3, 0, 0) != field_point(other, "A1", 3, 0, 0)


def test_modular_config_validation():
    with pytest.raises(ValueError):
        ModularConfig(prime=101)
    with pytest.raises(ValueError):
        ModularConfig(prime=2 ** 61)
    with pytest.raises(ValueError):
        ModularConfig(trials=0)
    assert ModularConfig(prime=2 ** 31 + 11).prime == 2 ** 31 + 11
    with pytest.raises(ValueError):
        ModularConfig(prime=2 ** 31 - 1)


def test_pole_retries_exhausted_is_an_error():
    spec = parse_catalog("id P for n >= 0 : 1 / (q - q) == 1 ;")["P"]
    r = verify_modular(spec, 0, ModularConfig(max_retries=3, trials=1), catalog=parse_catalog(""))
    assert r.status == ERROR and "PoleRetriesExhausted" in r.witness


def test_symbolic_errors_are_reported():
    spec = parse_catalog("id P for n >= 0 : poch(q; 1; -1) == 1 ;")["P"]
    r = verify_symbolic(spec, 0)
    assert r.status == ERROR and r.witness


def test_below_range_is_skipped():
    assert run_check(CAT["C2"], 0).status == SKIPPED
    assert run_check(CAT["REL1"], 1).status == SKIPPED


# -- proof machinery --------------------------------------------------------------------

@pytest.mark.parametrize("n", [0, 3])
def test_cert1(n):
    assert check_certificate(CAT["CERT1"], n).status == PASS


def test_cert2():
    assert check_certificate(CAT["CERT2"], 2).status == PASS


def test_broken_certificate_fails():
    cert = CAT["CERT1"]
    bad = replace(cert, h=BinOp("*", cert.h, Q))
    assert check_certificate(bad, 2).status == FAIL
    no_target = replace(cert, target=BinOp("*", cert.target, Q))
    assert check_certificate(no_target, 2).status == FAIL


@pytest.mark.parametrize("cert_id", ["CERT1", "CERT2"])
def test_pure_telescoping(cert_id):
    cert = CAT[cert_id]
    for n in range(7):
        hs = [evaluate(cert.h, SYMBOLIC, n, k) for k in range(n + 2)]
        total = hs[0] - hs[0]
        for k in range(n + 1):
            total = total + (hs[k] - hs[k + 1])
        assert (total - (hs[0] - hs[n + 1])).is_zero()


def test_relations():
    assert check_relation(CAT["REL1"], 2).status == PASS
    assert check_relation(CAT["REL1"], 4).status == PASS
    assert check_relation(CAT["REL2"], 3).status == PASS
    rel = CAT["REL1"]
    bad = replace(rel, multiplier=BinOp("*", rel.multiplier, Q))
    assert check_relation(bad, 4).status == FAIL


@pytest.mark.parametrize("ind, n", [("IND1", 2), ("IND1", 4), ("IND2", 4)])
def test_inductions(ind, n):
    assert check_induction(CAT[ind], n).status == PASS


def test_broken_induction_fails():
    ind = replace(CAT["IND1"], step=4)
    assert check_induction(ind, 5).status == FAIL


@pytest.mark.parametrize("tr, n", [("TR1", 0), ("TR1", 3), ("TR3", 2), ("TR2", 2)])
def test_transports(tr, n):
    assert check_transport(CAT[tr], n).status == PASS
    assert check_transport(CAT[tr], n, mode="modular").status == PASS


def test_broken_transport_fails():
    tr = replace(CAT["TR3"], subst=(("b", AffineParam.of(1, q=4, b=1)),))
    assert check_transport(tr, 2).status == FAIL
    assert check_transport(tr, 2, mode="modular").status == FAIL


# -- suites ----------------------------------------------------------------------------------

def test_run_suite_empty():
    assert run_suite([]) == []
    assert aggregate([]) == PASS


def test_run_suite_orders_results():
    sel = [Selection("T3", 0, 3), Selection("A1", 0, 3, "modular"), Selection("A1", 0, 3)]
    rs = run_suite(sel)
    keys = [r.sort_key() for r in rs]
    assert keys == sorted(keys)
    assert aggregate(rs) == PASS
    parallel = run_suite(sel, jobs=4)
    assert [replace(r, ms=None) for r in rs] == [replace(r, ms=None) for r in parallel]


def test_run_suite_with_mutant():
    mutant = replace(CAT["A1"], id="A1M", rhs=BinOp("*", CAT["A1"].rhs, Q))
    cat = CAT.merged(Catalog([mutant]))
    rs = run_suite([Selection("A1", 1, 3), Selection("A1M", 1, 3)], catalog=cat)
    assert aggregate(rs) == FAIL
    assert {r.id for r in rs if r.status == FAIL} == {"A1M"}


@pytest.mark.parametrize("spec_id", ["A1", "A2", "T3", "V6", "D1"])
def test_mutants_fail_in_modular_mode(spec_id):
    mutants = standard_mutants(CAT[spec_id])
    assert len(mutants) >= 2
    for m in mutants:
        for n in (10, 30):
            assert verify_modular(m, n).status == FAIL, (m.id, n)


# -- closure meta-check ---------------------------------------------------------------------

def at_a(spec, e):
    """Spec with a fixed to q^e."""
    return replace(spec, id=f"{spec.id}@a=q^{e}",
                   lhs=substitute(spec.lhs, {"a": AffineParam.of(1, q=e)}),
                   rhs=substitute(spec.rhs, {"a": AffineParam.of(1, q=e)}))


def test_closure_a_equals_q2_and_q4():
    # L1 is A1 at a = q^2; the relation plus the induction step carry it to a = q^4.
    a1 = CAT["A1"]
    for n in range(0, 7):
        assert verify_symbolic(CAT["L1"], n).status == PASS
        assert verify_symbolic(at_a(a1, 2), n).status == PASS
        assert check_induction(CAT["IND1"], n + 2).status == PASS
        assert check_relation(CAT["REL1"], n + 2).status == PASS
        assert verify_symbolic(at_a(a1, 4), n).status == PASS
