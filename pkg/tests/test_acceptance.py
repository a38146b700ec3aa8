"""One test per acceptance criterion; each records a pass/fail line."""

from __future__ import annotations

import contextlib
import io
import json
import random
import time

from conftest import SEED, random_nonzero_poly, random_poly, random_ratfunc, record
from qverify.algebra import (
    ExpVec, FieldPoint, LaurentPoly, RatFunc, poly_eval_mod, poly_substitute, rf_equal,
)
from qverify.catalog import builtin_catalog, parse_catalog, serialize
from qverify.cli import main
from qverify.qseries import ZeroFactorInNegativeLength, pochhammer
from qverify.verifier import (
    FAIL, PASS, ModularConfig, Selection, aggregate, run_check, run_suite, standard_mutants,
)

CAT = builtin_catalog()
P = 2 ** 61 - 1


def cli(*argv):
    out = io.StringIO()
    return main(list(argv), out=out), out.getvalue()


def statuses(results):
    return {r.status for r in results}


def test_criterion_1_headline_theorems():
    start = time.perf_counter()
    codes = [cli("verify", "--id", i, "--n", "0..8", "--mode", "symbolic", "--jobs", "1")[0]
             for i in ("A1", "A2", "T3")]
    elapsed = time.perf_counter() - start
    ok = codes == [0, 0, 0] and elapsed < 120
    record(1, ok, f"A1, A2, T3 symbolic n=0..8 exit codes {codes}, {elapsed:.1f}s (limit 120s)")
    assert ok


def test_criterion_2_lemmas_and_variants():
    ids = ["L1", "L2", "V1", "V2", "V3", "V4", "V5", "V6", "D1", "D2", "S1", "S2", "S3", "S4"]
    sel = [Selection(i, CAT[i].n_min, 6) for i in ids]
    rs = run_suite(sel)
    ok = aggregate(rs) == PASS and statuses(rs) == {PASS}
    record(2, ok, f"{len(rs)} checks over L1, L2, V1-V6, D1, D2, S1-S4 up to n=6: {sorted(statuses(rs))}")
    assert ok


def test_criterion_3_proof_machinery():
    sel = [Selection("CERT1", 0, 6), Selection("CERT2", 0, 6)]
    sel += [Selection(i, 2, 8) for i in ("REL1", "REL2", "IND1", "IND2")]
    rs = run_suite(sel)
    ok = statuses(rs) == {PASS} and len(rs) == 2 * 7 + 4 * 7
    record(3, ok, f"{len(rs)} certificate/relation/induction checks: {sorted(statuses(rs))}")
    assert ok


def test_criterion_4_transports():
    rs = run_suite([Selection(i, 0, 5) for i in ("TR1", "TR2", "TR3")])
    ok = statuses(rs) == {PASS} and len(rs) == 18
    record(4, ok, f"TR1-TR3 n=0..5: {sorted(statuses(rs))}")
    assert ok


def test_criterion_5_catalan_corollaries():
    start = time.perf_counter()
    c1 = run_suite([Selection("C1", 0, 100)])
    c1_time = time.perf_counter() - start
    c2 = run_suite([Selection("C2", 1, 12)])
    ok = statuses(c1) == {PASS} and c1_time < 1.0 and statuses(c2) == {PASS}
    record(5, ok, f"C1 n=0..100 exact in {c1_time:.2f}s (limit 1s); C2 n=1..12 symbolic: {sorted(statuses(c2))}")
    assert ok


def test_criterion_6_modular_scale():
    cfg = ModularConfig(prime=P, trials=20, seed=42)
    start = time.perf_counter()
    rs = [run_check(CAT[i], n, "modular", cfg) for i in ("A1", "A2", "T3", "V6") for n in (20, 50, 100, 200)]
    elapsed = time.perf_counter() - start
    ok = statuses(rs) == {PASS} and elapsed < 30
    record(6, ok, f"A1, A2, T3, V6 modular at n in {{20, 50, 100, 200}}: {sorted(statuses(rs))}, "
                  f"{elapsed:.1f}s (limit 30s)")
    assert ok


def test_criterion_7_oracle_equivalence():
    disagreements = []
    compared = 0
    for spec in CAT:
        for n in range(0, 7):
            s = run_check(spec, n).status
            m = run_check(spec, n, "modular").status
            compared += 1
            if s != m:
                disagreements.append((spec.id, n, s, m))
    mutants = [m for i in ("A1", "A2", "T3", "V6") for m in standard_mutants(CAT[i])]
    missed = []
    for m in mutants:
        for n in (4, 10, 30):
            modes = ["modular"] if n > 6 else ["symbolic", "modular"]
            for mode in modes:
                if run_check(m, n, mode).status != FAIL:
                    missed.append((m.id, n, mode))
    ok = not disagreements and len(mutants) >= 10 and not missed
    record(7, ok, f"{compared} (spec, n) pairs agree, disagreements {disagreements}; "
                  f"{len(mutants)} mutants, missed {missed}")
    assert ok


def test_criterion_8_algebra_properties():
    rng = random.Random(SEED)
    cases = 1000
    counts = dict.fromkeys(("ring", "eval", "subst", "pochhammer", "rf_equal"), 0)
    for _ in range(cases):
        x, y, z = (random_poly(rng, rational=True) for _ in range(3))
        assert (x + y) + z == x + (y + z) and (x * y) * z == x * (y * z)
        assert x + y == y + x and x * y == y * x and x * (y + z) == x * y + x * z
        counts["ring"] += 1

        pt = FieldPoint(P, rng.randrange(1, P), rng.randrange(1, P), rng.randrange(1, P))
        assert poly_eval_mod(x * y, pt) == poly_eval_mod(x, pt) * poly_eval_mod(y, pt) % P
        assert poly_eval_mod(x + y, pt) == (poly_eval_mod(x, pt) + poly_eval_mod(y, pt)) % P
        counts["eval"] += 1

        m = {v: (rng.choice((1, -1)), ExpVec(*[rng.randint(-2, 2) for _ in range(3)])) for v in "qab"}
        assert poly_substitute(x * y, m) == poly_substitute(x, m) * poly_substitute(y, m)
        counts["subst"] += 1

        mono = (rng.choice((1, -1)), ExpVec(rng.randint(-3, 3), rng.randint(-2, 2), 1).key)
        s, mm, r = rng.randint(1, 3), rng.randint(-4, 6), rng.randint(-3, 5)
        xp = RatFunc(LaurentPoly.monomial(mono[0], *ExpVec.from_key(mono[1])))
        try:
            rec = pochhammer(mono, s, mm - 1) * (1 - xp * RatFunc(LaurentPoly.monomial(1, s * (mm - 1))))
            assert rf_equal(pochhammer(mono, s, mm), rec)
            shifted = (mono[0], mono[1] + ExpVec(s * mm, 0, 0).key)
            assert rf_equal(pochhammer(mono, s, mm + r), pochhammer(mono, s, mm) * pochhammer(shifted, s, r))
        except ZeroFactorInNegativeLength:
            pass
        counts["pochhammer"] += 1

        f, g = random_ratfunc(rng), random_ratfunc(rng)
        w = random_nonzero_poly(rng)
        fw = RatFunc(f.num * w, f.den * w)
        assert rf_equal(f, f) and rf_equal(f, fw) and rf_equal(fw, f)
        assert rf_equal(f, g) == rf_equal(g, f)
        counts["rf_equal"] += 1
    ok = all(c >= 1000 for c in counts.values())
    record(8, ok, f"randomized cases per property (seed {SEED}): {counts}")
    assert ok


def test_criterion_9_dsl(tmp_path):
    again = parse_catalog(serialize(CAT))
    round_trip = again == CAT
    bad_inputs = {
        "empty field": "id X for n >= 0 : poch(a;;n) == 1 ;",
        "non-affine": "id X for n >= 0 :\n  q^(n*n) == 1 ;",
        "unknown symbol": "id X for n >= 0 : z == 1 ;",
        "missing semicolon": "id X for n >= 0 : q == 1",
    }
    codes = {}
    for name, text in bad_inputs.items():
        f = tmp_path / "in.dsl"
        f.write_text(text)
        err = io.StringIO()
        with contextlib.redirect_stderr(err):
            code, _ = cli("parse", str(f))
        positioned = ":1:" in err.getvalue() or ":2:" in err.getvalue()
        codes[name] = (code, positioned)
    ok = round_trip and all(c == (2, True) for c in codes.values())
    record(9, ok, f"round trip {'identical' if round_trip else 'DIFFERS'}; malformed inputs (exit, positioned): {codes}")
    assert ok


def test_criterion_10_determinism():
    c1, out1 = cli("verify", "--all", "--format", "json", "--jobs", "1")
    c8, out8 = cli("verify", "--all", "--format", "json", "--jobs", "8")
    doc = json.loads(out1)
    ok = out1 == out8 and c1 == c8 == 0 and doc["aggregate"] == "pass"
    record(10, ok, f"default suite, {len(doc['results'])} results, --jobs 1 vs --jobs 8 byte-identical: {out1 == out8}")
    assert ok
