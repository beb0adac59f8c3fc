import itertools

import numpy as np
import pytest

from padicforms.errors import GuardExceeded
from padicforms.forms import Block, Form, SplitForm, builtin_form, parse_form
from padicforms.oracles import brute_primitive_zero_count, random_split_form, split_oracle_suite
from padicforms.search import (
    EXHAUSTED_NONE,
    FOUND,
    InsolubilityCertificate,
    Refuted,
    SolveOptions,
    certify_insoluble,
    direct_primitive_zero_count,
    escalation_levels,
    primitive_zero_search,
    quartic_lemma_scan,
    solve,
    split_zero_count,
    split_zero_search,
    value_distribution,
    verify_solubility,
)
from padicforms.verify import verify_document


def _brute_certificate_check(f: Form, p: int, m: int) -> bool:
    """Second enumerator: True iff no primitive zero mod p^m."""
    return brute_primitive_zero_count(f, p, m) == 0


def test_primitive_zero_search_examples():
    assert primitive_zero_search(parse_form("x1^2 + x2^2"), 2, 2).status == EXHAUSTED_NONE
    out = primitive_zero_search(parse_form("x1^2 + x2^2 + x3^2"), 7, 1)
    assert out.status == FOUND
    assert parse_form("x1^2 + x2^2 + x3^2").value(out.vector) % 7 == 0
    assert primitive_zero_search(builtin_form("terjanian-G"), 2, 2).status == EXHAUSTED_NONE


def test_value_distribution_G_mod_4():
    h = value_distribution(builtin_form("terjanian-G"), 2, 2)
    assert {v: int(c) for v, c in enumerate(h.all) if c} == {0: 8, 1: 56}
    assert {v: int(c) for v, c in enumerate(h.divisible) if c} == {0: 8}


def test_value_distribution_square_mod_4():
    h = value_distribution(parse_form("x1^2"), 2, 2)
    assert {v: int(c) for v, c in enumerate(h.all) if c} == {0: 2, 1: 2}


def test_histogram_totals():
    for f, p, m in [(builtin_form("terjanian-G"), 2, 4), (parse_form("x1^3 + 2*x2^3"), 3, 2)]:
        h = value_distribution(f, p, m)
        assert int(h.all.sum()) == p ** (m * f.n)
        assert int(h.divisible.sum()) == p ** ((m - 1) * f.n)


def test_split_count_terjanian():
    cnt = split_zero_count(builtin_form("terjanian-F"), 2, 4)
    assert cnt.primitive_zeros == 0
    assert cnt.all_zeros == cnt.nonprimitive_zeros == 2**54


def test_split_count_two_squares():
    sf = SplitForm((Block(parse_form("x1^2"), 1, (0,)), Block(parse_form("x1^2"), 1, (1,))), 2)
    assert split_zero_count(sf, 2, 2).primitive_zeros == 0
    assert brute_primitive_zero_count(sf.to_form(), 2, 2) == 0


def test_split_count_planted_zero():
    sf = SplitForm((Block(parse_form("x1^2"), 1, (0,)), Block(parse_form("x1^2"), -1, (1,))), 2)
    assert split_zero_count(sf, 3, 2).primitive_zeros >= 1


def test_guard():
    with pytest.raises(GuardExceeded):
        value_distribution(parse_form("x1^2 + x2^2 + x3^2 + x4^2"), 7, 3, guard=1000)


def test_certify_examples():
    cert = certify_insoluble(builtin_form("terjanian-F"), 2, 4)
    assert isinstance(cert, InsolubilityCertificate) and cert.modulus == 16
    cert = certify_insoluble(parse_form("x1^2 - 5*x2^2"), 5, 2)
    assert isinstance(cert, InsolubilityCertificate) and cert.modulus == 25
    r = certify_insoluble(parse_form("x1^2 + x2^2 + x3^2"), 7, 1)
    assert isinstance(r, Refuted) and not r
    assert parse_form("x1^2 + x2^2 + x3^2").value(r.vector) % 7 == 0


def test_certify_direct_reproduced_by_second_enumerator():
    f = parse_form("x1^2 - 5*x2^2")
    cert = certify_insoluble(f, 5, 2)
    assert cert.method in ("direct-enumeration", "split-convolution")
    assert _brute_certificate_check(f, 5, 2)
    g = parse_form("x1^2 + x1*x2 + x2^2")
    cert = certify_insoluble(g, 2, 1)
    assert cert.method == "direct-enumeration"
    assert _brute_certificate_check(g, 2, 1)
    assert verify_document(cert.to_json()).ok


def test_solve_examples():
    cert = solve(parse_form("x1^2 - 17*x2^2"), 2)
    assert cert.kind == "soluble"
    assert verify_solubility(cert)
    assert tuple(cert.witness.seed) == (1, 1) and cert.witness.level == 4 and cert.level == 4

    cert = solve(builtin_form("terjanian-F"), 2)
    assert cert.kind == "insoluble" and cert.modulus == 16

    cert = solve(parse_form("x1^3 + x2^3 + x3^3"), 7)
    assert cert.kind == "soluble"
    assert parse_form("x1^3 + x2^3 + x3^3").value(cert.vector) % 7**32 == 0


def test_cube_seed_example():
    f = parse_form("x1^3 + x2^3 + x3^3")
    assert f.value((1, 6, 0)) == 217 and 217 % 7 == 0
    assert [g % 7 for g in f.gradient_value((1, 6, 0))] == [3, 3, 0]


def test_solve_unknown_when_budget_too_small():
    # an anisotropic quaternary form, but a non-split coupling and a tiny budget
    f = parse_form("x1^2 + x1*x2 + x2^2 + 2*x3^2 + 2*x3*x4 + 2*x4^2")
    cert = solve(f, 2, SolveOptions(budget=8, level_max=2, use_split=False))
    assert cert.kind == "unknown"
    assert cert.to_json()["kind"] == "unknown"
    # with room to enumerate, the same form is certified insoluble
    assert solve(f, 2, SolveOptions(use_split=False)).kind == "insoluble"


def test_escalation_levels():
    assert escalation_levels(8) == [1, 2, 4, 8]
    assert escalation_levels(8, (5,)) == [1, 2, 4, 5, 8]


def test_quartic_examples():
    f = parse_form("x1^4 + x2^4 + x3^4")
    assert f.value((1, 1, 1)) % 3 == 0
    assert solve(f, 3).kind == "soluble"


def test_quartic_scan_p3():
    rep = quartic_lemma_scan(3)
    assert rep.total == 216
    assert len(rep.soluble) == 216


def test_quartic_scan_guard():
    with pytest.raises(GuardExceeded):
        quartic_lemma_scan(17)


def test_split_search_finds_liftable_seed():
    sf = SplitForm(tuple(Block(Form(1, 2, {(2,): c}), 1, (i,)) for i, c in enumerate([1, 1, 1, 1, 1])), 5)
    seed = split_zero_search(sf, 2, 3, liftable=True)
    assert seed is not None
    f = sf.to_form()
    assert f.value(seed) % 8 == 0


# ---------------------------------------------------------------------------
# oracle equivalence and soundness


def test_split_vs_direct_oracle():
    report = split_oracle_suite(200, seed=0)
    assert report["mismatches"] == []


def test_split_vs_direct_second_seed():
    report = split_oracle_suite(60, seed=1)
    assert report["mismatches"] == []


def test_direct_count_scales_by_units():
    f = parse_form("x1^2 + 2*x2^2 + 3*x1*x2")
    for p, m in [(2, 1), (2, 3), (3, 2), (5, 1)]:
        assert direct_primitive_zero_count(f, p, m) == brute_primitive_zero_count(f, p, m)


def test_solubility_certificates_reverify():
    rng = np.random.default_rng(4)
    checked = 0
    for _ in range(40):
        p = int(rng.choice([2, 3, 5]))
        sf = random_split_form(rng, p, 1)
        cert = solve(sf, p, SolveOptions(level_max=4))
        doc = cert.to_json()
        if cert.kind == "soluble":
            assert verify_solubility(cert)
        if cert.kind != "unknown":
            assert verify_document(doc).ok, doc
            checked += 1
    assert checked >= 30


def test_scaling_invariance():
    rng = np.random.default_rng(5)
    for _ in range(25):
        p = int(rng.choice([2, 3, 5]))
        sf = random_split_form(rng, p, 1)
        f = sf.to_form()
        unit = int(rng.choice([u for u in range(1, 4 * p) if u % p]))
        a = solve(f, p, SolveOptions(level_max=4)).kind
        b = solve(f.scale(unit), p, SolveOptions(level_max=4)).kind
        assert a == b


def test_search_independent_of_jobs():
    f = parse_form("x1^2 + x2^2 + x3^2 + x4^2 + 3*x1*x2")
    outs = [primitive_zero_search(f, 2, 3, jobs=j) for j in (1, 2, 4)]
    assert len({(o.status, tuple(o.vector or ()), o.evaluated) for o in outs}) == 1
    counts = [direct_primitive_zero_count(f, 3, 2, jobs=j) for j in (1, 3)]
    assert counts[0] == counts[1]
    certs = [solve(builtin_form("terjanian-F"), 2, SolveOptions(jobs=j)).to_json() for j in (1, 2)]
    assert certs[0] == certs[1]


def test_terjanian_G_has_no_primitive_zero_mod_4_brute():
    G = builtin_form("terjanian-G")
    assert not any(
        G.value(x) % 4 == 0 for x in itertools.product(range(4), repeat=3) if any(v % 2 for v in x)
    )
