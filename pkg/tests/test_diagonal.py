import itertools
from fractions import Fraction

import numpy as np
import pytest

from padicforms.diagonal import (
    DiagonalInstance,
    dl_property_harness,
    escalation_ceiling,
    normalize,
    random_instance,
    solve_diagonal,
)
from padicforms.quad import decide_isotropic_diagonal
from padicforms.search import SolveOptions, solve, verify_solubility
from padicforms.verify import verify_document


def test_normalize_even_exponents():
    p = 5
    nd = normalize(DiagonalInstance((1, p**2, p**4), 2, p))
    assert nd.coefficients == (1, 1, 1)
    assert nd.classes == {0: [0, 1, 2]}


def test_normalize_keeps_odd_class():
    nd = normalize(DiagonalInstance((1, 3), 2, 3))
    assert nd.coefficients == (1, 3)
    assert nd.classes == {0: [0], 1: [1]}


def test_normalize_cubic():
    nd = normalize(DiagonalInstance((4, 8), 3, 2))
    assert nd.exponents == (2, 0)
    assert nd.coefficients == (4, 1)


def test_normalization_relation():
    inst = DiagonalInstance((3, 50, 7 * 125), 3, 5)
    norm = normalize(inst).normalization
    f = inst.form()
    for x in [(1, 2, 3), (4, -1, 7), (0, 1, 1)]:
        assert f.value(norm.to_original(x, 5)) == 5**norm.shift * norm.form.value(x)


def test_invalid_instances():
    with pytest.raises(ValueError):
        DiagonalInstance((1, 0), 2, 3)
    with pytest.raises(ValueError):
        DiagonalInstance((1, 1), 1, 3)


def test_escalation_ceiling():
    assert escalation_ceiling(2, 2, 1) == 2 * 1 + 1 + 2
    assert escalation_ceiling(3, 5, 0) == 1


def test_solve_sum_of_three_squares_mod_5():
    cert = solve_diagonal(DiagonalInstance((1, 1, 1), 2, 5))
    assert cert.kind == "soluble" and verify_solubility(cert)
    assert (1 + 4) % 5 == 0


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_solve_one_minus_p(p):
    cert = solve_diagonal(DiagonalInstance((1, -p), 2, p))
    assert cert.kind == "insoluble"
    assert cert.modulus == p**2
    assert verify_document(cert.to_json()).ok


def test_quartic_five_terms_2adic():
    cert = solve_diagonal(DiagonalInstance((1, 1, 1, 1, 1), 4, 2))
    assert cert.kind == "insoluble" and cert.modulus == 16
    assert verify_document(cert.to_json()).ok


def test_harness_d2_p3():
    out = dl_property_harness(2, 3, 100, seed=0)
    assert out["soluble"] == 100


def test_harness_d3_p7():
    out = dl_property_harness(3, 7, 100, seed=0)
    assert out["soluble"] == 100


def test_harness_guard():
    with pytest.raises(ValueError):
        dl_property_harness(5, 3, 1, seed=0)


def test_harness_certificates_reverify_independently():
    rng = np.random.default_rng(np.random.SeedSequence([9, 3, 5]))
    for _ in range(20):
        inst = random_instance(rng, 3, 5, 10)
        cert = solve_diagonal(inst)
        assert cert.kind == "soluble"
        assert verify_document(cert.to_json()).ok


def test_normalization_preserves_classification():
    rng = np.random.default_rng(12)
    for _ in range(40):
        p = int(rng.choice([2, 3, 5]))
        d = int(rng.choice([2, 3]))
        m = int(rng.integers(2, 4))
        inst = random_instance(rng, d, p, m)
        a = solve_diagonal(inst).kind
        b = solve(inst.form(), p, SolveOptions(level_max=16, heuristic=False)).kind
        if "unknown" not in (a, b):
            assert a == b, inst


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_quadratic_case_agrees_with_isotropy(p):
    values = [c for c in range(-10, 11) if c]
    for a, b in itertools.combinations_with_replacement(values, 2):
        cert = solve_diagonal(DiagonalInstance((a, b), 2, p))
        assert cert.kind != "unknown"
        assert (cert.kind == "soluble") == decide_isotropic_diagonal([Fraction(a), Fraction(b)], p), (a, b)
    rng = np.random.default_rng(p)
    for _ in range(60):
        coeffs = tuple(int(rng.choice(values)) for _ in range(3))
        cert = solve_diagonal(DiagonalInstance(coeffs, 2, p))
        assert cert.kind != "unknown"
        assert (cert.kind == "soluble") == decide_isotropic_diagonal([Fraction(c) for c in coeffs], p), coeffs
