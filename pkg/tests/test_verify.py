import copy

import pytest

from padicforms.forms import builtin_form, parse_form
from padicforms.quad import QuadForm, QuadSystem, isotropic_qp, solve_system_qp
from padicforms.search import SolveOptions, certify_insoluble, solve
from padicforms.verify import verify_document


@pytest.fixture(scope="module")
def soluble_doc():
    return solve(parse_form("x1^2 - 17*x2^2"), 2).to_json()


@pytest.fixture(scope="module")
def split_doc():
    return certify_insoluble(parse_form("x1^2 - 5*x2^2"), 5, 2).to_json()


@pytest.fixture(scope="module")
def direct_doc():
    return certify_insoluble(parse_form("x1^2 + x1*x2 + x2^2"), 2, 1).to_json()


@pytest.fixture(scope="module")
def system_doc():
    fs = [parse_form("x1*x3 - x2^2"), parse_form("x1^2 - x2*x3")]
    return solve_system_qp(QuadSystem.of(fs, 5)).to_json()


def test_valid_documents_accepted(soluble_doc, split_doc, direct_doc, system_doc):
    for doc in (soluble_doc, split_doc, direct_doc, system_doc):
        verdict = verify_document(doc)
        assert verdict.ok, verdict.to_json()


def test_terjanian_certificate_verifies():
    doc = solve(builtin_form("terjanian-F"), 2).to_json()
    assert verify_document(doc).ok


def test_tampered_vector_rejected(soluble_doc):
    doc = copy.deepcopy(soluble_doc)
    doc["vector"][0] += 1
    assert not verify_document(doc).ok


def test_tampered_seed_rejected(soluble_doc):
    doc = copy.deepcopy(soluble_doc)
    doc["witness"]["e"] = 0
    assert not verify_document(doc).ok
    doc = copy.deepcopy(soluble_doc)
    doc["vector"] = [2 * a for a in doc["vector"]]
    assert not verify_document(doc).ok


def test_tampered_histogram_rejected(split_doc):
    doc = copy.deepcopy(split_doc)
    h = doc["histograms"][0]["all"]
    h["0"] += 1
    assert not verify_document(doc).ok


def test_tampered_blocks_rejected(split_doc):
    doc = copy.deepcopy(split_doc)
    doc["blocks"][1]["weight"] = 1
    assert not verify_document(doc).ok


def test_false_insolubility_claim_rejected(direct_doc, split_doc):
    doc = copy.deepcopy(direct_doc)
    doc["form"] = doc["certified_form"] = "x1^2 + x2^2"
    verdict = verify_document(doc)
    assert not verdict.ok
    doc = copy.deepcopy(split_doc)
    doc["level"] = 1
    assert not verify_document(doc).ok


def test_tampered_system_rejected(system_doc):
    doc = copy.deepcopy(system_doc)
    doc["witness"]["delta"] = 1
    assert not verify_document(doc).ok
    doc = copy.deepcopy(system_doc)
    doc["vector"] = [1, 1, 2]
    assert not verify_document(doc).ok


def test_isotropy_witness():
    f = parse_form("x1^2 + x2^2 + x3^2 + x4^2 + x5^2")
    res = isotropic_qp(QuadForm.from_form(f), 2)
    doc = res.to_json()
    doc.update({"form": str(f), "n": 5})
    assert verify_document(doc).ok
    doc["witness"] = [1, 0, 0, 0, 0]
    assert not verify_document(doc).ok


def test_unknown_is_not_verifiable():
    f = parse_form("x1^2 + x1*x2 + x2^2 + 2*x3^2 + 2*x3*x4 + 2*x4^2")
    doc = solve(f, 2, SolveOptions(budget=8, level_max=2, use_split=False)).to_json()
    verdict = verify_document(doc)
    assert not verdict.ok
    assert verdict.to_json()["checks"]
