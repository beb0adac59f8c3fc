"""Independent checker for emitted certificates.

Works from the JSON documents alone. The only shared code is the forms
module (parsing and evaluation); counting, lifting and linear algebra are
redone here by plain enumeration and exact rational arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .forms import Form, parse_form

# largest brute-force enumeration the checker will attempt
ENUMERATION_LIMIT = 1 << 22


@dataclass
class Verdict:
    ok: bool
    kind: str
    checks: list = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = ""):
        self.checks.append({"check": name, "passed": bool(passed), "detail": detail})
        if not passed:
            self.ok = False

    def to_json(self) -> dict:
        return {"ok": self.ok, "kind": self.kind, "checks": self.checks}


def _val(a: int, p: int) -> int | None:
    if a == 0:
        return None
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


def _ge(a: int, p: int, k: int) -> bool:
    return a % p**k == 0


def _strip_content(f: Form, p: int) -> Form:
    if not f.terms:
        return f
    s = min(_val(c, p) for c in f.terms.values())
    return Form(f.n, f.d, {e: c // p**s for e, c in f.terms.items()})


def _det(M: list[list[Fraction]]) -> Fraction:
    M = [row[:] for row in M]
    n = len(M)
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            out = -out
        out *= M[c][c]
        for r in range(c + 1, n):
            factor = M[r][c] / M[c][c]
            if factor:
                for k in range(c, n):
                    M[r][k] -= factor * M[c][k]
    return out


def _primitive_vectors(n: int, M: int, p: int):
    for x in itertools.product(range(M), repeat=n):
        if any(v % p for v in x):
            yield x


def _rescaled(f: Form, shift: int, scalings, p: int) -> Form:
    """f(P x) / p^shift with P = diag(p^scalings), exactly."""
    terms = {}
    for e, c in f.terms.items():
        k = sum(a * s for a, s in zip(e, scalings))
        num = c * p**k
        if num % p**shift:
            raise ValueError("normalization does not divide the form")
        terms[e] = num // p**shift
    return Form(f.n, f.d, terms)


def _check_normalization(doc: dict, f: Form, g: Form, v: Verdict):
    norm = doc.get("normalization") or {"shift": 0, "scalings": [0] * f.n}
    p = doc["p"]
    try:
        h = _rescaled(f, norm["shift"], norm["scalings"], p)
        ok = h == g
    except ValueError:
        ok = False
    v.add("normalized form equals f(Px)/p^shift", ok, str(norm))


# ---------------------------------------------------------------------------


def verify_soluble(doc: dict) -> Verdict:
    v = Verdict(True, "soluble")
    f = parse_form(doc["form"], doc["n"])
    p, K = doc["p"], doc["precision"]
    x = [int(a) for a in doc["vector"]]
    w = doc["witness"]
    seed = [int(a) for a in w["seed"]]
    e, idx = w["e"], w["index"]
    v.add("vector is primitive", any(a % p for a in x))
    v.add(f"f(vector) = 0 mod p^{K}", _ge(f.value(x), p, K))
    v.add("seed is primitive", any(a % p for a in seed))
    grads = f.gradient_value(seed)
    gvals = [_val(g, p) for g in grads]
    finite = [g for g in gvals if g is not None]
    v.add("least derivative valuation is e", bool(finite) and min(finite) == e and gvals[idx] == e, str(gvals))
    v.add("v(f(seed)) >= 2e+1", _ge(f.value(seed), p, 2 * e + 1))
    v.add("vector agrees with seed mod p^(e+1)", all(_ge(a - b, p, e + 1) for a, b in zip(x, seed)))
    return v


def _brute_histograms(block: Form, weight: int, p: int, m: int) -> tuple[dict, dict]:
    M = p**m
    full: dict[int, int] = {}
    for x in itertools.product(range(M), repeat=block.n):
        r = weight * block.value(x) % M
        full[r] = full.get(r, 0) + 1
    div: dict[int, int] = {}
    for y in itertools.product(range(M // p), repeat=block.n):
        r = weight * block.value([p * a for a in y]) % M
        div[r] = div.get(r, 0) + 1
    return full, div


def _dict_zero_sum(hists: list[dict], M: int) -> int:
    acc = {0: 1}
    for h in hists:
        nxt: dict[int, int] = {}
        for a, ca in acc.items():
            for b, cb in h.items():
                r = (a + b) % M
                nxt[r] = nxt.get(r, 0) + ca * cb
        acc = nxt
    return acc.get(0, 0)


def verify_insoluble(doc: dict) -> Verdict:
    v = Verdict(True, "insoluble")
    f = parse_form(doc["form"], doc["n"])
    g = parse_form(doc["certified_form"], doc["n"])
    p, m = doc["p"], doc["level"]
    M = p**m
    _check_normalization(doc, f, g, v)
    if doc["method"] == "split-convolution":
        blocks = doc["blocks"]
        seen = sorted(i for b in blocks for i in b["variables"])
        v.add("blocks partition the variables", seen == list(range(g.n)))
        total: dict = {}
        hists_full, hists_div = [], []
        for b, h in zip(blocks, doc["histograms"]):
            bf = parse_form(b["form"], len(b["variables"]))
            for e, c in bf.terms.items():
                ge = [0] * g.n
                for local, gi in enumerate(b["variables"]):
                    ge[gi] = e[local]
                total[tuple(ge)] = total.get(tuple(ge), 0) + b["weight"] * c
            if M ** bf.n > ENUMERATION_LIMIT:
                v.add("block small enough to enumerate", False, b["form"])
                return v
            full, div = _brute_histograms(bf, b["weight"], p, m)
            v.add(
                f"histogram of block {b['variables']}",
                full == {int(k): c for k, c in h["all"].items()} and div == {int(k): c for k, c in h["divisible"].items()},
            )
            hists_full.append(full)
            hists_div.append(div)
        v.add("blocks reassemble the certified form", Form(g.n, g.d, total) == g)
        v.add("histogram count matches block count", len(doc["histograms"]) == len(blocks))
        zeros = _dict_zero_sum(hists_full, M) - _dict_zero_sum(hists_div, M)
        v.add("no primitive zero mod p^level (convolution)", zeros == 0, f"primitive zeros = {zeros}")
        return v
    if M**g.n > ENUMERATION_LIMIT:
        v.add("space small enough to enumerate", False, f"{M}^{g.n}")
        return v
    found = next((x for x in _primitive_vectors(g.n, M, p) if g.value(x) % M == 0), None)
    v.add("no primitive zero mod p^level (enumeration)", found is None, str(found))
    return v


def verify_system(doc: dict) -> Verdict:
    v = Verdict(True, "soluble-system")
    n, p, K = doc["n"], doc["p"], doc["precision"]
    forms = [parse_form(s, n) for s in doc["forms"]]
    x = [int(a) for a in doc["vector"]]
    v.add("vector is primitive", any(a % p for a in x))
    v.add(f"all forms vanish mod p^{K}", all(_ge(f.value(x), p, K) for f in forms))
    live = [_strip_content(f, p) for f in forms if f.terms]
    w = doc["witness"]
    if not live:
        return v
    seed = [int(a) for a in w["seed"]]
    cols, delta = w["pivots"], w["delta"]
    J = [f.gradient_value(seed) for f in live]
    minor = [[Fraction(row[c]) for c in cols] for row in J]
    dv = _det(minor) if len(cols) == len(live) else Fraction(0)
    v.add("pivot minor has valuation delta", dv != 0 and _val(dv.numerator, p) == delta, str(dv))
    v.add("forms vanish at the seed to order 2 delta + 1", all(_ge(f.value(seed), p, 2 * delta + 1) for f in live))
    v.add("vector agrees with seed mod p^(delta+1)", all(_ge(a - b, p, delta + 1) for a, b in zip(x, seed)))
    return v


def verify_isotropy(doc: dict) -> Verdict:
    v = Verdict(True, "isotropy")
    if not doc.get("isotropic") or doc.get("witness") is None:
        v.add("isotropy witness present", False, "nothing to check")
        return v
    f = parse_form(doc["form"], doc["n"])
    p = doc["p"]
    x = [int(a) for a in doc["witness"]]
    v.add("witness is primitive", any(a % p for a in x))
    if doc.get("witness_exact"):
        v.add("q(witness) = 0 exactly", f.value(x) == 0)
    else:
        K = doc["witness_precision"]
        v.add(f"q(witness) = 0 mod p^{K}", _ge(f.value(x), p, K))
    return v


def verify_document(doc: dict) -> Verdict:
    """Dispatch on the certificate shape."""
    kind = doc.get("kind")
    if kind == "soluble" and "forms" in doc:
        return verify_system(doc)
    if kind == "soluble":
        return verify_soluble(doc)
    if kind == "insoluble":
        return verify_insoluble(doc)
    if "isotropic" in doc:
        return verify_isotropy(doc)
    out = Verdict(False, str(kind))
    out.add("certificate kind is checkable", False, f"kind {kind!r} carries no claim to verify")
    return out
