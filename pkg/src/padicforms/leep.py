"""Reduction of a quadratic form over Q_p(t_1..t_k) to a quadratic system over Q_p.

Each unknown X_i is replaced by a polynomial of total degree <= D in the t's
with undetermined coefficients c_{i,alpha}. Then Q(X_1..X_n) is a polynomial
in t of degree <= 2D + d whose coefficients are quadratic forms in the c's;
forcing all of them to vanish gives R forms in N unknowns with

    N = n * C(D + k, k),    R = C(2D + d + k, k).

In general the system is solved over an odd-degree extension of Q_p with a
large residue field, and Springer's theorem brings the zero back down. Here the residue field is F_p itself, so an instance is solved
exactly when the base-field system solver succeeds; otherwise the outcome is
Unknown.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import VerificationFailed
from .forms import Form, _render_terms, densify, parse_polynomial
from .quad import QuadSystem, random_quadratic, solve_system_qp
from .search import SCHEMA_VERSION


def count_N(n: int, D: int, k: int) -> int:
    """n (D+k)...(D+1) / k!"""
    return n * math.comb(D + k, k)


def count_R(D: int, d: int, k: int) -> int:
    """(2D+d+k)...(2D+d+1) / k!"""
    return math.comb(2 * D + d + k, k)


def _gap_polynomial(n: int, d: int, k: int) -> list[Fraction]:
    """Coefficients (low to high) of D -> N - 4R as a polynomial of degree <= k."""
    xs = list(range(k + 1))
    ys = [Fraction(count_N(n, D, k) - 4 * count_R(D, d, k)) for D in xs]
    # Newton divided differences, then expand to monomial coefficients
    coef = ys[:]
    for j in range(1, k + 1):
        for i in range(k, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * (k + 1)
    basis = [Fraction(1)]
    for j in range(k + 1):
        for i, b in enumerate(basis):
            poly[i] += coef[j] * b
        nxt = [Fraction(0)] * (len(basis) + 1)
        for i, b in enumerate(basis):
            nxt[i + 1] += b
            nxt[i] -= xs[j] * b
        basis = nxt
    return poly


def sign_stable_from(n: int, d: int, k: int) -> tuple[int, int]:
    """(D0, s): for all D >= D0 the sign of N - 4R is s (Cauchy root bound)."""
    poly = _gap_polynomial(n, d, k)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    lead = poly[-1]
    if len(poly) == 1:
        return 0, (lead > 0) - (lead < 0)
    bound = 1 + max(abs(c / lead) for c in poly[:-1])
    return math.floor(bound) + 1, (lead > 0) - (lead < 0)


def choose_min_D(n: int, d: int, k: int) -> int | None:
    """Least D >= 0 with N > 4R, or None when no D works."""
    D0, sign = sign_stable_from(n, d, k)
    limit = D0 if sign <= 0 else None
    D = 0
    while limit is None or D <= limit:
        if count_N(n, D, k) > 4 * count_R(D, d, k):
            return D
        D += 1
    return None


def t_monomials(k: int, max_degree: int) -> list[tuple[int, ...]]:
    """Monomials in k variables of degree <= max_degree, graded then lexicographic."""
    out = []
    for deg in range(max_degree + 1):
        level = []

        def rec(prefix, left, slots):
            if slots == 1:
                level.append(tuple(prefix + [left]))
                return
            for a in range(left, -1, -1):
                rec(prefix + [a], left - a, slots - 1)

        if k == 0:
            if deg == 0:
                out.append(())
            continue
        rec([], deg, k)
        out.extend(level)
    return out


Poly = dict  # {exponent tuple in t: integer coefficient}


@dataclass(frozen=True)
class FFQuadForm:
    """Q(X) = sum_{i,j} a_ij(t) X_i X_j with a symmetric matrix of integer polynomials in t."""

    n: int
    k: int
    d: int
    entries: tuple[tuple[tuple[tuple[tuple[int, ...], int], ...], ...], ...]

    @classmethod
    def from_matrix(cls, n: int, k: int, matrix: Sequence[Sequence[Poly]], d: int | None = None) -> "FFQuadForm":
        rows = []
        deg = 0
        for i in range(n):
            row = []
            for j in range(n):
                a, b = dict(matrix[i][j]), dict(matrix[j][i])
                if a != b:
                    raise ValueError(f"entry ({i},{j}) breaks symmetry")
                clean = tuple(sorted((tuple(e), int(c)) for e, c in a.items() if c))
                deg = max([deg] + [sum(e) for e, _ in clean])
                row.append(clean)
            rows.append(tuple(row))
        if d is None:
            d = deg
        elif deg > d:
            raise ValueError(f"coefficient degree {deg} exceeds declared d = {d}")
        return cls(n, k, d, tuple(rows))

    def entry(self, i: int, j: int) -> Poly:
        return dict(self.entries[i][j])

    def evaluate(self, X: Sequence[Poly], modulus: int | None = None) -> Poly:
        """Q(X) as a polynomial in t for polynomial arguments X_i."""
        out: Poly = {}
        for i in range(self.n):
            for j in range(self.n):
                a = self.entries[i][j]
                if not a:
                    continue
                prod = _pmul(_pmul(dict(a), X[i]), X[j])
                for e, c in prod.items():
                    out[e] = out.get(e, 0) + c
        if modulus is not None:
            out = {e: c % modulus for e, c in out.items()}
        return {e: c for e, c in out.items() if c}


def _pmul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return out


@dataclass(frozen=True)
class ReductionResult:
    D: int
    N: int
    R: int
    system: QuadSystem
    unknowns: tuple[tuple[int, tuple[int, ...]], ...]  # c index -> (i, alpha)
    t_monomials: tuple[tuple[int, ...], ...]  # system form index -> t-monomial

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "D": self.D,
            "N": self.N,
            "R": self.R,
            "p": self.system.p,
            "forms": [str(f) for f in self.system.forms],
            "unknowns": [{"c": idx + 1, "X": i + 1, "t_exponents": list(a)} for idx, (i, a) in enumerate(self.unknowns)],
            "t_monomials": [list(g) for g in self.t_monomials],
        }


def reduce(q: FFQuadForm, D: int, p: int) -> ReductionResult:
    """Compile q into R quadratic forms in N = n * C(D+k, k) unknowns."""
    if D < 0:
        raise ValueError("D must be nonnegative")
    alphas = t_monomials(q.k, D)
    unknowns = tuple((i, a) for i in range(q.n) for a in alphas)
    index = {u: idx for idx, u in enumerate(unknowns)}
    gammas = t_monomials(q.k, 2 * D + q.d)
    gindex = {g: idx for idx, g in enumerate(gammas)}
    N = len(unknowns)
    acc: list[dict] = [dict() for _ in gammas]
    for i in range(q.n):
        for j in range(q.n):
            for beta, coef in q.entries[i][j]:
                for a1 in alphas:
                    for a2 in alphas:
                        g = tuple(b + x + y for b, x, y in zip(beta, a1, a2))
                        u, v = index[(i, a1)], index[(j, a2)]
                        e = [0] * N
                        e[u] += 1
                        e[v] += 1
                        bucket = acc[gindex[g]]
                        key = tuple(e)
                        bucket[key] = bucket.get(key, 0) + coef
    forms = tuple(Form(N, 2, terms) for terms in acc)
    assert N == count_N(q.n, D, q.k) and len(forms) == count_R(D, q.d, q.k)
    return ReductionResult(D, N, len(forms), QuadSystem(forms, N, p), unknowns, tuple(gammas))


@dataclass
class Reconstruction:
    X: list[Poly]
    modulus: int
    nontrivial: bool
    residual: Poly

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "nontrivial": self.nontrivial,
            "X": [_render_terms(sorted(x.items(), reverse=True), "t") if x else "0" for x in self.X],
            "residual_terms": len(self.residual),
        }


def reconstruct(c: Sequence[int], result: ReductionResult, q: FFQuadForm, p: int, K: int) -> Reconstruction:
    """Assemble X_i(t) from the c's and check Q(X) = 0 mod p^K coefficient by coefficient."""
    if len(c) != result.N:
        raise ValueError(f"expected {result.N} unknowns, got {len(c)}")
    if all(v % p == 0 for v in c):
        raise ValueError("the coefficient vector must be nonzero mod p")
    mod = p**K
    X: list[Poly] = [dict() for _ in range(q.n)]
    for v, (i, a) in zip(c, result.unknowns):
        if v % mod:
            X[i][a] = v % mod
    residual = q.evaluate(X, mod)
    if residual:
        bad = min(residual)
        raise VerificationFailed(f"coefficient of t^{bad} is {residual[bad]} mod {p}^{K}")
    nontrivial = any(any(val % p for val in x.values()) for x in X)
    return Reconstruction(X, mod, nontrivial, residual)


# ---------------------------------------------------------------------------
# file format and harness


def parse_ff_file(text: str) -> FFQuadForm:
    """Header ``n k d`` then one polynomial in t1..tk per upper-triangle entry, row-major."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    n, k, d = (int(v) for v in lines[0].split())
    body = lines[1:]
    need = n * (n + 1) // 2
    if len(body) != need:
        raise ValueError(f"expected {need} Gram entries, found {len(body)}")
    M = [[{} for _ in range(n)] for _ in range(n)]
    it = iter(body)
    for i in range(n):
        for j in range(i, n):
            text_entry = next(it)
            poly = {} if text_entry == "0" else parse_polynomial(text_entry, letter="t", allow_constants=True)
            dense = {densify(key, k): c for key, c in poly.items()}
            if any(len(e) != k for e in dense):
                raise ValueError("t index out of range")
            M[i][j] = dense
            M[j][i] = dense
    return FFQuadForm.from_matrix(n, k, M, d)


def random_pencil(rng: np.random.Generator, n: int, bound: int) -> FFQuadForm:
    """k = 1, d = 1: a_ij(t) = A_ij + B_ij t with random integer symmetric A, B."""
    A = random_quadratic(rng, n, -bound, bound)
    B = random_quadratic(rng, n, -bound, bound)
    M = [[{} for _ in range(n)] for _ in range(n)]
    # Gram entries must be integers, so cross terms of the random forms are used as-is
    for form, e in ((A, (0,)), (B, (1,))):
        for exps, coef in form.terms.items():
            idx = [i for i, v in enumerate(exps) for _ in range(v)]
            i, j = idx
            M[i][j][e] = M[i][j].get(e, 0) + coef
            if i != j:
                M[j][i][e] = M[j][i].get(e, 0) + coef
    return FFQuadForm.from_matrix(n, 1, M, 1)


def pipeline(q: FFQuadForm, p: int, D: int | None = None, K: int = 32, budget: int | None = None, seed: int = 0) -> dict:
    """reduce -> solve_system_qp -> reconstruct; reports Unknown honestly."""
    if D is None:
        D = choose_min_D(q.n, q.d, q.k)
        if D is None:
            return {"status": "no-feasible-D"}
    red = reduce(q, D, p)
    kwargs = {"precision": K, "seed": seed}
    if budget is not None:
        kwargs["budget"] = budget
    cert = solve_system_qp(red.system, **kwargs)
    out = {"D": D, "N": red.N, "R": red.R, "system_kind": cert.kind}
    if cert.kind != "soluble":
        out["status"] = "unknown"
        return out
    rec = reconstruct(cert.vector, red, q, p, K)
    out.update({"status": "verified" if rec.nontrivial else "trivial", "reconstruction": rec.to_json()})
    return out


def pipeline_harness(trials: int, seed: int, n: int = 9, p: int = 5, K: int = 32, bound: int = 25) -> dict:
    children = np.random.SeedSequence([seed, n, p]).spawn(trials)
    rows = []
    for child in children:
        rng = np.random.default_rng(child)
        q = random_pencil(rng, n, bound)
        rows.append(pipeline(q, p, K=K, seed=int(child.generate_state(1)[0])))
    verified = sum(1 for r in rows if r.get("status") == "verified")
    return {
        "schema_version": SCHEMA_VERSION,
        "trials": trials,
        "seed": seed,
        "n": n,
        "p": p,
        "precision": K,
        "verified": verified,
        "results": rows,
    }
