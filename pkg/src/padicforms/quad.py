"""Quadratic forms: diagonalization, isotropy over Q_p, and systems over F_p / Z_p.

Rank statistics and zero counts for systems of quadratic forms are computed
by plain enumeration, which is what the zero-count inequality

    |N - p^(n-r)| <= sum_{1 <= t <= n/2} p^(n-r-t) * N_{2t}

is checked against (N common zeros in F_p^n, N_R the number of coefficient
vectors u in F_p^r whose combination sum u_i Q_i has rank R).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arith import PadicContext, check_prime, hilbert_symbol, is_square, rational_valuation, valuation
from .errors import EvenCharacteristic, GuardExceeded, HypothesisFailed
from .forms import Block, Form, SplitForm, render
from .lifting import (
    SystemLiftWitness,
    liftability_check,
    hensel_lift,
    system_lift,
    system_liftability_check,
)
from .linalg import rank_mod_p as _matrix_rank_mod_p
from .search import FOUND, SCHEMA_VERSION, all_vectors, scan, split_zero_search

RANK_GUARD = 1 << 20
COUNT_GUARD = 1 << 22


@dataclass(frozen=True)
class QuadForm:
    """Quadratic form x^T G x with G symmetric rational (half the cross coefficients)."""

    n: int
    gram: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_form(cls, f: Form) -> "QuadForm":
        if f.d != 2:
            raise ValueError("not a quadratic form")
        G = [[Fraction(0)] * f.n for _ in range(f.n)]
        for exps, c in f.terms.items():
            idx = [i for i, e in enumerate(exps) for _ in range(e)]
            i, j = idx
            if i == j:
                G[i][i] += c
            else:
                G[i][j] += Fraction(c, 2)
                G[j][i] += Fraction(c, 2)
        return cls(f.n, tuple(tuple(r) for r in G))

    @classmethod
    def diagonal(cls, entries: Sequence) -> "QuadForm":
        n = len(entries)
        G = [[Fraction(entries[i]) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
        return cls(n, tuple(tuple(r) for r in G))

    def value(self, x: Sequence) -> Fraction:
        return sum(
            (self.gram[i][j] * x[i] * x[j] for i in range(self.n) for j in range(self.n)), Fraction(0)
        )

    def integer_form(self) -> tuple[Form, int]:
        """(F, L) with F = L * Q having integer coefficients."""
        dens = [self.gram[i][j].denominator for i in range(self.n) for j in range(i, self.n)]
        L = math.lcm(*dens) if dens else 1
        terms = {}
        for i in range(self.n):
            for j in range(i, self.n):
                v = self.gram[i][j] * L * (1 if i == j else 2)
                if v:
                    e = [0] * self.n
                    e[i] += 1
                    e[j] += 1
                    terms[tuple(e)] = int(v)
        return Form(self.n, 2, terms), L


def diagonalize(q: QuadForm) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Return (diag, T) with T^T G T = diag(diag), T invertible over Q."""
    n = q.n
    G = [list(row) for row in q.gram]
    T = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def add_col(dst, src, c):
        # basis change e_dst <- e_dst + c e_src (congruence on G, column op on T)
        for r in range(n):
            T[r][dst] += c * T[r][src]
        for r in range(n):
            G[r][dst] += c * G[r][src]
        for r in range(n):
            G[dst][r] += c * G[src][r]

    def swap(a, b):
        for r in range(n):
            T[r][a], T[r][b] = T[r][b], T[r][a]
        G[a], G[b] = G[b], G[a]
        for r in range(n):
            G[r][a], G[r][b] = G[r][b], G[r][a]

    for k in range(n):
        piv = next((i for i in range(k, n) if G[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if G[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            add_col(i, j, Fraction(1))
            piv = i
        if piv != k:
            swap(piv, k)
        for j in range(k + 1, n):
            if G[k][j] != 0:
                add_col(j, k, -G[k][j] / G[k][k])
    return [G[i][i] for i in range(n)], T


def transform_check(q: QuadForm, diag: Sequence[Fraction], T) -> bool:
    n = q.n
    for a in range(n):
        for b in range(n):
            v = sum(T[i][a] * q.gram[i][j] * T[j][b] for i in range(n) for j in range(n))
            if v != (diag[a] if a == b else 0):
                return False
    return True


# ---------------------------------------------------------------------------
# isotropy over Q_p


def hasse_invariant(diag: Sequence[Fraction], p: int) -> int:
    eps = 1
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            eps *= hilbert_symbol(diag[i], diag[j], p)
    return eps


def decide_isotropic_diagonal(diag: Sequence[Fraction], p: int) -> bool:
    """Exact isotropy decision for a diagonal form over Q_p."""
    if any(a == 0 for a in diag):
        return True
    n = len(diag)
    if n == 1:
        return False
    d = math.prod(Fraction(a) for a in diag)
    if n == 2:
        return is_square(-d, p)
    eps = hasse_invariant(diag, p)
    if n == 3:
        return hilbert_symbol(-1, -d, p) == eps
    if n == 4:
        return (not is_square(d, p)) or eps == hilbert_symbol(-1, -1, p)
    return True


@dataclass
class IsotropyResult:
    isotropic: bool
    p: int
    diagonal: list
    witness: tuple[int, ...] | None = None
    witness_precision: int | None = None
    witness_exact: bool = False
    witness_flag: str = ""

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "isotropic": self.isotropic,
            "p": self.p,
            "diagonal": [str(a) for a in self.diagonal],
            "witness": list(self.witness) if self.witness is not None else None,
            "witness_precision": self.witness_precision,
            "witness_exact": self.witness_exact,
            "witness_flag": self.witness_flag,
        }


def _primitive_integer(v: Sequence[Fraction]) -> list[int]:
    L = math.lcm(*(Fraction(a).denominator for a in v))
    ints = [int(Fraction(a) * L) for a in v]
    g = math.gcd(*ints)
    return [a // g for a in ints] if g else ints


def _square_class_split(diag: Sequence[Fraction], p: int) -> tuple[SplitForm, list[Fraction]]:
    """Write a_i = c_i s_i^2 with c_i an integer of p-valuation 0 or 1.

    The seed search then runs on sum c_i z_i^2, whose small valuations keep
    the needed level low; y_i = z_i / s_i is the corresponding zero of the
    diagonal form.
    """
    coeffs, scales = [], []
    for a in diag:
        c = a.numerator * a.denominator
        k = valuation(c, p) // 2
        coeffs.append(c // p ** (2 * k))
        scales.append(Fraction(p**k, a.denominator))
    blocks = tuple(Block(Form(1, 2, {(2,): c}), 1, (i,)) for i, c in enumerate(coeffs))
    return SplitForm(blocks, len(coeffs)), scales


def isotropic_qp(
    q: QuadForm | Form, p: int, witness: bool = True, precision: int = 32, level_max: int = 12
) -> IsotropyResult:
    """Decide isotropy from Hilbert symbols; optionally attach a re-verified witness.

    The witness is searched on the diagonalized form (a split form, so the
    block search reaches high levels cheaply), mapped back through the
    transform, and re-anchored on the original integer form by Hensel lifting.
    """
    check_prime(p)
    if isinstance(q, Form):
        q = QuadForm.from_form(q)
    diag, T = diagonalize(q)
    decision = decide_isotropic_diagonal(diag, p)
    res = IsotropyResult(decision, p, diag)
    if not (decision and witness):
        return res
    F, _ = q.integer_form()
    zero_idx = next((i for i, a in enumerate(diag) if a == 0), None)
    if zero_idx is not None:
        x = _primitive_integer([T[r][zero_idx] for r in range(q.n)])
        assert F.value(x) == 0
        res.witness, res.witness_exact = tuple(x), True
        res.witness_flag = "exact radical vector"
        return res
    sf, scales = _square_class_split(diag, p)
    for m in range(1, level_max + 1):
        seed = split_zero_search(sf, p, m, liftable=True)
        if seed is None:
            continue
        diag_form = sf.to_form()
        w = liftability_check(diag_form, seed, p)
        Kd = precision + 2 * sum(abs(rational_valuation(a, p)) for a in diag) + 16
        Kd += 2 * sum(abs(rational_valuation(T[i][j], p)) for i in range(q.n) for j in range(q.n) if T[i][j])
        z = hensel_lift(diag_form, w, Kd, PadicContext(p, Kd))
        y = [zc / s for zc, s in zip(z, scales)]
        x = _primitive_integer([sum(T[r][c] * y[c] for c in range(q.n)) for r in range(q.n)])
        wf = liftability_check(F, x, p, cap=Kd)
        if wf:
            out = hensel_lift(F, wf, precision, PadicContext(p, max(precision, wf.level)))
            if F.value(out) % p**precision == 0 and any(v % p for v in out):
                res.witness = tuple(out)
                res.witness_precision = precision
                res.witness_flag = f"lifted from level {m}"
                return res
    res.witness_flag = "WitnessSearchExhausted"
    return res


def witness_reverifies(q: QuadForm | Form, res: IsotropyResult) -> bool:
    if isinstance(q, Form):
        F = q
    else:
        F, _ = q.integer_form()
    if res.witness is None:
        return False
    x = res.witness
    if not any(v % res.p for v in x):
        return False
    if res.witness_exact:
        return F.value(x) == 0
    return F.value(x) % res.p**res.witness_precision == 0


# ---------------------------------------------------------------------------
# systems


@dataclass(frozen=True)
class QuadSystem:
    forms: tuple[Form, ...]
    n: int
    p: int

    def __post_init__(self):
        check_prime(self.p)
        for f in self.forms:
            if f.n != self.n or f.d != 2:
                raise ValueError("system forms must be quadratic in the shared variables")

    @property
    def r(self) -> int:
        return len(self.forms)

    @classmethod
    def of(cls, forms: Sequence[Form], p: int) -> "QuadSystem":
        forms = tuple(forms)
        return cls(forms, forms[0].n if forms else 0, p)

    def gram_mod_p(self, u: Sequence[int]) -> list[list[int]]:
        p = self.p
        if p == 2:
            raise EvenCharacteristic("Gram matrices need p odd")
        half = pow(2, -1, p)
        G = [[0] * self.n for _ in range(self.n)]
        for ui, f in zip(u, self.forms):
            if ui % p == 0:
                continue
            for exps, c in f.terms.items():
                idx = [i for i, e in enumerate(exps) for _ in range(e)]
                i, j = idx
                if i == j:
                    G[i][i] = (G[i][i] + ui * c) % p
                else:
                    v = ui * c * half % p
                    G[i][j] = (G[i][j] + v) % p
                    G[j][i] = (G[j][i] + v) % p
        return G


def rank_mod_p(sys: QuadSystem, u: Sequence[int]) -> int:
    if len(u) != sys.r:
        raise ValueError("coefficient vector length must equal r")
    return _matrix_rank_mod_p(sys.gram_mod_p(u), sys.p)


@dataclass
class RankDistribution:
    p: int
    r: int
    n: int
    counts: dict[int, int]

    @property
    def hypothesis(self) -> bool:
        """Only u = 0 gives the zero combination."""
        return self.counts.get(0, 0) == 1

    def N(self, R: int) -> int:
        return self.counts.get(R, 0)

    def to_json(self) -> dict:
        return {str(R): self.counts.get(R, 0) for R in range(self.n + 1)}


def rank_distribution(sys: QuadSystem, guard: int = RANK_GUARD) -> RankDistribution:
    p = sys.p
    if p == 2:
        raise EvenCharacteristic("rank stratification needs p odd")
    if p**sys.r > guard:
        raise GuardExceeded(f"{p}^{sys.r} coefficient vectors exceed guard")
    counts = {R: 0 for R in range(sys.n + 1)}
    for idx in range(p**sys.r):
        u = []
        t = idx
        for _ in range(sys.r):
            u.append(t % p)
            t //= p
        counts[rank_mod_p(sys, u)] += 1
    return RankDistribution(p, sys.r, sys.n, counts)


def count_common_zeros(sys: QuadSystem, guard: int = COUNT_GUARD) -> int:
    """Number of x in F_p^n (origin included) with every Q_i(x) = 0."""
    p = sys.p
    if p**sys.n > guard:
        raise GuardExceeded(f"{p}^{sys.n} points exceed guard")
    if not sys.forms:
        return p**sys.n
    X = all_vectors(sys.n, p)
    mask = np.ones(X.shape[0], dtype=bool)
    for f in sys.forms:
        mask &= f.evaluate_many(X, p) == 0
    return int(mask.sum())


@dataclass
class CountBoundReport:
    p: int
    r: int
    n: int
    N: int
    center: Fraction
    bound: Fraction
    rank_counts: dict[int, int]

    @property
    def deviation(self) -> Fraction:
        return abs(self.N - self.center)

    @property
    def holds(self) -> bool:
        return self.deviation <= self.bound

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "r": self.r,
            "n": self.n,
            "N": self.N,
            "center": str(self.center),
            "deviation": str(self.deviation),
            "bound": str(self.bound),
            "holds": self.holds,
            "N_R": {str(k): v for k, v in sorted(self.rank_counts.items())},
        }


def verify_count_bound(sys: QuadSystem) -> CountBoundReport:
    """Evaluate |N - p^(n-r)| against sum_t p^(n-r-t) N_{2t}."""
    dist = rank_distribution(sys)
    if not dist.hypothesis:
        raise HypothesisFailed(f"{dist.N(0)} coefficient vectors give the zero combination")
    N = count_common_zeros(sys)
    p, n, r = sys.p, sys.n, sys.r
    center = Fraction(p) ** (n - r)
    bound = sum((Fraction(p) ** (n - r - t) * dist.N(2 * t) for t in range(1, n // 2 + 1)), Fraction(0))
    return CountBoundReport(p, r, n, N, center, bound, dist.counts)


def random_quadratic(rng: np.random.Generator, n: int, low: int, high: int, density: float = 1.0) -> Form:
    terms = {}
    for i in range(n):
        for j in range(i, n):
            if density < 1.0 and rng.random() > density:
                continue
            c = int(rng.integers(low, high + 1))
            if c:
                e = [0] * n
                e[i] += 1
                e[j] += 1
                terms[tuple(e)] = c
    return Form(n, 2, terms)


def random_system(rng: np.random.Generator, p: int, r: int, n: int) -> QuadSystem:
    density = float(rng.choice([0.3, 0.6, 1.0]))
    return QuadSystem(tuple(random_quadratic(rng, n, 0, p - 1, density) for _ in range(r)), n, p)


def count_bound_harness(primes: Sequence[int], trials: int, seed: int, max_r: int = 2, max_n: int = 6) -> dict:
    """Check the zero-count inequality on hypothesis-satisfying random systems."""
    ss = np.random.SeedSequence(seed)
    rng = np.random.default_rng(ss)
    reports = []
    skipped = 0
    while len(reports) < trials:
        p = int(rng.choice(list(primes)))
        r = int(rng.integers(1, max_r + 1))
        n = int(rng.integers(max(1, r), max_n + 1))
        sys = random_system(rng, p, r, n)
        if not rank_distribution(sys).hypothesis:
            skipped += 1
            continue
        reports.append(verify_count_bound(sys))
    held = sum(1 for rep in reports if rep.holds)
    return {
        "schema_version": SCHEMA_VERSION,
        "trials": trials,
        "seed": seed,
        "primes": list(primes),
        "held": held,
        "skipped_hypothesis": skipped,
        "equality_cases": sum(1 for rep in reports if rep.deviation == rep.bound),
        "reports": [rep.to_json() for rep in reports],
    }


# ---------------------------------------------------------------------------
# solving systems over Z_p


@dataclass
class SystemCertificate:
    forms: tuple[Form, ...]
    p: int
    precision: int
    vector: tuple[int, ...]
    witness: SystemLiftWitness
    level: int
    trace: list = field(default_factory=list)

    kind = "soluble"

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "forms": [render(f) for f in self.forms],
            "n": self.forms[0].n,
            "p": self.p,
            "level": self.level,
            "precision": self.precision,
            "vector": list(self.vector),
            "witness": self.witness.to_json(),
            "method": "system-hensel",
            "trace": self.trace,
        }


@dataclass
class SystemUnknown:
    forms: tuple[Form, ...]
    p: int
    reason: str
    trace: list = field(default_factory=list)

    kind = "unknown"

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "forms": [render(f) for f in self.forms],
            "p": self.p,
            "reason": self.reason,
            "trace": self.trace,
        }


DEFAULT_SYSTEM_BUDGET = 1 << 12
ESCALATED_SYSTEM_BUDGET = 1 << 18


def solve_system_qp(
    sys: QuadSystem | Sequence[Form],
    p: int | None = None,
    budget: int = DEFAULT_SYSTEM_BUDGET,
    level_max: int = 4,
    precision: int = 32,
    seed: int = 0,
    jobs: int = 1,
) -> SystemCertificate | SystemUnknown:
    """Common nonsingular zero of a quadratic system over Z_p, lifted to p^precision.

    Level 1 asks for a common zero mod p with Jacobian of rank r; higher
    levels accept a minor of valuation delta when every form vanishes to
    order 2 delta + 1.
    """
    if isinstance(sys, QuadSystem):
        forms, p = list(sys.forms), sys.p
    else:
        forms = list(sys)
    check_prime(p)
    original = tuple(forms)
    work = []
    for f in forms:
        if f.is_zero():
            continue
        s = valuation(f.content(), p)
        work.append(Form(f.n, f.d, {e: c // p**s for e, c in f.terms.items()}))
    if not work:
        n = original[0].n
        x = tuple([1] + [0] * (n - 1))
        return SystemCertificate(original, p, precision, x, SystemLiftWitness(p, x, (), 0, 1), 0, [])
    trace = []
    m = 1
    while m <= level_max:

        def accept(Z, m=m):
            for k in range(Z.shape[0]):
                w = system_liftability_check(work, [int(v) for v in Z[k]], p, level=m)
                if w:
                    return k
            return -1

        out = scan(work, p, m, budget=budget, seed=seed + m, jobs=jobs, accept=accept)
        trace.append({"level": m, "evaluated": out.evaluated, "exhaustive": out.exhaustive, "zeros": out.zeros})
        if out.status == FOUND:
            w = system_liftability_check(work, out.vector, p, level=m)
            K = max(precision, 1)
            y = system_lift(work, w, K, PadicContext(p, K))
            return SystemCertificate(original, p, K, tuple(y), w, m, trace)
        if out.exhaustive and out.zeros == 0:
            trace[-1]["note"] = "no primitive common zero at this level"
            return SystemUnknown(original, p, "no primitive common zero (system insoluble)", trace)
        m *= 2
    return SystemUnknown(original, p, "search budget exhausted", trace)


def verify_system_certificate(cert: SystemCertificate) -> bool:
    p, K = cert.p, cert.precision
    if not any(v % p for v in cert.vector):
        return False
    return all(f.value(cert.vector) % p**K == 0 for f in cert.forms)


def demyanov_harness(p: int, trials: int, seed: int, n: int = 9, budget: int = DEFAULT_SYSTEM_BUDGET) -> dict:
    """Random pairs of quadratic forms in n variables; count certified common zeros."""
    ss = np.random.SeedSequence([seed, p])
    results = []
    for child in ss.spawn(trials):
        rng = np.random.default_rng(child)
        pair = [random_quadratic(rng, n, -p * p, p * p) for _ in range(2)]
        cert = solve_system_qp(QuadSystem.of(pair, p), budget=budget, seed=int(child.generate_state(1)[0]))
        ok = cert.kind == "soluble" and verify_system_certificate(cert)
        results.append({"soluble": ok, "level": getattr(cert, "level", None)})
    return {
        "schema_version": SCHEMA_VERSION,
        "p": p,
        "n": n,
        "trials": trials,
        "seed": seed,
        "budget": budget,
        "certified": sum(r["soluble"] for r in results),
        "results": results,
    }

