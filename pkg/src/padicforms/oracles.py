"""Cross-checks between independent routes to the same answer.

Each suite draws seeded random instances and compares two or three
computations that share no counting code. They back the ``selftest``
command and the test suite.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from .forms import Block, Form, SplitForm
from .quad import decide_isotropic_diagonal
from .search import SolveOptions, direct_primitive_zero_count, solve, split_zero_count

SPLIT_SPACE_LIMIT = 3**8


def brute_primitive_zero_count(f: Form, p: int, m: int) -> int:
    M = p**m
    return sum(1 for x in itertools.product(range(M), repeat=f.n) if any(v % p for v in x) and f.value(x) % M == 0)


def _random_block_form(rng: np.random.Generator, n: int, d: int, p: int) -> Form:
    terms = {}
    monomials = [e for e in itertools.product(range(d + 1), repeat=n) if sum(e) == d]
    for e in monomials:
        if rng.random() < 0.6:
            c = int(rng.integers(-2 * p, 2 * p + 1))
            if c:
                terms[e] = c
    if not terms:
        e = [0] * n
        e[0] = d
        terms[tuple(e)] = 1
    return Form(n, d, terms)


def random_split_form(rng: np.random.Generator, p: int, m: int) -> SplitForm:
    """Random split form with (p^m)^n within the oracle limit."""
    M = p**m
    n_max = 1
    while M ** (n_max + 1) <= SPLIT_SPACE_LIMIT:
        n_max += 1
    n = int(rng.integers(2, max(2, n_max) + 1))
    d = int(rng.integers(2, 5))
    sizes = []
    left = n
    while left:
        s = int(rng.integers(1, min(3, left) + 1))
        sizes.append(s)
        left -= s
    blocks = []
    start = 0
    for s in sizes:
        weight = int(rng.choice([1, 1, 2, 3, p, -1, p * p]))
        blocks.append(Block(_random_block_form(rng, s, d, p), weight, tuple(range(start, start + s))))
        start += s
    return SplitForm(tuple(blocks), n)


def split_oracle_suite(trials: int = 200, seed: int = 0) -> dict:
    """split_zero_count vs direct enumeration vs itertools brute force."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 2]))
    mismatches = []
    done = 0
    while done < trials:
        p = int(rng.choice([2, 3]))
        m = int(rng.integers(1, 4 if p == 2 else 3))
        sf = random_split_form(rng, p, m)
        f = sf.to_form()
        if (p**m) ** f.n > SPLIT_SPACE_LIMIT:
            continue
        done += 1
        a = split_zero_count(sf, p, m).primitive_zeros
        b = direct_primitive_zero_count(f, p, m)
        c = brute_primitive_zero_count(f, p, m)
        if not a == b == c:
            mismatches.append({"form": str(f), "p": p, "m": m, "split": a, "direct": b, "brute": c})
    return {"suite": "split-vs-direct", "trials": trials, "seed": seed, "mismatches": mismatches}


def _random_unitish(rng: np.random.Generator, p: int) -> int:
    u = 0
    while u % p == 0:
        u = int(rng.integers(1, 4 * p * p))
    sign = -1 if rng.random() < 0.5 else 1
    return sign * u * p ** int(rng.integers(0, 2))


def hilbert_oracle_suite(trials: int = 100, seed: int = 0, level: int = 5) -> dict:
    """Hilbert-symbol isotropy decision vs the search pipeline on diagonal forms."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 3]))
    mismatches = []
    unknown = 0
    for _ in range(trials):
        p = int(rng.choice([2, 3, 5, 7]))
        n = int(rng.integers(2, 5))
        coeffs = [_random_unitish(rng, p) for _ in range(n)]
        decided = decide_isotropic_diagonal([Fraction(c) for c in coeffs], p)
        f = Form(n, 2, {tuple(2 if j == i else 0 for j in range(n)): c for i, c in enumerate(coeffs)})
        cert = solve(f, p, SolveOptions(level_max=level, extra_levels=(level,)))
        if cert.kind == "unknown":
            unknown += 1
            mismatches.append({"coefficients": coeffs, "p": p, "decision": decided, "search": "unknown"})
        elif (cert.kind == "soluble") != decided:
            mismatches.append({"coefficients": coeffs, "p": p, "decision": decided, "search": cert.kind})
    return {"suite": "hilbert-vs-search", "trials": trials, "seed": seed, "unknown": unknown, "mismatches": mismatches}
