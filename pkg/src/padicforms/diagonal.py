"""Diagonal equations c_1 x_1^d + ... + c_m x_m^d = 0 over Q_p."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import check_prime, valuation
from .forms import Form, Normalization
from .search import SCHEMA_VERSION, SolveOptions, solve, verify_solubility

HARNESS_MAX_D = 4
HARNESS_MAX_P = 13


@dataclass(frozen=True)
class DiagonalInstance:
    coefficients: tuple[int, ...]
    d: int
    p: int

    def __post_init__(self):
        check_prime(self.p)
        if not self.coefficients or any(c == 0 for c in self.coefficients):
            raise ValueError("coefficients must be nonzero and nonempty")
        if self.d < 2:
            raise ValueError("degree must be at least 2")

    @property
    def m(self) -> int:
        return len(self.coefficients)

    def form(self) -> Form:
        m = self.m
        return Form(m, self.d, {tuple(self.d if j == i else 0 for j in range(m)): c for i, c in enumerate(self.coefficients)})


@dataclass(frozen=True)
class NormalizedDiagonal:
    instance: DiagonalInstance
    coefficients: tuple[int, ...]  # p^(a_i mod d) * u_i
    exponents: tuple[int, ...]  # a_i mod d
    classes: dict
    normalization: Normalization

    @property
    def max_exponent(self) -> int:
        return max(self.exponents)


def normalize(inst: DiagonalInstance) -> NormalizedDiagonal:
    """Strip p^(d*floor(a_i/d)) from each coefficient and group indices by a_i mod d.

    The substitution x_i -> p^(Q - q_i) x_i records how zeros map back.
    """
    p, d = inst.p, inst.d
    vals = [valuation(c, p) for c in inst.coefficients]
    qs = [a // d for a in vals]
    coeffs = tuple(c // p ** (d * q) for c, q in zip(inst.coefficients, qs))
    exps = tuple(a % d for a in vals)
    classes: dict[int, list[int]] = {}
    for i, r in enumerate(exps):
        classes.setdefault(r, []).append(i)
    Q = max(qs)
    m = inst.m
    g = Form(m, d, {tuple(d if j == i else 0 for j in range(m)): c for i, c in enumerate(coeffs)})
    norm = Normalization(g, d * Q, tuple(Q - q for q in qs))
    return NormalizedDiagonal(inst, coeffs, exps, classes, norm)


def escalation_ceiling(d: int, p: int, max_exponent: int) -> int:
    """Highest level tried before reporting Unknown: 2 v_p(d) + 1 + d * ceil(max_exponent / d)."""
    vd = valuation(d, p) if d % p == 0 else 0
    return 2 * vd + 1 + d * math.ceil(max_exponent / d)


def solve_diagonal(inst: DiagonalInstance, budget: int | None = None, options: SolveOptions | None = None):
    """Normalize, then run the generic pipeline with the level ceiling as an extra level."""
    nd = normalize(inst)
    gamma = escalation_ceiling(inst.d, inst.p, nd.max_exponent)
    opt = options or SolveOptions()
    if budget is not None:
        opt = SolveOptions(**{**opt.__dict__, "budget": budget})
    opt = SolveOptions(**{**opt.__dict__, "level_max": gamma, "extra_levels": (gamma,)})
    return solve(inst.form(), inst.p, opt, normalization=nd.normalization)


def random_instance(rng: np.random.Generator, d: int, p: int, m: int) -> DiagonalInstance:
    bound = p**3
    coeffs = []
    while len(coeffs) < m:
        c = int(rng.integers(-bound, bound + 1))
        if c:
            coeffs.append(c)
    return DiagonalInstance(tuple(coeffs), d, p)


def dl_property_harness(d: int, p: int, trials: int, seed: int, jobs: int = 1) -> dict:
    """Random instances with m = d^2 + 1 variables; all should be certified soluble."""
    if d > HARNESS_MAX_D or p > HARNESS_MAX_P:
        raise ValueError(f"harness limited to d <= {HARNESS_MAX_D}, p <= {HARNESS_MAX_P}")
    children = np.random.SeedSequence([seed, d, p]).spawn(trials)

    def run(child):
        inst = random_instance(np.random.default_rng(child), d, p, d * d + 1)
        cert = solve_diagonal(inst)
        ok = cert.kind == "soluble" and verify_solubility(cert)
        return {
            "coefficients": list(inst.coefficients),
            "kind": cert.kind,
            "verified": ok,
            "level": getattr(cert, "level", None),
        }

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run, children))
    else:
        rows = [run(c) for c in children]
    soluble = sum(1 for r in rows if r["kind"] == "soluble" and r["verified"])
    return {
        "schema_version": SCHEMA_VERSION,
        "d": d,
        "p": p,
        "m": d * d + 1,
        "trials": trials,
        "seed": seed,
        "soluble": soluble,
        "fraction": soluble / trials if trials else 1.0,
        "instances": rows,
    }
