"""Hensel lifting of approximate zeros, for single forms and for systems.

Single forms use the generalized criterion: if x is primitive, e is the
least valuation of a partial derivative at x and v_p(f(x)) >= 2e + 1, then
Newton iteration in that one coordinate converges to a p-adic zero that
agrees with x modulo p^(e+1).

For systems the analogous statement uses an r x r minor of the Jacobian
with valuation delta and requires every f_j(x) to vanish modulo p^(2 delta + 1).
"""

from __future__ import annotations

import itertools
from math import comb
from dataclasses import dataclass
from typing import Sequence

from .arith import PadicContext, valuation, valuation_capped
from .errors import DimensionMismatch, PrecisionExhausted
from .forms import Form
from .linalg import det, fraction_mod, row_echelon_mod_p, solve_fraction

# largest Jacobian-minor enumeration tried when looking for a small-valuation minor
_MINOR_SEARCH_LIMIT = 5000


@dataclass(frozen=True)
class LiftWitness:
    p: int
    seed: tuple[int, ...]
    level: int
    index: int
    e: int

    def to_json(self) -> dict:
        return {"seed": list(self.seed), "level": self.level, "index": self.index, "e": self.e}


@dataclass(frozen=True)
class NotLiftable:
    """Diagnostic outcome of a failed liftability check (falsy)."""

    reason: str
    value_valuation: int | None = None
    e: int | None = None

    def __bool__(self):
        return False


@dataclass(frozen=True)
class SystemLiftWitness:
    p: int
    seed: tuple[int, ...]
    pivots: tuple[int, ...]
    delta: int = 0
    level: int = 1

    def to_json(self) -> dict:
        return {"seed": list(self.seed), "pivots": list(self.pivots), "delta": self.delta, "level": self.level}


def is_primitive(x: Sequence[int], p: int) -> bool:
    return any(v % p for v in x)


def liftability_check(f: Form, x: Sequence[int], p: int, cap: int | None = None) -> LiftWitness | NotLiftable:
    """Return a LiftWitness iff v_p(f(x)) >= 2e + 1 for the best coordinate.

    ``cap`` bounds the recorded level when f(x) vanishes exactly.
    """
    if len(x) != f.n:
        raise DimensionMismatch(f"vector of length {len(x)} for a form in {f.n} variables")
    if not is_primitive(x, p):
        raise ValueError("seed must be primitive modulo p")
    grads = f.gradient_value(x)
    best = None
    for i, g in enumerate(grads):
        if g:
            e = valuation(g, p)
            if best is None or e < best[1]:
                best = (i, e)
    fx = f.value(x)
    vf = None if fx == 0 else valuation(fx, p)
    if best is None:
        return NotLiftable("gradient vanishes", vf, None)
    index, e = best
    if vf is not None and vf < 2 * e + 1:
        return NotLiftable("value valuation below 2e+1", vf, e)
    level = vf if vf is not None else max(2 * e + 1, cap or 0)
    return LiftWitness(p, tuple(int(v) for v in x), level, index, e)


def hensel_lift(f: Form, w: LiftWitness, K: int, context: PadicContext | None = None) -> list[int]:
    """Newton iteration on coordinate ``w.index``.

    Returns z mod p^K where z is the exact zero reached by moving that one
    coordinate, so lifts to different precisions agree with each other.
    """
    p = w.p
    ctx = context or PadicContext(p)
    ctx.check_precision(K)
    i, e = w.index, w.e
    if K + e <= w.level:
        # the seed already fixes z modulo p^(level - e)
        return [v % p**K for v in w.seed]
    work = p ** (K + 2 * e)
    y = [v % work for v in w.seed]
    # v(f(y)) >= K + e forces y_i = z_i mod p^K
    target = p ** (K + e)
    for _ in range(4 * K + 8):
        fy = f.value(y)
        if fy % target == 0:
            return [v % p**K for v in y]
        g = f.gradient_value(y)[i]
        if valuation_capped(g, p, e + 1) != e:
            raise ArithmeticError("derivative valuation drifted; witness was invalid")
        u = g // p**e
        step = (fy // p**e) * pow(u, -1, work) % work
        y[i] = (y[i] - step) % work
    raise PrecisionExhausted("Newton iteration did not converge")


def _jacobian(fs: Sequence[Form], x: Sequence[int]) -> list[list[int]]:
    return [f.gradient_value(x) for f in fs]


def _best_minor(J: list[list[int]], p: int) -> tuple[tuple[int, ...], int] | None:
    """Pivot columns of an r x r minor of least p-adic valuation."""
    r, n = len(J), len(J[0])
    rank, pivots = row_echelon_mod_p(J, p)
    if rank == r:
        return tuple(pivots), 0
    if comb(n, r) > _MINOR_SEARCH_LIMIT:
        return None
    best = None
    for cols in itertools.combinations(range(n), r):
        dv = det([[row[c] for c in cols] for row in J])
        if dv:
            v = valuation(dv, p)
            if best is None or v < best[1]:
                best = (cols, v)
    return best


def system_liftability_check(
    fs: Sequence[Form], x: Sequence[int], p: int, level: int = 1
) -> SystemLiftWitness | NotLiftable:
    """Witness iff all f_j(x) vanish to order >= 2 delta + 1 at a minor of valuation delta.

    With ``level = 1`` this is the plain test: common zero mod p and a
    Jacobian of full rank r over F_p.
    """
    fs = list(fs)
    if not fs:
        raise ValueError("empty system")
    n = fs[0].n
    if any(f.n != n for f in fs) or len(x) != n:
        raise DimensionMismatch("system forms and vector disagree on the variable count")
    if not is_primitive(x, p):
        raise ValueError("seed must be primitive modulo p")
    r = len(fs)
    if r > n:
        return NotLiftable("RankDeficient")
    values = [f.value(x) for f in fs]
    vmin = min(valuation_capped(v, p, 10**9) for v in values)
    if vmin < 1:
        return NotLiftable("not a common zero mod p", vmin)
    J = _jacobian(fs, x)
    if level <= 1:
        rank, pivots = row_echelon_mod_p(J, p)
        if rank < r:
            return NotLiftable("RankDeficient", vmin)
        return SystemLiftWitness(p, tuple(int(v) for v in x), tuple(pivots), 0, 1)
    best = _best_minor(J, p)
    if best is None:
        return NotLiftable("RankDeficient", vmin)
    cols, delta = best
    if vmin < 2 * delta + 1:
        return NotLiftable("value valuation below 2*delta+1", vmin, delta)
    return SystemLiftWitness(p, tuple(int(v) for v in x), tuple(cols), delta, min(vmin, 10**6))


def system_lift(fs: Sequence[Form], w: SystemLiftWitness, K: int, context: PadicContext | None = None) -> list[int]:
    """Multivariate Newton on the pivot coordinates until every f_j(y) = 0 mod p^K."""
    p = w.p
    ctx = context or PadicContext(p)
    ctx.check_precision(K)
    fs = list(fs)
    target = p**K
    work_k = K + w.delta + 1
    work = p**work_k
    y = [v % work for v in w.seed]
    if K <= 1 and w.delta == 0:
        return [v % target for v in w.seed]
    cols = list(w.pivots)
    for _ in range(4 * K + 8):
        vals = [f.value(y) for f in fs]
        if all(v % target == 0 for v in vals):
            return [v % target for v in y]
        J = _jacobian(fs, y)
        minor = [[row[c] for c in cols] for row in J]
        step = solve_fraction(minor, vals)
        for c, s in zip(cols, step):
            y[c] = (y[c] - fraction_mod(s, p, work_k)) % work
    raise PrecisionExhausted("system Newton iteration did not converge")


def verify_lift(f: Form, y: Sequence[int], w: LiftWitness, K: int) -> bool:
    p = w.p
    return f.value(y) % p**K == 0 and all((a - b) % p ** (w.e + 1) == 0 for a, b in zip(y, w.seed))

