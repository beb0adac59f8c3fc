"""Primitive-zero search modulo p^m, split-form convolution and certificates.

Two enumeration engines live here:

* a direct engine that walks primitive vectors modulo p^m with the first
  unit coordinate normalised to 1 (one representative per unit orbit),
  evaluated in numpy chunks;
* a split engine for forms that are weighted sums over disjoint variable
  blocks. Per-block value histograms are convolved cyclically to count
  zeros, and a dynamic programme over (running value, primitivity,
  least derivative valuation) finds liftable zeros block by block.

``solve`` glues both to Hensel lifting and produces certificates.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .arith import PadicContext, check_prime, valuation
from .errors import GuardExceeded
from .forms import Form, Normalization, SplitForm, _eval_terms_many, as_form, detect_split, minimize, render
from .lifting import LiftWitness, hensel_lift, liftability_check

GUARD = 1 << 40
DEFAULT_BUDGET = 1 << 22
DEFAULT_LEVEL_MAX = 8
CHUNK = 1 << 15
SCHEMA_VERSION = 1

FOUND = "found"
EXHAUSTED_NONE = "exhausted-none"
BUDGET_EXCEEDED = "budget-exceeded"


# ---------------------------------------------------------------------------
# direct enumeration


def normalized_space_size(n: int, p: int, m: int) -> int:
    """Number of primitive vectors mod p^m whose first unit coordinate is 1."""
    return sum(p ** ((m - 1) * j) * p ** (m * (n - 1 - j)) for j in range(n))


def unit_count(p: int, m: int) -> int:
    return p ** (m - 1) * (p - 1)


def _decode(idx: np.ndarray, radices: Sequence[int]) -> np.ndarray:
    out = np.empty((idx.shape[0], len(radices)), dtype=np.int64)
    idx = idx.copy()
    for pos in range(len(radices) - 1, -1, -1):
        r = radices[pos]
        out[:, pos] = idx % r
        idx //= r
    return out


def _stratum_chunks(n: int, p: int, m: int, chunk: int = CHUNK):
    """Yield normalised primitive vectors mod p^m, stratum by stratum.

    Stratum j holds vectors whose first unit sits at position j: earlier
    coordinates are multiples of p, coordinate j is 1. Inside a stratum the
    order is lexicographic.
    """
    M = p**m
    low = p ** (m - 1)
    for j in range(n):
        radices = [low] * j + [M] * (n - 1 - j)
        size = low**j * M ** (n - 1 - j)
        for start in range(0, size, chunk):
            idx = np.arange(start, min(size, start + chunk), dtype=np.int64)
            digits = _decode(idx, radices) if radices else np.zeros((idx.shape[0], 0), dtype=np.int64)
            X = np.empty((idx.shape[0], n), dtype=np.int64)
            X[:, :j] = digits[:, :j] * p
            X[:, j] = 1
            X[:, j + 1 :] = digits[:, j:]
            yield X


def _random_chunks(n: int, p: int, m: int, budget: int, seed: int, chunk: int = CHUNK):
    rng = np.random.default_rng(seed)
    M = p**m
    left = budget
    while left > 0:
        k = min(chunk, left)
        X = rng.integers(0, M, size=(k, n), dtype=np.int64)
        X = X[(X % p != 0).any(axis=1)]
        left -= k
        if X.shape[0]:
            yield X


def all_vectors(n: int, M: int) -> np.ndarray:
    idx = np.arange(M**n, dtype=np.int64)
    return _decode(idx, [M] * n)


@dataclass
class ScanOutcome:
    status: str
    vector: tuple[int, ...] | None
    zeros: int  # normalised zero rows seen
    evaluated: int
    exhaustive: bool


def _common_zero_mask(fs: Sequence[Form], X: np.ndarray, M: int) -> np.ndarray:
    mask = np.ones(X.shape[0], dtype=bool)
    for f in fs:
        mask &= f.evaluate_many(X, M) == 0
    return mask


def scan(
    fs: Sequence[Form],
    p: int,
    m: int,
    *,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    jobs: int = 1,
    accept: Callable[[np.ndarray], int] | None = None,
    stop_at_first: bool = True,
) -> ScanOutcome:
    """Look for a primitive common zero mod p^m.

    Exhaustive (normalised, deterministic order) when the normalised space
    fits in ``budget``; otherwise ``budget`` seeded random samples, which
    can never certify absence. ``accept`` filters zero rows and returns the
    index of the first acceptable one, or -1.
    """
    fs = list(fs)
    n = fs[0].n
    M = p**m
    space = normalized_space_size(n, p, m)
    exhaustive = space <= budget
    if space > GUARD and exhaustive:
        raise GuardExceeded(f"search space {space} exceeds guard")
    chunks = _stratum_chunks(n, p, m) if exhaustive else _random_chunks(n, p, m, budget, seed)

    def work(X):
        mask = _common_zero_mask(fs, X, M)
        zeros = int(mask.sum())
        hit = None
        if zeros:
            Z = X[mask]
            k = accept(Z) if accept is not None else 0
            if k >= 0:
                hit = tuple(int(v) for v in Z[k])
        return zeros, hit, X.shape[0]

    total_zeros = 0
    evaluated = 0
    pool = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        while True:
            batch = list(itertools.islice(chunks, max(1, jobs)))
            if not batch:
                break
            results = list(pool.map(work, batch)) if pool else [work(X) for X in batch]
            for zeros, hit, count in results:
                total_zeros += zeros
                evaluated += count
                if hit is not None and stop_at_first:
                    return ScanOutcome(FOUND, hit, total_zeros, evaluated, False)
    finally:
        if pool:
            pool.shutdown()
    status = EXHAUSTED_NONE if exhaustive else BUDGET_EXCEEDED
    return ScanOutcome(status, None, total_zeros, evaluated, exhaustive)


def primitive_zero_search(
    fs: Form | Sequence[Form], p: int, m: int, budget: int = DEFAULT_BUDGET, seed: int = 0, jobs: int = 1
) -> ScanOutcome:
    """First primitive common zero mod p^m (normalised order), or why none was found.

    ``EXHAUSTED_NONE`` is certificate grade; ``BUDGET_EXCEEDED`` means Unknown.
    """
    check_prime(p)
    if isinstance(fs, (Form, SplitForm)):
        fs = [as_form(fs)]
    return scan(fs, p, m, budget=budget, seed=seed, jobs=jobs)


def direct_primitive_zero_count(f: Form, p: int, m: int, budget: int = DEFAULT_BUDGET, jobs: int = 1) -> int:
    out = scan([f], p, m, budget=budget, jobs=jobs, stop_at_first=False)
    if not out.exhaustive:
        raise GuardExceeded("direct count needs an exhaustive scan")
    return out.zeros * unit_count(p, m)


def capped_valuation_array(a: np.ndarray, p: int, cap: int) -> np.ndarray:
    """Elementwise min(v_p(a), cap) for residues a (0 maps to cap)."""
    out = np.full(a.shape, cap, dtype=np.int64)
    pk = 1
    for k in range(cap):
        pk *= p
        hit = (out == cap) & (a % pk != 0)
        out[hit] = k
    return out


def liftable_filter(f: Form, p: int, m: int) -> Callable[[np.ndarray], int]:
    """Accept zero rows having a partial derivative of valuation <= (m-1)//2."""
    E = (m - 1) // 2
    mod = p ** (E + 1)
    parts = f.derivative_terms()

    def accept(Z: np.ndarray) -> int:
        ok = np.zeros(Z.shape[0], dtype=bool)
        for part in parts:
            if part:
                ok |= _eval_terms_many(part, Z, mod, f.d - 1) != 0
        hits = np.flatnonzero(ok)
        return int(hits[0]) if hits.size else -1

    return accept


# ---------------------------------------------------------------------------
# histograms and split convolution


@dataclass
class ValueHistogram:
    p: int
    m: int
    weight: int
    all: np.ndarray  # counts over every vector mod p^m
    divisible: np.ndarray  # counts over vectors p*y, y mod p^(m-1)

    @property
    def modulus(self) -> int:
        return self.p**self.m

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "weight": self.weight,
            "all": {str(v): int(c) for v, c in enumerate(self.all) if c},
            "divisible": {str(v): int(c) for v, c in enumerate(self.divisible) if c},
        }


def _check_guard(n: int, M: int, guard: int):
    if M**n > guard:
        raise GuardExceeded(f"{M}^{n} block vectors exceed guard {guard}")


def value_distribution(block: Form, p: int, m: int, guard: int = GUARD, weight: int = 1) -> ValueHistogram:
    """Exact histograms of weight*block(x) mod p^m by full enumeration."""
    M = p**m
    _check_guard(block.n, M, guard)
    X = all_vectors(block.n, M)
    vals = block.evaluate_many(X, M) * (weight % M) % M
    h_all = np.bincount(vals, minlength=M).astype(np.int64)
    Y = all_vectors(block.n, p ** (m - 1)) if m > 1 else np.zeros((1, block.n), dtype=np.int64)
    scale = weight * p**block.d % M
    vals_div = block.evaluate_many(Y, M) * scale % M
    h_div = np.bincount(vals_div, minlength=M).astype(np.int64)
    return ValueHistogram(p, m, weight, h_all, h_div)


def _needs_objects(hists: Sequence[np.ndarray]) -> bool:
    bound = 1
    for h in hists:
        bound *= int(h.sum())
    return bound >= 1 << 62


def cyclic_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    M = a.shape[0]
    out = np.zeros(M, dtype=a.dtype)
    for v in np.flatnonzero(b):
        out += b[v] * np.roll(a, int(v))
    return out


def zero_sum_count(hists: Sequence[np.ndarray]) -> int:
    """Number of tuples, weighted by the histograms, whose values sum to 0 mod M."""
    if _needs_objects(hists):
        hists = [h.astype(object) for h in hists]
    acc = hists[0]
    for h in hists[1:-1]:
        acc = cyclic_convolve(acc, h)
    if len(hists) == 1:
        return int(acc[0])
    last = hists[-1]
    M = last.shape[0]
    neg = last[(-np.arange(M)) % M]
    return int(sum(int(x) * int(y) for x, y in zip(acc, neg)))


@dataclass
class SplitCount:
    p: int
    m: int
    all_zeros: int
    nonprimitive_zeros: int
    histograms: list[ValueHistogram]

    @property
    def primitive_zeros(self) -> int:
        return self.all_zeros - self.nonprimitive_zeros

    def ledger(self) -> dict:
        return {
            "all_zeros": self.all_zeros,
            "nonprimitive_zeros": self.nonprimitive_zeros,
            "primitive_zeros": self.primitive_zeros,
        }


def block_histograms(sf: SplitForm, p: int, m: int, guard: int = GUARD, jobs: int = 1) -> list[ValueHistogram]:
    def one(b):
        return value_distribution(b.form, p, m, guard, b.weight)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, sf.blocks))
    return [one(b) for b in sf.blocks]


def split_zero_count(sf: SplitForm, p: int, m: int, guard: int = GUARD, jobs: int = 1) -> SplitCount:
    """Primitive zeros of a split form mod p^m by inclusion-exclusion over histograms."""
    check_prime(p)
    hists = block_histograms(sf, p, m, guard, jobs)
    all_zeros = zero_sum_count([h.all for h in hists])
    div_zeros = zero_sum_count([h.divisible for h in hists])
    return SplitCount(p, m, all_zeros, div_zeros, hists)


@dataclass
class _BlockClasses:
    vectors: np.ndarray
    vals: np.ndarray
    prim: np.ndarray
    ecls: np.ndarray
    reps: np.ndarray


def _block_classes(block, p: int, m: int, ecap: int, guard: int) -> _BlockClasses:
    M = p**m
    form = block.form
    _check_guard(form.n, M, guard)
    X = all_vectors(form.n, M)
    w = block.weight
    vals = form.evaluate_many(X, M) * (w % M) % M
    prim = (X % p != 0).any(axis=1).astype(np.int64)
    if ecap > 0:
        emod = p**ecap
        e = np.full(X.shape[0], ecap, dtype=np.int64)
        for part in form.derivative_terms():
            if part:
                g = _eval_terms_many(part, X, emod, form.d - 1) * (w % emod) % emod
                e = np.minimum(e, capped_valuation_array(g, p, ecap))
    else:
        e = np.zeros(X.shape[0], dtype=np.int64)
    key = (vals * 2 + prim) * (ecap + 1) + e
    _, reps = np.unique(key, return_index=True)
    reps = np.sort(reps)
    return _BlockClasses(X, vals[reps], prim[reps], e[reps], reps)


def split_zero_search(
    sf: SplitForm, p: int, m: int, liftable: bool = True, guard: int = GUARD
) -> tuple[int, ...] | None:
    """Find a primitive zero mod p^m of a split form, block by block.

    With ``liftable`` the zero must have a partial derivative of valuation
    at most (m-1)//2, which makes it a Hensel seed at level m.
    """
    M = p**m
    E = (m - 1) // 2 if liftable else -1
    ecap = E + 1
    width = ecap + 1
    nstates = M * 2 * width
    reach = np.zeros(nstates, dtype=bool)
    reach[(0 * 2 + 0) * width + ecap] = True
    history = []
    for block in sf.blocks:
        cls = _block_classes(block, p, m, ecap, guard)
        cur = np.flatnonzero(reach)
        cur_e = cur % width
        cur_prim = (cur // width) % 2
        cur_val = cur // (2 * width)
        new = np.zeros(nstates, dtype=bool)
        back_cls = np.full(nstates, -1, dtype=np.int64)
        back_prev = np.full(nstates, -1, dtype=np.int64)
        for c in range(cls.reps.shape[0]):
            tgt = (((cur_val + cls.vals[c]) % M) * 2 + (cur_prim | cls.prim[c])) * width + np.minimum(
                cur_e, cls.ecls[c]
            )
            fresh = ~new[tgt]
            if not fresh.any():
                continue
            t_f = tgt[fresh]
            uniq, first = np.unique(t_f, return_index=True)
            new[uniq] = True
            back_cls[uniq] = c
            back_prev[uniq] = cur[fresh][first]
        history.append((cls, back_cls, back_prev))
        reach = new
    goal = None
    for e in range(0, ecap if liftable else 1):
        s = (0 * 2 + 1) * width + e
        if reach[s]:
            goal = s
            break
    if goal is None:
        return None
    x = [0] * sf.n
    state = goal
    for block, (cls, back_cls, back_prev) in zip(reversed(sf.blocks), reversed(history)):
        c = back_cls[state]
        vec = cls.vectors[cls.reps[c]]
        for local, g in enumerate(block.variables):
            x[g] = int(vec[local])
        state = back_prev[state]
    return tuple(x)


# ---------------------------------------------------------------------------
# certificates


@dataclass
class SolubilityCertificate:
    form: Form
    p: int
    precision: int
    vector: tuple[int, ...]
    witness: LiftWitness
    level: int
    method: str
    trace: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    kind = "soluble"

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "form": render(self.form),
            "n": self.form.n,
            "p": self.p,
            "level": self.level,
            "precision": self.precision,
            "vector": list(self.vector),
            "witness": self.witness.to_json(),
            "method": self.method,
            "provenance": self.provenance,
            "trace": self.trace,
        }


@dataclass
class InsolubilityCertificate:
    form: Form
    p: int
    level: int
    method: str
    certified_form: Form
    normalization: dict
    ledger: dict = field(default_factory=dict)
    histograms: list = field(default_factory=list)
    blocks: list = field(default_factory=list)
    trace: list = field(default_factory=list)

    kind = "insoluble"

    @property
    def modulus(self) -> int:
        return self.p**self.level

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "form": render(self.form),
            "n": self.form.n,
            "p": self.p,
            "level": self.level,
            "modulus": self.modulus,
            "method": self.method,
            "certified_form": render(self.certified_form),
            "normalization": self.normalization,
            "ledger": self.ledger,
            "blocks": self.blocks,
            "histograms": [h.to_json() for h in self.histograms],
            "trace": self.trace,
        }


@dataclass
class Unknown:
    form: Form | None
    p: int
    reason: str
    trace: list = field(default_factory=list)

    kind = "unknown"

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "form": render(self.form) if self.form is not None else None,
            "p": self.p,
            "reason": self.reason,
            "trace": self.trace,
        }


@dataclass(frozen=True)
class Refuted:
    """A primitive zero mod p^m was found, so no insolubility certificate at this level."""

    vector: tuple[int, ...]
    level: int

    def __bool__(self):
        return False


def _normalization_json(norm: Normalization) -> dict:
    return {"shift": norm.shift, "scalings": list(norm.scalings)}


def _blocks_json(sf: SplitForm) -> list:
    return [{"variables": list(b.variables), "weight": b.weight, "form": render(b.form)} for b in sf.blocks]


def _split_certificate(f: Form, g: Form, sf: SplitForm, norm, cnt: SplitCount, trace=None) -> InsolubilityCertificate:
    return InsolubilityCertificate(
        form=f,
        p=cnt.p,
        level=cnt.m,
        method="split-convolution",
        certified_form=g,
        normalization=_normalization_json(norm),
        ledger=cnt.ledger(),
        histograms=cnt.histograms,
        blocks=_blocks_json(sf),
        trace=list(trace or []),
    )


def certify_insoluble(
    f: Form | SplitForm, p: int, m: int, guard: int = GUARD, budget: int = DEFAULT_BUDGET, jobs: int = 1
) -> InsolubilityCertificate | Refuted:
    """Certificate that f has no primitive zero mod p^m, or a primitive zero."""
    check_prime(p)
    sf = f if isinstance(f, SplitForm) else detect_split(f)
    form = as_form(f)
    norm = Normalization(form, 0, (0,) * form.n)
    if sf is not None:
        cnt = split_zero_count(sf, p, m, guard, jobs)
        if cnt.primitive_zeros == 0:
            return _split_certificate(form, form, sf, norm, cnt)
        if normalized_space_size(form.n, p, m) <= budget:
            out = scan([form], p, m, budget=budget, jobs=jobs)
            return Refuted(out.vector, m)
        return Refuted(split_zero_search(sf, p, m, liftable=False, guard=guard), m)
    space = normalized_space_size(form.n, p, m)
    if space > guard:
        raise GuardExceeded(f"direct enumeration of {space} vectors exceeds guard")
    out = scan([form], p, m, budget=max(budget, space), jobs=jobs)
    if out.status == FOUND:
        return Refuted(out.vector, m)
    return InsolubilityCertificate(
        form=form,
        p=p,
        level=m,
        method="direct-enumeration",
        certified_form=form,
        normalization=_normalization_json(norm),
        ledger={"normalized_vectors": out.evaluated, "primitive_zeros": 0},
    )


# ---------------------------------------------------------------------------
# the solve pipeline


@dataclass
class SolveOptions:
    precision: int = 32
    level_max: int = DEFAULT_LEVEL_MAX
    budget: int = DEFAULT_BUDGET
    seed: int = 0
    jobs: int = 1
    guard: int = GUARD
    extra_levels: tuple[int, ...] = ()
    use_split: bool = True
    heuristic: bool = True


def escalation_levels(level_max: int, extra: Sequence[int] = ()) -> list[int]:
    levels = set(extra)
    m = 1
    while m <= level_max:
        levels.add(m)
        m *= 2
    return sorted(v for v in levels if v >= 1)


def _content_free(x: Sequence[int], p: int) -> tuple[list[int], int]:
    nz = [v for v in x if v]
    if not nz:
        return list(x), 0
    t = min(valuation(v, p) for v in nz)
    return [v // p**t for v in x], t


def _certify_on_original(
    f: Form, g: Form, norm: Normalization, seed: tuple[int, ...], p: int, K: int
) -> tuple[list[int], LiftWitness]:
    """Lift a seed of the normalised form and re-anchor it on the original form."""
    wg = liftability_check(g, seed, p)
    if not wg:
        raise ArithmeticError(f"search returned a non-liftable seed: {wg}")
    if norm.shift == 0 and not any(norm.scalings):
        y = hensel_lift(g, wg, K, PadicContext(p, max(K, 1)))
        return y, wg
    extra = f.d * max(norm.scalings) + norm.shift + 2 * wg.e + 2
    for attempt in range(6):
        Kg = K + extra * (attempt + 1) + 2 * attempt
        y = hensel_lift(g, wg, Kg, PadicContext(p, Kg))
        x, _ = _content_free(norm.to_original(y, p), p)
        wf = liftability_check(f, x, p, cap=Kg)
        if wf:
            # the seed only matters modulo p^(2e+1); keep certificates small
            short = [v % p ** (2 * wf.e + 1) for v in x]
            ws = liftability_check(f, short, p, cap=2 * wf.e + 1)
            if ws and ws.e == wf.e:
                wf = ws
            Kf = max(K, 1)
            out = hensel_lift(f, wf, Kf, PadicContext(p, max(Kf, wf.level)))
            return out, wf
    raise ArithmeticError("could not transport the zero back to the original form")


def solve(
    f: Form | SplitForm,
    p: int,
    options: SolveOptions | None = None,
    normalization: Normalization | None = None,
) -> SolubilityCertificate | InsolubilityCertificate | Unknown:
    """Decide solubility of f over Q_p by search, Hensel lifting and counting."""
    check_prime(p)
    opt = options or SolveOptions()
    original = as_form(f)
    norm = normalization or minimize(original, p, opt.heuristic)
    g = norm.form
    sf = detect_split(g) if opt.use_split else None
    trace: list[dict] = []
    for m in escalation_levels(opt.level_max, opt.extra_levels):
        M = p**m
        entry: dict = {"level": m}
        if sf is not None and all(M ** len(b.variables) <= opt.budget for b in sf.blocks):
            entry["engine"] = "split"
            seed = split_zero_search(sf, p, m, liftable=True, guard=opt.guard)
            if seed is not None:
                entry["result"] = "liftable-seed"
                trace.append(entry)
                return _soluble(original, g, norm, seed, p, m, "split-dp", opt, trace)
            cnt = split_zero_count(sf, p, m, opt.guard, opt.jobs)
            entry["primitive_zeros"] = cnt.primitive_zeros
            trace.append(entry)
            if cnt.primitive_zeros == 0:
                return _split_certificate(original, g, sf, norm, cnt, trace)
            continue
        entry["engine"] = "direct"
        out = scan([g], p, m, budget=opt.budget, seed=opt.seed + m, jobs=opt.jobs, accept=liftable_filter(g, p, m))
        entry["evaluated"] = out.evaluated
        entry["exhaustive"] = out.exhaustive
        if out.status == FOUND:
            entry["result"] = "liftable-seed"
            trace.append(entry)
            return _soluble(original, g, norm, out.vector, p, m, "direct-search", opt, trace)
        entry["normalized_zeros"] = out.zeros
        trace.append(entry)
        if out.exhaustive and out.zeros == 0:
            return InsolubilityCertificate(
                form=original,
                p=p,
                level=m,
                method="direct-enumeration",
                certified_form=g,
                normalization=_normalization_json(norm),
                ledger={"normalized_vectors": out.evaluated, "primitive_zeros": 0},
                trace=trace,
            )
    return Unknown(original, p, "escalation ceiling reached without a certificate", trace)


def _soluble(original, g, norm, seed, p, m, method, opt, trace) -> SolubilityCertificate:
    K = max(opt.precision, m)
    y, w = _certify_on_original(original, g, norm, seed, p, K)
    return SolubilityCertificate(
        form=original,
        p=p,
        precision=K,
        vector=tuple(y),
        witness=w,
        level=m,
        method=method,
        trace=trace,
        provenance={"strategy": method, "seed": opt.seed, "normalization": _normalization_json(norm)},
    )


def verify_solubility(cert: SolubilityCertificate) -> bool:
    """Quick self-check of a solubility certificate (the CLI verifier is independent)."""
    f, p, w = cert.form, cert.p, cert.witness
    if f.value(cert.vector) % p**cert.precision:
        return False
    g = f.gradient_value(w.seed)[w.index]
    if g == 0 or valuation(g, p) != w.e:
        return False
    fs = f.value(w.seed)
    if fs != 0 and valuation(fs, p) < 2 * w.e + 1:
        return False
    return all((a - b) % p ** (w.e + 1) == 0 for a, b in zip(cert.vector, w.seed))


# ---------------------------------------------------------------------------
# the quartic lemma scan

QUARTIC_SCAN_MAX_P = 13


@dataclass
class QuarticScanReport:
    p: int
    total: int
    soluble: list
    insoluble: list
    unknown: list

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "p": self.p,
            "total": self.total,
            "counts": {
                "soluble": len(self.soluble),
                "insoluble": len(self.insoluble),
                "unknown": len(self.unknown),
            },
            "soluble": self.soluble,
            "insoluble": self.insoluble,
            "unknown": self.unknown,
        }


def quartic_lemma_scan(p: int, budget: int = DEFAULT_BUDGET, options: SolveOptions | None = None) -> QuarticScanReport:
    """Run ``solve`` on A x^4 + B x y^3 + C y^4 + D x z^3 + E y z^3 + F z^4 for all tuples mod p
    with A, C, F units."""
    from .forms import quartic_H

    check_prime(p)
    if p > QUARTIC_SCAN_MAX_P:
        raise GuardExceeded(f"quartic scan is limited to p <= {QUARTIC_SCAN_MAX_P}")
    opt = options or SolveOptions(budget=budget)
    units = range(1, p)
    soluble, insoluble, unknown = [], [], []
    total = 0
    for A, C, F in itertools.product(units, repeat=3):
        for B, D, E in itertools.product(range(p), repeat=3):
            total += 1
            coeffs = [A, B, C, D, E, F]
            cert = solve(quartic_H(*coeffs), p, opt)
            if cert.kind == "soluble":
                soluble.append({"coefficients": coeffs, "seed": list(cert.witness.seed), "level": cert.level})
            elif cert.kind == "insoluble":
                insoluble.append({"coefficients": coeffs, "level": cert.level})
            else:
                unknown.append({"coefficients": coeffs})
    return QuarticScanReport(p, total, soluble, insoluble, unknown)
