"""Homogeneous integer forms: parsing, rendering, evaluation and transformation.

A :class:`Form` is a sparse map from exponent vectors to nonzero integer
coefficients. Variables are written ``x1 .. xn`` in text and are 0-based in
code. Monomials are kept in descending lexicographic order of exponent
vectors, which fixes both the rendering and the hash.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .arith import check_prime, valuation
from .errors import (
    DimensionMismatch,
    FormSyntaxError,
    InhomogeneousError,
    UnknownName,
    ZeroForm,
)

Exps = tuple  # tuple[int, ...]

# int64 products of two residues stay exact below this modulus
_NUMPY_SAFE_MODULUS = 1 << 31


class Form:
    """Homogeneous polynomial of degree ``d`` in ``n`` variables over Z.

    The zero form (no terms) is allowed so that coefficient systems can carry
    vanishing members; most operations on it are trivial.
    """

    __slots__ = ("n", "d", "_terms", "_key", "_grad")

    def __init__(self, n: int, d: int, terms: Mapping[Exps, int]):
        if n < 1:
            raise ValueError("a form needs at least one variable")
        if d < 0:
            raise ValueError("degree must be nonnegative")
        clean = {}
        for exps, c in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise DimensionMismatch(f"monomial {exps} has length {len(exps)}, expected {n}")
            if sum(exps) != d:
                raise InhomogeneousError([sum(exps), d])
            if c:
                clean[exps] = int(c)
        ordered = dict(sorted(clean.items(), reverse=True))
        self.n = n
        self.d = d
        self._terms = MappingProxyType(ordered)
        self._key = (n, d, tuple(ordered.items()))
        self._grad = None

    @property
    def terms(self) -> Mapping[Exps, int]:
        return self._terms

    def __eq__(self, other):
        return isinstance(other, Form) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Form(n={self.n}, d={self.d}, {render(self)!r})"

    def __str__(self):
        return render(self)

    def is_zero(self) -> bool:
        return not self._terms

    def content(self) -> int:
        return math.gcd(*self._terms.values()) if self._terms else 0

    def scale(self, c: int) -> "Form":
        return Form(self.n, self.d, {e: c * a for e, a in self._terms.items()})

    def __mul__(self, c: int) -> "Form":
        return self.scale(c)

    __rmul__ = __mul__

    def __add__(self, other: "Form") -> "Form":
        if (self.n, self.d) != (other.n, other.d):
            raise DimensionMismatch("forms differ in variable count or degree")
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return Form(self.n, self.d, out)

    def __neg__(self) -> "Form":
        return self.scale(-1)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __call__(self, x: Sequence[int]) -> int:
        return self.value(x)

    def value(self, x: Sequence[int]) -> int:
        """Exact integer value f(x)."""
        self._check_dim(x)
        return _eval_terms(self._terms.items(), [int(v) for v in x])

    def _check_dim(self, x):
        if len(x) != self.n:
            raise DimensionMismatch(f"vector of length {len(x)} for a form in {self.n} variables")

    def derivative_terms(self):
        """Formal partials as lists of (exps, coef), one list per variable."""
        if self._grad is None:
            grad = []
            for i in range(self.n):
                part = []
                for exps, c in self._terms.items():
                    if exps[i]:
                        e = list(exps)
                        e[i] -= 1
                        part.append((tuple(e), c * exps[i]))
                grad.append(part)
            self._grad = grad
        return self._grad

    def gradient_value(self, x: Sequence[int]) -> list[int]:
        """Exact integer gradient at x."""
        self._check_dim(x)
        xs = [int(v) for v in x]
        return [_eval_terms(part, xs) for part in self.derivative_terms()]

    def variables(self) -> set[int]:
        return {i for exps in self._terms for i, e in enumerate(exps) if e}

    def evaluate_many(self, X: np.ndarray, m: int) -> np.ndarray:
        """Values mod m for each row of the integer matrix X."""
        return _eval_terms_many(list(self._terms.items()), X, m, self.d)


def _eval_terms(terms, xs) -> int:
    total = 0
    for exps, c in terms:
        t = c
        for v, e in zip(xs, exps):
            if e:
                t *= v**e
        total += t
    return total


def _eval_terms_many(terms, X: np.ndarray, m: int, d: int) -> np.ndarray:
    rows = X.shape[0]
    if m >= _NUMPY_SAFE_MODULUS:
        X = X.astype(object)
        acc = np.zeros(rows, dtype=object)
        for exps, c in terms:
            t = np.full(rows, c % m, dtype=object)
            for i, e in enumerate(exps):
                if e:
                    t = t * (X[:, i] ** e) % m
            acc = (acc + t) % m
        return acc
    X = np.asarray(X, dtype=np.int64) % m
    powers: dict[tuple[int, int], np.ndarray] = {}

    def pw(i, e):
        key = (i, e)
        if key not in powers:
            if e == 1:
                powers[key] = X[:, i]
            else:
                powers[key] = pw(i, e - 1) * X[:, i] % m
        return powers[key]

    acc = np.zeros(rows, dtype=np.int64)
    for exps, c in terms:
        t = np.full(rows, c % m, dtype=np.int64)
        for i, e in enumerate(exps):
            if e:
                t = t * pw(i, e) % m
        acc = (acc + t) % m
    return acc


# ---------------------------------------------------------------------------
# text grammar


def _render_terms(terms: Iterable[tuple[Exps, int]], letter: str = "x") -> str:
    parts = []
    for exps, c in terms:
        factors = []
        for i, e in enumerate(exps):
            if e == 1:
                factors.append(f"{letter}{i + 1}")
            elif e > 1:
                factors.append(f"{letter}{i + 1}^{e}")
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(mag)] + factors)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts) if parts else "0"


def render(f: Form) -> str:
    return _render_terms(f.terms.items())


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z])(\d+)|(\^)|(\*)|(\+)|(-))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            bad = len(text) - len(text[pos:].lstrip())
            raise FormSyntaxError("unexpected character", text, bad)
        start = m.start(0) + (len(m.group(0)) - len(m.group(0).lstrip()))
        if m.group(1):
            tokens.append(("int", int(m.group(1)), start))
        elif m.group(2):
            tokens.append(("var", (m.group(2), int(m.group(3))), start))
        else:
            tokens.append((m.group(0).strip(), None, start))
        pos = m.end(0)
    tokens.append(("end", None, len(text)))
    return tokens


def parse_polynomial(text: str, letter: str = "x", allow_constants: bool = False) -> dict[tuple, int]:
    """Parse a signed sum of monomials into {sparse exponents: coefficient}.

    Exponents come back as a dict ``{index: exponent}`` frozen into a sorted
    tuple of pairs; callers densify once the variable count is known.
    """
    toks = _tokenize(text)
    i = 0
    out: dict[tuple, int] = {}

    def peek():
        return toks[i]

    def expect(kind):
        nonlocal i
        tok = toks[i]
        if tok[0] != kind:
            raise FormSyntaxError(f"expected {kind}, found {tok[0]}", text, tok[2])
        i += 1
        return tok

    first = True
    while True:
        sign = 1
        tok = peek()
        if tok[0] in "+-":
            i += 1
            sign = -1 if tok[0] == "-" else 1
        elif not first:
            raise FormSyntaxError("expected '+' or '-'", text, tok[2])
        if peek()[0] == "end":
            raise FormSyntaxError("expected a term", text, peek()[2])
        coef = 1
        exps: dict[int, int] = {}
        need_factor = True
        if peek()[0] == "int":
            coef = expect("int")[1]
            if peek()[0] == "*":
                i += 1
            elif allow_constants:
                need_factor = False
            else:
                raise FormSyntaxError("expected '*' after coefficient", text, peek()[2])
        while need_factor:
            tok = expect("var")
            name, idx = tok[1]
            if name != letter or idx < 1:
                raise FormSyntaxError(f"unknown variable {name}{idx}", text, tok[2])
            e = 1
            if peek()[0] == "^":
                i += 1
                e = expect("int")[1]
            exps[idx - 1] = exps.get(idx - 1, 0) + e
            if peek()[0] == "*":
                i += 1
                continue
            break
        key = tuple(sorted((k, v) for k, v in exps.items() if v))
        out[key] = out.get(key, 0) + sign * coef
        first = False
        if peek()[0] == "end":
            break
    return {k: v for k, v in out.items() if v}


def densify(sparse: tuple, n: int) -> tuple:
    e = [0] * n
    for k, v in sparse:
        e[k] = v
    return tuple(e)


def parse_form(text: str, n: int | None = None) -> Form:
    """Parse e.g. ``"x1^2 - 17*x2^2"``; ``n`` defaults to the largest index used."""
    sparse = parse_polynomial(text)
    if not sparse:
        raise FormSyntaxError("form is identically zero", text, 0)
    used = max((k + 1 for key in sparse for k, _ in key), default=0)
    if n is None:
        n = used
    elif n < used:
        raise DimensionMismatch(f"form uses x{used} but n = {n}")
    degrees = [sum(v for _, v in key) for key in sparse]
    if len(set(degrees)) > 1:
        raise InhomogeneousError(degrees)
    if degrees[0] == 0:
        raise InhomogeneousError(degrees)
    return Form(n, degrees[0], {densify(k, n): c for k, c in sparse.items()})


def read_forms(text: str) -> list[Form]:
    """One form per nonblank line; ``#`` starts a comment."""
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse_form(line))
    if out:
        n = max(f.n for f in out)
        out = [f if f.n == n else Form(n, f.d, {e + (0,) * (n - f.n): c for e, c in f.terms.items()}) for f in out]
    return out


# ---------------------------------------------------------------------------
# named forms

TERJANIAN_G = (
    "x1^4 + x2^4 + x3^4 - x1^2*x2^2 - x1^2*x3^2 - x2^2*x3^2"
    " - x1^2*x2*x3 - x1*x2^2*x3 - x1*x2*x3^2"
)
TERJANIAN_WEIGHTS = (1, 1, 1, 4, 4, 4)


@dataclass(frozen=True)
class Block:
    form: Form  # in local variables 0..len(variables)-1
    weight: int
    variables: tuple[int, ...]


@dataclass(frozen=True)
class SplitForm:
    """Weighted sum of forms on pairwise disjoint variable blocks."""

    blocks: tuple[Block, ...]
    n: int

    def __post_init__(self):
        seen = sorted(v for b in self.blocks for v in b.variables)
        if seen != list(range(self.n)):
            raise ValueError("block variables must partition 0..n-1")
        for b in self.blocks:
            if b.weight == 0:
                raise ValueError("block weights must be nonzero")
            if b.form.n != len(b.variables):
                raise DimensionMismatch("block form arity does not match its variables")

    @property
    def d(self) -> int:
        return max(b.form.d for b in self.blocks)

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(b.weight for b in self.blocks)

    def to_form(self) -> Form:
        terms: dict[Exps, int] = {}
        for b in self.blocks:
            for exps, c in b.form.terms.items():
                e = [0] * self.n
                for local, g in enumerate(b.variables):
                    e[g] = exps[local]
                terms[tuple(e)] = terms.get(tuple(e), 0) + b.weight * c
        return Form(self.n, self.d, terms)

    def value(self, x: Sequence[int]) -> int:
        if len(x) != self.n:
            raise DimensionMismatch(f"vector of length {len(x)} for a split form in {self.n} variables")
        return sum(b.weight * b.form.value([x[v] for v in b.variables]) for b in self.blocks)


def _terjanian_G() -> Form:
    return parse_form(TERJANIAN_G)


def _terjanian_F() -> SplitForm:
    G = _terjanian_G()
    blocks = tuple(Block(G, w, (3 * j, 3 * j + 1, 3 * j + 2)) for j, w in enumerate(TERJANIAN_WEIGHTS))
    return SplitForm(blocks, 18)


def quartic_H(A: int, B: int, C: int, D: int, E: int, F: int) -> Form:
    """A x^4 + B x y^3 + C y^4 + D x z^3 + E y z^3 + F z^4 (variables x1, x2, x3)."""
    terms = {
        (4, 0, 0): A,
        (1, 3, 0): B,
        (0, 4, 0): C,
        (1, 0, 3): D,
        (0, 1, 3): E,
        (0, 0, 4): F,
    }
    return Form(3, 4, terms)


_H_NAME = re.compile(r"^quartic-H\(\s*(-?\d+(?:\s*,\s*-?\d+){5})\s*\)$")


def builtin_form(name: str) -> Form | SplitForm:
    name = name.strip()
    if name == "terjanian-G":
        return _terjanian_G()
    if name == "terjanian-F":
        return _terjanian_F()
    m = _H_NAME.match(name)
    if m:
        coeffs = [int(c) for c in m.group(1).split(",")]
        return quartic_H(*coeffs)
    raise UnknownName(name)


# ---------------------------------------------------------------------------
# evaluation helpers with explicit moduli


def evaluate(f: Form | SplitForm, x: Sequence[int], m: int) -> int:
    if m < 2:
        raise ValueError("modulus must be at least 2")
    return f.value(x) % m


def gradient(f: Form, x: Sequence[int], m: int) -> list[int]:
    if m < 2:
        raise ValueError("modulus must be at least 2")
    return [g % m for g in f.gradient_value(x)]


# ---------------------------------------------------------------------------
# substitution


@dataclass(frozen=True)
class LinearSubstitution:
    """x = M * lam with M an n_out x n_in integer matrix (rows = old variables)."""

    matrix: tuple[tuple[int, ...], ...]

    def __init__(self, matrix):
        rows = tuple(tuple(int(v) for v in row) for row in matrix)
        if not rows or len({len(r) for r in rows}) != 1 or not rows[0]:
            raise DimensionMismatch("substitution matrix must be a nonempty rectangle")
        object.__setattr__(self, "matrix", rows)

    @property
    def n_out(self) -> int:
        return len(self.matrix)

    @property
    def n_in(self) -> int:
        return len(self.matrix[0])

    def apply(self, lam: Sequence[int]) -> list[int]:
        return [sum(a * b for a, b in zip(row, lam)) for row in self.matrix]


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def substitute(f: Form, s: LinearSubstitution) -> Form:
    """Return g with g(lam) = f(M lam)."""
    if s.n_out != f.n:
        raise DimensionMismatch(f"substitution has {s.n_out} rows, form has {f.n} variables")
    m = s.n_in
    linear = []
    for row in s.matrix:
        poly = {}
        for j, a in enumerate(row):
            if a:
                e = [0] * m
                e[j] = 1
                poly[tuple(e)] = a
        linear.append(poly)
    zero = tuple([0] * m)
    total: dict = {}
    power_cache: dict = {}
    for exps, c in f.terms.items():
        term = {zero: c}
        for i, e in enumerate(exps):
            if e:
                key = (i, e)
                if key not in power_cache:
                    p = {zero: 1}
                    for _ in range(e):
                        p = _poly_mul(p, linear[i])
                    power_cache[key] = p
                term = _poly_mul(term, power_cache[key])
        for e, v in term.items():
            total[e] = total.get(e, 0) + v
    return Form(m, f.d, total)


# ---------------------------------------------------------------------------
# normalization


@dataclass(frozen=True)
class Normalization:
    """``form(x) = f(P x) / p^shift`` with P = diag(p^scalings)."""

    form: Form
    shift: int
    scalings: tuple[int, ...]

    def to_original(self, x: Sequence[int], p: int) -> list[int]:
        return [v * p**s for v, s in zip(x, self.scalings)]


def _valuation_sum(f: Form, p: int) -> int:
    return sum(valuation(c, p) for c in f.terms.values())


def minimize(f: Form, p: int, heuristic: bool = True) -> Normalization:
    """Divide out the p-content, then greedily try x_i -> p x_i moves.

    A move is kept when the sum of coefficient valuations drops after the
    new content is divided out. This is a small fragment of minimization;
    the only promise is that Q_p-solubility is unchanged.
    """
    check_prime(p)
    if f.is_zero():
        raise ZeroForm("cannot normalize the zero form")
    shift = valuation(f.content(), p)
    g = Form(f.n, f.d, {e: c // p**shift for e, c in f.terms.items()})
    scal = [0] * f.n
    if heuristic:
        best = _valuation_sum(g, p)
        improved = True
        while improved and best > 0:
            improved = False
            for i in range(f.n):
                h = Form(f.n, f.d, {e: c * p ** e[i] for e, c in g.terms.items()})
                s = valuation(h.content(), p)
                h = Form(f.n, f.d, {e: c // p**s for e, c in h.terms.items()})
                val = _valuation_sum(h, p)
                if val < best:
                    g, best, improved = h, val, True
                    scal[i] += 1
                    shift += s
                    break
    return Normalization(g, shift, tuple(scal))


def normalize_content(f: Form, p: int, heuristic: bool = True) -> tuple[Form, int]:
    norm = minimize(f, p, heuristic)
    return norm.form, norm.shift


# ---------------------------------------------------------------------------
# split detection


def detect_split(f: Form) -> SplitForm | None:
    """Decompose f into blocks on connected variable components, or None.

    Variables that never occur become zero blocks of weight 1.
    """
    parent = list(range(f.n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for exps in f.terms:
        vs = [i for i, e in enumerate(exps) if e]
        for v in vs[1:]:
            ra, rb = find(vs[0]), find(v)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    comps: dict[int, list[int]] = {}
    for i in range(f.n):
        comps.setdefault(find(i), []).append(i)
    if len(comps) == 1:
        return None
    blocks = []
    for root in sorted(comps):
        vs = comps[root]
        local = {
            tuple(exps[v] for v in vs): c for exps, c in f.terms.items() if any(exps[v] for v in vs)
        }
        w = math.gcd(*local.values()) if local else 1
        blocks.append(Block(Form(len(vs), f.d, {e: c // w for e, c in local.items()}), w, tuple(vs)))
    return SplitForm(tuple(blocks), f.n)


def as_form(f: Form | SplitForm) -> Form:
    return f.to_form() if isinstance(f, SplitForm) else f
