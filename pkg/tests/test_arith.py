from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padicforms.arith import (
    PadicApprox,
    PadicContext,
    hilbert_symbol,
    inverse_mod_prime_power,
    is_prime,
    is_square,
    legendre,
    rational_valuation,
    square_class,
    unit_part,
    valuation,
)
from padicforms.errors import (
    InfiniteValuation,
    NotAUnit,
    NotPrimeError,
    PrecisionExhausted,
    UnsupportedPrime,
    ZeroInput,
)
from padicforms.forms import Block, Form, SplitForm
from padicforms.search import split_zero_count, split_zero_search

PRIMES = [2, 3, 5, 7]


@pytest.mark.parametrize("a,p,v", [(48, 2, 4), (7, 7, 1), (100, 3, 0), (-250, 5, 3)])
def test_valuation_examples(a, p, v):
    assert valuation(a, p) == v


def test_valuation_of_zero():
    with pytest.raises(InfiniteValuation):
        valuation(0, 3)


def test_rational_valuation_and_unit_part():
    assert rational_valuation(Fraction(9, 2), 3) == 2
    assert rational_valuation(Fraction(9, 2), 2) == -1
    assert unit_part(-48, 2) == (4, -3)


@pytest.mark.parametrize("a,p,K,inv", [(3, 2, 4, 11), (1, 5, 6, 1), (4, 7, 1, 2)])
def test_inverse_examples(a, p, K, inv):
    assert inverse_mod_prime_power(a, p, K) == inv


def test_inverse_of_nonunit():
    with pytest.raises(NotAUnit):
        inverse_mod_prime_power(10, 5, 3)


@given(st.integers(-10**6, 10**6), st.sampled_from([2, 3, 5, 7, 11, 101]), st.integers(1, 40))
def test_inverse_property(a, p, K):
    if a % p == 0:
        return
    assert a * inverse_mod_prime_power(a, p, K) % p**K == 1


@pytest.mark.parametrize("a,p,s", [(2, 7, 1), (2, 3, -1), (9, 3, 0)])
def test_legendre_examples(a, p, s):
    assert legendre(a, p) == s


def test_legendre_rejects_two():
    with pytest.raises(UnsupportedPrime):
        legendre(3, 2)


def test_legendre_matches_squares():
    for p in [3, 5, 7, 11, 13]:
        squares = {x * x % p for x in range(1, p)}
        for a in range(1, p):
            assert legendre(a, p) == (1 if a in squares else -1)


def test_is_prime_against_sieve():
    limit = 3000
    sieve = [True] * limit
    sieve[0] = sieve[1] = False
    for i in range(2, limit):
        if sieve[i]:
            for j in range(i * i, limit, i):
                sieve[j] = False
    assert [n for n in range(limit) if is_prime(n)] == [n for n in range(limit) if sieve[n]]
    assert is_prime(2**61 - 1)
    assert not is_prime(2**61 + 1)


def test_square_class_examples():
    assert is_square(17, 2)
    # oracle: x^2 = 17 mod 2^k is solvable for every k <= 10
    for k in range(1, 11):
        assert any((x * x - 17) % 2**k == 0 for x in range(2**k))
    c = square_class(5, 2)
    assert (c.parity, c.unit_class, c.is_square) == (0, 5, False)
    c = square_class(12, 3)
    assert c.parity == 1 and not c.is_square
    with pytest.raises(ZeroInput):
        square_class(0, 5)


def test_square_class_of_fraction():
    assert square_class(Fraction(1, 4), 2).is_square
    assert square_class(Fraction(2, 3), 5) == square_class(6, 5)


@given(st.integers(1, 10**5), st.integers(1, 500), st.sampled_from(PRIMES), st.booleans())
def test_square_class_invariant_under_squares(a, t, p, neg):
    a = -a if neg else a
    assert square_class(a * t * t, p) == square_class(a, p)


def test_hilbert_examples():
    for p in PRIMES:
        for b in [1, 2, -3, 10, p]:
            assert hilbert_symbol(1, b, p) == 1
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(-1, -1, 5) == 1


def test_no_primitive_sum_of_three_squares_mod_8():
    import itertools

    assert not any(
        (x * x + y * y + z * z) % 8 == 0 and (x % 2 or y % 2 or z % 2)
        for x, y, z in itertools.product(range(8), repeat=3)
    )


@given(st.integers(-200, 200), st.integers(-200, 200), st.sampled_from(PRIMES))
def test_hilbert_symmetric(a, b, p):
    if a and b:
        assert hilbert_symbol(a, b, p) == hilbert_symbol(b, a, p)


@given(st.integers(-60, 60), st.integers(-60, 60), st.integers(-60, 60), st.sampled_from(PRIMES))
def test_hilbert_bimultiplicative(a, b, c, p):
    if a and b and c:
        assert hilbert_symbol(a * b, c, p) == hilbert_symbol(a, c, p) * hilbert_symbol(b, c, p)


def _squarefree_part(a: int, p: int) -> int:
    e, u = unit_part(a, p)
    return u * p ** (e % 2)


def _conic_oracle(a: int, b: int, p: int) -> int:
    """+1 if a x^2 + b y^2 - z^2 has a primitive Q_p zero, by search alone."""
    a, b = _squarefree_part(a, p), _squarefree_part(b, p)
    v = max(valuation(a, p), valuation(b, p))
    m = 2 * v + 3
    sf = SplitForm(
        tuple(Block(Form(1, 2, {(2,): c}), 1, (i,)) for i, c in enumerate([a, b, -1])),
        3,
    )
    liftable = any(split_zero_search(sf, p, k, liftable=True) is not None for k in range(1, m + 1))
    none_at_m = split_zero_count(sf, p, m).primitive_zeros == 0
    assert liftable != none_at_m, (a, b, p)
    return 1 if liftable else -1


def test_hilbert_matches_search_oracle():
    # the symbol only depends on square classes, so one oracle run per class pair
    for p in PRIMES:
        cache = {}
        for a in range(-20, 21):
            for b in range(-20, 21):
                if a and b:
                    key = (square_class(a, p), square_class(b, p))
                    if key not in cache:
                        cache[key] = _conic_oracle(a, b, p)
                    assert hilbert_symbol(a, b, p) == cache[key], (a, b, p)


def test_not_prime():
    with pytest.raises(NotPrimeError):
        PadicContext(9)


def test_padic_approx_ring_ops():
    ctx = PadicContext(5, 6)
    x, y = ctx(7), ctx(-3)
    assert int(x + y) == 4
    assert int(x * y) == (-21) % 5**6
    assert (x / y) * y == x
    assert x**3 == ctx(343)
    assert ctx(50).valuation == 2
    assert ctx(5**6).valuation is None
    assert int(ctx(50).shift_down(2)) == 2
    with pytest.raises(NotAUnit):
        ctx(10).inverse()
    with pytest.raises(NotAUnit):
        ctx(5).shift_down(2)
    with pytest.raises(PrecisionExhausted):
        ctx.check_precision(7)


@given(st.integers(-10**9, 10**9), st.integers(-10**9, 10**9), st.sampled_from(PRIMES))
@settings(max_examples=50)
def test_padic_approx_matches_integers(a, b, p):
    ctx = PadicContext(p, 20)
    assert int(ctx(a) * ctx(b) - ctx(a)) == (a * b - a) % ctx.modulus
    if a % p:
        assert isinstance(ctx(a).inverse(), PadicApprox)
