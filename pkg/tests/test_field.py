import random

import pytest
from hypothesis import given, settings, strategies as st

from fsyrk.errors import NotASquare
from fsyrk.field import (Fq2Ctx, PrimeFieldCtx, frobenius_conj, is_prime, legendre,
                         lowest_qnr, mod_sqrt, sos_decompose, sqrt_minus_one)

from oracle import brute_sqrts, fq2_conj, fq2_mul, squares_mod

SMALL_PRIMES = [p for p in range(3, 200) if all(p % d for d in range(2, int(p ** 0.5) + 1))]
WORD_PRIMES = [65537, 131041, 131071, 1000003, 2147483629, 2147483647]


def test_is_prime_matches_trial_division():
    for n in range(-3, 2000):
        want = n >= 2 and all(n % d for d in range(2, int(n ** 0.5) + 1))
        assert is_prime(n) == want, n


def test_ctx_rejects_composite_and_large():
    for bad in (1, 9, 91, 2 ** 31 + 11):
        with pytest.raises(ValueError):
            PrimeFieldCtx(bad)


@pytest.mark.parametrize("p", [2, 3, 7, 13, 131071])
def test_field_axioms(p):
    F = PrimeFieldCtx(p)
    rng = random.Random(p)
    for _ in range(200):
        x, y, z = (rng.randrange(p) for _ in range(3))
        assert F.mul(x, F.add(y, z)) == (x * y + x * z) % p
        assert F.add(x, F.neg(x)) == 0
        assert 0 <= F.mul(x, y) < p
        if x:
            assert F.mul(F.inv(x), x) == 1


def test_legendre_examples():
    F = PrimeFieldCtx(7)
    assert legendre(2, F) == 1
    assert legendre(0, F) == 0
    assert legendre(3, F) == -1


@pytest.mark.parametrize("p", SMALL_PRIMES[:25])
def test_legendre_against_exhaustive_squares(p):
    F = PrimeFieldCtx(p)
    sq = squares_mod(p)
    for a in range(p):
        want = 0 if a == 0 else (1 if a in sq else -1)
        assert legendre(a, F) == want


def test_legendre_rejects_two():
    with pytest.raises(ValueError):
        legendre(1, PrimeFieldCtx(2))


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(SMALL_PRIMES + WORD_PRIMES), st.integers(1, 2 ** 40), st.integers(1, 2 ** 40))
def test_legendre_multiplicative(p, a, b):
    F = PrimeFieldCtx(p)
    a, b = a % p or 1, b % p or 1
    assert legendre(a * b % p, F) == legendre(a, F) * legendre(b, F)


def test_mod_sqrt_examples():
    assert mod_sqrt(2, PrimeFieldCtx(7)) == 3
    assert mod_sqrt(1, PrimeFieldCtx(13)) == 1
    assert mod_sqrt(12, PrimeFieldCtx(13)) == 5
    assert mod_sqrt(0, PrimeFieldCtx(13)) == 0


@pytest.mark.parametrize("p", SMALL_PRIMES[:30])
def test_mod_sqrt_is_smaller_root(p):
    F = PrimeFieldCtx(p)
    for a in squares_mod(p):
        assert mod_sqrt(a, F) == brute_sqrts(a, p)[0]


def test_mod_sqrt_non_residue():
    with pytest.raises(NotASquare):
        mod_sqrt(3, PrimeFieldCtx(7))


@settings(max_examples=500, deadline=None)
@given(st.sampled_from(SMALL_PRIMES + WORD_PRIMES), st.integers(0, 2 ** 62))
def test_mod_sqrt_of_square(p, x):
    x %= p
    r = mod_sqrt(x * x % p, PrimeFieldCtx(p))
    assert r in (x, (-x) % p)


def test_sos_examples():
    assert sos_decompose(6, PrimeFieldCtx(7)) == (3, 2)
    assert sos_decompose(4, PrimeFieldCtx(7)) == (2, 0)
    a, b = sos_decompose(10, PrimeFieldCtx(11))
    assert (a * a + b * b) % 11 == 10


def test_sos_six_mod_seven_by_brute_force():
    pairs = {(a, b) for a in range(7) for b in range(7) if (a * a + b * b) % 7 == 6}
    assert (3, 2) in pairs


def test_sos_rejects_two():
    with pytest.raises(ValueError):
        sos_decompose(1, PrimeFieldCtx(2))


def test_sos_500_random_pairs():
    rng = random.Random(2024)
    primes = SMALL_PRIMES + WORD_PRIMES
    for _ in range(500):
        p = rng.choice(primes)
        k = rng.randrange(p)
        a, b = sos_decompose(k, PrimeFieldCtx(p))
        assert (a * a + b * b - k) % p == 0


def test_minus_one_is_sum_of_two_squares_below_1000():
    for p in SMALL_PRIMES + [q for q in range(200, 1000) if is_prime(q)]:
        a, b = sos_decompose(p - 1, PrimeFieldCtx(p))
        assert (a * a + b * b + 1) % p == 0


def test_lowest_qnr_is_lowest():
    for p in SMALL_PRIMES:
        sq = squares_mod(p)
        assert lowest_qnr(PrimeFieldCtx(p)) == min(a for a in range(2, p) if a not in sq)


def test_sqrt_minus_one_prime():
    assert sqrt_minus_one(PrimeFieldCtx(13)) == 5
    assert sqrt_minus_one(PrimeFieldCtx(2)) == 1
    assert sqrt_minus_one(PrimeFieldCtx(7)) is None
    for p in SMALL_PRIMES:
        i = sqrt_minus_one(PrimeFieldCtx(p))
        if p % 4 == 1:
            assert (i * i + 1) % p == 0
        else:
            assert i is None and not brute_sqrts(p - 1, p)


# F_{p^2} ---------------------------------------------------------------------

FQ2_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 101]


@pytest.mark.parametrize("p", FQ2_PRIMES)
def test_fq2_default_modulus_irreducible(p):
    F = Fq2Ctx.of(p)
    assert all((x * x - F.s * x - F.n) % p for x in range(p))


def test_fq2_rejects_reducible():
    with pytest.raises(ValueError):
        Fq2Ctx(PrimeFieldCtx(7), 0, 2)


@pytest.mark.parametrize("p", FQ2_PRIMES)
def test_fq2_mul_and_inverse(p):
    F = Fq2Ctx.of(p)
    rng = random.Random(p)
    for _ in range(100):
        x = (rng.randrange(p), rng.randrange(p))
        y = (rng.randrange(p), rng.randrange(p))
        assert F.mul(x, y) == fq2_mul(x, y, p, F.s, F.n)
        if x != (0, 0):
            assert F.mul(x, F.inv(x)) == (1, 0)


@pytest.mark.parametrize("p", FQ2_PRIMES)
def test_frobenius_is_p_power(p):
    F = Fq2Ctx.of(p)
    rng = random.Random(7 * p)
    for _ in range(50):
        x = (rng.randrange(p), rng.randrange(p))
        c = frobenius_conj(x, F)
        assert c == fq2_conj(x, p, F.s, F.n)
        assert frobenius_conj(c, F) == x


@pytest.mark.parametrize("p", FQ2_PRIMES)
def test_frobenius_fixes_exactly_the_base(p):
    F = Fq2Ctx.of(p)
    fixed = {(a, b) for a in range(p) for b in range(p) if frobenius_conj((a, b), F) == (a, b)}
    assert fixed == {(a, 0) for a in range(p)}


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(FQ2_PRIMES), st.lists(st.integers(0, 10 ** 6), min_size=4, max_size=4))
def test_frobenius_is_ring_endomorphism(p, cs):
    F = Fq2Ctx.of(p)
    x, y = (cs[0] % p, cs[1] % p), (cs[2] % p, cs[3] % p)
    cx, cy = frobenius_conj(x, F), frobenius_conj(y, F)
    assert frobenius_conj(F.mul(x, y), F) == F.mul(cx, cy)
    assert frobenius_conj(F.add(x, y), F) == F.add(cx, cy)


@pytest.mark.parametrize("p", [3, 7, 11, 19, 23])
def test_frobenius_negates_i_when_p_is_3_mod_4(p):
    F = Fq2Ctx.of(p)
    i = sqrt_minus_one(F)
    assert F.mul(i, i) == ((p - 1), 0)
    assert frobenius_conj(i, F) == F.neg(i)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 13])
def test_fq2_sqrt_minus_one_exists(p):
    F = Fq2Ctx.of(p)
    i = sqrt_minus_one(F)
    assert F.mul(i, i) == F.neg(F.one())


@pytest.mark.parametrize("p", [3, 5, 7, 13])
def test_fq2_sqrt_smallest_pair(p):
    F = Fq2Ctx.of(p)
    elems = [(a, b) for a in range(p) for b in range(p)]
    sq = {}
    for x in elems:
        sq.setdefault(F.mul(x, x), []).append(x)
    for a, roots in sq.items():
        assert mod_sqrt(a, F) == min(roots)
    non = [x for x in elems if x not in sq]
    with pytest.raises(NotASquare):
        mod_sqrt(non[0], F)
