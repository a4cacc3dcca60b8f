import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gausslab.numtheory import (
    NotInvertibleError,
    Rational,
    SignFactor,
    coprime_residues,
    divisor_count,
    epsilon,
    interval_measure,
    is_prime,
    jacobi_symbol,
    mod_inverse,
    normalize_intervals,
    totient,
)


def legendre_by_squares(a, p):
    """Quadratic character mod an odd prime by listing the squares."""
    if a % p == 0:
        return 0
    return 1 if a % p in {h * h % p for h in range(1, p)} else -1


def small_primes(limit):
    return [n for n in range(3, limit + 1) if all(n % d for d in range(2, int(n ** 0.5) + 1))]


def jacobi_by_factoring(a, b):
    """Product of Legendre symbols over the prime factorization of odd b > 0."""
    out, n, d = 1, b, 3
    while n > 1:
        while n % d == 0:
            out *= legendre_by_squares(a, d)
            n //= d
        d += 2
    return out


# ------------------------------------------------------------------ examples

def test_jacobi_examples():
    assert jacobi_symbol(0, 1) == 1
    assert jacobi_symbol(0, -1) == 1
    assert jacobi_symbol(-5, -1) == -1
    assert jacobi_symbol(2, 15) == 1
    assert jacobi_symbol(3, 9) == 0


def test_jacobi_two_fifteen_by_enumeration():
    assert jacobi_by_factoring(2, 15) == legendre_by_squares(2, 3) * legendre_by_squares(2, 5) == 1


def test_jacobi_rejects_even_denominator():
    with pytest.raises(ValueError):
        jacobi_symbol(3, 4)


def test_epsilon_examples():
    assert epsilon(1) == 1
    assert epsilon(3) == 1j
    assert epsilon(7) == 1j
    assert epsilon(-1) == 1j
    with pytest.raises(ValueError):
        epsilon(2)


def test_mod_inverse_examples():
    assert mod_inverse(3, 5) == 2
    assert mod_inverse(1, 17) == 1
    assert mod_inverse(4, 9) == 7
    with pytest.raises(NotInvertibleError):
        mod_inverse(6, 9)


def test_totient_divisors():
    assert totient(6007) == 6006
    assert totient(1) == 1
    assert divisor_count(12) == 6
    assert divisor_count(1) == 1


def test_coprime_residue_examples():
    assert list(coprime_residues(4, [(0, 1)])) == [1, 3]
    assert list(coprime_residues(5, (0, Fraction(1, 2)))) == [1, 2]
    assert list(coprime_residues(12)) == [1, 5, 7, 11]


def test_coprime_residues_exact_endpoints():
    # 1/3 is excluded by [0, 1/3) and included by [1/3, 1)
    assert list(coprime_residues(3, (0, Fraction(1, 3)))) == []
    assert list(coprime_residues(3, (Fraction(1, 3), 1))) == [1, 2]
    assert list(coprime_residues(10, [(0, 0.2), (0.6, 1)])) == [1, 7, 9]


def test_rational_reduces():
    r = Rational(6, -8)
    assert (r.p, r.q) == (-3, 4)
    assert Rational(3, 4).inverse_numerator() == 3
    with pytest.raises(ZeroDivisionError):
        Rational(1, 0)


def test_sign_factor_algebra():
    i = SignFactor(1j)
    assert i * i == -1
    assert (i * SignFactor(0)) == 0
    assert i.inverse() == -1j
    assert str(SignFactor(-1j)) == "-i"
    assert SignFactor.parse("+i") == i
    with pytest.raises(ValueError):
        SignFactor(2)


def test_intervals():
    assert normalize_intervals([(0.5, 1), (0, 0.5)]) == ((Fraction(0), Fraction(1)),)
    assert interval_measure([(0, 0.25), (0.5, 0.75)]) == 0.5
    with pytest.raises(ValueError):
        normalize_intervals([(0.5, 1.5)])


# ---------------------------------------------------------------- properties

@pytest.mark.parametrize("p", small_primes(97))
def test_legendre_matches_square_enumeration(p):
    for a in range(-p, 2 * p):
        assert jacobi_symbol(a, p) == legendre_by_squares(a, p)


@given(st.integers(-10**4, 10**4), st.integers(1, 5000), st.integers(1, 5000))
def test_multiplicative_in_denominator(a, b1, b2):
    b1, b2 = 2 * b1 - 1, 2 * b2 - 1
    assert jacobi_symbol(a, b1 * b2) == jacobi_symbol(a, b1) * jacobi_symbol(a, b2)


@given(st.integers(-10**6, 10**6), st.integers(-5000, 5000).filter(lambda b: b % 2))
def test_square_is_one_when_coprime(a, b):
    j = jacobi_symbol(a, b)
    if math.gcd(a, b) == 1:
        assert j * j == 1
    else:
        assert j == 0


@given(st.integers(-10**6, 10**6), st.integers(1, 5000))
def test_negative_denominator_rule(a, b):
    b = 2 * b - 1
    sgn = 1 if a >= 0 else -1
    assert jacobi_symbol(a, -b) == sgn * jacobi_symbol(a, b)


@given(st.integers(1, 3000), st.integers(1, 2000))
def test_jacobi_against_factored_oracle(a, b):
    b = 2 * b - 1
    assert jacobi_symbol(a, b) == jacobi_by_factoring(a, b)


@given(st.integers(-10**9, 10**9), st.integers(2, 10**9))
def test_mod_inverse_property(a, m):
    if math.gcd(a, m) != 1:
        with pytest.raises(NotInvertibleError):
            mod_inverse(a, m)
    else:
        b = mod_inverse(a, m)
        assert 0 <= b < m and a * b % m == 1


def test_residue_count_equals_totient():
    for q in range(1, 10_001):
        assert sum(1 for _ in coprime_residues(q)) == totient(q)


def test_is_prime_against_sieve():
    n = 20_000
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for k in range(2, int(n ** 0.5) + 1):
        if sieve[k]:
            sieve[k * k::k] = bytearray(len(sieve[k * k::k]))
    assert [k for k in range(n + 1) if is_prime(k)] == [k for k in range(n + 1) if sieve[k]]


def test_is_prime_64bit():
    assert is_prime(2 ** 61 - 1)
    assert not is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7
    assert not is_prime((2 ** 31 - 1) * (2 ** 31 + 11))


@given(st.integers(1, 5000))
def test_divisor_count_by_enumeration(q):
    assert divisor_count(q) == sum(1 for d in range(1, q + 1) if q % d == 0)


@given(st.integers(1, 3000))
def test_totient_by_gcd_count(q):
    assert totient(q) == sum(1 for p in range(q) if math.gcd(p, q) == 1)
