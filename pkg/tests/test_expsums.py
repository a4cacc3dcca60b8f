import cmath
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gausslab import expsums
from gausslab.expsums import (
    G_phi,
    SumValue,
    classical_gauss_sum_closed,
    classical_gauss_sum_direct,
    incomplete_gauss_sum,
    incomplete_gauss_sums,
    kloosterman,
    long_gauss_sum,
    mean_square,
    mean_square_prime_formula,
    restricted_character_sum,
    restricted_via_kloosterman,
    salie,
    theta_sum,
    twisted_kloosterman,
    weil_bound,
)
from gausslab.numtheory import Rational, coprime_residues, divisor_count, epsilon, jacobi_symbol
from gausslab.weights import HermiteWeight, Indicator, PeriodicWeight, unit_indicator, zero_weight

E = lambda t: cmath.exp(2j * math.pi * t)  # noqa: E731


def brute_gauss(f, p, q, N):
    lo, hi = f.h_range(N)
    return sum(f(h / N) * E(p * h * h / q) for h in range(lo, hi + 1))


def brute_kloosterman(m, n, q, chi=lambda p: 1):
    return sum(chi(p) * E((m * p + n * pow(p, -1, q)) / q) for p in range(1, q) if math.gcd(p, q) == 1)


def close(a, b, tol=1e-12):
    return abs(complex(a) - complex(b)) < tol


# ------------------------------------------------------------------ examples

def test_incomplete_examples():
    f = unit_indicator()
    assert close(incomplete_gauss_sum(f, 1, 4, 4), 2 + 2j)
    assert incomplete_gauss_sum(zero_weight(), 3, 7, 5).value == 0
    assert close(incomplete_gauss_sum(f, 1, 5, 2), 2 * math.cos(2 * math.pi / 5))
    assert abs(2 * math.cos(2 * math.pi / 5) - 0.618034) < 1e-6


def test_incomplete_rejects_non_coprime():
    with pytest.raises(ValueError):
        incomplete_gauss_sum(unit_indicator(), 2, 4, 3)


def test_theta_examples():
    f = unit_indicator()
    assert theta_sum(f, 0.0, 17).value == 17
    assert close(theta_sum(f, Fraction(1, 4), 4), 2 + 2j)
    assert close(theta_sum(f, 0.25, 4), 2 + 2j)
    assert close(theta_sum(f, 0.5, 2), 0)


def test_classical_examples():
    assert close(classical_gauss_sum_direct(1, 3), 1j * math.sqrt(3))
    assert close(classical_gauss_sum_direct(1, 2), 0)
    assert close(classical_gauss_sum_direct(1, 4), 2 + 2j)
    assert classical_gauss_sum_closed(1, 4).value == 2 + 2j
    assert classical_gauss_sum_closed(1, 2).value == 0
    assert close(classical_gauss_sum_closed(1, 3), 1j * math.sqrt(3))


def test_kloosterman_examples():
    assert kloosterman(0, 0, 13).value == 12
    assert close(kloosterman(1, 1, 5), 2 + 2 * math.cos(4 * math.pi / 5))
    assert close(kloosterman(1, 0, 7), -1)


def test_twisted_examples():
    assert twisted_kloosterman(0, 0, 4).value == 1 + 1j
    chi = lambda p: complex(epsilon(p) * jacobi_symbol(4, p))  # noqa: E731
    assert close(twisted_kloosterman(1, 1, 4), brute_kloosterman(1, 1, 4, chi))
    with pytest.raises(ValueError):
        twisted_kloosterman(1, 1, 6)


def test_salie_examples():
    assert salie(0, 0, 7).value == 0
    chi = lambda p: int(jacobi_symbol(p, 5))  # noqa: E731
    assert close(salie(1, 1, 5), brute_kloosterman(1, 1, 5, chi))
    with pytest.raises(ValueError):
        salie(1, 1, 8)


def test_restricted_examples():
    assert restricted_character_sum(0, 0, 4, 1).value == 1
    with pytest.raises(ValueError):
        restricted_character_sum(1, 1, 7, 1j)
    with pytest.raises(ValueError):
        restricted_character_sum(1, 1, 6, 1)


def test_mean_square_examples():
    assert mean_square(unit_indicator(), 5, 2) == pytest.approx(1.5, abs=1e-14)
    assert mean_square(zero_weight(), 11, 3) == 0
    with pytest.raises(ValueError):
        mean_square(unit_indicator(), 7, 3, (0, 0.1))


def test_sum_value_format():
    assert SumValue(2 + 2j, 4).format() == "2.000000000000000,2.000000000000000"
    assert SumValue(6 + 0j, 6, exact=True).format() == "6,0"
    assert SumValue(complex(-1e-18, 0.5), 2).format() == "0.000000000000000,0.500000000000000"


# ---------------------------------------------------------------- properties

def test_closed_form_matches_direct_up_to_200():
    for q in range(1, 201):
        for p in coprime_residues(q):
            d, c = classical_gauss_sum_direct(p, q), classical_gauss_sum_closed(p, q)
            assert abs(d.value - c.value) < 1e-9 * math.sqrt(q)


def test_direct_gauss_against_brute_force():
    for q in (3, 8, 12, 25, 31):
        for p in coprime_residues(q):
            assert close(classical_gauss_sum_direct(p, q), sum(E(p * h * h / q) for h in range(q)), 1e-11)


@given(st.integers(1, 300), st.integers(-20, 20), st.integers(-20, 20))
def test_kloosterman_real_and_weil(q, m, n):
    k = kloosterman(m, n, q)
    assert abs(k.imag) < 1e-9
    assert abs(k) <= weil_bound(m, n, q) * (1 + 1e-12)


@given(st.integers(1, 60), st.integers(-8, 8), st.integers(-8, 8))
def test_kloosterman_against_brute_force(q, m, n):
    assert close(kloosterman(m, n, q), brute_kloosterman(m, n, q) if q > 1 else 1, 1e-10)


@given(st.integers(1, 60).map(lambda k: 4 * k), st.integers(-10, 10), st.integers(-10, 10))
def test_restricted_partition_and_decomposition(q, m, n):
    total = 0
    for s in (1, -1, 1j, -1j):
        r = restricted_character_sum(m, n, q, s)
        assert close(r, restricted_via_kloosterman(m, n, q, s), 1e-9)
        assert abs(r) <= 7 * weil_bound(m, n, q)
        total += r.value
    assert close(total, kloosterman(m, n, q), 1e-9)


@given(st.integers(1, 120).map(lambda k: 2 * k + 1), st.integers(-10, 10), st.integers(-10, 10))
def test_restricted_odd(q, m, n):
    total = 0
    for s in (1, -1):
        r = restricted_character_sum(m, n, q, s)
        assert close(r, restricted_via_kloosterman(m, n, q, s), 1e-9)
        assert abs(r) <= 2 * weil_bound(m, n, q)
        total += r.value
    assert close(total, kloosterman(m, n, q), 1e-9)


@given(st.integers(2, 500), st.integers(1, 300), st.data())
def test_theta_rational_equals_gauss(q, N, data):
    p = data.draw(st.sampled_from(list(coprime_residues(q))))
    f = unit_indicator()
    a = theta_sum(f, Fraction(p, q), N)
    b = incomplete_gauss_sum(f, p, q, N)
    assert a.value == b.value
    assert theta_sum(f, Rational(p, q), N).value == b.value
    assert abs(theta_sum(f, p / q, N).value - b.value) < 1e-9 * N


@given(st.integers(2, 400), st.integers(1, 200), st.data())
def test_triangle_inequality_and_brute(q, N, data):
    p = data.draw(st.sampled_from(list(coprime_residues(q))))
    f = Indicator(-0.3, 0.8)
    v = incomplete_gauss_sum(f, p, q, N)
    assert abs(v) <= f.samples(N)[1].sum() + 1e-9
    assert close(v, brute_gauss(f, p, q, N), 1e-9)


def test_hermite_weight_brute():
    f = HermiteWeight.basis(2)
    assert close(incomplete_gauss_sum(f, 5, 101, 10), brute_gauss(f, 5, 101, 10), 1e-11)


def brute_mean_square(q, N, D=None):
    ps = list(coprime_residues(q, D))
    from gausslab.numtheory import interval_measure, totient
    return sum(abs(brute_gauss(unit_indicator(), p, q, N)) ** 2 for p in ps) / (totient(q) * interval_measure(D))


@pytest.mark.parametrize("q,N", [(11, 2), (11, 5), (101, 2), (101, 5), (101, 40)])
def test_mean_square_prime_formula_vs_brute(q, N):
    exact = mean_square_prime_formula(q, N)
    assert brute_mean_square(q, N) == pytest.approx(exact, rel=1e-12)
    assert mean_square(unit_indicator(), q, N) == pytest.approx(exact, rel=1e-12)


def test_mean_square_restricted_D_brute():
    D = [(0, Fraction(1, 2))]
    assert mean_square(unit_indicator(), 101, 13, D) == pytest.approx(brute_mean_square(101, 13, D), rel=1e-12)


def test_mean_square_scales_quadratically():
    f = unit_indicator()
    assert mean_square(2 * f, 101, 13) == pytest.approx(4 * mean_square(f, 101, 13), rel=1e-13)


def test_long_sum_constant_weight_is_classical():
    phi = PeriodicWeight(Indicator(0, 1))
    for q in (7, 12, 30, 101):
        for p in list(coprime_residues(q))[:5]:
            assert close(long_gauss_sum(phi, p, q), classical_gauss_sum_closed(p, q), 1e-10)


def test_G_phi_at_zero_matches_resummed_quadrature():
    # G(0) = sum phi_hat(n) is a symmetric partial Fourier sum of phi at 0,
    # computed independently from closed-form coefficients
    c = 1 / math.sqrt(7)
    phi = PeriodicWeight(Indicator(0, c))
    n_max = 400
    n = np.arange(1, n_max + 1)
    oracle = c + np.sum(np.sin(2 * np.pi * n * c) / (np.pi * n))
    assert abs(G_phi(phi, 0.0, n_max) - oracle) < 1e-11


def test_long_sum_chain_small():
    q = 1009
    c = 1 / math.sqrt(7)
    N = math.floor(c * q)
    phi = PeriodicWeight(Indicator(0, c))
    for p in (1, 2, 500, 1008):
        a = incomplete_gauss_sum(unit_indicator(), p, q, N).value
        b = long_gauss_sum(phi, p, q).value
        assert close(a, b, 1e-9)


def test_performance_contract():
    q, N = 6007, 800
    ps = np.fromiter(coprime_residues(q), dtype=np.int64)
    t = time.perf_counter()
    incomplete_gauss_sums(unit_indicator(), ps, q, N, threads=1)
    assert time.perf_counter() - t < 5.0
