import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gausslab.expsums import classical_gauss_sum_direct
from gausslab.metaplectic import (
    MetaplecticElement,
    MetaplecticPoint,
    RealMatrix2,
    ReductionError,
    delta14_element,
    gamma0_tilde,
    in_delta14,
    iwasawa_compose,
    iwasawa_decompose,
    lift_rational,
    meta_act,
    meta_identity,
    meta_inverse,
    meta_multiply,
    moebius,
    n_minus,
    n_plus,
    phi_from_sign,
    point_element,
    reduce_points,
    reduce_to_fundamental_domain,
    sign_class,
    verify_lift,
)
from gausslab.numtheory import SignFactor, coprime_residues, totient
from gausslab.theta import HalfPlanePoint

FOUR_PI = 4 * math.pi


def same_mod_4pi(a, b, tol=1e-9):
    r = (a - b) / FOUR_PI
    return abs(r - round(r)) * FOUR_PI < tol


def random_element(rng):
    x, y, phi = rng.uniform(-2, 2), 10 ** rng.uniform(-1, 1), rng.uniform(-10, 10)
    return point_element(MetaplecticPoint.of(complex(x, y), phi))


# ---------------------------------------------------------------- examples

def test_matrix_det_check():
    with pytest.raises(ValueError):
        RealMatrix2(1, 1, 1, 1)
    g = RealMatrix2(2, 1, 1, 1)
    assert (g @ g.inverse()).rows() == ((1, 0), (0, 1))


def test_moebius_examples():
    assert moebius(RealMatrix2(1, 0, 0, 1), 0.3 + 2j).z == 0.3 + 2j
    assert abs(moebius(RealMatrix2(0, Fraction(-1, 2), 2, 0), 1j).z - 0.25j) < 1e-16
    assert moebius(RealMatrix2(1, 1, 0, 1), 0.3 + 2j).z == 1.3 + 2j


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-2, 2), st.floats(0.01, 5))
def test_moebius_jacobian(a, b, c, x, y):
    if abs(a) < 1e-3:
        return
    g = RealMatrix2(a, b, c, (1 + b * c) / a)
    z = complex(x, y)
    w = moebius(g, z)
    assert abs(w.y - y / abs(g.c * z + g.d) ** 2) <= 1e-12 * max(1.0, w.y)


def test_iwasawa_examples():
    assert iwasawa_decompose(RealMatrix2(1, 0, 0, 1)) == (0.0, 1.0, 0.0)
    x, y, phi = iwasawa_decompose(iwasawa_compose(0.3, 2.0, 1.1))
    assert abs(x - 0.3) < 1e-14 and abs(y - 2.0) < 1e-14 and abs(phi - 1.1) < 1e-14
    k = math.cos(0.8), math.sin(0.8)
    x, y, phi = iwasawa_decompose(RealMatrix2(k[0], k[1], -k[1], k[0]))
    assert abs(x) < 1e-15 and abs(y - 1) < 1e-15 and abs(phi - 0.8) < 1e-15


@given(st.floats(-5, 5), st.floats(1e-3, 1e3), st.floats(0, 2 * math.pi - 1e-6))
def test_iwasawa_round_trip(x, y, phi):
    xx, yy, pp = iwasawa_decompose(iwasawa_compose(x, y, phi))
    assert abs(xx - x) < 1e-9 * max(1, abs(x), y, 1 / y)
    assert abs(yy - y) < 1e-9 * y
    d = (pp - phi) % (2 * math.pi)
    assert min(d, 2 * math.pi - d) < 1e-8


def test_element_beta_consistency():
    with pytest.raises(ValueError):
        MetaplecticElement(RealMatrix2(1, 0, 0, 1), 1.0)
    u = MetaplecticElement(RealMatrix2(1, 0, 0, 1), 2 * math.pi)
    assert u.winding == 1


def test_multiply_identity_and_inverse():
    rng = np.random.default_rng(1)
    for _ in range(50):
        u = random_element(rng)
        e = meta_multiply(u, meta_identity())
        assert np.allclose(e.g.array(), u.g.array()) and abs(e.beta_at_i - u.beta_at_i) < 1e-12
        v = meta_multiply(u, meta_inverse(u))
        assert np.allclose(v.g.array(), np.eye(2), atol=1e-9)
        assert same_mod_4pi(v.beta_at_i, 0.0)
        assert abs(v.beta_at_i) < 1e-9


def test_associativity_100_triples():
    rng = np.random.default_rng(2)
    for _ in range(100):
        u, v, w = (random_element(rng) for _ in range(3))
        a = (u @ v) @ w
        b = u @ (v @ w)
        assert np.allclose(a.g.array(), b.g.array(), rtol=1e-10, atol=1e-10)
        assert abs(a.beta_at_i - b.beta_at_i) < 1e-10
        # beta consistency survives the products (checked in the constructor)
        MetaplecticElement(a.g, a.beta_at_i)


def test_action_is_compatible_with_product():
    rng = np.random.default_rng(4)
    for _ in range(30):
        u, v = random_element(rng), random_element(rng)
        pt = MetaplecticPoint.of(complex(rng.uniform(-1, 1), rng.uniform(0.1, 2)), rng.uniform(-5, 5))
        assert meta_act(u @ v, pt).close_to(u(v(pt)), 1e-9)


def test_gamma0_tilde():
    g = gamma0_tilde()
    img = g(MetaplecticPoint.of(1j, 0.0))
    assert abs(img.z.z - 0.25j) < 1e-16 and abs(img.phi - math.pi / 2) < 1e-16
    sq = g @ g
    assert sq.g.rows() == ((-1, 0), (0, -1))
    # oracle: beta of the square at i is Arg(2 (gamma0 i)) + Arg(2 i)
    assert abs(sq.beta_at_i - (cmath.phase(2 * 0.25j) + cmath.phase(2j))) < 1e-15
    assert abs(sq.beta_at_i - math.pi) < 1e-15


def test_n_minus_and_n_plus():
    assert n_minus(0).g.rows() == ((1, 0), (0, 1)) and n_minus(0).beta_at_i == 0
    for a, b in ((0.3, -1.2), (5, 7), (-40, 3.5)):
        lhs, rhs = n_minus(a) @ n_minus(b), n_minus(a + b)
        assert np.allclose(lhs.g.array(), rhs.g.array()) and abs(lhs.beta_at_i - rhs.beta_at_i) < 1e-12
    assert n_plus(Fraction(1, 2))(MetaplecticPoint.of(0.1 + 1j, 0.3)).close_to(MetaplecticPoint.of(0.6 + 1j, 0.3))


def test_delta14_membership():
    g = RealMatrix2(1, -1, 4, -3)
    u = delta14_element(g)
    assert in_delta14(u)
    assert not in_delta14(MetaplecticElement(g, u.beta_at_i + 2 * math.pi))
    assert in_delta14(MetaplecticElement(g, u.beta_at_i + FOUR_PI))
    with pytest.raises(ValueError):
        delta14_element(RealMatrix2(3, 1, 8, 3))


def test_phi_from_sign():
    for s in (1, -1, 1j, -1j):
        phi = phi_from_sign(SignFactor(s))
        assert abs(cmath.exp(0.5j * phi) - s * cmath.exp(-0.25j * math.pi)) < 1e-15


# -------------------------------------------------------------------- lifts

@pytest.mark.parametrize("y", [1e-2, 1e-4])
def test_lift_3_4(y):
    r = lift_rational(3, 4, y)
    assert r.case == "i"
    assert r.witness.g.rows() == ((1, -1), (4, -3))
    assert int(r.witness.g.a) % 4 == 1
    assert r.target.z.x == Fraction(1, 4)
    assert abs(r.target.z.y - 1 / (16 * y)) < 1e-12 / y
    assert same_mod_4pi(r.phi_pq, math.pi / 2)
    # (z - 1)/(4z - 3) at 3/4 + iy equals 1/4 + i/(16y)
    w = moebius(r.witness.g, complex(0.75, y)).z
    assert abs(w - complex(0.25, 1 / (16 * y))) < 1e-9 / y
    z_err, turns = verify_lift(r)
    assert z_err < 1e-10 and abs(turns - round(turns)) < 1e-12
    assert in_delta14(r.witness)


def test_lift_1_4():
    r = lift_rational(1, 4, 0.01)
    assert r.witness.g.c == -4 and r.witness.g.d == 1
    assert r.target.z.x == Fraction(3, 4)
    assert same_mod_4pi(r.phi_pq, -math.pi / 2)


def test_lift_odd_and_2mod4_cases():
    for p, q, case in ((1, 3, "ii"), (2, 5, "ii"), (1, 6, "iii"), (7, 10, "iii")):
        r = lift_rational(p, q, 1e-3)
        assert r.case == case
        z_err, turns = verify_lift(r)
        assert z_err < 1e-10 and abs(turns - round(turns)) < 1e-12
        assert in_delta14(r.witness)
    # p = 1, q = 3 realizes phi = -3 pi / 2
    assert same_mod_4pi(lift_rational(1, 3, 0.1).phi_pq, -1.5 * math.pi)


def test_lift_errors():
    with pytest.raises(ValueError):
        lift_rational(2, 4, 0.1)
    with pytest.raises(ValueError):
        lift_rational(1, 4, 0.0)


@given(st.integers(1, 400), st.floats(1e-6, 1.0), st.data())
def test_lift_property(q, y, data):
    p = data.draw(st.sampled_from(list(coprime_residues(q))))
    r = lift_rational(p, q, y)
    z_err, turns = verify_lift(r)
    assert z_err < 1e-10 * max(1.0, 1 / (q * q * y))
    assert abs(turns - round(turns)) < 1e-9
    assert in_delta14(r.witness)
    assert same_mod_4pi(r.phi_pq, sign_class(p, q)[0])


# ------------------------------------------------------------- sign classes

def test_sign_class_examples():
    phi, s = sign_class(3, 4)
    assert same_mod_4pi(phi, math.pi / 2)
    assert s.value == -1j
    g = classical_gauss_sum_direct(3, 4).value / 2
    assert abs(g - (1 - 1j)) < 1e-14
    assert sign_class(1, 3)[1].value == 1
    with pytest.raises(ValueError):
        sign_class(2, 6)


@pytest.mark.parametrize("q", [4, 8, 12, 20, 44, 100, 4 * 1511])
def test_sign_class_partition(q):
    counts = {}
    for p in coprime_residues(q):
        _, s = sign_class(p, q)
        counts[s.value] = counts.get(s.value, 0) + 1
        if q < 200:
            g = classical_gauss_sum_direct(p, q).value
            assert abs(g - (1 + 1j) * complex(s.value) * math.sqrt(q)) < 1e-10
    assert set(counts) <= {1, -1, 1j, -1j}
    assert sum(counts.values()) == totient(q)


def test_sign_class_odd_matches_gauss_sum():
    from gausslab.numtheory import epsilon
    for q in (3, 5, 9, 15, 101):
        for p in coprime_residues(q):
            _, s = sign_class(p, q)
            g = classical_gauss_sum_direct(p, q).value
            assert abs(g - complex(s.value) * complex(epsilon(q).value) * math.sqrt(q)) < 1e-10


# --------------------------------------------------------------- reduction

def test_reduction_examples():
    zs, word = reduce_to_fundamental_domain(5 + 1j)
    assert zs.z == 1j and word.rows() == ((1, -5), (0, 1))
    zs, _ = reduce_to_fundamental_domain(0.3j)
    assert abs(zs.z - 10j / 3) < 1e-14
    zs, word = reduce_to_fundamental_domain(0.5 + 0.1j)
    assert abs(zs.x) <= 0.5 and abs(zs.z) >= 1
    assert abs(moebius(word, 0.5 + 0.1j).z - zs.z) < 1e-12


@given(st.floats(-100, 100), st.floats(1e-7, 10))
def test_reduction_property(x, y):
    zs, word = reduce_to_fundamental_domain(complex(x, y))
    assert abs(zs.x) <= 0.5 + 1e-12 and abs(zs.z) >= 1 - 1e-12
    assert word.is_integral() and word.det() == 1


def test_reduction_errors_and_vectorized():
    with pytest.raises(ValueError):
        reduce_to_fundamental_domain(1 - 1j)
    with pytest.raises(ReductionError):
        reduce_to_fundamental_domain(0.1 + 1e-9j, max_iter=1)
    rng = np.random.default_rng(0)
    zs = rng.uniform(-3, 3, 200) + 1j * 10 ** rng.uniform(-5, 0, 200)
    out = reduce_points(zs)
    ref = np.array([reduce_to_fundamental_domain(z)[0].z for z in zs])
    assert np.allclose(out, ref, atol=1e-9)
