import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import jv

from spherical_ensembles import analytic
from spherical_ensembles.analytic import (
    BoundaryDivergence,
    DensityModel,
    RationalPolynomial,
    bessel_j,
    build_char_fn_model,
    build_density_model,
    char_fn,
    char_fn_bessel,
    char_fn_from_moments,
    char_fn_hyp,
    circle_normalizer,
    density_from_char_fn,
    density_moment,
    differentiate_power_form,
    eval_density,
    fourier_pair_check,
    hyp0f1,
    integrate_density,
    joint_density_normalizer,
    joint_density_unnormalized,
    l1_to_semicircle,
    marginal_density_n2,
    semicircle_density,
)
from spherical_ensembles.ensembles import RngState
from spherical_ensembles.exactseries import moment_sue
from spherical_ensembles.stats import integrate

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=50)
polys = st.lists(fracs, max_size=6).map(RationalPolynomial)


# ---------------------------------------------------------------- polynomials


@given(polys, polys, polys)
def test_polynomial_ring_laws(p, q, s):
    assert p + q == q + p
    assert p * q == q * p
    assert p * (q + s) == p * q + p * s
    assert (p - p) == RationalPolynomial()


@given(polys, polys, fracs)
def test_derivative_product_rule_and_evaluation(p, q, u):
    assert (p * q).derivative() == p.derivative() * q + p * q.derivative()
    assert (p * q).exact(u) == p.exact(u) * q.exact(u)
    assert math.isclose(float(p(float(u))), float(p.exact(u)), rel_tol=1e-12, abs_tol=1e-9)


def test_polynomial_normal_form():
    p = RationalPolynomial([1, 2, 0, 0])
    assert p.coeffs == (1, 2) and p.degree == 1
    assert RationalPolynomial().degree == -1 or RationalPolynomial().coeffs == ()
    assert RationalPolynomial.one_minus_u2(2) == RationalPolynomial([1, 0, -2, 0, 1])


def test_differentiate_power_form_against_mpmath():
    p = RationalPolynomial([Fraction(1, 3), 2, 0, -1])
    a = Fraction(5, 2)
    q, b = differentiate_power_form(p, a)
    coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(p.coeffs)]
    f = lambda u: mpmath.polyval(coeffs, u) * (1 - u * u) ** (mpmath.mpf(a.numerator) / a.denominator)
    for u in (-0.7, 0.1, 0.55):
        assert math.isclose(float(q(u)) * (1 - u * u) ** float(b), float(mpmath.diff(f, u)), rel_tol=1e-12)


# ---------------------------------------------------------------- special functions


def test_hyp0f1_examples():
    assert hyp0f1(1.5, 0.0) == 1.0
    assert math.isclose(hyp0f1(1.5, -0.25), math.sin(1.0), rel_tol=1e-15)
    assert math.isclose(hyp0f1(0.5, -1.0), math.cos(2.0), rel_tol=1e-14)
    with pytest.raises(ValueError):
        hyp0f1(0.0, 1.0)


@given(st.integers(1, 60).map(lambda k: k / 2), st.floats(-5e3, 300))
def test_hyp0f1_against_mpmath(alpha, z):
    ref = float(mpmath.hyp0f1(alpha, z))
    assert abs(hyp0f1(alpha, z) - ref) <= 1e-13 * max(1.0, abs(ref))


def test_bessel_examples():
    assert bessel_j(0, 0.0) == 1.0
    assert abs(bessel_j(0.5, math.pi)) <= 1e-10
    # 40-term exact-rational Taylor series for J_1(1)
    taylor = sum(Fraction((-1) ** m, math.factorial(m) * math.factorial(m + 1) * 4**m) for m in range(40)) / 2
    assert abs(bessel_j(1, 1.0) - float(taylor)) <= 1e-15
    assert math.isclose(bessel_j(1, 1.0), 0.4400505857, rel_tol=1e-9)


@given(st.integers(-1, 40).map(lambda k: k / 2), st.floats(1e-3, 60))
def test_bessel_against_scipy(nu, t):
    assert abs(bessel_j(nu, t) - jv(nu, t)) <= 1e-13


# ---------------------------------------------------------------- characteristic function


def test_char_fn_examples():
    for n in (1, 2, 5, 9):
        assert char_fn(build_char_fn_model(n, 1.7), 0.0) == 1.0
    cf = build_char_fn_model(1, 3.0)
    for t in (0.5, 1.0, 2.0):
        assert abs(char_fn(cf, t) - math.cos(3 * t)) <= 1e-12
    cf2 = build_char_fn_model(2, math.sqrt(2))
    assert abs(char_fn(cf2, 1.0) - bessel_j(0, math.sqrt(2))) <= 1e-14
    # against quadrature of the arcsine density: phi(1) = int cos(x) f(x) dx
    dm = build_density_model(2, math.sqrt(2))
    quad = integrate_density(dm, lambda x: np.cos(x))
    assert abs(char_fn(cf2, 1.0) - quad) <= 1e-12


@given(st.integers(1, 6), st.floats(0.1, 20))
def test_bessel_and_hyp_forms_agree(n, t):
    cf = build_char_fn_model(n, math.sqrt(n))
    assert abs(char_fn_bessel(cf, t) - char_fn_hyp(cf, t)) <= 1e-9


def test_char_fn_matches_moment_series():
    for n in (2, 3, 4):
        cf = build_char_fn_model(n, math.sqrt(n))
        for t in (0.3, 1.1, 4.0):
            assert abs(char_fn(cf, t) - char_fn_from_moments(n, n, t)) <= 1e-13


def test_char_fn_crossover_and_errors():
    cf = build_char_fn_model(3, 1.0)
    assert abs(char_fn(cf, 5e-4) - char_fn(cf, 5e-4, "hyp")) == 0.0
    big = build_char_fn_model(40, 1.0)
    assert math.isfinite(char_fn(big, 0.01))
    with pytest.raises(ValueError):
        char_fn_bessel(cf, 0.0)
    with pytest.raises(ValueError):
        char_fn(cf, 1.0, "laplace")


@pytest.mark.parametrize("n", [2, 3, 4])
def test_fourier_inversion(n):
    r = math.sqrt(n)
    cf, dm = build_char_fn_model(n, r), build_density_model(n, r)
    for u in (0.0, 0.5, -0.9):
        assert abs(density_from_char_fn(cf, u * r) - eval_density(dm, u * r)) <= 1e-6


def test_fourier_pair_examples():
    lhs, rhs = fourier_pair_check(1.5, 0.3)
    assert abs(lhs - 0.5) <= 1e-6 and abs(rhs - 0.5) <= 1e-15
    lhs, rhs = fourier_pair_check(2.5, 0.0)
    assert abs(rhs - 0.75) <= 1e-15 and abs(lhs - rhs) <= 1e-6
    assert fourier_pair_check(4, 0.999999)[1] < 1e-6
    with pytest.raises(ValueError):
        fourier_pair_check(0.5, 0.0)


# ---------------------------------------------------------------- density


def test_n2_density_is_arcsine():
    for r in (0.5, 1.0, math.sqrt(2), 3.0):
        dm = build_density_model(2, r)
        assert dm.p == RationalPolynomial([1]) and dm.pi_factor == -1 and dm.exponent == Fraction(-1, 2)
        for x in (-0.9 * r, 0.0, 0.3 * r):
            assert math.isclose(eval_density(dm, x), 1 / (math.pi * math.sqrt(r * r - x * x)), rel_tol=1e-14)
        assert abs(density_moment(dm, 2) - r * r / 2) <= 1e-12 * r * r
        assert abs(density_moment(dm, 4) - 3 * r**4 / 8) <= 1e-12 * r**4


def test_density_examples():
    dm = build_density_model(2, math.sqrt(2))
    assert math.isclose(eval_density(dm, 0.0), 1 / (math.pi * math.sqrt(2)), rel_tol=1e-15)
    with pytest.raises(BoundaryDivergence):
        eval_density(dm, math.sqrt(2))
    d4 = build_density_model(4, 2.0)
    assert eval_density(d4, 4.0) == 0.0 and eval_density(d4, 2.0) == 0.0
    assert eval_density(d4, 0.7) == eval_density(d4, -0.7)
    with pytest.raises(ValueError):
        build_density_model(1, 1.0)


@pytest.mark.parametrize("n", range(2, 9))
def test_density_structure_and_moments(n):
    dm = build_density_model(n, math.sqrt(n))
    assert dm.exponent == Fraction(n * n - 2 * n - 1, 2)
    assert dm.pi_factor == (-1 if n % 2 == 0 else 0)
    assert dm.p.is_even()
    assert abs(integrate_density(dm) - 1) <= 1e-10
    for k in (2, 4, 6, 8):
        assert abs(density_moment(dm, k) - float(moment_sue(k, n, n))) <= 1e-9


def test_density_radius_scaling_and_record_roundtrip():
    base = build_density_model(5, 1.0)
    other = build_density_model(5, 2.5)
    assert other.p == base.p
    assert np.allclose(base.with_radius(2.5).evaluate([0.3, 1.1]), other.evaluate([0.3, 1.1]), rtol=1e-15)
    again = DensityModel.from_record(other.to_record())
    assert again == other
    with pytest.raises(ValueError):
        DensityModel.from_record("N=3\n")


def test_evaluate_marks_divergence():
    dm = build_density_model(2, 1.0)
    v = dm.evaluate([-1.0, 0.0, 1.0, 2.0])
    assert math.isinf(v[0]) and math.isinf(v[2]) and v[3] == 0.0


def test_semicircle():
    assert math.isclose(semicircle_density(0.0), 1 / math.pi) and semicircle_density(2.0) == 0.0
    assert abs(integrate(semicircle_density, -2, 2, 1e-13, singular_ends=True, vectorized=True) - 1) <= 1e-10
    second = integrate(lambda x: x * x * semicircle_density(x), -2, 2, 1e-13, singular_ends=True, vectorized=True)
    assert abs(second - 1) <= 1e-10


def test_l1_gap_shrinks():
    gaps = [l1_to_semicircle(build_density_model(n, math.sqrt(n))) for n in (4, 6, 8, 12, 16)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.05


# ---------------------------------------------------------------- joint density


def test_joint_density_examples():
    assert joint_density_unnormalized([1.0, 1.0, 2.0], 2) == 0.0
    r, th = 1.3, 0.4
    lam = [r * math.cos(th), r * math.sin(th)]
    assert math.isclose(joint_density_unnormalized(lam, 2), r * r * (math.cos(th) - math.sin(th)) ** 2, rel_tol=1e-14)


@given(st.lists(st.floats(-5, 5), min_size=2, max_size=5), st.sampled_from([1, 2, 4]), st.randoms())
def test_joint_density_permutation_invariance(lam, beta, rnd):
    perm = lam[:]
    rnd.shuffle(perm)
    assert math.isclose(joint_density_unnormalized(lam, beta), joint_density_unnormalized(perm, beta), rel_tol=1e-12, abs_tol=1e-300)


def test_normalizers():
    r = 1.5
    assert math.isclose(circle_normalizer(2, r), 2 * math.pi * r**3, rel_tol=1e-13)
    assert math.isclose(circle_normalizer(1, r), 4 * math.sqrt(2) * r**2, rel_tol=1e-13)
    z, se = joint_density_normalizer(2, 2, r, samples=10**6, rng=RngState(3))
    assert abs(z - 2 * math.pi * r**3) <= 3 * se
    # homogeneity: Z(r) = r^(beta C(N,2) + N - 1) Z(1), same stream so only the scale differs
    for beta, n in ((1, 3), (2, 3), (4, 2)):
        z1, _ = joint_density_normalizer(beta, n, 1.0, samples=10**5, rng=RngState(4))
        z2, _ = joint_density_normalizer(beta, n, 2.0, samples=10**5, rng=RngState(4))
        assert math.isclose(z2, 2.0 ** (beta * n * (n - 1) // 2 + n - 1) * z1, rel_tol=1e-12)
    with pytest.raises(ValueError):
        joint_density_normalizer(2, 5, 1.0)


def test_marginal_pushforward():
    dm = build_density_model(2, 2.0)
    for x in (-1.9, 0.0, 1.2):
        assert abs(marginal_density_n2(2, 2.0, x) - eval_density(dm, x)) <= 1e-8
        assert abs(analytic.marginal_cdf_n2(2, 2.0, x) - float(analytic.arcsine_cdf(x, 2.0))) <= 1e-8
