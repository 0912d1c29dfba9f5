from fractions import Fraction

import mpmath
import pytest

from sphere_det.config import get_settings
from sphere_det.errors import KernelDomainError, NonConvergenceError
from sphere_det.kernels import (
    abel_summation_oracle,
    alpha_seq_detL,
    alpha_seq_detL_terms,
    alpha_seq_s3_F,
    alpha_seq_terms,
    apply_T,
    apply_T_numeric,
    c_double_prime_n,
    c_prime_n,
    detl_coefficients,
    detl_harmonic_extension,
    eventual_polynomial,
    f_detl,
    f_product,
    f_s3,
    gamma_seq_s3,
    green_L,
    green_s3_delta,
    green_s3_deltabar,
    pk_coeffs,
    power_sum,
    s3_harmonic_extension,
    taylor_regular_part,
)
from sphere_det.models import CoeffSeq
from sphere_det.scalars import ExactScalar, ZERO

SAMPLES = [0.3, 1.0, float(mpmath.pi / 2), 2.5, 3.0]


@pytest.fixture
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def test_s3_green_kernel_values():
    kernel = green_s3_delta()
    assert float(kernel(mpmath.pi / 2)) == pytest.approx(-0.25, abs=1e-15)
    assert float(kernel(mpmath.pi)) == pytest.approx(-0.75, abs=1e-15)
    assert float(green_s3_deltabar()(mpmath.pi)) == pytest.approx(0.0, abs=1e-15)
    near = mpmath.pi - mpmath.mpf("1e-9")
    assert float(kernel(near)) == pytest.approx(-0.75, abs=1e-12)
    assert float(kernel(1.0)) == pytest.approx(float(kernel.regular(1.0) + kernel.singular(1.0)), rel=1e-12)
    assert float(green_s3_deltabar()(1.0) - kernel(1.0)) == pytest.approx(0.75)


def test_taylor_regular_part():
    coeffs = taylor_regular_part(green_s3_delta(), 4)
    assert coeffs[0] == Fraction(-3, 4)
    assert coeffs[1] == 0
    assert coeffs[2] == Fraction(1, 6)
    assert coeffs[4] == Fraction(1, 90)
    assert taylor_regular_part(green_s3_deltabar(), 0)[0] == 0
    r = mpmath.mpf("0.01")
    approx = sum(c.numeric() * r**i for i, c in enumerate(coeffs))
    assert float(green_s3_delta().regular(r)) == pytest.approx(float(approx), abs=1e-12)


def test_l_kernel_has_no_regular_part():
    kernel = green_L(5)
    assert kernel.regular(1.0) == 0
    assert float(kernel(mpmath.pi)) == pytest.approx(1.0)
    with pytest.raises(KernelDomainError):
        taylor_regular_part(kernel, 2)
    with pytest.raises(ValueError):
        taylor_regular_part(green_s3_delta(), -1)


def test_kernel_domain():
    for bad in (0, -1, 4):
        with pytest.raises(KernelDomainError):
            green_s3_delta()(bad)
    with pytest.raises(KernelDomainError):
        apply_T(green_s3_delta())(2 * mpmath.pi)


@pytest.mark.parametrize("r", [0.4, 1.0, 2.0, 2.9])
def test_transform_closed_form_matches_numeric(r):
    for kernel in (green_s3_delta(), green_s3_deltabar()):
        assert float(apply_T(kernel)(r)) == pytest.approx(float(apply_T_numeric(kernel, r)), rel=1e-8)
    for n in (3, 5, 7):
        kernel = green_L(n)
        factor = Fraction(n * (n - 2), 4)
        expected = float(apply_T(kernel)(r)) * factor
        assert float(apply_T_numeric(kernel, r)) == pytest.approx(expected, rel=1e-8)


def test_transform_kills_constants():
    assert float(apply_T_numeric(lambda r: mpmath.mpf(7), 1.3)) == pytest.approx(0.0, abs=1e-10)


def test_product_kernels():
    assert float(f_s3(mpmath.pi / 2)) == pytest.approx(1.0)
    for n in (3, 5, 9):
        transformed = apply_T(green_L(n))
        product = f_product(transformed, transformed, n)
        assert product.constant.power == 2
        for r in (0.7, 2.0):
            assert float(product(r)) == pytest.approx(2 ** (n - 1) * float(f_detl(n)(r)), rel=1e-12)


def test_positive_constants():
    assert str(c_prime_n(3)) == "C'_n = 3/4*C_n"
    assert str(c_double_prime_n(5)) == "C''_n = 225*C_n^2"
    with pytest.raises(KernelDomainError):
        c_prime_n(3).scaled(Fraction(-1), "bad")


def test_s3_alpha_initial_terms():
    seq = alpha_seq_s3_F()
    terms = alpha_seq_terms(seq, 3)
    assert terms[0] == Fraction(5, 8)
    assert terms[1] == 5
    assert terms[2] == ExactScalar.from_coeffs({0: Fraction(115, 16), 1: Fraction(3, 2)})
    assert terms[3] == 61
    assert seq.term(3) == 61


def test_s3_alpha_walk_matches_direct_terms():
    seq = alpha_seq_s3_F()
    walked = alpha_seq_terms(seq, 40)
    assert walked == [seq.term(k) for k in range(41)]


def test_s3_gamma_differs_from_alpha_by_delta_correction():
    alpha = alpha_seq_s3_F()
    gamma = gamma_seq_s3()
    assert gamma.term(0) == Fraction(-3, 2) + Fraction(1, 8)
    assert gamma.term(3) == Fraction(209, 4)
    for k in range(61):
        assert alpha.term(k) - gamma.term(k) == Fraction(3, 4) * k * k + 2
    walked = alpha_seq_terms(gamma, 60)
    assert walked == [gamma.term(k) for k in range(61)]
    with mpmath.workprec(get_settings().precision_bits):
        for k in (50, 100, 300):
            gap = abs(gamma.term(k).numeric() - gamma.asymptotic_value(k))
            assert gap <= mpmath.mpf(10) / k


def test_sequence_without_walker_uses_direct_terms():
    seq = alpha_seq_detL(5)
    assert seq.iterate is None
    assert alpha_seq_terms(seq, 12) == alpha_seq_detL_terms(5, 12)


def test_s3_alpha_positive_and_asymptotic():
    seq = alpha_seq_s3_F()
    terms = alpha_seq_terms(seq, 300)
    assert all(term.sign() > 0 for term in terms)
    with mpmath.workprec(get_settings().precision_bits):
        for k in (50, 100, 300):
            gap = abs(terms[k].numeric() - seq.asymptotic_value(k))
            assert gap <= mpmath.mpf(10) / k


def test_asymptotic_value_keeps_working_precision():
    k = 10**6
    exact = ExactScalar.pi2(1, Fraction(3, 16) * k**3 + Fraction(3, 8) * k)
    value = alpha_seq_s3_F().asymptotic_value(k)
    with mpmath.workprec(get_settings().precision_bits):
        assert abs(value - exact.numeric()) < mpmath.mpf("1e-12")


def test_pk_and_eventual_polynomial():
    assert pk_coeffs(3, 3) == [1, 8, 32, 88]
    eventual = eventual_polynomial(3)
    assert eventual.coeff(3) == Fraction(8, 3)
    assert eventual.coeff(1) == Fraction(16, 3)
    assert eventual.coeff(2) == 0 and eventual.coeff(0) == 0
    for n in (3, 5, 7, 9):
        eventual = eventual_polynomial(n)
        assert [eventual(k) for k in range(1, 30)] == pk_coeffs(n, 29)[1:]
    with pytest.raises(ValueError):
        pk_coeffs(3, -1)


def test_detl_terms_positive():
    for n in (3, 5, 7, 9):
        terms = alpha_seq_detL_terms(n, 60)
        assert all(term.sign() > 0 for term in terms)
        seq = alpha_seq_detL(n)
        assert terms[:20] == [seq.term(k) for k in range(20)]
        data = detl_coefficients(n)
        assert data.e_poly.odd_part().is_zero


def test_power_sum_small_cases():
    z = 0.3
    assert complex(power_sum(0, z)).real == pytest.approx(z / (1 - z))
    assert complex(power_sum(1, z)).real == pytest.approx(z / (1 - z) ** 2)
    direct = sum(k**3 * z**k for k in range(1, 200))
    assert complex(power_sum(3, z)).real == pytest.approx(direct)


def test_abel_oracle_s3():
    assert abel_summation_oracle(alpha_seq_s3_F(), s3_harmonic_extension, SAMPLES, 0.9) < 1e-6


def test_abel_oracle_detl():
    assert abel_summation_oracle(alpha_seq_detL(3), detl_harmonic_extension(3), SAMPLES, 0.9) < 1e-6


def test_abel_oracle_zero_sequence():
    zero = CoeffSeq("zero", lambda k: ZERO)
    assert abel_summation_oracle(zero, lambda rho, r: 0.0, SAMPLES, 0.5) == 0.0
    with pytest.raises(ValueError):
        abel_summation_oracle(zero, lambda rho, r: 0.0, SAMPLES, 1.0)


def test_harmonic_extensions_approach_boundary_values():
    for r in (float(mpmath.pi / 2), 2.0):
        assert s3_harmonic_extension(0.9999, r) == pytest.approx(float(f_s3(r)), abs=1e-2)
        assert detl_harmonic_extension(3)(0.9999, r) == pytest.approx(float(f_detl(3)(r)), abs=1e-2)


def test_abel_oracle_gives_up(monkeypatch, fresh_settings):
    monkeypatch.setenv("SPHERE_DET_ABEL_MAX_TERMS", "10")
    get_settings.cache_clear()
    with pytest.raises(NonConvergenceError):
        abel_summation_oracle(alpha_seq_s3_F(), s3_harmonic_extension, SAMPLES, 0.9)
