from fractions import Fraction

import pytest

from sphere_det.errors import InvalidDimensionError, InvalidIndexError
from sphere_det.models import SphereSpec
from sphere_det.poly import Parity, Polynomial, parity_check
from sphere_det.spectral import (
    LinearizationTable,
    conformal_laplace_eigenvalue,
    dim_harmonics,
    gegenbauer_P,
    laplace_eigenvalue,
    mode_data,
    nu_moment,
    recurrence_coefficients,
    triple_product_closed_k2,
    triple_product_direct,
    z1,
)

S3 = SphereSpec(3)
S5 = SphereSpec(5)
T = Polynomial.x()


def test_sphere_spec_validation():
    assert SphereSpec(7).p == 3
    for bad in (1, 4, 2):
        with pytest.raises(InvalidDimensionError):
            SphereSpec(bad)


def test_dimensions():
    for k in range(10):
        assert dim_harmonics(S3, k) == (k + 1) ** 2
    assert dim_harmonics(S5, 2) == 20
    assert dim_harmonics(SphereSpec(11), 0) == 1
    with pytest.raises(InvalidIndexError):
        dim_harmonics(S3, -1)


def test_eigenvalues():
    assert laplace_eigenvalue(S3, 1) == 3
    assert laplace_eigenvalue(S5, 2) == 12
    assert conformal_laplace_eigenvalue(S3, 0) == Fraction(3, 4)
    for n in (3, 5, 9):
        spec = SphereSpec(n)
        for k in range(101):
            assert conformal_laplace_eigenvalue(spec, k) == (k + Fraction(n - 2, 2)) * (k + Fraction(n, 2))


def test_mode_data():
    data = mode_data(S5, 2)
    assert (data.k, data.d_k, data.lambda_k, data.lambdaL_k) == (2, 20, 12, Fraction(63, 4))


def test_z1_values():
    assert z1(S3) == Fraction(-3, 4)
    assert z1(S5) == Fraction(-25, 48)
    assert z1(SphereSpec(7)) == Fraction(-49, 120)
    for n in range(3, 18, 2):
        assert z1(SphereSpec(n)) < 0


def test_moments():
    assert nu_moment(SphereSpec(9), 0) == 1
    assert nu_moment(S3, 2) == Fraction(1, 4)
    assert nu_moment(S3, 4) == Fraction(1, 8)
    assert nu_moment(S5, 3) == 0


def test_low_order_polynomials():
    for n in (3, 5, 7):
        spec = SphereSpec(n)
        assert gegenbauer_P(spec, 0) == Polynomial.constant(1)
        assert gegenbauer_P(spec, 1) == (n + 1) * T
        assert gegenbauer_P(spec, 2) == Fraction(n + 3, 2) * ((n + 1) * T**2 - 1)


def test_recurrence_coefficients():
    assert recurrence_coefficients(S5, 0) == (Fraction(1, 6), 0)
    assert recurrence_coefficients(S5, 2) == (Fraction(3, 10), Fraction(5, 6))


def test_normalization_and_parity():
    for n in range(3, 18, 2):
        spec = SphereSpec(n)
        for k in range(21):
            poly = gegenbauer_P(spec, k)
            assert poly.degree == k
            assert parity_check(poly) is (Parity.EVEN if k % 2 == 0 else Parity.ODD)
            assert triple_product_direct(spec, k, k, 0) == dim_harmonics(spec, k)


def test_orthogonality():
    spec = SphereSpec(7)
    for a in range(21):
        for b in range(21):
            expected = dim_harmonics(spec, a) if a == b else 0
            assert triple_product_direct(spec, a, b, 0) == expected


def test_triple_product_selection_rules():
    assert triple_product_direct(S5, 1, 2, 2) == 0
    assert triple_product_direct(S5, 7, 1, 2) == 0
    assert triple_product_direct(S3, 0, 2, 2) == 9


def test_closed_forms_match_direct_products():
    for n in range(3, 18, 2):
        spec = SphereSpec(n)
        for j in range(13):
            assert triple_product_closed_k2(spec, j, 0) == triple_product_direct(spec, j, j, 2)
            assert triple_product_closed_k2(spec, j, 2) == triple_product_direct(spec, j, j + 2, 2)
            if j >= 2:
                assert triple_product_closed_k2(spec, j, -2) == triple_product_direct(spec, j, j - 2, 2)


def test_closed_form_examples_and_domain():
    assert triple_product_closed_k2(S3, 0, 2) == 9
    assert triple_product_closed_k2(S5, 0, 0) == 0
    assert triple_product_closed_k2(S5, 1, 0) == 30
    assert triple_product_closed_k2(S5, 3, -2) == triple_product_direct(S5, 3, 1, 2)
    with pytest.raises(InvalidIndexError):
        triple_product_closed_k2(S5, 1, -2)
    with pytest.raises(InvalidIndexError):
        triple_product_closed_k2(S5, 3, 4)


def test_linearization_table_matches_direct_products():
    for n, k in ((3, 2), (5, 3), (9, 4)):
        spec = SphereSpec(n)
        table = LinearizationTable(spec, k)
        for a in range(12):
            for b in range(max(0, a - k), a + k + 1):
                assert table.product(a, b) == triple_product_direct(spec, a, b, k)
