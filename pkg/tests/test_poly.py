import random
from fractions import Fraction

import pytest

from sphere_det.errors import DegreeBoundError, ParityError, UnsupportedPoleError
from sphere_det.poly import Parity, PoleTerm, Polynomial, interpolate_verified, parity_check, partial_fractions

J = Polynomial.x()


def test_basic_operations():
    assert (J**2).derivative()(1) == 2
    assert (J**3 + 2 * J)(2) == 12
    assert Polynomial().degree == -1
    assert (J**2 - J**2).is_zero
    assert (J + 1).shift(2) == J + 3
    assert ((J + 1) ** 2).reflect() == (J - 1) ** 2


def test_divmod_reconstructs():
    top = J**5 + 3 * J**2 - 7
    bottom = J**2 - 4
    quotient, remainder = divmod(top, bottom)
    assert quotient * bottom + remainder == top
    assert remainder.degree < bottom.degree


def test_parity_check():
    assert parity_check(J**2 + 4) is Parity.EVEN
    assert parity_check(J**3 + 2 * J) is Parity.ODD
    assert parity_check(J**2 + J) is Parity.NEITHER
    assert parity_check(Polynomial()) is Parity.EVEN


def test_square_round_trip():
    even = J**4 - 3 * J**2 + 2
    assert even.in_square().from_square() == even
    with pytest.raises(ParityError):
        (J**3).in_square()


def test_interpolate_recovers_square():
    samples = [(x, x * x) for x in range(5)]
    assert interpolate_verified(samples, 2, 2) == J**2


def test_interpolate_flags_degree_violation():
    samples = [(x, x**3) for x in range(5)]
    with pytest.raises(DegreeBoundError, match="degree bound violated"):
        interpolate_verified(samples, 2, 2)


def test_interpolate_needs_enough_distinct_points():
    with pytest.raises(DegreeBoundError):
        interpolate_verified([(0, 1), (1, 1)], 2, 1)
    with pytest.raises(DegreeBoundError):
        interpolate_verified([(0, 1), (0, 1), (1, 2), (2, 3)], 1, 1)


def test_interpolation_is_idempotent():
    poly = Polynomial((Fraction(1, 3), 0, -2, Fraction(5, 7)))
    first = interpolate_verified([(x, poly(x)) for x in range(3, 10)], 3, 3)
    second = interpolate_verified([(x, first(x)) for x in range(3, 10)], 3, 3)
    assert first == second == poly


def test_partial_fractions_simple_cases():
    result = partial_fractions(J**2, [(1, 1)])
    assert result.poly_part == Polynomial.constant(1)
    assert result.pole_terms == (PoleTerm(1, 1, Polynomial.constant(1).coeff(0)),)

    result = partial_fractions(J**2 - 3, [(2, 1)])
    assert result.poly_part == Polynomial.constant(1)
    assert [(t.ell, t.order, t.numerator) for t in result.pole_terms] == [(2, 1, 1)]


def test_partial_fractions_two_poles():
    result = partial_fractions(Polynomial.constant(1), [(2, 1), (4, 1)])
    assert result.poly_part.is_zero
    assert [(t.ell, t.numerator) for t in result.pole_terms] == [(2, Fraction(-1, 12)), (4, Fraction(1, 12))]


def test_partial_fractions_reproduce_original():
    rng = random.Random(3)
    numerator = J**6 - 5 * J**4 + Fraction(2, 3) * J**2 + 11
    poles = [(0, 1), (2, 2), (3, 1)]
    decomposition = partial_fractions(numerator, poles)
    for _ in range(50):
        j = Fraction(rng.randint(-400, 400), rng.randint(1, 37))
        if j * j in (0, 4, 9):
            continue
        denominator = j**2 * (j * j - 4) ** 2 * (j * j - 9)
        assert decomposition(j) == numerator(j) / denominator


def test_partial_fractions_merges_and_limits_orders():
    merged = partial_fractions(J**2, [(1, 1), (1, 1)])
    assert {(t.ell, t.order) for t in merged.pole_terms} <= {(1, 1), (1, 2)}
    with pytest.raises(UnsupportedPoleError):
        partial_fractions(J**2, [(1, 2), (1, 1)])
    with pytest.raises(ParityError):
        partial_fractions(J**3, [(1, 1)])


def test_pole_rational_arithmetic():
    first = partial_fractions(J**2, [(1, 1)])
    second = partial_fractions(Polynomial.constant(2), [(1, 1)])
    total = first * 2 + second
    for j in (2, 3, Fraction(1, 2)):
        assert total(j) == 2 * first(j) + second(j)
    assert total.poles() == {1}
    dumped = total.to_json()
    assert dumped["pole_terms"][0]["ell"] == 1
