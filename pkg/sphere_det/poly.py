from __future__ import annotations

from dataclasses import dataclass
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        def __str__(self) -> str:
            return str.__str__(self)

        def __format__(self, format_spec: str) -> str:
            return str.__format__(str(self), format_spec)
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence, Union

from sphere_det.errors import DegreeBoundError, ParityError, UnsupportedPoleError
from sphere_det.scalars import ExactScalar, RationalLike, ZERO

ScalarLike = Union[ExactScalar, int, Fraction]

ZERO_DEGREE = -1


class Parity(StrEnum):
    EVEN = "even"
    ODD = "odd"
    NEITHER = "neither"


@dataclass(frozen=True, slots=True)
class Polynomial:
    """Univariate polynomial over Q[pi^2]; coeffs[i] multiplies x^i."""

    coeffs: tuple[ExactScalar, ...] = ()

    def __post_init__(self) -> None:
        values = [ExactScalar.coerce(c) for c in self.coeffs]
        while values and values[-1].is_zero:
            values.pop()
        object.__setattr__(self, "coeffs", tuple(values))

    @classmethod
    def constant(cls, value: ScalarLike) -> Polynomial:
        return cls((value,))

    @classmethod
    def monomial(cls, degree: int, coeff: ScalarLike = 1) -> Polynomial:
        return cls((0,) * degree + (coeff,))

    @classmethod
    def x(cls) -> Polynomial:
        return cls((0, 1))

    @classmethod
    def from_roots(cls, roots: Iterable[RationalLike], leading: ScalarLike = 1) -> Polynomial:
        result = cls.constant(leading)
        for root in roots:
            result = result * cls((-Fraction(root), 1))
        return result

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else ZERO_DEGREE

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, power: int) -> ExactScalar:
        return self.coeffs[power] if 0 <= power < len(self.coeffs) else ZERO

    def leading(self) -> ExactScalar:
        return self.coeffs[-1] if self.coeffs else ZERO

    def __call__(self, x: ScalarLike) -> ExactScalar:
        result = ZERO
        for coeff in reversed(self.coeffs):
            result = result * x + coeff
        return result

    def __neg__(self) -> Polynomial:
        return Polynomial(tuple(-c for c in self.coeffs))

    def __add__(self, other: Polynomial | ScalarLike) -> Polynomial:
        other = _as_poly(other)
        size = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(tuple(self.coeff(i) + other.coeff(i) for i in range(size)))

    __radd__ = __add__

    def __sub__(self, other: Polynomial | ScalarLike) -> Polynomial:
        return self + (-_as_poly(other))

    def __rsub__(self, other: ScalarLike) -> Polynomial:
        return _as_poly(other) - self

    def __mul__(self, other: Polynomial | ScalarLike) -> Polynomial:
        if not isinstance(other, Polynomial):
            scalar = ExactScalar.coerce(other)
            return Polynomial(tuple(c * scalar for c in self.coeffs))
        if self.is_zero or other.is_zero:
            return Polynomial()
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Polynomial(tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, scalar: ScalarLike) -> Polynomial:
        return Polynomial(tuple(c / scalar for c in self.coeffs))

    def __pow__(self, exponent: int) -> Polynomial:
        result = Polynomial.constant(1)
        for _ in range(exponent):
            result = result * self
        return result

    def __divmod__(self, divisor: Polynomial) -> tuple[Polynomial, Polynomial]:
        if divisor.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        lead = divisor.leading()
        remainder = list(self.coeffs)
        quotient = [ZERO] * max(len(remainder) - divisor.degree, 0)
        for shift in range(len(quotient) - 1, -1, -1):
            factor = remainder[shift + divisor.degree] / lead
            quotient[shift] = factor
            if factor.is_zero:
                continue
            for i, c in enumerate(divisor.coeffs):
                remainder[shift + i] = remainder[shift + i] - factor * c
        return Polynomial(tuple(quotient)), Polynomial(tuple(remainder[: max(divisor.degree, 0)]))

    def derivative(self) -> Polynomial:
        return Polynomial(tuple(c * i for i, c in enumerate(self.coeffs) if i))

    def shift(self, h: RationalLike) -> Polynomial:
        """P(x + h)."""
        h = Fraction(h)
        out = [ZERO] * len(self.coeffs)
        for i, c in enumerate(self.coeffs):
            if c.is_zero:
                continue
            for j in range(i + 1):
                out[j] = out[j] + c * (comb(i, j) * h ** (i - j))
        return Polynomial(tuple(out))

    def even_part(self) -> Polynomial:
        return Polynomial(tuple(c if i % 2 == 0 else ZERO for i, c in enumerate(self.coeffs)))

    def odd_part(self) -> Polynomial:
        return Polynomial(tuple(c if i % 2 else ZERO for i, c in enumerate(self.coeffs)))

    def reflect(self) -> Polynomial:
        """P(-x)."""
        return Polynomial(tuple(-c if i % 2 else c for i, c in enumerate(self.coeffs)))

    def in_square(self) -> Polynomial:
        """For even P(j), the Q with Q(j^2) = P(j)."""
        if parity_check(self) is not Parity.EVEN:
            raise ParityError("only even polynomials can be rewritten in j^2")
        return Polynomial(self.coeffs[::2])

    def from_square(self) -> Polynomial:
        """Q(x) -> Q(j^2)."""
        out: list[ExactScalar] = []
        for c in self.coeffs:
            out.extend((c, ZERO))
        return Polynomial(tuple(out))

    def to_json(self) -> list[dict]:
        return [c.to_json() for c in self.coeffs]

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = [f"({c})*j^{i}" for i, c in enumerate(self.coeffs) if not c.is_zero]
        return " + ".join(reversed(parts))


def _as_poly(value: Polynomial | ScalarLike) -> Polynomial:
    return value if isinstance(value, Polynomial) else Polynomial.constant(value)


def parity_check(poly: Polynomial) -> Parity:
    odd_free = all(c.is_zero for c in poly.coeffs[1::2])
    if odd_free:
        return Parity.EVEN
    if all(c.is_zero for c in poly.coeffs[0::2]):
        return Parity.ODD
    return Parity.NEITHER


def interpolate_verified(
    samples: Sequence[tuple[RationalLike, ScalarLike]],
    degree_bound: int,
    extra_checks: int,
) -> Polynomial:
    """Newton interpolant through degree_bound+1 samples, certified on extra_checks more."""
    needed = degree_bound + 1 + extra_checks
    if len(samples) < needed:
        raise DegreeBoundError(f"need {needed} samples, got {len(samples)}")
    points = [Fraction(x) for x, _ in samples]
    if len(set(points)) != len(points):
        raise DegreeBoundError("interpolation points must be distinct")
    values = [ExactScalar.coerce(y) for _, y in samples]

    nodes = points[: degree_bound + 1]
    table = list(values[: degree_bound + 1])
    for level in range(1, len(nodes)):
        for i in range(len(nodes) - 1, level - 1, -1):
            table[i] = (table[i] - table[i - 1]) / (nodes[i] - nodes[i - level])

    poly = Polynomial.constant(table[-1])
    for i in range(len(nodes) - 2, -1, -1):
        poly = poly * Polynomial((-nodes[i], 1)) + table[i]

    for x, y in zip(points[degree_bound + 1 :], values[degree_bound + 1 :]):
        if poly(x) != y:
            raise DegreeBoundError(f"degree bound violated: interpolant gives {poly(x)} at {x}, sample is {y}")
    return poly


@dataclass(frozen=True, slots=True)
class PoleTerm:
    """numerator / (j^2 - ell^2)^order; ell = 0 means numerator / j^(2 order)."""

    ell: int
    order: int
    numerator: ExactScalar

    def __call__(self, j: RationalLike) -> ExactScalar:
        j = Fraction(j)
        return self.numerator / ((j * j - self.ell * self.ell) ** self.order)


@dataclass(frozen=True, slots=True)
class PoleRational:
    poly_part: Polynomial
    pole_terms: tuple[PoleTerm, ...] = ()

    def __call__(self, j: RationalLike) -> ExactScalar:
        value = self.poly_part(j)
        for term in self.pole_terms:
            value = value + term(j)
        return value

    def poles(self) -> set[int]:
        return {term.ell for term in self.pole_terms}

    def __add__(self, other: PoleRational) -> PoleRational:
        merged: dict[tuple[int, int], ExactScalar] = {}
        for term in self.pole_terms + other.pole_terms:
            key = (term.ell, term.order)
            merged[key] = merged.get(key, ZERO) + term.numerator
        terms = tuple(PoleTerm(ell, order, c) for (ell, order), c in sorted(merged.items()) if not c.is_zero)
        return PoleRational(self.poly_part + other.poly_part, terms)

    def __mul__(self, scalar: ScalarLike) -> PoleRational:
        scalar = ExactScalar.coerce(scalar)
        if scalar.is_zero:
            return PoleRational(Polynomial())
        terms = tuple(PoleTerm(t.ell, t.order, t.numerator * scalar) for t in self.pole_terms)
        return PoleRational(self.poly_part * scalar, terms)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {
            "poly_part": self.poly_part.to_json(),
            "pole_terms": [
                {"ell": t.ell, "order": t.order, "numerator": t.numerator.to_json()} for t in self.pole_terms
            ],
        }


def partial_fractions(numerator: Polynomial, poles: Iterable[tuple[int, int]]) -> PoleRational:
    """Decompose numerator(j) / prod (j^2 - ell^2)^order; the numerator must be even."""
    orders: dict[int, int] = {}
    for ell, order in poles:
        if ell < 0 or order < 1:
            raise UnsupportedPoleError(f"invalid pole ({ell}, {order})")
        orders[ell] = orders.get(ell, 0) + order
    for ell, order in orders.items():
        if order > 2:
            raise UnsupportedPoleError(f"pole at {ell} has order {order}; only orders 1 and 2 are supported")

    top = numerator.in_square()
    denominator = Polynomial.constant(1)
    for ell, order in orders.items():
        denominator = denominator * Polynomial((-ell * ell, 1)) ** order
    quotient, remainder = divmod(top, denominator)

    terms: list[PoleTerm] = []
    for ell, order in sorted(orders.items()):
        x0 = ell * ell
        rest = Polynomial.constant(1)
        for other, other_order in orders.items():
            if other != ell:
                rest = rest * Polynomial((-other * other, 1)) ** other_order
        rest_at = rest(x0)
        top_value = remainder(x0) / rest_at
        terms.append(PoleTerm(ell, order, top_value))
        if order == 2:
            slope = (remainder.derivative()(x0) * rest_at - remainder(x0) * rest.derivative()(x0)) / (rest_at * rest_at)
            terms.append(PoleTerm(ell, 1, slope))

    kept = tuple(t for t in sorted(terms, key=lambda t: (t.ell, t.order)) if not t.numerator.is_zero)
    return PoleRational(quotient.from_square(), kept)
