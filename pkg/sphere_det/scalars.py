from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterator, Mapping, Union

import mpmath

from sphere_det.config import get_settings
from sphere_det.errors import BernoulliRangeError, ScalarDomainError

Rational = Fraction
RationalLike = Union[int, Fraction]

BERNOULLI_TABLE_LIMIT = 200

_bernoulli_lock = threading.Lock()
_bernoulli_table: list[Fraction] = []
_bernoulli_work: list[Fraction] = []


@dataclass(frozen=True, slots=True, eq=False)
class ExactScalar:
    """An element of Q[pi^2]: sorted (power of pi^2, nonzero coefficient) pairs."""

    terms: tuple[tuple[int, Fraction], ...] = ()

    @classmethod
    def from_coeffs(cls, coeffs: Mapping[int, RationalLike]) -> ExactScalar:
        cleaned: list[tuple[int, Fraction]] = []
        for power, coeff in sorted(coeffs.items()):
            if power < 0:
                raise ScalarDomainError(f"negative power of pi^2: {power}")
            value = Fraction(coeff)
            if value:
                cleaned.append((power, value))
        return cls(tuple(cleaned))

    @classmethod
    def rational(cls, value: RationalLike) -> ExactScalar:
        value = Fraction(value)
        return cls(((0, value),)) if value else cls()

    @classmethod
    def pi2(cls, power: int = 1, coeff: RationalLike = 1) -> ExactScalar:
        return cls.from_coeffs({power: coeff})

    @classmethod
    def coerce(cls, value: ExactScalar | RationalLike) -> ExactScalar:
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.rational(value)
        raise TypeError(f"cannot use {type(value).__name__} as an exact scalar")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_rational(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == 0)

    @property
    def degree(self) -> int:
        """Highest power of pi^2 present; -1 for zero."""
        return self.terms[-1][0] if self.terms else -1

    def coeff(self, power: int) -> Fraction:
        for p, c in self.terms:
            if p == power:
                return c
        return Fraction(0)

    def as_rational(self) -> Fraction:
        if not self.is_rational:
            raise ScalarDomainError(f"{self} is not rational")
        return self.terms[0][1] if self.terms else Fraction(0)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __neg__(self) -> ExactScalar:
        return ExactScalar(tuple((p, -c) for p, c in self.terms))

    def __add__(self, other: ExactScalar | RationalLike) -> ExactScalar:
        if not isinstance(other, (ExactScalar, int, Fraction)):
            return NotImplemented
        other = ExactScalar.coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        acc = dict(self.terms)
        for power, coeff in other.terms:
            acc[power] = acc.get(power, 0) + coeff
        return ExactScalar(tuple((p, c) for p, c in sorted(acc.items()) if c))

    __radd__ = __add__

    def __sub__(self, other: ExactScalar | RationalLike) -> ExactScalar:
        if not isinstance(other, (ExactScalar, int, Fraction)):
            return NotImplemented
        return self + (-ExactScalar.coerce(other))

    def __rsub__(self, other: RationalLike) -> ExactScalar:
        return ExactScalar.coerce(other) - self

    def __mul__(self, other: ExactScalar | RationalLike) -> ExactScalar:
        if isinstance(other, (int, Fraction)):
            if not other:
                return ExactScalar()
            return ExactScalar(tuple((p, c * other) for p, c in self.terms))
        if not isinstance(other, ExactScalar):
            return NotImplemented
        if not self.terms or not other.terms:
            return ExactScalar()
        if other.is_rational:
            return self * other.terms[0][1]
        if self.is_rational:
            return other * self.terms[0][1]
        acc: dict[int, Fraction] = {}
        for pa, ca in self.terms:
            for pb, cb in other.terms:
                acc[pa + pb] = acc.get(pa + pb, 0) + ca * cb
        return ExactScalar(tuple((p, c) for p, c in sorted(acc.items()) if c))

    __rmul__ = __mul__

    def __truediv__(self, other: ExactScalar | RationalLike) -> ExactScalar:
        if not isinstance(other, (ExactScalar, int, Fraction)):
            return NotImplemented
        divisor = ExactScalar.coerce(other)
        if not divisor.terms:
            raise ZeroDivisionError("division of an exact scalar by zero")
        if not divisor.is_rational:
            raise ScalarDomainError(f"division by {divisor} leaves Q[pi^2]")
        inverse = 1 / divisor.terms[0][1]
        return ExactScalar(tuple((p, c * inverse) for p, c in self.terms))

    def __rtruediv__(self, other: RationalLike) -> ExactScalar:
        return ExactScalar.coerce(other) / self

    def __pow__(self, exponent: int) -> ExactScalar:
        if not isinstance(exponent, int) or exponent < 0:
            raise ScalarDomainError("only nonnegative integer powers are supported")
        result = ExactScalar.rational(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ExactScalar.rational(other)
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self.is_rational:
            return hash(self.as_rational())
        return hash(self.terms)

    def numeric(self, prec: int | None = None) -> mpmath.mpf:
        bits = prec or get_settings().precision_bits
        with mpmath.workprec(bits):
            pi2 = mpmath.pi**2
            total = mpmath.mpf(0)
            for power, coeff in self.terms:
                total += to_mpf(coeff) * pi2**power
            return +total

    def __float__(self) -> float:
        return float(self.numeric())

    def sign(self) -> int:
        if not self.terms:
            return 0
        if self.is_rational:
            return 1 if self.terms[0][1] > 0 else -1
        bits = get_settings().precision_bits
        for _ in range(10):
            with mpmath.workprec(bits):
                value = self.numeric(bits)
                scale = sum(abs(to_mpf(c)) * (mpmath.pi**2) ** p for p, c in self.terms)
                if abs(value) > scale * mpmath.ldexp(1, 8 - bits):
                    return 1 if value > 0 else -1
            bits *= 2
        raise ScalarDomainError(f"could not resolve the sign of {self}")

    def to_json(self, digits: int = 20) -> dict:
        return {
            "terms": [
                {"pi2_power": p, "num": str(c.numerator), "den": str(c.denominator)}
                for p, c in self.terms
            ],
            "approx": mpmath.nstr(self.numeric(), digits),
        }

    @classmethod
    def from_json(cls, payload: Mapping) -> ExactScalar:
        coeffs: dict[int, Fraction] = {}
        for term in payload.get("terms", []):
            power = int(term["pi2_power"])
            coeffs[power] = coeffs.get(power, Fraction(0)) + Fraction(int(term["num"]), int(term["den"]))
        return cls.from_coeffs(coeffs)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces: list[str] = []
        for power, coeff in reversed(self.terms):
            body = _format_term(power, abs(coeff))
            if not pieces:
                pieces.append(body if coeff > 0 else f"-{body}")
            else:
                pieces.append(f"{'+' if coeff > 0 else '-'} {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"ExactScalar({str(self)!r})"


def _format_term(power: int, magnitude: Fraction) -> str:
    num, den = magnitude.numerator, magnitude.denominator
    if power == 0:
        return f"{num}" if den == 1 else f"{num}/{den}"
    base = "pi^2" if power == 1 else f"pi^{2 * power}"
    body = base if num == 1 else f"{num}*{base}"
    return body if den == 1 else f"{body}/{den}"


ZERO = ExactScalar()
ONE = ExactScalar.rational(1)
PI2 = ExactScalar.pi2()


def to_mpf(value: RationalLike) -> mpmath.mpf:
    value = Fraction(value)
    return mpmath.mpf(value.numerator) / value.denominator


def numeric_eval(value: ExactScalar | RationalLike, prec: int | None = None) -> mpmath.mpf:
    return ExactScalar.coerce(value).numeric(prec)


def bernoulli(m: int) -> Fraction:
    """B_m with the convention B_1 = +1/2 (Akiyama–Tanigawa)."""
    if m < 0:
        raise BernoulliRangeError(f"Bernoulli index must be >= 0, got {m}")
    if m > BERNOULLI_TABLE_LIMIT:
        raise BernoulliRangeError(f"B_{m} is beyond the table limit {BERNOULLI_TABLE_LIMIT}")
    if m < len(_bernoulli_table):
        return _bernoulli_table[m]
    with _bernoulli_lock:
        while len(_bernoulli_table) <= m:
            step = len(_bernoulli_table)
            _bernoulli_work.append(Fraction(1, step + 1))
            for j in range(step, 0, -1):
                _bernoulli_work[j - 1] = j * (_bernoulli_work[j - 1] - _bernoulli_work[j])
            _bernoulli_table.append(_bernoulli_work[0])
    return _bernoulli_table[m]


def harmonic_number(m: int) -> Fraction:
    if m < 1:
        raise ValueError(f"harmonic_number needs m >= 1, got {m}")
    return sum((Fraction(1, j) for j in range(1, m + 1)), Fraction(0))


def parity_indicator(k: int) -> Fraction:
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    return Fraction(1) if k % 2 == 0 else Fraction(0)


def e_value(k: int) -> ExactScalar:
    """E(k) = sum_{j=1}^k I(k-j)/j^2 + pi^2 I(k)/12."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    rational = sum((Fraction(1, j * j) for j in range(k % 2 or 2, k + 1, 2)), Fraction(0))
    if k % 2 == 0:
        return ExactScalar.from_coeffs({0: rational, 1: Fraction(1, 12)})
    return ExactScalar.rational(rational)


def iter_e_values() -> Iterator[ExactScalar]:
    """Yield E(0), E(1), E(2), ... using E(k) = E(k-2) + 1/k^2."""
    previous = [ExactScalar.pi2(1, Fraction(1, 12)), ExactScalar.rational(1)]
    yield previous[0]
    yield previous[1]
    k = 2
    while True:
        current = previous[k % 2] + Fraction(1, k * k)
        previous[k % 2] = current
        yield current
        k += 1


def e_asymptotic(order: int) -> list[ExactScalar]:
    """Coefficients c_j of k^-j in E(k-2) = sum_j c_j k^-j + O(k^(-order-1))."""
    limit = get_settings().e_asymptotic_max_order
    if order < 0 or order > limit:
        raise BernoulliRangeError(f"asymptotic order {order} outside 0..{limit}")
    coeffs = [ExactScalar.pi2(1, Fraction(1, 8))]
    for j in range(1, order + 1):
        if j <= 2:
            coeffs.append(ExactScalar.rational(Fraction(-1, 2)))
        elif j % 2 == 1:
            i = (j - 1) // 2
            coeffs.append(ExactScalar.rational(-(2 ** (2 * i - 1)) * bernoulli(2 * i)))
        else:
            coeffs.append(ZERO)
    return coeffs


def zeta_special(s: int) -> ExactScalar:
    if s == 0:
        return ExactScalar.rational(Fraction(-1, 2))
    if s < 0:
        if s % 2 == 0:
            return ZERO
        order = 1 - s
        return ExactScalar.rational(-bernoulli(order) / order)
    if s % 2 == 1:
        raise ScalarDomainError(f"zeta({s}) is not an element of Q[pi^2]")
    half = s // 2
    coeff = (-1) ** (half + 1) * bernoulli(s) * 2 ** (s - 1) / factorial(s)
    return ExactScalar.pi2(half, coeff)
