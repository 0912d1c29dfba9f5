from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Mapping

import mpmath

from sphere_det.config import get_settings
from sphere_det.errors import InvalidDimensionError, UnsupportedPoleError
from sphere_det.poly import PoleRational, Polynomial
from sphere_det.scalars import ExactScalar, ZERO


@dataclass(frozen=True, slots=True)
class SphereSpec:
    """Round unit sphere S^n, n odd; regularization weight is (j+p)^z."""

    n: int
    p: int = field(init=False)

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 3 or self.n % 2 == 0:
            raise InvalidDimensionError(f"n must be an odd integer >= 3, got {self.n!r}")
        object.__setattr__(self, "p", (self.n - 1) // 2)


@dataclass(frozen=True, slots=True)
class ModeData:
    k: int
    d_k: Fraction
    lambda_k: Fraction
    lambdaL_k: Fraction


@dataclass(frozen=True, slots=True)
class RegSumProblem:
    """Sum of summand(j) j^z over j >= start_index, j not excluded, at z = 0."""

    summand: PoleRational
    start_index: int = 1
    excluded_indices: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        if self.start_index < 1:
            raise ValueError(f"start_index must be >= 1, got {self.start_index}")
        object.__setattr__(self, "excluded_indices", frozenset(self.excluded_indices))
        for ell in self.summand.poles():
            if ell >= self.start_index and ell not in self.excluded_indices:
                raise UnsupportedPoleError(f"pole at j={ell} lies in the summation range")

    def removed_indices(self) -> list[int]:
        """Indices j >= 1 that are not summed."""
        head = range(1, self.start_index)
        tail = sorted(j for j in self.excluded_indices if j >= self.start_index)
        return [*head, *tail]


@dataclass(frozen=True, slots=True)
class CoeffSeq:
    """Fourier coefficients alpha_k (k >= 0) of an even function on the circle."""

    name: str
    general_term: Callable[[int], ExactScalar]
    initial_exceptions: Mapping[int, ExactScalar] = field(default_factory=dict)
    asymptotic: tuple[tuple[int, ExactScalar], ...] = ()
    # optional walk of term(0), term(1), ... for sequences cheaper to build in order
    iterate: Callable[[], Iterator[ExactScalar]] | None = None

    def term(self, k: int) -> ExactScalar:
        if k < 0:
            raise ValueError(f"k must be >= 0, got {k}")
        if k in self.initial_exceptions:
            return self.initial_exceptions[k]
        return self.general_term(k)

    def asymptotic_value(self, k: int) -> mpmath.mpf:
        with mpmath.workprec(get_settings().precision_bits):
            total = mpmath.mpf(0)
            for power, coeff in self.asymptotic:
                total += coeff.numeric() * mpmath.mpf(k) ** power
            return +total


@dataclass(frozen=True, slots=True)
class HessianCell:
    n: int
    k: int
    value: ExactScalar
    per_phi2: ExactScalar
    sign: str

    @staticmethod
    def sign_symbol(value: ExactScalar) -> str:
        return {1: "+", -1: "-", 0: "0"}[value.sign()]

    def to_json(self, digits: int = 20) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "value": self.value.to_json(digits),
            "per_phi2": self.per_phi2.to_json(digits),
            "sign": self.sign,
        }

    @classmethod
    def from_json(cls, payload: Mapping) -> HessianCell:
        return cls(
            n=int(payload["n"]),
            k=int(payload["k"]),
            value=ExactScalar.from_json(payload["value"]),
            per_phi2=ExactScalar.from_json(payload["per_phi2"]),
            sign=str(payload["sign"]),
        )


@dataclass(frozen=True, slots=True)
class BandPlan:
    """One paired band (+m, -m) of the double mode sum, in the shifted index i = j + p."""

    m: int
    numerator: Polynomial
    poles: tuple[tuple[int, int], ...]
    summand: PoleRational
    tail_start: int
    head_value: ExactScalar
    tail_value: ExactScalar

    @property
    def value(self) -> ExactScalar:
        return self.head_value + self.tail_value


@dataclass(frozen=True, slots=True)
class TraceTermPlan:
    n: int
    k: int
    mode_zero: ExactScalar
    bands: tuple[BandPlan, ...] = ()

    @property
    def total(self) -> ExactScalar:
        value = self.mode_zero
        for band in self.bands:
            value = value + band.value
        return value

    def summand_at(self, i: int) -> ExactScalar:
        """Sum of the band summands at shifted index i (valid beyond every tail start)."""
        value = ZERO
        for band in self.bands:
            value = value + band.summand(i)
        return value
