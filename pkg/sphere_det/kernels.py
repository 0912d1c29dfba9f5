from __future__ import annotations

import logging
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
from collections import deque
from itertools import count, islice
from math import comb, factorial
from typing import Callable, Iterator, Sequence

import mpmath
import numpy as np

from sphere_det.config import get_settings
from sphere_det.errors import KernelDomainError, NonConvergenceError
from sphere_det.models import CoeffSeq, SphereSpec
from sphere_det.poly import Polynomial
from sphere_det.scalars import ExactScalar, ZERO, bernoulli, e_value, iter_e_values

logger = logging.getLogger(__name__)

RadialFunction = Callable[[mpmath.mpf], mpmath.mpf]

ABEL_TERM_FLOOR = 1e-18


class KernelFamily(StrEnum):
    S3_GREEN_DELTA = "s3_green_delta"
    S3_GREEN_DELTA_BAR = "s3_green_delta_bar"
    SN_GREEN_L = "sn_green_L"


@dataclass(frozen=True, slots=True)
class PositiveConstant:
    """factor * symbol^power with symbol an opaque positive number (C_n = 1/((n-2) V_{n-1}))."""

    label: str
    symbol: str = "C_n"
    power: int = 1
    factor: Fraction = Fraction(1)

    def __mul__(self, other: PositiveConstant) -> PositiveConstant:
        if other.symbol != self.symbol:
            raise KernelDomainError(f"cannot combine constants in {self.symbol} and {other.symbol}")
        return PositiveConstant(
            label=f"{self.label}*{other.label}",
            symbol=self.symbol,
            power=self.power + other.power,
            factor=self.factor * other.factor,
        )

    def scaled(self, factor: Fraction, label: str) -> PositiveConstant:
        if factor <= 0:
            raise KernelDomainError(f"positive constants only take positive factors, got {factor}")
        return PositiveConstant(label, self.symbol, self.power, self.factor * factor)

    def __str__(self) -> str:
        base = self.symbol if self.power == 1 else f"{self.symbol}^{self.power}"
        body = base if self.factor == 1 else f"{self.factor}*{base}"
        return f"{self.label} = {body}"


def c_n() -> PositiveConstant:
    return PositiveConstant("C_n")


def c_prime_n(n: int) -> PositiveConstant:
    return c_n().scaled(Fraction(n * (n - 2), 4), "C'_n")


def c_double_prime_n(n: int) -> PositiveConstant:
    prime = c_prime_n(n)
    square = prime * prime
    return PositiveConstant("C''_n", square.symbol, square.power, square.factor * 2 ** (n - 1))


def _check_r(r: mpmath.mpf, upper: mpmath.mpf | None = None) -> mpmath.mpf:
    r = mpmath.mpf(r)
    limit = mpmath.pi if upper is None else upper
    if not 0 < r <= limit:
        raise KernelDomainError(f"r={mpmath.nstr(r, 8)} outside (0, {mpmath.nstr(limit, 8)}]")
    return r


@dataclass(frozen=True, slots=True)
class RadialKernel:
    """Green kernel as a function of geodesic distance r; values are per unit of `constant`."""

    family: KernelFamily
    n: int
    constant: PositiveConstant | None = None

    def evaluate(self, r: mpmath.mpf) -> mpmath.mpf:
        r = _check_r(r)
        if self.family is KernelFamily.SN_GREEN_L:
            return self.singular(r)
        # (pi - r) cot(r) / 2, finite at r = pi where both split halves blow up
        return mpmath.cos(r) / (2 * mpmath.sinc(mpmath.pi - r)) + self._shift()

    def regular(self, r: mpmath.mpf) -> mpmath.mpf:
        r = _check_r(r)
        if self.family is KernelFamily.SN_GREEN_L:
            return mpmath.mpf(0)
        return -r * mpmath.cot(r) / 2 + self._shift()

    def singular(self, r: mpmath.mpf) -> mpmath.mpf:
        r = _check_r(r)
        if self.family is KernelFamily.SN_GREEN_L:
            return 1 / mpmath.sin(r / 2) ** (self.n - 2)
        return mpmath.pi * mpmath.cot(r) / 2

    def _shift(self) -> Fraction:
        return Fraction(-1, 4) if self.family is KernelFamily.S3_GREEN_DELTA else Fraction(1, 2)

    def __call__(self, r: mpmath.mpf) -> mpmath.mpf:
        return self.evaluate(r)


def green_s3_delta() -> RadialKernel:
    return RadialKernel(KernelFamily.S3_GREEN_DELTA, 3)


def green_s3_deltabar() -> RadialKernel:
    return RadialKernel(KernelFamily.S3_GREEN_DELTA_BAR, 3)


def green_L(n: int) -> RadialKernel:
    SphereSpec(n)
    return RadialKernel(KernelFamily.SN_GREEN_L, n, c_n())


def taylor_regular_part(kernel: RadialKernel, order: int) -> list[ExactScalar]:
    """Coefficients a_0..a_order of the regular part in powers of r (odd ones vanish)."""
    if kernel.family is KernelFamily.SN_GREEN_L:
        raise KernelDomainError("the L Green kernel has no regular part")
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    coeffs = [ZERO] * (order + 1)
    # r cot r = sum_j (-1)^j 2^(2j) B_2j r^(2j) / (2j)!
    for j in range(order // 2 + 1):
        series = Fraction((-1) ** j * 2 ** (2 * j)) * bernoulli(2 * j) / factorial(2 * j)
        coeffs[2 * j] = ExactScalar.rational(-series / 2)
    coeffs[0] = coeffs[0] + kernel._shift()
    return coeffs


@dataclass(frozen=True, slots=True)
class TransformedKernel:
    """T G = G'' - cot(r) G' in closed form, defined on (0, 2 pi)."""

    family: KernelFamily
    n: int
    constant: PositiveConstant | None = None

    def __call__(self, r: mpmath.mpf) -> mpmath.mpf:
        r = _check_r(r, 2 * mpmath.pi)
        if r == 2 * mpmath.pi:
            raise KernelDomainError("r = 2 pi is the diagonal")
        if self.family is KernelFamily.SN_GREEN_L:
            return mpmath.cos(r / 2) ** 2 / mpmath.sin(r / 2) ** self.n
        s = mpmath.sin(r)
        return -3 * (r - mpmath.pi) * mpmath.cos(r) / (2 * s**3) + 3 / (2 * s**2) - mpmath.mpf(1) / 2


def apply_T(kernel: RadialKernel) -> TransformedKernel:
    if kernel.family is KernelFamily.SN_GREEN_L:
        return TransformedKernel(kernel.family, kernel.n, c_prime_n(kernel.n))
    if kernel.family in (KernelFamily.S3_GREEN_DELTA, KernelFamily.S3_GREEN_DELTA_BAR):
        # the two S^3 kernels differ by a constant, which T annihilates
        return TransformedKernel(kernel.family, kernel.n)
    raise KernelDomainError(f"no closed form of T for {kernel.family}")


def apply_T_numeric(func: RadialFunction, r: mpmath.mpf) -> mpmath.mpf:
    r = mpmath.mpf(r)
    return mpmath.diff(func, r, 2) - mpmath.cot(r) * mpmath.diff(func, r, 1)


@dataclass(frozen=True, slots=True)
class ProductKernel:
    """f(r) = T Phi(r) T Psi(r) sin^(n-1) r, per unit of `constant`."""

    left: TransformedKernel
    right: TransformedKernel
    n: int
    constant: PositiveConstant | None = None

    def __call__(self, r: mpmath.mpf) -> mpmath.mpf:
        return self.left(r) * self.right(r) * mpmath.sin(r) ** (self.n - 1)


def f_product(phi: TransformedKernel, psi: TransformedKernel, n: int) -> ProductKernel:
    constant = None
    if phi.constant is not None and psi.constant is not None:
        constant = phi.constant * psi.constant
    elif phi.constant is not None or psi.constant is not None:
        constant = phi.constant or psi.constant
    return ProductKernel(phi, psi, n, constant)


def f_s3(r: mpmath.mpf) -> mpmath.mpf:
    transformed = apply_T(green_s3_deltabar())
    return f_product(transformed, transformed, 3)(r)


def f_detl(n: int) -> RadialFunction:
    """cos^2(r/2) cot^(n+1)(r/2): the det L product per unit of C''_n."""
    SphereSpec(n)

    def boundary(r: mpmath.mpf) -> mpmath.mpf:
        half = mpmath.mpf(r) / 2
        return mpmath.cos(half) ** 2 * mpmath.cot(half) ** (n + 1)

    return boundary


def _alpha_s3_term(k: int, e_prev: ExactScalar) -> ExactScalar:
    kk = Fraction(k)
    rational = Fraction(3, 4) * (kk * kk + kk + 2 / kk) + 2
    return e_prev * Fraction(3, 2) * (k**3 + 2 * k) + rational


def _gamma_s3_term(k: int, e_prev: ExactScalar) -> ExactScalar:
    kk = Fraction(k)
    return e_prev * Fraction(3, 2) * (k**3 + 2 * k) + Fraction(3, 4) * kk + Fraction(3, 2) / kk


def _s3_walker(
    term: Callable[[int, ExactScalar], ExactScalar], exceptions: dict[int, ExactScalar]
) -> Callable[[], Iterator[ExactScalar]]:
    # long S^3 sweeps walk E(k) incrementally
    def walk() -> Iterator[ExactScalar]:
        window: deque[ExactScalar] = deque(maxlen=3)
        for k, e in enumerate(iter_e_values()):
            window.append(e)
            yield exceptions[k] if k in exceptions else term(k, window[0])

    return walk


_S3_LEADING = (
    (3, ExactScalar.pi2(1, Fraction(3, 16))),
    (1, ExactScalar.pi2(1, Fraction(3, 8))),
)


def _s3_seq(
    name: str,
    term: Callable[[int, ExactScalar], ExactScalar],
    exceptions: dict[int, ExactScalar],
    asymptotic: tuple[tuple[int, ExactScalar], ...] = _S3_LEADING,
) -> CoeffSeq:
    return CoeffSeq(
        name=name,
        general_term=lambda k: term(k, e_value(k - 2)),
        initial_exceptions=exceptions,
        asymptotic=asymptotic,
        iterate=_s3_walker(term, exceptions),
    )


def alpha_seq_s3_F() -> CoeffSeq:
    """Fourier coefficients of the S^3 product kernel f_s3."""
    return _s3_seq(
        "s3_detprime",
        _alpha_s3_term,
        {
            0: ExactScalar.rational(Fraction(5, 8)),
            1: ExactScalar.rational(5),
            2: ExactScalar.from_coeffs({0: Fraction(115, 16), 1: Fraction(3, 2)}),
        },
    )


def gamma_seq_s3() -> CoeffSeq:
    """Coefficients of the asymptotic expansion of f_s3 at r = pi, before the delta correction.

    These differ from alpha_seq_s3_F by exactly (3/4)k^2 + 2; only the alpha
    sequence enters the determinant.
    """
    return _s3_seq(
        "s3_gamma",
        _gamma_s3_term,
        {
            0: ExactScalar.rational(Fraction(-11, 8)),
            1: ExactScalar.rational(Fraction(9, 4)),
            2: ExactScalar.from_coeffs({0: Fraction(35, 16), 1: Fraction(3, 2)}),
        },
        (
            (3, ExactScalar.pi2(1, Fraction(3, 16))),
            (2, ExactScalar.rational(Fraction(-3, 4))),
            (1, ExactScalar.pi2(1, Fraction(3, 8))),
            (0, ExactScalar.rational(-2)),
        ),
    )


def alpha_seq_terms(seq: CoeffSeq, k_max: int) -> list[ExactScalar]:
    return list(islice(_iter_terms(seq), k_max + 1))


def _iter_terms(seq: CoeffSeq) -> Iterator[ExactScalar]:
    if seq.iterate is not None:
        return seq.iterate()
    return (seq.term(k) for k in count())


def _p_value(n: int, k: int) -> Fraction:
    return Fraction(sum(comb(n + 1, ell) * comb(k - ell + n, n) for ell in range(min(k, n + 1) + 1)))


def pk_coeffs(n: int, k_max: int) -> list[Fraction]:
    """Coefficients p(0..k_max) of ((1+z)/(1-z))^(n+1)."""
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    return [_p_value(n, k) for k in range(k_max + 1)]


def eventual_polynomial(n: int) -> Polynomial:
    """The odd polynomial P with P(k) = p(k) for every k >= 1."""
    total = Polynomial()
    for ell in range(n + 2):
        total = total + Polynomial.from_roots([ell - j for j in range(1, n + 1)], comb(n + 1, ell))
    return total / factorial(n)


@dataclass(frozen=True, slots=True)
class DetLCoefficients:
    n: int
    c_poly: Polynomial
    e_poly: Polynomial

    def c(self, k: int) -> Fraction:
        if k == 0:
            return _p_value(self.n, 0) / 2
        return (_p_value(self.n, k) + _p_value(self.n, k - 1)) / 4

    def e(self, k: int) -> Fraction:
        return self.e_poly(k).as_rational()

    def term(self, k: int) -> ExactScalar:
        return ExactScalar.rational(self.c(k) + self.e(k))


def detl_coefficients(n: int) -> DetLCoefficients:
    SphereSpec(n)
    big_p = eventual_polynomial(n)
    c_poly = (big_p + big_p.shift(-1)) / 4
    return DetLCoefficients(n, c_poly, -c_poly.even_part())


def alpha_seq_detL(n: int) -> CoeffSeq:
    """Adjusted Fourier coefficients of the det L product, per unit of C''_n and its sign."""
    data = detl_coefficients(n)
    odd = data.c_poly.odd_part()
    asymptotic = tuple((power, coeff) for power, coeff in reversed(list(enumerate(odd.coeffs))) if not coeff.is_zero)
    return CoeffSeq(name=f"detL_n{n}", general_term=data.term, asymptotic=asymptotic)


def alpha_seq_detL_terms(n: int, k_max: int) -> list[ExactScalar]:
    data = detl_coefficients(n)
    p = pk_coeffs(n, k_max)
    values = [ExactScalar.rational(p[0] / 2 + data.e(0))]
    for k in range(1, k_max + 1):
        values.append(ExactScalar.rational((p[k] + p[k - 1]) / 4 + data.e(k)))
    return values


def eulerian_row(j: int) -> list[int]:
    return [sum((-1) ** i * comb(j + 1, i) * (m + 1 - i) ** j for i in range(m + 1)) for m in range(j)]


def power_sum(j: int, z: complex) -> complex:
    """sum_{k>=1} k^j z^k for |z| < 1."""
    z = mpmath.mpc(z)
    if j == 0:
        return z / (1 - z)
    numerator = mpmath.polyval(list(reversed(eulerian_row(j))), z)
    return z * numerator / (1 - z) ** (j + 1)


def _check_rho(rho: float) -> mpmath.mpf:
    rho = mpmath.mpf(rho)
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    return rho


def s3_harmonic_extension(rho: float, r: float) -> float:
    """Harmonic extension of the S^3 alpha sequence at rho*e^{ir}, in closed form."""
    rho = _check_rho(rho)
    z = rho * mpmath.expj(r)
    w = z * z
    p = -1j * (1 + w) / (1 - w)
    dp = [p] + [-2j * 2**j * power_sum(j, w) for j in (1, 2, 3)]
    h = mpmath.pi**2 / 6 + 2 * mpmath.polylog(2, z)
    dh = [h, -2 * mpmath.log(1 - z), 2 * z / (1 - z), 2 * z / (1 - z) ** 2]

    theta1 = dp[1] * dh[0] + dp[0] * dh[1]
    theta3 = dp[0] * dh[3] + 3 * dp[1] * dh[2] + 3 * dp[2] * dh[1] + dp[3] * dh[0]
    value = (
        mpmath.mpf(-11) / 8
        + 0.75j * (theta3 + 2 * theta1)
        - w / 8
        + 2
        + mpmath.mpf(3) / 2 * power_sum(2, z)
        + 4 * power_sum(0, z)
    )
    return float(mpmath.re(value))


def detl_harmonic_extension(n: int) -> Callable[[float, float], float]:
    data = detl_coefficients(n)

    def extension(rho: float, r: float) -> float:
        z = _check_rho(rho) * mpmath.expj(r)
        value = (1 + z) * ((1 + z) / (1 - z)) ** (n + 1) / 2 + data.e(0)
        for power, coeff in enumerate(data.e_poly.coeffs):
            if not coeff.is_zero:
                value += 2 * coeff.numeric() * power_sum(power, z)
        return float(mpmath.re(value))

    return extension


def abel_summation_oracle(
    seq: CoeffSeq,
    f_closed: Callable[[float, float], float],
    r_samples: Sequence[float],
    rho: float,
) -> float:
    """Max |alpha_0 + 2 sum alpha_k rho^k cos(kr) - f_closed(rho, r)| over r_samples."""
    _check_rho(rho)
    budget = get_settings().abel_max_terms
    terms = _abel_terms(seq, rho, budget)
    ks = np.arange(len(terms))
    weighted = np.asarray(terms, dtype=float) * rho**ks
    samples = np.asarray(list(r_samples), dtype=float)
    cosines = np.cos(np.outer(samples, ks))
    cosines[:, 1:] *= 2
    partial = cosines @ weighted
    closed = np.array([f_closed(rho, float(r)) for r in samples])
    deviation = float(np.max(np.abs(partial - closed))) if len(samples) else 0.0
    logger.debug("abel oracle %s: %d terms, rho=%s, deviation %.3e", seq.name, len(terms), rho, deviation)
    return deviation


def _abel_terms(seq: CoeffSeq, rho: float, budget: int) -> list[float]:
    values: list[float] = []
    scale = 1.0
    previous = float("inf")
    for k, term in enumerate(_iter_terms(seq)):
        if k >= budget:
            raise NonConvergenceError(f"Abel partial sums of {seq.name} did not settle within {budget} terms")
        value = float(term)
        values.append(value)
        weighted = abs(value) * rho**k
        scale = max(scale, weighted)
        if k > 10 and weighted <= previous and weighted < ABEL_TERM_FLOOR * scale:
            break
        previous = weighted
    return values
