from __future__ import annotations

import logging
from fractions import Fraction
from typing import Protocol

import mpmath

from sphere_det.config import get_settings
from sphere_det.errors import InvalidIndexError, NonConvergenceError, ParityError
from sphere_det.models import RegSumProblem, SphereSpec
from sphere_det.poly import Parity, PoleTerm, Polynomial, interpolate_verified, parity_check, partial_fractions
from sphere_det.scalars import ExactScalar, ZERO, zeta_special
from sphere_det.spectral import dim_harmonics

logger = logging.getLogger(__name__)

ORACLE_RESTART_OFFSET = 16


class PoleRegularizer(Protocol):
    def base_value(self, ell: int, order: int) -> ExactScalar:
        """Sum over j >= 1, j != ell, of 1/(j^2 - ell^2)^order."""
        ...


class SimplePoleRegularizer:
    def base_value(self, ell: int, order: int) -> ExactScalar:
        return ExactScalar.rational(Fraction(3, 4 * ell * ell))


class DoublePoleRegularizer:
    def base_value(self, ell: int, order: int) -> ExactScalar:
        return ExactScalar.from_coeffs({0: Fraction(-11, 16 * ell**4), 1: Fraction(1, 12 * ell * ell)})


class OriginPoleRegularizer:
    def base_value(self, ell: int, order: int) -> ExactScalar:
        return zeta_special(2 * order)


DEFAULT_REGULARIZERS: dict[str, PoleRegularizer] = {
    "simple_pole": SimplePoleRegularizer(),
    "double_pole": DoublePoleRegularizer(),
    "origin_pole": OriginPoleRegularizer(),
}


def _regularizer_key(term: PoleTerm) -> str:
    if term.ell == 0:
        return "origin_pole"
    return "simple_pole" if term.order == 1 else "double_pole"


def regsum_even_poly(H: Polynomial) -> ExactScalar:
    """Regularized sum over j >= 1 of H(j) j^z at z = 0, termwise through zeta(-e)."""
    value = ZERO
    for power, coeff in enumerate(H.coeffs):
        if not coeff.is_zero:
            value = value + coeff * zeta_special(-power)
    return value


def regsum_simple_pole(G: Polynomial, ell: int) -> ExactScalar:
    """Sum over j >= 1, j != ell, of G(j)/(j^2 - ell^2) j^z at z = 0, for even G."""
    if parity_check(G) is not Parity.EVEN:
        raise ParityError("the simple-pole formula needs an even numerator; pair the +m and -m terms first")
    if ell < 1:
        raise InvalidIndexError(f"pole location must be >= 1, got {ell}")
    sq = ell * ell
    return G(0) / (2 * sq) + G(ell) / (4 * sq) - G.derivative()(ell) / (2 * ell)


class RegularizedSum:
    def __init__(self, regularizers: dict[str, PoleRegularizer] | None = None) -> None:
        self.regularizers = regularizers or DEFAULT_REGULARIZERS

    def evaluate(self, problem: RegSumProblem) -> ExactScalar:
        summand = problem.summand
        removed = problem.removed_indices()

        value = regsum_even_poly(summand.poly_part)
        for j in removed:
            value = value - summand.poly_part(j)

        for term in summand.pole_terms:
            base = self.regularizers[_regularizer_key(term)].base_value(term.ell, term.order)
            value = value + term.numerator * base
            for j in removed:
                if j != term.ell:
                    value = value - term(j)

        logger.debug("regularized sum from j=%d, %d removed indices: %s", problem.start_index, len(removed), value)
        return value


def regsum_rational(problem: RegSumProblem) -> ExactScalar:
    return RegularizedSum().evaluate(problem)


def regsum_numeric_oracle(problem: RegSumProblem, tolerance: float = 1e-10) -> float:
    """Polynomial part through zeta constants, pole remainder summed directly with mpmath.nsum."""
    settings = get_settings()
    summand = problem.summand
    removed = set(problem.removed_indices())

    with mpmath.workprec(settings.precision_bits):
        poly_value = regsum_even_poly(summand.poly_part).numeric()
        for j in removed:
            poly_value -= summand.poly_part(j).numeric()

        terms = [(term.ell, term.order, term.numerator.numeric()) for term in summand.pole_terms]
        if not terms:
            return float(poly_value)

        def remainder(j: mpmath.mpf) -> mpmath.mpf:
            total = mpmath.mpf(0)
            for ell, order, numerator in terms:
                total += numerator / (j * j - ell * ell) ** order
            return total

        cutoff = max([problem.start_index, *removed, *(ell for ell, _, _ in terms)]) + 1
        head = mpmath.fsum(remainder(mpmath.mpf(j)) for j in range(problem.start_index, cutoff) if j not in removed)
        tail = mpmath.nsum(remainder, [cutoff, mpmath.inf], method="richardson")
        # error estimate: a second extrapolation started further out
        later = cutoff + ORACLE_RESTART_OFFSET
        restarted = mpmath.fsum(remainder(mpmath.mpf(j)) for j in range(cutoff, later))
        restarted += mpmath.nsum(remainder, [later, mpmath.inf], method="richardson")
        error = abs(tail - restarted)
        if error > tolerance:
            raise NonConvergenceError(f"numeric tail did not settle: error estimate {mpmath.nstr(error, 5)}")
        return float(poly_value + head + tail)


def z1_problem(spec: SphereSpec) -> RegSumProblem:
    """d_j/lambda_j written as D(i)/(i^2 - p^2) in the shifted index i = j + p."""
    extra = get_settings().interpolation_extra_checks
    p = spec.p
    degree = spec.n - 1
    samples = [(i, dim_harmonics(spec, i - p)) for i in range(p + 1, p + 2 + degree + extra)]
    numerator = interpolate_verified(samples, degree, extra)
    return RegSumProblem(partial_fractions(numerator, [(p, 1)]), start_index=p + 1)


def z1_spectral(spec: SphereSpec) -> ExactScalar:
    return regsum_rational(z1_problem(spec))


def z1_numeric_oracle(spec: SphereSpec, tolerance: float = 1e-10) -> float:
    return regsum_numeric_oracle(z1_problem(spec), tolerance)
