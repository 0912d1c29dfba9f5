from __future__ import annotations

import logging
from concurrent import futures
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import mpmath

from sphere_det.config import get_settings
from sphere_det.errors import InvalidDimensionError, InvalidIndexError, ParityError, SignViolationError
from sphere_det.kernels import alpha_seq_detL_terms, alpha_seq_s3_F, alpha_seq_terms, eventual_polynomial, pk_coeffs
from sphere_det.models import BandPlan, HessianCell, RegSumProblem, SphereSpec, TraceTermPlan
from sphere_det.poly import Parity, Polynomial, interpolate_verified, parity_check, partial_fractions
from sphere_det.regsum import regsum_numeric_oracle, regsum_rational
from sphere_det.scalars import ExactScalar, ZERO, harmonic_number
from sphere_det.spectral import LinearizationTable, dim_harmonics, laplace_eigenvalue, z1

logger = logging.getLogger(__name__)

Coord = tuple[int, int]


def _check_k(k: int) -> None:
    if not isinstance(k, int) or k < 0:
        raise InvalidIndexError(f"k must be a nonnegative integer, got {k!r}")


def _lowest_index(mu: int) -> int:
    """Smallest a with a >= 1 and a + mu >= 1."""
    return max(1, 1 - mu)


def _valid_index(mu: int, k: int) -> int:
    """From here on C(a, a + mu, k) is a polynomial in a."""
    return max(_lowest_index(mu), (k - mu) // 2)


class _BandBuilder:
    def __init__(self, spec: SphereSpec, k: int) -> None:
        self.spec = spec
        self.k = k
        self.table = LinearizationTable(spec, k)
        self.extra = get_settings().interpolation_extra_checks

    def mode_sum(self, a: int, mu: int) -> Fraction:
        """C(a, a + mu, k) / (lambda_a lambda_{a+mu})."""
        product = self.table.product(a, a + mu)
        if not product:
            return Fraction(0)
        return product / (laplace_eigenvalue(self.spec, a) * laplace_eigenvalue(self.spec, a + mu))

    def band_polynomial(self, mu: int) -> Polynomial:
        """C(i - p, i - p + mu, k) as a polynomial in the shifted index i."""
        p = self.spec.p
        degree = self.spec.n - 1
        start = _valid_index(mu, self.k)
        samples = [(a + p, self.table.product(a, a + mu)) for a in range(start, start + degree + 1 + self.extra)]
        return interpolate_verified(samples, degree, self.extra)

    def band(self, m: int) -> BandPlan:
        p, k = self.spec.p, self.k
        i = Polynomial.x()
        if m == 0:
            numerator = self.band_polynomial(0)
            poles: tuple[tuple[int, int], ...] = ((p, 2),)
            tail_start = _valid_index(0, k) + p
            head_indices = {0: range(_lowest_index(0), tail_start - p)}
        else:
            plus = self.band_polynomial(m)
            minus = self.band_polynomial(-m)
            if minus != plus.reflect():
                raise ParityError(f"band {m} of (n={self.spec.n}, k={k}) breaks the i -> -i pairing symmetry")
            numerator = plus * (i - (m + p)) * (i - (m - p)) + minus * (i + (m - p)) * (i + (m + p))
            poles = ((p, 1), (abs(m - p), 1), (m + p, 1))
            tail_start = max(_valid_index(m, k) + p, _valid_index(-m, k) + p, m + p + 1)
            head_indices = {mu: range(_lowest_index(mu), tail_start - p) for mu in (m, -m)}

        if parity_check(numerator) is not Parity.EVEN:
            raise ParityError(f"band {m} of (n={self.spec.n}, k={k}) has a numerator that is not even")

        head = Fraction(0)
        for mu, indices in head_indices.items():
            head += sum((self.mode_sum(a, mu) for a in indices), Fraction(0))

        summand = partial_fractions(numerator, poles)
        tail = regsum_rational(RegSumProblem(summand, start_index=tail_start))
        logger.debug("band m=%d of (n=%d, k=%d): tail from i=%d, head %s, tail %s", m, self.spec.n, k, tail_start, head, tail)
        return BandPlan(
            m=m,
            numerator=numerator,
            poles=poles,
            summand=summand,
            tail_start=tail_start,
            head_value=ExactScalar.rational(head),
            tail_value=tail,
        )


def build_trace_plan(n: int, k: int) -> TraceTermPlan:
    spec = SphereSpec(n)
    _check_k(k)
    if k == 0:
        return TraceTermPlan(n, 0, ZERO)
    d_k = dim_harmonics(spec, k)
    mode_zero = ExactScalar.rational(-2 * z1(spec) * d_k / laplace_eigenvalue(spec, k))
    builder = _BandBuilder(spec, k)
    bands = tuple(builder.band(m) for m in range(k % 2, k + 1, 2))
    return TraceTermPlan(n, k, mode_zero, bands)


def trace_term(n: int, k: int) -> ExactScalar:
    """Regularized trace of phi Delta^-1 phi Delta^-1 for phi = P_k(x.x0)/lambda_k."""
    return build_trace_plan(n, k).total


def trace_term_numeric_oracle(n: int, k: int, tolerance: float = 1e-10) -> float:
    plan = build_trace_plan(n, k)
    with mpmath.workprec(get_settings().precision_bits):
        total = plan.mode_zero.numeric()
        for band in plan.bands:
            total += band.head_value.numeric()
            total += regsum_numeric_oracle(RegSumProblem(band.summand, start_index=band.tail_start), tolerance)
        return float(total)


def _phi_norm(spec: SphereSpec, k: int) -> Fraction:
    return dim_harmonics(spec, k) / laplace_eigenvalue(spec, k) ** 2


def hess_F_conformal(n: int, k: int) -> HessianCell:
    spec = SphereSpec(n)
    _check_k(k)
    if k == 0:
        return HessianCell(n, 0, ZERO, ZERO, "0")
    norm = _phi_norm(spec, k)
    value = (
        ExactScalar.rational(Fraction((n + 2) * (n - 2), 2) * norm)
        - trace_term(n, k) * Fraction((n - 2) ** 2, 4)
    )
    return HessianCell(n, k, value, value / norm, HessianCell.sign_symbol(value))


def _tail_harmonic(n: int) -> Fraction:
    return harmonic_number(n - 1) - 1


def hess_F_H2_closed(n: int) -> ExactScalar:
    """Hess F per unit of the integral of phi^2 on H_2, n > 3."""
    SphereSpec(n)
    if n == 3:
        raise InvalidDimensionError("the closed form on H_2 needs n > 3; use hess_F_conformal(3, 2)")
    value = Fraction(2 * (n - 2)) * (-2 + (n - 2) * (n + 1) * _tail_harmonic(n)) / ((n - 3) * n)
    return ExactScalar.rational(value)


def trace_term_H2_closed(n: int) -> ExactScalar:
    SphereSpec(n)
    if n == 3:
        raise InvalidDimensionError("the closed form of the H_2 trace term needs n > 3")
    value = Fraction(n + 3) * (n * n + n - 4 - 4 * (n + 1) * _tail_harmonic(n)) / (4 * (n - 3) * (n + 1) ** 2)
    return ExactScalar.rational(value)


def predicted_sign(n: int, k: int) -> str:
    """Conjectured sign of Hess F on H_k."""
    SphereSpec(n)
    _check_k(k)
    if k < 2:
        return "0"
    if k < n - 1:
        return "-" if k % 4 == 1 else "+"
    return "-" if n % 4 == 3 else "+"


def conjecture_mismatches(cells: Iterable[HessianCell]) -> list[HessianCell]:
    return [cell for cell in cells if cell.k >= 2 and cell.sign != predicted_sign(cell.n, cell.k)]


def _cell_payload(n: int, k: int, digits: int) -> dict:
    return hess_F_conformal(n, k).to_json(digits)


def evaluate_cells(
    coords: Sequence[Coord], workers: int | None = None, digits: int = 20
) -> Iterator[tuple[Coord, HessianCell | None, Exception | None]]:
    """Yield (coord, cell, error) in input order; workers > 1 uses a process pool."""
    workers = workers or get_settings().workers
    if workers <= 1 or len(coords) <= 1:
        for n, k in coords:
            try:
                yield (n, k), hess_F_conformal(n, k), None
            except Exception as exc:
                yield (n, k), None, exc
        return

    with futures.ProcessPoolExecutor(max_workers=workers) as executors:
        wait_for = [executors.submit(_cell_payload, n, k, digits) for n, k in coords]
        for coord, future in zip(coords, wait_for):
            try:
                yield coord, HessianCell.from_json(future.result()), None
            except Exception as exc:
                yield coord, None, exc


def compute_cells(coords: Sequence[Coord], workers: int | None = None) -> list[HessianCell]:
    cells: list[HessianCell] = []
    for (n, k), cell, error in evaluate_cells(coords, workers):
        if error is not None:
            raise error
        logger.info("cell n=%d k=%d: %s", n, k, cell.sign)
        cells.append(cell)
    return cells


def table_coords(n_max: int, k_max: int) -> list[Coord]:
    if n_max < 3:
        raise InvalidDimensionError(f"n_max must be >= 3, got {n_max}")
    if k_max < 2:
        raise InvalidIndexError(f"k_max must be >= 2, got {k_max}")
    return [(n, k) for n in range(3, n_max + 1, 2) for k in range(2, k_max + 1)]


def conjecture_table(n_max: int = 17, k_max: int = 20, workers: int | None = None) -> list[HessianCell]:
    return compute_cells(table_coords(n_max, k_max), workers)


def hess_detL_sign(n: int) -> str:
    """Sign of Hess log det L on trace-free divergence-free directions."""
    SphereSpec(n)
    k_max = get_settings().positivity_check_kmax
    for k, value in enumerate(pk_coeffs(n, k_max)):
        if value <= 0:
            raise SignViolationError(f"p({k}) = {value} is not positive for n={n}")
    eventual = eventual_polynomial(n)
    for power, coeff in enumerate(eventual.coeffs):
        if (power % 2 == 0 and not coeff.is_zero) or (power % 2 and coeff.sign() <= 0):
            raise SignViolationError(f"eventual polynomial for n={n} has coefficient {coeff} at k^{power}")
    for k, term in enumerate(alpha_seq_detL_terms(n, k_max)):
        if term.sign() <= 0:
            raise SignViolationError(f"adjusted coefficient c({k}) + e({k}) = {term} is not positive for n={n}")
    return "-" if n % 4 == 3 else "+"


@dataclass(frozen=True, slots=True)
class S3Report:
    k_max: int
    alphas: tuple[ExactScalar, ...]
    cells: tuple[HessianCell, ...]
    cross_term: ExactScalar = ZERO
    notes: tuple[str, ...] = ()

    def to_json(self, digits: int = 20) -> dict:
        return {
            "k_max": self.k_max,
            "alphas": [alpha.to_json(digits) for alpha in self.alphas],
            "cells": [cell.to_json(digits) for cell in self.cells],
            "cross_term": self.cross_term.to_json(digits),
            "notes": list(self.notes),
        }


def hess_F_s3_report(k_max: int) -> S3Report:
    """Sign checks behind the strict local maximum of F at the round S^3."""
    if k_max < 2:
        raise InvalidIndexError(f"k_max must be >= 2, got {k_max}")
    alphas = tuple(alpha_seq_terms(alpha_seq_s3_F(), k_max))
    for k, alpha in enumerate(alphas):
        if alpha.sign() <= 0:
            raise SignViolationError(f"alpha_{k} = {alpha} is not positive")
    cells = tuple(hess_F_conformal(3, k) for k in range(2, k_max + 1))
    for cell in cells:
        if cell.sign != "-":
            raise SignViolationError(f"Hess F on H_{cell.k} of S^3 is {cell.value}, expected negative")
    smallest = min(alphas, key=lambda value: float(value))
    notes = (f"min alpha_k = {mpmath.nstr(smallest.numeric(), 10)}", "cross term between conformal and TT directions vanishes")
    return S3Report(k_max, alphas, cells, ZERO, notes)
