from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import mpmath

from sphere_det.config import get_settings
from sphere_det.hessians import (
    conjecture_mismatches,
    conjecture_table,
    hess_detL_sign,
    hess_F_conformal,
    hess_F_H2_closed,
    trace_term,
    trace_term_H2_closed,
)
from sphere_det.kernels import (
    abel_summation_oracle,
    alpha_seq_detL_terms,
    alpha_seq_s3_F,
    alpha_seq_terms,
    eventual_polynomial,
    green_s3_delta,
    pk_coeffs,
    s3_harmonic_extension,
    taylor_regular_part,
)
from sphere_det.models import RegSumProblem, SphereSpec
from sphere_det.poly import Polynomial, partial_fractions
from sphere_det.regsum import regsum_numeric_oracle, regsum_rational, regsum_simple_pole, z1_numeric_oracle, z1_spectral
from sphere_det.scalars import ExactScalar
from sphere_det.spectral import dim_harmonics, laplace_eigenvalue, triple_product_closed_k2, triple_product_direct, z1

logger = logging.getLogger(__name__)

ODD_DIMENSIONS = tuple(range(3, 18, 2))


@dataclass(frozen=True, slots=True)
class CheckResult:
    name: str
    ok: bool
    seconds: float
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        left = self.name.ljust(48)
        tail = f"  {self.detail}" if self.detail else ""
        return f"{tag:4}  {left}{self.seconds:8.2f}s{tail}"


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise AssertionError(message)


def random_even_poly(rng: random.Random, max_degree: int = 6) -> Polynomial:
    degree = rng.randrange(0, max_degree // 2 + 1) * 2
    coeffs = [Fraction(0)] * (degree + 1)
    for power in range(0, degree + 1, 2):
        coeffs[power] = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    coeffs[degree] = coeffs[degree] or Fraction(1)
    return Polynomial(tuple(coeffs))


def check_tr_inv_laplacian(quick: bool) -> str:
    kernel_value = taylor_regular_part(green_s3_delta(), 0)[0]
    _expect(kernel_value == Fraction(-3, 4), f"kernel route gave {kernel_value}")
    spectral = z1_numeric_oracle(SphereSpec(3))
    _expect(abs(spectral + 0.75) < 1e-8, f"spectral route gave {spectral}")
    return f"kernel {kernel_value}, spectral {spectral:.12f}"


def check_z1(quick: bool) -> str:
    for n in ODD_DIMENSIONS:
        spec = SphereSpec(n)
        _expect(z1_spectral(spec) == z1(spec), f"z1 mismatch at n={n}")
    for n in (3, 5, 7):
        spec = SphereSpec(n)
        numeric = z1_numeric_oracle(spec)
        _expect(abs(numeric - float(z1(spec))) < 1e-8, f"numeric z1 off at n={n}: {numeric}")
    return "exact for n <= 17, numeric for n in 3, 5, 7"


def check_s3_criticality(quick: bool) -> str:
    coeffs = taylor_regular_part(green_s3_delta(), 2)
    _expect(coeffs[0] == Fraction(-3, 4), f"G_reg(0) = {coeffs[0]}")
    _expect(coeffs[2] * 2 == Fraction(1, 3), f"2 a_2 = {coeffs[2] * 2}")
    return "G_reg(0) = -3/4, 2 a_2 = 1/3"


def check_alpha_s3(quick: bool) -> str:
    seq = alpha_seq_s3_F()
    _expect(seq.term(0) == Fraction(5, 8), "alpha_0")
    _expect(seq.term(1) == 5, "alpha_1")
    _expect(seq.term(2) == ExactScalar.from_coeffs({0: Fraction(115, 16), 1: Fraction(3, 2)}), "alpha_2")
    k_max = 200 if quick else 1000
    terms = alpha_seq_terms(seq, k_max)
    for k, term in enumerate(terms):
        _expect(term.sign() > 0, f"alpha_{k} = {term} is not positive")
        if k >= 10:
            with mpmath.workprec(get_settings().precision_bits):
                gap = abs(term.numeric() - seq.asymptotic_value(k))
            _expect(gap <= mpmath.mpf(10) / k, f"alpha_{k} strays {mpmath.nstr(gap, 5)} from its asymptotic form")
    samples = [0.3, 1.0, mpmath.pi / 2, 2.5, 3.0]
    deviation = abel_summation_oracle(seq, s3_harmonic_extension, [float(r) for r in samples], 0.9)
    _expect(deviation < 1e-6, f"Abel deviation {deviation:.3e}")
    return f"positive to k={k_max}, Abel deviation {deviation:.2e}"


def check_detl(quick: bool) -> str:
    for n in ODD_DIMENSIONS:
        _expect(all(value > 0 for value in pk_coeffs(n, 200)), f"p(k) not positive for n={n}")
        eventual = eventual_polynomial(n)
        for power, coeff in enumerate(eventual.coeffs):
            _expect(coeff.is_zero if power % 2 == 0 else coeff.sign() > 0, f"eventual polynomial n={n} at k^{power}")
        _expect(all(term.sign() > 0 for term in alpha_seq_detL_terms(n, 200)), f"c + e not positive for n={n}")
        expected = "-" if n % 4 == 3 else "+"
        _expect(hess_detL_sign(n) == expected, f"Hess log det L sign for n={n}")
    return "positive coefficients for odd n <= 17"


def _h2_dimensions(quick: bool) -> tuple[int, ...]:
    return tuple(n for n in ODD_DIMENSIONS if n >= 5 and (not quick or n <= 9))


def check_trace_h2(quick: bool) -> str:
    for n in _h2_dimensions(quick):
        _expect(trace_term(n, 2) == trace_term_H2_closed(n), f"trace term mismatch at n={n}")
    _expect(trace_term(5, 2) == 0, "trace term at n=5")
    _expect(trace_term(7, 2) == Fraction(7, 128), "trace term at n=7")
    return "pipeline equals the closed form"


def check_hess_h2(quick: bool) -> str:
    for n in _h2_dimensions(quick):
        spec = SphereSpec(n)
        norm = dim_harmonics(spec, 2) / laplace_eigenvalue(spec, 2) ** 2
        _expect(hess_F_conformal(n, 2).value == hess_F_H2_closed(n) * norm, f"Hess F mismatch at n={n}")
    _expect(hess_F_conformal(5, 2).value == Fraction(35, 24), "n=5 value")
    _expect(hess_F_conformal(7, 2).value == Fraction(175, 64), "n=7 value")
    return "35/24 and 175/64 reproduced"


def check_zero_directions(quick: bool) -> str:
    for n in ODD_DIMENSIONS if not quick else ODD_DIMENSIONS[:4]:
        for k in (0, 1):
            _expect(hess_F_conformal(n, k).value.is_zero, f"Hess F(n={n}, k={k}) is not zero")
    return "k = 0 and k = 1 vanish"


def check_conjecture(quick: bool) -> str:
    n_max, k_max = (9, 10) if quick else (17, 20)
    cells = conjecture_table(n_max, k_max)
    mismatches = conjecture_mismatches(cells)
    _expect(not mismatches, "mismatches at " + ", ".join(f"({c.n}, {c.k})" for c in mismatches))
    return f"{len(cells)} cells, 0 mismatches"


def check_orthogonal_polynomials(quick: bool) -> str:
    for n in ODD_DIMENSIONS:
        spec = SphereSpec(n)
        for k in range(21):
            _expect(triple_product_direct(spec, k, k, 0) == dim_harmonics(spec, k), f"norm of P_{k} for n={n}")
        for j in range(13):
            _expect(triple_product_closed_k2(spec, j, 0) == triple_product_direct(spec, j, j, 2), f"C({j},0,2) n={n}")
            _expect(triple_product_closed_k2(spec, j, 2) == triple_product_direct(spec, j, j + 2, 2), f"C({j},2,2) n={n}")
            if j >= 2:
                _expect(
                    triple_product_closed_k2(spec, j, -2) == triple_product_direct(spec, j, j - 2, 2),
                    f"C({j},-2,2) n={n}",
                )
    return "normalization and k = 2 closed forms exact"


def check_regsum(quick: bool) -> str:
    rng = random.Random(20240611)
    worst = 0.0
    for _ in range(20):
        G = random_even_poly(rng)
        ell = rng.randint(1, 5)
        exact = regsum_simple_pole(G, ell)
        problem = RegSumProblem(partial_fractions(G, [(ell, 1)]), start_index=1, excluded_indices={ell})
        _expect(regsum_rational(problem) == exact, f"driver disagrees with the closed form for G={G}, ell={ell}")
        numeric = regsum_numeric_oracle(problem, 1e-10)
        worst = max(worst, abs(numeric - float(exact.numeric())))
    _expect(worst < 1e-6, f"oracle deviation {worst:.3e}")

    for _ in range(10):
        poles = [(rng.randint(1, 4), 1), (rng.randint(5, 7), rng.randint(1, 2))]
        start = 8
        first = partial_fractions(random_even_poly(rng), poles)
        second = partial_fractions(random_even_poly(rng), poles)
        a, b = Fraction(rng.randint(-5, 5), rng.randint(1, 4)), Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        combined = RegSumProblem(first * a + second * b, start_index=start)
        expected = regsum_rational(RegSumProblem(first, start)) * a + regsum_rational(RegSumProblem(second, start)) * b
        _expect(regsum_rational(combined) == expected, "linearity")
        i0 = rng.randint(start, start + 5)
        shifted = RegSumProblem(first, start, excluded_indices={i0})
        _expect(regsum_rational(shifted) + first(i0) == regsum_rational(RegSumProblem(first, start)), "index shift")
    return f"oracle deviation {worst:.2e}; linearity and shift exact"


CHECKS: list[tuple[str, Callable[[bool], str]]] = [
    ("1 TR inverse Laplacian on S^3", check_tr_inv_laplacian),
    ("2 Z(1) closed form", check_z1),
    ("3 S^3 criticality data", check_s3_criticality),
    ("4 S^3 alpha sequence", check_alpha_s3),
    ("5 det L coefficients", check_detl),
    ("6 H_2 trace term", check_trace_h2),
    ("7 H_2 Hessian", check_hess_h2),
    ("8 zero directions", check_zero_directions),
    ("9 sign table", check_conjecture),
    ("10 orthogonal polynomials", check_orthogonal_polynomials),
    ("11 regularization engine", check_regsum),
]


def run_selftest(quick: bool = False) -> list[CheckResult]:
    results: list[CheckResult] = []
    for name, check in CHECKS:
        started = time.perf_counter()
        try:
            detail = check(quick)
            ok = True
        except AssertionError as exc:
            detail = str(exc)
            ok = False
        except Exception as exc:
            logger.debug("selftest %s raised", name, exc_info=True)
            detail = f"{type(exc).__name__}: {exc}"
            ok = False
        elapsed = time.perf_counter() - started
        logger.info("selftest %s: %s in %.2fs", name, "ok" if ok else "failed", elapsed)
        results.append(CheckResult(name, ok, elapsed, detail))
    return results
