from __future__ import annotations

import logging
import threading
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod

from sphere_det.errors import InvalidIndexError
from sphere_det.models import ModeData, SphereSpec
from sphere_det.poly import Polynomial
from sphere_det.scalars import harmonic_number

logger = logging.getLogger(__name__)


def _check_k(k: int) -> None:
    if not isinstance(k, int) or k < 0:
        raise InvalidIndexError(f"mode index must be a nonnegative integer, got {k!r}")


def dim_harmonics(spec: SphereSpec, k: int) -> Fraction:
    """d_k = (k+1)...(k+n-2)(2k+n-1)/(n-1)!"""
    _check_k(k)
    return _dim(spec.n, k)


@lru_cache(maxsize=None)
def _dim(n: int, k: int) -> Fraction:
    return Fraction((2 * k + n - 1) * prod(k + i for i in range(1, n - 1)), factorial(n - 1))


def laplace_eigenvalue(spec: SphereSpec, k: int) -> Fraction:
    _check_k(k)
    return Fraction(k * (k + spec.n - 1))


def conformal_laplace_eigenvalue(spec: SphereSpec, k: int) -> Fraction:
    # unit sphere: scalar curvature n(n-1), so the curvature term is n(n-2)/4
    return laplace_eigenvalue(spec, k) + Fraction(spec.n * (spec.n - 2), 4)


def mode_data(spec: SphereSpec, k: int) -> ModeData:
    return ModeData(
        k=k,
        d_k=dim_harmonics(spec, k),
        lambda_k=laplace_eigenvalue(spec, k),
        lambdaL_k=conformal_laplace_eigenvalue(spec, k),
    )


def z1(spec: SphereSpec) -> Fraction:
    """Regularized trace of the inverse Laplacian: -H_{n-1}/(n-1)."""
    return -harmonic_number(spec.n - 1) / (spec.n - 1)


def nu_moment(spec: SphereSpec, m: int) -> Fraction:
    if not isinstance(m, int) or m < 0:
        raise InvalidIndexError(f"moment order must be a nonnegative integer, got {m!r}")
    if m % 2:
        return Fraction(0)
    moments = _moments(spec.n, m // 2)
    return moments[m // 2]


@lru_cache(maxsize=None)
def _moments(n: int, half: int) -> tuple[Fraction, ...]:
    values = [Fraction(1)]
    for j in range(1, half + 1):
        values.append(values[-1] * Fraction(2 * j - 1, n + 2 * j - 1))
    return tuple(values)


def recurrence_coefficients(spec: SphereSpec, k: int) -> tuple[Fraction, Fraction]:
    """(alpha_k, beta_k) with t P_k = alpha_k P_{k+1} + beta_k P_{k-1}."""
    _check_k(k)
    return _recurrence(spec.n, k)


@lru_cache(maxsize=None)
def _recurrence(n: int, k: int) -> tuple[Fraction, Fraction]:
    alpha = Fraction(k + 1, 2 * k + n + 1)
    beta = Fraction(k + n - 2, 2 * k + n - 3) if k else Fraction(0)
    return alpha, beta


_gegenbauer_lock = threading.Lock()
_gegenbauer_rows: dict[int, list[tuple[Fraction, ...]]] = {}


def _gegenbauer_rational(n: int, k: int) -> tuple[Fraction, ...]:
    rows = _gegenbauer_rows.get(n)
    if rows is not None and k < len(rows):
        return rows[k]
    with _gegenbauer_lock:
        rows = _gegenbauer_rows.setdefault(n, [(Fraction(1),)])
        while len(rows) <= k:
            step = len(rows) - 1
            alpha, beta = _recurrence(n, step)
            current = rows[step]
            previous = rows[step - 1] if step else ()
            nxt = [Fraction(0)] * (len(current) + 1)
            for i, c in enumerate(current):
                nxt[i + 1] += c
            for i, c in enumerate(previous):
                nxt[i] -= beta * c
            rows.append(tuple(c / alpha for c in nxt))
        return rows[k]


def gegenbauer_P(spec: SphereSpec, k: int) -> Polynomial:
    """P_k orthogonal for d nu_n, normalized by the integral of P_k^2 being d_k."""
    _check_k(k)
    return Polynomial(_gegenbauer_rational(spec.n, k))


def triple_product_direct(spec: SphereSpec, a: int, b: int, c: int) -> Fraction:
    """Integral of P_a P_b P_c against d nu_n by exact expansion."""
    for index in (a, b, c):
        _check_k(index)
    if (a + b + c) % 2 or a > b + c or b > a + c or c > a + b:
        return Fraction(0)
    n = spec.n
    pa, pb, pc = (_gegenbauer_rational(n, index) for index in (a, b, c))
    left = [Fraction(0)] * (a + b + 1)
    for i, x in enumerate(pa):
        if x:
            for j, y in enumerate(pb):
                left[i + j] += x * y
    moments = _moments(n, (a + b + c) // 2)
    total = Fraction(0)
    for i, x in enumerate(left):
        if not x:
            continue
        for j, y in enumerate(pc):
            if y and (i + j) % 2 == 0:
                total += x * y * moments[(i + j) // 2]
    return total


class LinearizationTable:
    """Rows W_a with P_a P_k = sum_c W_a[c] P_c, grown by the recurrence in a."""

    def __init__(self, spec: SphereSpec, k: int) -> None:
        _check_k(k)
        self.spec = spec
        self.k = k
        self._rows: list[dict[int, Fraction]] = [{k: Fraction(1)}]

    def row(self, a: int) -> dict[int, Fraction]:
        _check_k(a)
        while len(self._rows) <= a:
            self._extend()
        return self._rows[a]

    def _extend(self) -> None:
        n = self.spec.n
        a = len(self._rows) - 1
        alpha_a, beta_a = _recurrence(n, a)
        nxt: dict[int, Fraction] = {}
        for c, weight in self._rows[a].items():
            alpha_c, beta_c = _recurrence(n, c)
            nxt[c + 1] = nxt.get(c + 1, 0) + weight * alpha_c
            if c:
                nxt[c - 1] = nxt.get(c - 1, 0) + weight * beta_c
        if a:
            for c, weight in self._rows[a - 1].items():
                nxt[c] = nxt.get(c, 0) - beta_a * weight
        self._rows.append({c: w / alpha_a for c, w in sorted(nxt.items()) if w})

    def product(self, a: int, b: int) -> Fraction:
        """C(a, b, k), the integral of P_a P_b P_k."""
        if a < 0 or b < 0:
            return Fraction(0)
        weight = self.row(a).get(b)
        if not weight:
            return Fraction(0)
        return weight * _dim(self.spec.n, b)


def triple_product_closed_k2(spec: SphereSpec, j: int, m: int) -> Fraction:
    """Closed forms for the integral of P_j P_{j+m} P_2, m in {0, 2, -2}."""
    n, p = spec.n, spec.p
    if m == 0:
        if j < 0:
            raise InvalidIndexError(f"C(j, 0, 2) needs j >= 0, got {j}")
        if j == 0:
            return Fraction(0)
        head = prod(j + i for i in range(0, p - 1))
        tail = prod(j + i for i in range(p + 2, n))
        return Fraction(n + 3, 2 * factorial(n - 2)) * head * (j + p) ** 2 * tail
    constant = Fraction((n + 1) * (n + 3), 4 * factorial(n - 1))
    if m == 2:
        if j < 0:
            raise InvalidIndexError(f"C(j, 2, 2) needs j >= 0, got {j}")
        return constant * prod(j + i for i in range(1, p + 1)) * prod(j + i for i in range(p + 2, n + 1))
    if m == -2:
        if j < 2:
            raise InvalidIndexError(f"C(j, -2, 2) needs j >= 2, got {j}")
        return constant * prod(j + i for i in range(-1, p - 1)) * prod(j + i for i in range(p, n - 1))
    raise InvalidIndexError(f"m must be one of 0, 2, -2, got {m}")
