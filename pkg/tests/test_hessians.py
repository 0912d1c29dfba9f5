from fractions import Fraction

import pytest

from sphere_det.errors import InvalidDimensionError, InvalidIndexError
from sphere_det.hessians import (
    build_trace_plan,
    compute_cells,
    conjecture_mismatches,
    conjecture_table,
    hess_detL_sign,
    hess_F_conformal,
    hess_F_H2_closed,
    hess_F_s3_report,
    predicted_sign,
    table_coords,
    trace_term,
    trace_term_H2_closed,
    trace_term_numeric_oracle,
)
from sphere_det.models import SphereSpec
from sphere_det.scalars import ExactScalar
from sphere_det.spectral import LinearizationTable, dim_harmonics, laplace_eigenvalue


def test_trace_term_on_h2():
    assert trace_term(5, 2) == 0
    assert trace_term(7, 2) == Fraction(7, 128)
    for n in range(5, 14, 2):
        assert trace_term(n, 2) == trace_term_H2_closed(n)


def test_hessian_on_h2():
    assert hess_F_conformal(5, 2).value == Fraction(35, 24)
    assert hess_F_conformal(7, 2).value == Fraction(175, 64)
    assert hess_F_H2_closed(5) == Fraction(21, 2)
    assert hess_F_H2_closed(7) == 20
    for n in range(5, 14, 2):
        cell = hess_F_conformal(n, 2)
        assert cell.per_phi2 == hess_F_H2_closed(n)
        assert cell.sign == "+"


def test_h2_closed_forms_need_n_above_three():
    with pytest.raises(InvalidDimensionError):
        hess_F_H2_closed(3)
    with pytest.raises(InvalidDimensionError):
        trace_term_H2_closed(3)


def test_s3_h2_cell():
    cell = hess_F_conformal(3, 2)
    trace = trace_term(3, 2)
    assert not trace.is_rational
    assert cell.value == Fraction(45, 128) - trace * Fraction(1, 4)
    assert trace == ExactScalar.from_coeffs({0: Fraction(75, 32), 1: Fraction(1, 2)})
    assert cell.value == ExactScalar.from_coeffs({0: Fraction(-15, 64), 1: Fraction(-1, 8)})
    assert cell.sign == "-"


def test_zero_directions():
    for n in (3, 5, 7):
        assert hess_F_conformal(n, 0).value.is_zero
        assert hess_F_conformal(n, 0).sign == "0"
        assert hess_F_conformal(n, 1).value.is_zero
    assert trace_term(5, 0) == 0


def test_invalid_arguments():
    with pytest.raises(InvalidIndexError):
        trace_term(5, -1)
    with pytest.raises(InvalidDimensionError):
        hess_F_conformal(4, 2)


def test_predicted_sign():
    assert predicted_sign(7, 5) == "-"
    assert predicted_sign(7, 10) == "-"
    assert predicted_sign(5, 4) == "+"
    assert predicted_sign(7, 2) == "+"
    assert predicted_sign(9, 2) == "+"
    assert predicted_sign(9, 1) == "0"


def test_plan_bands_follow_parity_of_k():
    assert [band.m for band in build_trace_plan(7, 4).bands] == [0, 2, 4]
    assert [band.m for band in build_trace_plan(7, 5).bands] == [1, 3, 5]
    assert build_trace_plan(7, 0).bands == ()


def test_plan_summand_matches_mode_sums():
    n, k = 7, 4
    spec = SphereSpec(n)
    p = spec.p
    plan = build_trace_plan(n, k)
    table = LinearizationTable(spec, k)
    start = max(band.tail_start for band in plan.bands)
    for i in range(start, start + 4):
        a = i - p
        direct = Fraction(0)
        for band in plan.bands:
            for mu in {band.m, -band.m}:
                direct += table.product(a, a + mu) / (laplace_eigenvalue(spec, a) * laplace_eigenvalue(spec, a + mu))
        assert plan.summand_at(i) == direct


@pytest.mark.parametrize(("n", "k"), [(5, 3), (7, 4), (9, 5), (3, 2)])
def test_trace_term_numeric_oracle(n, k):
    assert trace_term_numeric_oracle(n, k) == pytest.approx(float(trace_term(n, k)), abs=1e-8)


def test_hessian_normalization():
    spec = SphereSpec(9)
    cell = hess_F_conformal(9, 4)
    norm = dim_harmonics(spec, 4) / laplace_eigenvalue(spec, 4) ** 2
    assert cell.value == cell.per_phi2 * norm


def test_detl_sign():
    assert hess_detL_sign(3) == "-"
    assert hess_detL_sign(5) == "+"
    assert hess_detL_sign(7) == "-"


def test_s3_report():
    report = hess_F_s3_report(4)
    assert len(report.alphas) == 5
    assert [cell.k for cell in report.cells] == [2, 3, 4]
    assert all(cell.sign == "-" for cell in report.cells)
    payload = report.to_json(10)
    assert payload["k_max"] == 4
    assert payload["cross_term"]["terms"] == []
    with pytest.raises(InvalidIndexError):
        hess_F_s3_report(1)


def test_table_coords():
    assert table_coords(5, 3) == [(3, 2), (3, 3), (5, 2), (5, 3)]
    with pytest.raises(InvalidIndexError):
        table_coords(5, 1)


def test_compute_cells_keeps_order():
    coords = [(7, 3), (5, 2), (3, 4)]
    serial = compute_cells(coords, workers=1)
    assert [(cell.n, cell.k) for cell in serial] == coords
    pooled = compute_cells(coords, workers=2)
    assert pooled == serial


def test_small_table_matches_prediction():
    cells = conjecture_table(9, 8)
    assert len(cells) == 4 * 7
    assert conjecture_mismatches(cells) == []
