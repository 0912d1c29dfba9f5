from sphere_det.selftest import CheckResult, check_s3_criticality, check_tr_inv_laplacian, run_selftest
from sphere_det import selftest


def test_check_result_line():
    line = CheckResult("2 Z(1) closed form", True, 0.5, "exact").line()
    assert line.startswith("PASS  2 Z(1) closed form")
    assert line.endswith("0.50s  exact")
    assert CheckResult("x", False, 0.0).line().startswith("FAIL")


def test_fast_checks_pass():
    assert check_tr_inv_laplacian(True).startswith("kernel -3/4")
    assert check_s3_criticality(True) == "G_reg(0) = -3/4, 2 a_2 = 1/3"


def test_run_selftest_collects_failures(monkeypatch):
    def fails(quick):
        raise AssertionError("alpha_3 is not 61")

    monkeypatch.setattr(selftest, "CHECKS", [("s3", check_s3_criticality), ("broken", fails)])
    results = run_selftest(quick=True)
    assert [result.ok for result in results] == [True, False]
    assert results[1].detail == "alpha_3 is not 61"


def test_run_selftest_keeps_going_after_unexpected_errors(monkeypatch):
    def crashes(quick):
        raise TypeError("cannot unpack non-iterable mpf object")

    monkeypatch.setattr(selftest, "CHECKS", [("crash", crashes), ("s3", check_s3_criticality)])
    results = run_selftest(quick=True)
    assert [result.ok for result in results] == [False, True]
    assert results[0].detail == "TypeError: cannot unpack non-iterable mpf object"
    assert results[0].line().startswith("FAIL  crash")
