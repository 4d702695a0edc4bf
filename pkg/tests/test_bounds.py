from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from privinfer.bounds import (
    binomial_sum,
    binomial_sum_bound,
    binomial_sum_bound_holds,
    closew_bound,
    closew_bound_harmonic,
    comparison_row,
    error_bound,
    floor_square,
    harmonic,
    log2_int,
    mi_achieved,
    mi_lower,
    mu_bound,
    orthant_cell_bound,
    orthant_cell_recursion,
    orthant_distance,
    relative_error_bound,
    report,
)
from privinfer.exceptions import ParameterError
from privinfer.gf2 import SignVector


def test_error_bound_values():
    assert error_bound(0, 64) == 0.0
    assert error_bound(1, 4) == pytest.approx(math.sqrt(3))
    assert error_bound(32, 64) == pytest.approx(8.0)
    assert error_bound(2, 12, 3.0) == pytest.approx(3 * 2 * math.sqrt(2 * 10 / 12))
    with pytest.raises(ParameterError):
        error_bound(5, 8)


def test_error_bound_monotone_in_h():
    vals = [error_bound(h, 64) for h in range(33)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert relative_error_bound(32, 64) == pytest.approx(0.5)


def test_mi_achieved_values():
    assert mi_achieved(8, 2, 1) == pytest.approx(3.0, abs=1e-12)
    assert mi_achieved(8, 2, 1, "le") == pytest.approx(6 - math.log2(9), abs=1e-12)
    assert mi_achieved(12, 4, 2) == pytest.approx(8 - math.log2(67), abs=1e-12)
    assert mi_achieved(64, 8, 0) == 56


def test_log2_int_large():
    assert log2_int(1 << 5000) == 5000.0
    assert log2_int(3 << 4000) == pytest.approx(4000 + math.log2(3))
    with pytest.raises(ValueError):
        log2_int(0)


def test_closew_chain():
    assert harmonic(1) == 1.0
    for n in [1, 2, 3, 10, 1000]:
        assert closew_bound_harmonic(1.0, n) <= closew_bound(1.0, n) + 1e-15


def test_floor_square_exact_and_snapped():
    assert floor_square(Fraction(3, 2)) == 2
    assert floor_square(2) == 4
    assert floor_square(math.sqrt(2)) == 2  # 2.0000000000000004 or 1.9999999999999996
    assert floor_square(math.sqrt(3) * (1 - 1e-6)) == 2
    with pytest.raises(ParameterError):
        floor_square(-1.0)


def test_mu_small_example():
    # two orthant cells of 4 lines in R^1, times the radius-1 ball of 1 + 4 points
    assert mu_bound(1, 4, 1.0) == 2 * 5
    with pytest.raises(ParameterError):
        mu_bound(5, 4, 1.0)


def test_orthant_cell_bound():
    assert orthant_cell_bound(5, 3) == 22
    assert orthant_cell_bound(7, 1) == 2
    assert orthant_cell_bound(3, 3) == 8  # every orthant of R^3


@given(st.integers(1, 40), st.integers(1, 8))
def test_cell_recursion(n, ell):
    assert orthant_cell_bound(n, ell) == orthant_cell_recursion(n, ell)


def test_binomial_sum():
    assert binomial_sum(0, 5) == 1
    assert binomial_sum(5, 5) == 32
    assert binomial_sum(9, 5) == 32
    assert binomial_sum(-1, 5) == 0


def test_binomial_sum_bound_exhaustive():
    for n in range(1, 65):
        for m in range(1, n + 1):
            assert binomial_sum_bound_holds(m, n)
            assert binomial_sum(m, n) <= binomial_sum_bound(m, n)


def test_mi_lower_fields():
    lo = mi_lower(1024, 2, 1.0)
    assert lo.closed_form is not None
    assert lo.closed_form <= lo.value
    assert lo.value == pytest.approx(1024 - log2_int(lo.mu))
    small = mi_lower(2, 1, 0.1)
    assert small.closed_form is None  # eps'^2 < e
    assert small.clipped >= 0.0


def test_closed_form_never_above_exact():
    for n in [16, 64, 256, 1024, 4096]:
        for ell in [1, 2, 8]:
            for eps in [0.5, 1.0, 2.0, 4.0]:
                lo = mi_lower(n, ell, eps)
                if lo.closed_form is not None:
                    assert lo.closed_form <= lo.value + 1e-9


def test_orthant_distance():
    a = SignVector.from_signs([1, 1, -1, -1])
    v = SignVector.from_signs([1, -1, 1, -1])
    assert orthant_distance(a, v) == pytest.approx(math.sqrt(2))
    assert orthant_distance(a, a) == 0.0


def test_report_examples():
    rep = report(8, 2, 1)
    assert rep.mi_achieved_bits == pytest.approx(3.0)
    assert rep.gamma_count == 8 and rep.gamma_count_le == 9
    assert rep.lower_bound_applies and rep.consistent
    d = rep.to_dict()
    assert d["gamma_count"] == "8" and isinstance(d["mu"], str)
    big = report(4096, 8, 20)
    assert big.consistent
    assert big.mi_achieved_bits < 4096 - 8


def test_report_epsilon_below_error_does_not_apply():
    rep = report(64, 8, 4, epsilon=0.1)
    assert not rep.lower_bound_applies
    assert rep.consistent


def test_comparison_row():
    row = comparison_row(1024, 4, 3)
    assert row["scheme_bits"] == pytest.approx(mi_achieved(1024, 4, 3))
    assert row["lower_exact_bits"] <= row["scheme_bits"]
    assert row["lower_shorthand_bits"] <= row["lower_exact_bits"]
