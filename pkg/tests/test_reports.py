import math

import numpy as np
import pytest

from torus_bohm.monodromy import SweepRow
from torus_bohm.reference_values import LYAPUNOV_TABLES, THETA0_GRID, half_unit, values
from torus_bohm.reports import comparison_rows, reference_window_check, relative_agreement, summary_text, window_identity


def test_half_unit():
    assert half_unit("2.12") == pytest.approx(0.005)
    assert half_unit(".067") == pytest.approx(0.0005)
    assert half_unit("21.9") == pytest.approx(0.05)
    assert half_unit("10.90") == pytest.approx(0.005)


def test_printed_values_keep_precision():
    assert LYAPUNOV_TABLES["table2"]["torus"]["lambda9"][-1] == "2.70"
    assert values(LYAPUNOV_TABLES["table3"]["flat"]["lambda9"])[2] == -0.003


def test_window_identity_example():
    assert window_identity(2.12, 4.10, 9.0, 10.0) == pytest.approx(21.92)


def test_table2_torus_rows_consistent():
    checks = reference_window_check("table2", "torus")
    assert len(checks) == 12 and all(c.consistent for c in checks)
    assert checks[0].implied == pytest.approx(21.92)


def test_table3_anomaly_flagged():
    checks = reference_window_check("table3", "torus")
    anomaly = checks[5]
    assert anomaly.theta0 == pytest.approx(5 * math.pi / 6)
    assert not anomaly.consistent
    assert anomaly.implied == pytest.approx(0.66)


def rows_for(grid, value=0.1):
    return [SweepRow(th, value, value, value, "completed") for th in grid]


def test_comparison_rows_with_reference():
    rows = comparison_rows(rows_for(THETA0_GRID), "table3", "torus")
    assert rows[0]["ref_lambda9"] == 2.46
    assert rows[0]["abs_dev_lambda9"] == pytest.approx(2.36)
    assert rows[5]["ref_window_consistent"] == "no"
    assert rows[4]["ref_window_consistent"] == "yes"


def test_comparison_rows_off_grid():
    rows = comparison_rows(rows_for([0.1, 0.2]), "table2", "torus")
    assert math.isnan(rows[0]["ref_lambda9"]) and rows[0]["ref_window_consistent"] == ""


def test_relative_agreement():
    np.testing.assert_array_equal(relative_agreement([1.0, 1.2], [1.04, 1.0]), [True, False])


def test_summary_mentions_flags():
    rows = {"torus": comparison_rows(rows_for(THETA0_GRID), "table3", "torus")}
    text = summary_text(rows, "table3")
    assert "2.617994" in text
    assert "cells within 5%" in text
