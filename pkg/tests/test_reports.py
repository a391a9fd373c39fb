"""Tolerance contract of the verification reports."""

import pytest

from cube_transport.reports import (
    CSV_HEADER,
    DEFAULT_ABS_TOL,
    DEFAULT_REL_TOL,
    make_report,
    refinement_consistent,
)


def test_default_tolerances():
    assert DEFAULT_REL_TOL == 0.05
    assert DEFAULT_ABS_TOL == 1e-6


def test_pass_rule_is_relative_plus_absolute():
    # pass iff lhs <= rhs (1 + rel) + abs
    rep = make_report("x", lhs=1.049, rhs=1.0, constant_used=1.0)
    assert rep.passed
    rep = make_report("x", lhs=1.051, rhs=1.0, constant_used=1.0)
    assert not rep.passed


def test_abs_tol_guards_tiny_rhs():
    rep = make_report("x", lhs=5e-7, rhs=0.0, constant_used=1.0)
    assert rep.passed
    rep = make_report("x", lhs=5e-6, rhs=0.0, constant_used=1.0)
    assert not rep.passed


def test_slack_sign_matches_pass():
    rep = make_report("x", lhs=0.3, rhs=1.0, constant_used=2.0)
    assert rep.slack == pytest.approx(0.7)
    assert rep.passed
    rep = make_report("x", lhs=2.0, rhs=1.0, constant_used=2.0)
    assert rep.slack == pytest.approx(-1.0)


def test_to_dict_wire_keys():
    rep = make_report("q", lhs=1.0, rhs=2.0, constant_used=4.0, grid_m=16, note="n")
    d = rep.to_dict()
    assert d["pass"] is True
    assert d["name"] == "q"
    assert d["m"] == 16
    assert d["rel_tol"] == DEFAULT_REL_TOL


def test_csv_row_matches_header():
    rep = make_report("q", lhs=1.0, rhs=2.0, constant_used=4.0)
    row = rep.to_csv_row()
    assert len(row) == len(CSV_HEADER)


def test_refinement_allows_tolerance_drift():
    coarse = make_report("x", lhs=0.50, rhs=1.0, constant_used=1.0, grid_m=16)
    fine_ok = make_report("x", lhs=0.52, rhs=1.0, constant_used=1.0, grid_m=32)
    fine_bad = make_report("x", lhs=0.60, rhs=1.0, constant_used=1.0, grid_m=32)
    assert refinement_consistent(coarse, fine_ok)
    assert not refinement_consistent(coarse, fine_bad)


def test_refinement_requires_fine_pass():
    coarse = make_report("x", lhs=0.9, rhs=1.0, constant_used=1.0, grid_m=16)
    fine = make_report("x", lhs=1.2, rhs=1.0, constant_used=1.0, grid_m=32)
    assert not refinement_consistent(coarse, fine)
