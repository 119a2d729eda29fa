"""Acceptance gate: every criterion at its stated tolerance, one test per
criterion, printing a pass/fail line each."""

import pytest

from gasketlab import acceptance as acc


def _check(result):
    print(result.line())
    assert result.passed, result.details


def test_criterion_01_exponent_formulas():
    _check(acc.criterion_1_exponents())


def test_criterion_02_loewner_zero_driver():
    _check(acc.criterion_2_loewner())


def test_criterion_03_crossing_probability():
    _check(acc.criterion_3_crossing_probability())


def test_criterion_04_metric_oracles():
    _check(acc.criterion_4_metric_oracles())


def test_criterion_05_axiom_suite():
    _check(acc.criterion_5_axioms())


def test_criterion_06_path_functionals():
    _check(acc.criterion_6_path_functionals())


def test_criterion_07_chemical_distance_exponent():
    _check(acc.criterion_7_chemical_exponent())


def test_criterion_08_normalization_scaling():
    _check(acc.criterion_8_normalization())


def test_criterion_09_ghf_exact_mode():
    _check(acc.criterion_9_ghf())


def test_criterion_10_four_crossing_decay():
    _check(acc.criterion_10_four_crossing())


def test_criterion_11_determinism():
    _check(acc.criterion_11_determinism())
