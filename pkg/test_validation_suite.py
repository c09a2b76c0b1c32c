"""
Unit tests for the validation suite runner and its cheaper criteria.
"""

import json

import pytest

import validation_suite
from validation_suite import (
    SUITES,
    VALIDATION_CRITERIA,
    check_detailed_balance,
    check_future_sign,
    check_harmonicity,
    check_hstarstar,
    check_interaction_identity,
    check_no_move_bound,
    check_optimal_cost_scaling,
    check_predecessor_erratum,
    check_restricted_minimiser,
    check_rightmost_erratum,
    exhaustive_smooth_minimum,
    format_report,
    run_validation,
)


class TestCriteria:

    def test_every_criterion_well_formed(self):
        names = [c['name'] for c in VALIDATION_CRITERIA]
        assert len(names) == len(set(names))
        for c in VALIDATION_CRITERIA:
            assert c['suite'] in SUITES
            assert callable(c['check'])

    def test_every_suite_populated(self):
        assert {c['suite'] for c in VALIDATION_CRITERIA} == set(SUITES)

    def test_harmonicity_named_per_depth(self):
        names = {c['name'] for c in VALIDATION_CRITERIA}
        assert "harmonicity residual M=16" in names

    @pytest.mark.parametrize("check", [
        lambda: check_harmonicity(8),
        check_future_sign,
        check_predecessor_erratum,
        check_no_move_bound,
        check_hstarstar,
        check_optimal_cost_scaling,
        check_detailed_balance,
        check_rightmost_erratum,
    ])
    def test_cheap_checks_pass(self, check):
        assert check()['passed']

    def test_restricted_minimiser_check(self):
        outcome = check_restricted_minimiser()
        assert outcome['passed']
        assert outcome['measured']['cases'] > 30

    def test_interaction_identity_reaches_wide_dirichlet_phases(self):
        outcome = check_interaction_identity(max_N=18)
        assert outcome['passed']
        # (17, 0), (18, 0) and (18, 1) have Dirichlet ranges beyond 2^16 sites
        assert outcome['measured']['pairs'] == 90

    def test_rightmost_criterion_registered(self):
        names = {c['name'] for c in VALIDATION_CRITERIA}
        assert "rightmost node asymptotic (erratum)" in names

    def test_exhaustive_minimum(self):
        assert exhaustive_smooth_minimum(5, 8) == 6
        assert exhaustive_smooth_minimum(3, 4) == 2


class TestRunner:

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            run_validation('bogus')

    def test_failure_and_error_recorded(self, monkeypatch):
        fake = [
            {'name': 'ok', 'suite': 'oracle', 'description': '', 'critical': True,
             'check': lambda seed: {'passed': True, 'measured': seed, 'tolerance': 0}},
            {'name': 'soft', 'suite': 'oracle', 'description': '', 'critical': False,
             'check': lambda seed: {'passed': False, 'measured': 1.0, 'tolerance': 0.5}},
            {'name': 'boom', 'suite': 'oracle', 'description': '', 'critical': True,
             'check': lambda seed: 1 / 0},
        ]
        monkeypatch.setattr(validation_suite, 'VALIDATION_CRITERIA', fake)
        results = run_validation('oracle', seed=3)
        assert (results['total'], results['passed'], results['failed']) == (3, 1, 2)
        assert results['critical_failures'] == 1
        assert not results['all_passed']
        statuses = [d['status'] for d in results['details']]
        assert statuses == ['PASS', 'FAIL', 'ERROR']
        assert results['details'][0]['measured'] == 3
        assert 'ZeroDivisionError' in results['details'][2]['error']
        json.dumps(results)

        report = "\n".join(format_report(results))
        assert "ok: PASS" in report
        assert "boom: ERROR" in report
        assert "❌" in report

    def test_dirichlet_suite_passes(self):
        results = run_validation('dirichlet')
        assert results['critical_failures'] == 0, [d for d in results['details'] if d['status'] != 'PASS']
        lines = format_report(results)
        assert any("harmonicity residual M=16: PASS" in line for line in lines)
