"""
Unit tests for the command-line front end: outputs, manifests and exit codes.
"""

import csv
import json

import pytest

from brw_cli import EXIT_ASSUMPTION, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, main
from run_manifest import MANIFEST_NAME


def _rows(path):
    with open(path, newline='') as f:
        return list(csv.DictReader(f))


def _manifest(out):
    return json.loads((out / MANIFEST_NAME).read_text())


# == 1. dirichlet ==

class TestDirichlet:

    def test_two_generations(self, tmp_path):
        assert main(['dirichlet', '--M', '2', '--eps', '1', '--out', str(tmp_path)]) == EXIT_OK
        rows = _rows(tmp_path / 'dirichlet_profile.csv')
        first = [r for r in rows if r['generation'] == '1' and r['node_index'] == '1'][0]
        assert float(first['position']) == pytest.approx(2 / 3)
        assert float(first['increment']) == pytest.approx(2 / 3)
        manifest = _manifest(tmp_path)
        assert manifest['headline']['S_spr'] == pytest.approx(7 / 6)
        assert manifest['headline']['within_bounds'] is True
        assert [o['file'] for o in manifest['outputs']] == ['dirichlet_profile.csv']

    def test_one_generation(self, tmp_path):
        main(['dirichlet', '--M', '1', '--out', str(tmp_path)])
        leaves = [float(r['position']) for r in _rows(tmp_path / 'dirichlet_profile.csv')
                  if r['generation'] == '1']
        assert leaves == [-0.5, 0.5]

    def test_cap(self, tmp_path, capsys):
        assert main(['dirichlet', '--M', '30', '--out', str(tmp_path)]) == EXIT_USAGE
        assert "M exceeds cap" in capsys.readouterr().err

    def test_out_dir_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv('SRBRW_OUT_DIR', str(tmp_path / 'env'))
        assert main(['dirichlet', '--M', '1']) == EXIT_OK
        assert (tmp_path / 'env' / MANIFEST_NAME).exists()


# == 2. trajectory ==

class TestTrajectory:

    def test_smallest_staircase(self, tmp_path):
        code = main(['trajectory', '--N', '3', '--beta', '1', '--eps', '1', '--K', '1', '--out', str(tmp_path)])
        assert code == EXIT_OK
        rows = _rows(tmp_path / 'trajectory_occupations.csv')
        final = [int(r['occupation']) for r in rows if r['generation'] == '3']
        assert final == [1, 2, 2, 2, 1]
        headline = _manifest(tmp_path)['headline']
        assert (headline['K'], headline['r'], headline['d']) == (1, 2, 1)
        assert headline['S_total'] == pytest.approx(7 / 6 + 7.0)
        costs = _rows(tmp_path / 'trajectory_costs.csv')
        assert [c['phase'] for c in costs] == ['dirichlet', 'dirichlet', 'staircase']

    def test_default_K(self, tmp_path):
        code = main(['trajectory', '--N', '16', '--beta', '3', '--eps', '1', '--out', str(tmp_path)])
        assert code == EXIT_OK
        assert _manifest(tmp_path)['headline']['K'] == 4

    def test_assumption_violated(self, tmp_path, capsys):
        code = main(['trajectory', '--N', '3', '--beta', '0.4', '--eps', '1', '--out', str(tmp_path)])
        assert code == EXIT_ASSUMPTION
        assert "requires beta > eps^2/2" in capsys.readouterr().err

    def test_bad_K(self, tmp_path):
        code = main(['trajectory', '--N', '4', '--beta', '1', '--eps', '1', '--K', '4', '--out', str(tmp_path)])
        assert code == EXIT_USAGE

    @pytest.mark.parametrize("flags", [
        ['--N', '0', '--beta', '1', '--eps', '1'],
        ['--N', '4', '--beta', '1', '--eps', '-1'],
        ['--N', '4', '--beta', '-2', '--eps', '1'],
    ])
    def test_malformed_flags_are_usage_errors(self, tmp_path, flags):
        assert main(['trajectory', *flags, '--out', str(tmp_path)]) == EXIT_USAGE


# == 3. validate ==

class TestValidate:

    def test_unknown_suite(self, tmp_path):
        assert main(['validate', '--suite', 'nope', '--out', str(tmp_path)]) == EXIT_USAGE

    def test_report_written(self, tmp_path, monkeypatch, capsys):
        import validation_suite
        fake = [{'name': 'always', 'suite': 'oracle', 'description': '', 'critical': True,
                 'check': lambda seed: {'passed': True, 'measured': seed, 'tolerance': 0}}]
        monkeypatch.setattr(validation_suite, 'VALIDATION_CRITERIA', fake)
        monkeypatch.setenv('SRBRW_SEED', '11')
        assert main(['validate', '--suite', 'oracle', '--out', str(tmp_path)]) == EXIT_OK
        report = json.loads((tmp_path / 'validation_report.json').read_text())
        assert report['seed'] == 11
        assert report['details'][0]['status'] == 'PASS'
        assert "always: PASS" in capsys.readouterr().out

    def test_failure_exit_code(self, tmp_path, monkeypatch):
        import validation_suite
        fake = [{'name': 'never', 'suite': 'mcmc', 'description': '', 'critical': True,
                 'check': lambda seed: {'passed': False, 'measured': 0, 'tolerance': 0}}]
        monkeypatch.setattr(validation_suite, 'VALIDATION_CRITERIA', fake)
        assert main(['validate', '--suite', 'mcmc', '--out', str(tmp_path)]) == EXIT_VALIDATION


# == 4. sample ==

class TestSample:

    ARGS = ['sample', '--N', '1', '--beta', '1', '--eps', '1', '--steps', '2000',
            '--burn-in', '200', '--thin', '4', '--seed', '7']

    def test_outputs(self, tmp_path):
        assert main(self.ARGS + ['--out', str(tmp_path)]) == EXIT_OK
        rows = _rows(tmp_path / 'samples.csv')
        assert len(rows) == 2 * 500
        headline = _manifest(tmp_path)['headline']
        assert headline['kept_samples'] == 500
        assert headline['Z_exact'] == pytest.approx(0.549942, abs=1e-5)
        assert abs(headline['Z_hat'] - headline['Z_exact']) < 5 * headline['Z_std_err']

    def test_same_seed_same_bytes(self, tmp_path):
        main(self.ARGS + ['--out', str(tmp_path / 'a')])
        main(self.ARGS + ['--out', str(tmp_path / 'b')])
        assert (tmp_path / 'a' / 'samples.csv').read_bytes() == (tmp_path / 'b' / 'samples.csv').read_bytes()
        a, b = _manifest(tmp_path / 'a'), _manifest(tmp_path / 'b')
        assert a['headline'] == b['headline']
        assert a['outputs'] == b['outputs']

    def test_cap(self, tmp_path, capsys):
        code = main(['sample', '--N', '12', '--beta', '1', '--eps', '1', '--out', str(tmp_path)])
        assert code == EXIT_USAGE
        assert "sampler capped at N=8" in capsys.readouterr().err

    def test_malformed_flags_are_usage_errors(self, tmp_path):
        assert main(['sample', '--N', '0', '--beta', '1', '--eps', '1', '--out', str(tmp_path)]) == EXIT_USAGE
        assert main(['sample', '--N', '1', '--beta', '1', '--eps', '0',
                     '--out', str(tmp_path)]) == EXIT_USAGE

    def test_exploratory_allows_zero_beta(self, tmp_path):
        args = ['sample', '--N', '2', '--beta', '0', '--eps', '1', '--steps', '1200', '--burn-in', '0',
                '--thin', '6', '--seed', '1', '--out', str(tmp_path)]
        assert main(args) == EXIT_ASSUMPTION
        assert main(args + ['--exploratory']) == EXIT_OK
        assert _manifest(tmp_path)['headline']['Z_hat'] == 1.0
