import json
import os
import tempfile
import pytest
from click.testing import CliRunner

from supertau import create_engine
from supertau.cli import EXIT_INVALID, cli


class TestEngine:

    def test_testing_config(self):
        """The testing environment uses the small truncations."""
        engine = create_engine('testing')
        assert engine.config['ENVIRONMENT'] == 'testing'
        assert engine.truncation == (2, 2)
        assert engine.config['THREADS'] == 1

    def test_specs_and_covers_are_shared(self):
        """Specs load once per engine and KdV covers are reused per truncation."""
        engine = create_engine('testing')
        assert engine.frobenius('onedim') is engine.frobenius('onedim')
        assert engine.kdv() is engine.kdv()
        assert engine.kdv((2, 2)) is not engine.kdv()
        assert engine.cover('cp1').name == 'cp1'


class TestCli:

    def create_temp_file(self, content, suffix='.json'):
        """Helper to create a temporary file for testing."""
        fd, path = tempfile.mkstemp(suffix=suffix)
        with os.fdopen(fd, 'w') as f:
            f.write(content)
        self.temp_files.append(path)
        return path

    @pytest.fixture(autouse=True)
    def setup_teardown(self):
        """Setup before and teardown after each test."""
        self.runner = CliRunner()
        self.temp_files = []
        yield
        for file_path in self.temp_files:
            if os.path.exists(file_path):
                os.unlink(file_path)

    def invoke(self, *args):
        return self.runner.invoke(cli, ['--env', 'testing'] + list(args))

    def test_validate_builtin(self):
        """Shipped specs validate."""
        result = self.invoke('validate', 'onedim')
        assert result.exit_code == 0, result.output
        assert "onedim is valid" in result.output

    def test_validate_invalid_file(self):
        """A document missing required fields exits with the invalid-spec code."""
        path = self.create_temp_file(json.dumps({"n": 1}))
        result = self.invoke('validate', path)
        assert result.exit_code == EXIT_INVALID
        assert "Missing required field" in result.output

    def test_validate_missing_file(self):
        """A path that does not exist is an invalid spec."""
        result = self.invoke('validate', '/nonexistent/spec.json')
        assert result.exit_code == EXIT_INVALID

    def test_compute_kdv(self):
        """compute kdv prints the Gelfand-Dickey table."""
        result = self.invoke('compute', 'kdv', '--pmax', '0')
        assert result.exit_code == 0, result.output
        assert "R_1 = u" in result.output
        assert "R_2 = 1/2*u^2 + 1/12*eps^2*u''" in result.output

    def test_compute_virasoro_kdv(self):
        """KdV Virasoro coefficients include the L_0 constant."""
        result = self.invoke('compute', 'virasoro', '--spec', 'kdv', '--m', '0', '--pmax', '1')
        assert result.exit_code == 0, result.output
        assert "const_0 = 1/16" in result.output

    def test_compute_then_export(self):
        """A JSON table written by compute re-renders as LaTeX."""
        path = self.create_temp_file("")
        result = self.invoke('compute', 'h', '--spec', 'onedim', '--pmax', '2', '--format', 'json', '--out', path)
        assert result.exit_code == 0, result.output
        exported = self.invoke('export', path, '--format', 'latex')
        assert exported.exit_code == 0, exported.output
        assert r"\frac{v^{3}}{6}" in exported.output

    def test_export_empty_document(self):
        """An empty file exports as an empty document."""
        path = self.create_temp_file("")
        result = self.invoke('export', path)
        assert result.exit_code == 0
        assert result.output == ""

    def test_verify_passes(self):
        """A passing suite exits 0 and reports the suite name."""
        result = self.invoke('verify', 'kdv', '--suite', 'recursion', '--no-timestamp')
        assert result.exit_code == 0, result.output
        assert "suite: kdv/recursion" in result.output

    def test_verify_unknown_suite(self):
        """Unknown suites are usage errors."""
        result = self.invoke('verify', 'kdv', '--suite', 'nope')
        assert result.exit_code == 2

    def test_verify_rejects_bad_c0(self):
        """c0 must be symbolic or rational."""
        result = self.invoke('verify', 'virasoro', '--suite', 'algebra', '--c0', 'abc')
        assert result.exit_code == 2

    def test_compute_kdv_cover_tables(self):
        """Omega, Phi and the flows of the KdV cover are computable targets."""
        omega = self.invoke('compute', 'omega', '--spec', 'kdv', '--pmax', '1')
        assert omega.exit_code == 0, omega.output
        assert "Omega_{0;0} = " in omega.output
        phi = self.invoke('compute', 'phi', '--spec', 'kdv', '--pmax', '1', '--kmax', '1')
        assert phi.exit_code == 0, phi.output
        assert "Phi^1_0 = " in phi.output
        flows = self.invoke('compute', 'flows', '--spec', 'kdv', '--pmax', '1', '--kmax', '1')
        assert flows.exit_code == 0, flows.output
        assert "du/dt" in flows.output

    def test_compute_h_rejects_kdv(self):
        """Density tables need a Frobenius manifold."""
        result = self.invoke('compute', 'h', '--spec', 'kdv')
        assert result.exit_code == 2

    def test_orders_as_a_run_of_values(self):
        """--m takes a run of orders, a comma list or repeated flags alike."""
        run = self.invoke('compute', 'virasoro', '--spec', 'kdv', '--m', '-1', '0', '--pmax', '1')
        assert run.exit_code == 0, run.output
        repeated = self.invoke('compute', 'virasoro', '--spec', 'kdv', '--m', '-1', '--m', '0', '--pmax', '1')
        comma = self.invoke('compute', 'virasoro', '--spec', 'kdv', '--m', '-1,0', '--pmax', '1')
        assert run.output == repeated.output == comma.output
        assert "const_0 = 1/16" in run.output

    def test_orders_reject_non_integers(self):
        """A non-integer order is a usage error."""
        result = self.invoke('compute', 'virasoro', '--spec', 'kdv', '--m', 'x')
        assert result.exit_code == 2
