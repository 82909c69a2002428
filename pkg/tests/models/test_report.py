import json
import pytest

from supertau.models.report import CheckResult, FAIL, PASS, Report


class TestReport:

    @pytest.fixture(autouse=True)
    def setup_teardown(self):
        """A report with one passing and one failing check."""
        self.report = Report(suite="kdv/recursion", checks=[
            CheckResult("kdv.recursion.R2", PASS, 0.01),
            CheckResult("kdv.recursion.R1", FAIL, 0.02, residue="u'"),
        ], environment={"pmax": 2})
        yield

    def test_exit_code_and_failures(self):
        """A single failing check fails the whole report."""
        assert not self.report.passed
        assert self.report.exit_code == 1
        assert [c.check_id for c in self.report.failures] == ["kdv.recursion.R1"]

    def test_sort_orders_by_id(self):
        """Checks are reported in id order."""
        ids = [c.check_id for c in self.report.sort().checks]
        assert ids == ["kdv.recursion.R1", "kdv.recursion.R2"]

    def test_json_without_timestamp(self):
        """The timestamp is optional in the JSON form."""
        self.report.timestamp = "2024-01-01T00:00:00+00:00"
        data = json.loads(self.report.to_json(include_timestamp=False))
        assert "timestamp" not in data
        assert data["passed"] is False
        restored = Report.from_json(self.report.to_json())
        assert restored.timestamp == self.report.timestamp
        assert restored.failures[0].residue == "u'"

    def test_empty_report_passes(self):
        """A report without checks exits cleanly."""
        assert Report(suite="empty").exit_code == 0
