import json
import pytest
from fractions import Fraction

from supertau.models.diffpoly import DiffPoly
from supertau.models.generators import jet
from supertau.models.report import CheckResult, FAIL, PASS, Report
from supertau.utils.export import poly_latex, render_document, render_report, render_table, table_document
from supertau.utils.kdv import kdv_R


class TestExport:

    @pytest.fixture(autouse=True)
    def setup_teardown(self):
        """A small R table and a report with one failure."""
        self.document = table_document('kdv.R', [("R_1", kdv_R(1)), ("R_2", kdv_R(2))], {1: 'u'})
        self.report = Report(suite="kdv/recursion", checks=[
            CheckResult("a", FAIL, residue="u'"),
            CheckResult("b", PASS),
        ])
        yield

    def test_poly_latex_fractions(self):
        """Rational coefficients are written with frac."""
        assert poly_latex(kdv_R(2), {1: 'u'}) == r"\frac{u^{2}}{2} + \frac{\epsilon^{2} u''}{12}"
        assert poly_latex(DiffPoly.zero()) == "0"
        assert poly_latex(DiffPoly.gen(jet(1)).scale(Fraction(-3)), {1: 'u'}) == "-3 u"

    def test_table_formats(self):
        """The same table renders as text, LaTeX and JSON."""
        text = render_table(self.document, 'text')
        assert "R_1 = u" in text
        assert "R_2 = 1/2*u^2 + 1/12*eps^2*u''" in text
        latex = render_table(self.document, 'latex')
        assert r"\begin{align*}" in latex
        assert r"\frac{u^{2}}{2}" in latex
        assert json.loads(render_table(self.document, 'json'))['table'] == 'kdv.R'

    def test_report_text(self):
        """Failed checks list their residue."""
        text = render_report(self.report, 'text', include_timestamp=False)
        assert "[FAIL] a" in text
        assert "residue: u'" in text
        assert "1 passed, 1 failed" in text

    def test_render_document_dispatch(self):
        """Parsed documents render as reports or tables; empty ones render as nothing."""
        assert render_document({}) == ""
        report_json = json.loads(self.report.to_json())
        assert "[PASS] b" in render_document(report_json, 'text')
        assert "R_1 = u" in render_document(json.loads(render_table(self.document, 'json')))

    def test_unknown_format(self):
        """Only text, json and latex are supported."""
        with pytest.raises(ValueError):
            render_table(self.document, 'yaml')
