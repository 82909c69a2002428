"""
Text, JSON and LaTeX renderings of tables and reports.
"""
import json
import logging
from fractions import Fraction

from jinja2 import Environment, PackageLoader

from supertau.models.diffpoly import DiffPoly
from supertau.models.generators import Kind, latex_label
from supertau.models.report import Report

logger = logging.getLogger(__name__)

FORMATS = ("text", "json", "latex")

_environment = None


def template_environment():
    global _environment
    if _environment is None:
        _environment = Environment(loader=PackageLoader("supertau", "templates"),
                                   trim_blocks=True, lstrip_blocks=True, keep_trailing_newline=True)
    return _environment


def poly_latex(poly, field_names=None):
    """LaTeX form of a DiffPoly with rational coefficients written as fractions."""
    if not poly:
        return "0"
    parts = []
    for (even, odd, eps, exps), coeff in poly.sorted_items():
        factors = []
        if eps:
            factors.append(r"\epsilon" if eps == 1 else rf"\epsilon^{{{eps}}}")
        for gen, power in even:
            label = latex_label(gen, field_names)
            factors.append(label if power == 1 else f"{label}^{{{power}}}")
        if exps:
            arg = "+".join(
                (latex_label((Kind.JET, a, 0), field_names) if q == 1
                 else f"{_fraction_latex(q)}{latex_label((Kind.JET, a, 0), field_names)}")
                for a, q in exps)
            factors.append(f"e^{{{arg}}}")
        factors.extend(latex_label(gen, field_names) for gen in odd)
        body = " ".join(factors)
        magnitude = abs(coeff)
        if not body:
            term = _fraction_latex(magnitude)
        elif magnitude.denominator == 1:
            term = body if magnitude == 1 else f"{magnitude.numerator} {body}"
        else:
            top = body if magnitude.numerator == 1 else f"{magnitude.numerator} {body}"
            term = rf"\frac{{{top}}}{{{magnitude.denominator}}}"
        parts.append(("-" if coeff < 0 else "+", term))
    text = parts[0][1] if parts[0][0] == "+" else "-" + parts[0][1]
    for sign, term in parts[1:]:
        text += f" {sign} {term}"
    return text


def _fraction_latex(value):
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return rf"\frac{{{value.numerator}}}{{{value.denominator}}}"


# -- tables -------------------------------------------------------------------

def table_document(name, entries, field_names=None, environment=None):
    """
    Serializable table.

    Args:
        name (str): Table name, e.g. 'cp1.h'
        entries (list): (label, DiffPoly) pairs in display order
        field_names (dict): Optional field labels used by the renderers
    """
    return {
        "table": name,
        "field_names": {str(k): v for k, v in (field_names or {}).items()},
        "environment": environment or {},
        "entries": [{"key": key, "value": value.to_json()} for key, value in entries],
    }


def _table_rows(document):
    names = {int(k): v for k, v in document.get("field_names", {}).items()}
    rows = []
    for entry in document.get("entries", []):
        poly = DiffPoly.from_json(entry["value"])
        rows.append({"key": entry["key"], "text": poly.to_text(names), "latex": poly_latex(poly, names)})
    return rows


def render_table(document, fmt="text"):
    if fmt == "json":
        return json.dumps(document, indent=2, sort_keys=True) + "\n"
    template = template_environment().get_template(f"table.{_suffix(fmt)}")
    return template.render(name=document.get("table", ""), rows=_table_rows(document))


# -- reports ------------------------------------------------------------------

def render_report(report, fmt="text", include_timestamp=True):
    if fmt == "json":
        return report.to_json(include_timestamp) + "\n"
    template = template_environment().get_template(f"report.{_suffix(fmt)}")
    failed = len(report.failures)
    return template.render(report=report, checks=report.checks, failed=failed,
                           passed=len(report.checks) - failed,
                           timestamp=report.timestamp if include_timestamp else None)


def _suffix(fmt):
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt}")
    return "txt" if fmt == "text" else "tex"


def render_document(document, fmt="text", include_timestamp=True):
    """Render a parsed JSON document, either a report or a table."""
    if not document:
        return ""
    if "suite" in document:
        return render_report(Report.from_dict(document), fmt, include_timestamp)
    return render_table(document, fmt)
