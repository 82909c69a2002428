import copy
import pytest
from fractions import Fraction

from supertau.models.diffpoly import DiffPoly
from supertau.models.errors import ValidationError
from supertau.models.generators import jet
from supertau.utils.frobenius_tables import FrobeniusTables, detect_resonance
from supertau.utils.spec_import import (
    load_spec, read_document, resolve_spec_path, spec_hash, try_load_spec, validate_spec_document,
)


class TestSpecImport:

    @pytest.fixture(autouse=True)
    def setup_teardown(self):
        """Parsed copy of the one-dimensional spec document."""
        self.document = read_document(resolve_spec_path('onedim'))
        yield

    def test_builtin_specs_load(self):
        """Both shipped specs satisfy every Frobenius identity."""
        onedim = load_spec('onedim')
        cp1 = load_spec('cp1')
        assert onedim.n == 1
        assert cp1.n == 2
        assert onedim.hash == spec_hash(self.document)

    def test_missing_fields_are_critical(self):
        """A document without the required fields is rejected."""
        results = validate_spec_document({'n': 1})
        assert "Missing required field 'd'" in results['critical_errors']
        spec, results = try_load_spec({'n': 1})
        assert spec is None
        assert results['critical_errors']

    def test_unknown_field_warns(self):
        """Unknown keys only produce a warning."""
        self.document['colour'] = 'blue'
        results = validate_spec_document(self.document)
        assert not results['critical_errors']
        assert "Unknown field 'colour' ignored" in results['warnings']

    def test_violated_charge_names_identity(self):
        """mu_1 must equal -d/2."""
        self.document['mu'] = ["1"]
        with pytest.raises(ValidationError) as error:
            load_spec(self.document)
        assert error.value.identity == 'mu-charge'

    def test_h_table_of_onedim(self):
        """h_{1,p} = v^{p+1} / (p+1)!."""
        tables = FrobeniusTables(load_spec('onedim'))
        v = DiffPoly.gen(jet(1))
        assert tables.h(1, 0) == v
        assert tables.h(1, 2) == (v ** 3).scale(Fraction(1, 6))

    def test_solved_h_matches_shipped_table(self):
        """Solving the h recursion reproduces the stored densities."""
        spec = load_spec('onedim')
        bare = copy.copy(spec)
        bare.h_table = {}
        solved = FrobeniusTables(bare)
        for (alpha, p), expected in spec.h_table.items():
            assert solved.h(alpha, p) == expected

    def test_resonance_detection(self):
        """cp1 resonates at (1, 1) since mu_1 = -1/2; onedim never does."""
        assert detect_resonance(load_spec('onedim'), 3) == []
        assert detect_resonance(load_spec('cp1'), 3) == [(1, 1)]

    def test_asymmetric_virasoro_table_rejected(self):
        """Supplied Virasoro tables need symmetric a and c entries."""
        self.document['virasoro_coefficients'] = {
            "0": {"m": 0, "a": [[[1, 0], [1, 1], "1"]]},
        }
        with pytest.raises(ValidationError) as error:
            load_spec(self.document)
        assert error.value.identity == 'virasoro-symmetric'
