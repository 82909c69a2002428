import random
import pytest

from supertau import create_engine
from supertau.utils import properties
from supertau.utils.spec_import import load_spec
from supertau.utils.suites import SUITES, SuiteOptions, resonance_check, run_suite


class TestSuites:

    @pytest.fixture(autouse=True)
    def setup_teardown(self):
        """Engine with the small testing configuration."""
        self.engine = create_engine('testing')
        yield

    def test_options_from_config(self):
        """None overrides keep the configured value."""
        options = SuiteOptions.from_config(self.engine.config, pmax=None, kmax=5, orders=None)
        assert options.pmax == 2
        assert options.kmax == 5
        assert options.orders == [-1, 0, 1]
        assert options.environment()['K'] == 2

    def test_manifest_targets(self):
        """Every command-line target has at least one suite."""
        assert sorted(SUITES) == ['frobenius', 'kdv', 'limit', 'properties', 'virasoro']
        assert all(SUITES[target] for target in SUITES)

    def test_unknown_suite(self):
        """Unknown names raise KeyError."""
        options = SuiteOptions.from_config(self.engine.config)
        with pytest.raises(KeyError):
            run_suite(self.engine, 'kdv', 'nope', options)
        with pytest.raises(KeyError):
            run_suite(self.engine, 'nope', 'all', options)

    def test_kdv_recursion_suite(self):
        """The recursion suite passes and returns checks in id order."""
        options = SuiteOptions.from_config(self.engine.config)
        results = run_suite(self.engine, 'kdv', 'recursion', options)
        ids = [r.check_id for r in results]
        assert ids == sorted(ids)
        assert all(r.passed for r in results), [r.residue for r in results if not r.passed]

    def test_resonance_matches_document(self):
        """cp1 resonates exactly at (1, 1); a wrong expectation fails the check."""
        cp1 = load_spec('cp1')
        assert cp1.resonance == [(1, 1)]
        result = resonance_check(cp1, 3)
        assert result.passed
        assert result.details["pairs"] == [[1, 1]]
        assert resonance_check(cp1, 0).passed
        assert resonance_check(load_spec('onedim'), 3).passed
        cp1.resonance = []
        failed = resonance_check(cp1, 3)
        assert not failed.passed
        assert "expected []" in failed.residue


class TestProperties:

    @pytest.fixture(autouse=True)
    def setup_teardown(self):
        """Seeded generator shared by the single-property tests."""
        self.rng = random.Random(properties.DEFAULT_SEED)
        yield

    def test_random_poly_is_reproducible(self):
        """The same seed draws the same polynomial."""
        first = properties.random_poly(random.Random(7))
        second = properties.random_poly(random.Random(7))
        assert first == second

    def test_random_poly_odd_degree(self):
        """A fixed odd degree holds for every monomial."""
        for _ in range(20):
            poly = properties.random_poly(self.rng, odd_degree=1)
            assert poly.odd_degrees() <= {1}

    def test_properties_hold(self):
        """Every property survives a small number of random cases."""
        results = properties.check_properties(cases=20, threads=1)
        assert len(results) == len(properties.PROPERTIES)
        assert all(r.passed for r in results), [(r.check_id, r.residue) for r in results if not r.passed]

    def test_normal_forms_ignore_bracketing(self):
        """Products normalize the same way however they are bracketed or rewritten."""
        for seed in range(5):
            assert properties.normal_form_confluence(random.Random(seed)) is None

    def test_antiderivative_property_with_eps_constants(self):
        """The antiderivative property holds on the seed that draws a bare eps^2 term."""
        assert properties.antiderivative_inverts_dx(random.Random(properties.DEFAULT_SEED)) is None
        for _ in range(20):
            assert properties.antiderivative_inverts_dx(self.rng) is None
