import pytest
from fractions import Fraction

from supertau.models.diffpoly import DiffPoly
from supertau.models.errors import DegreeError, DimensionMismatch
from supertau.models.generators import jet, theta
from supertau.utils.kdv import FREE, check_kdv_poisson_pair, kdv_R, kdv_poisson_pair, p1_operator
from supertau.utils.spec_import import load_spec
from supertau.utils.variational import (
    LocalFunctional, apply_operator, check_bracket_flow_compatibility, check_poisson_pair, hamiltonian_operator,
    hydrodynamic_pair, variational_derivative,
)


class TestHamiltonianOperators:

    @pytest.fixture(autouse=True)
    def setup_teardown(self):
        """KdV Poisson pair and the generator u."""
        self.P0, self.P1 = kdv_poisson_pair()
        self.u = DiffPoly.gen(jet(1))
        yield

    def test_p0_is_dx(self):
        """P0 reads off as the operator d/dx."""
        op = hamiltonian_operator(self.P0)
        assert op.n == 1
        assert op.entry(1, 1) == [DiffPoly.zero(), DiffPoly.constant(1)]
        assert apply_operator(op, [self.u]) == [FREE.dx(self.u)]

    def test_p1_matches_second_operator(self):
        """P1 applied to R_n agrees with u f' + u' f / 2 + (eps^2/8) f'''."""
        op = hamiltonian_operator(self.P1)
        assert op.entry(1, 1)[1] == self.u
        assert op.entry(1, 1)[3] == DiffPoly.eps(2).scale(Fraction(1, 8))
        for n in range(3):
            assert apply_operator(op, [kdv_R(n)]) == [p1_operator(kdv_R(n))]

    def test_pair_is_compatible(self):
        """All three Schouten brackets of the KdV pair vanish."""
        results = check_kdv_poisson_pair()
        assert len(results) == 3
        assert all(r.passed for r in results), [r.residue for r in results if not r.passed]

    def test_degree_and_size_errors(self):
        """Only bivectors have operators and vectors must match their size."""
        with pytest.raises(DegreeError):
            hamiltonian_operator(LocalFunctional(DiffPoly.gen(theta(1)), 1))
        op = hamiltonian_operator(self.P0)
        with pytest.raises(DimensionMismatch):
            apply_operator(op, [self.u, self.u])


class TestHydrodynamicPair:

    @pytest.fixture(autouse=True)
    def setup_teardown(self):
        """Hydrodynamic Poisson pair of cp1, whose potential carries exp(v2)."""
        self.spec = load_spec('cp1')
        self.P0, self.P1 = hydrodynamic_pair(self.spec)
        yield

    def test_exponential_only_field(self):
        """A field that only appears inside an exponential still has a variational derivative."""
        density = DiffPoly.exp({2: 1})
        assert variational_derivative(density, "u", 2) == density
        assert variational_derivative(density, "theta", 2) == DiffPoly.zero()
        assert LocalFunctional(density).fields == {2}
        assert not LocalFunctional(density).is_zero()

    def test_pair_is_compatible(self):
        """[P0,P0], [P0,P1] and [P1,P1] vanish on cp1."""
        results = check_poisson_pair(self.P0, self.P1, label="cp1.poisson")
        assert all(r.passed for r in results), [(r.check_id, r.residue) for r in results if not r.passed]

    def test_bracket_flow_compatibility(self):
        """The flow of [P0,P1] is the graded commutator of the two flows."""
        result = check_bracket_flow_compatibility(self.P0, self.P1, label="cp1.poisson")
        assert result.passed, result.residue


class TestLocalFunctional:

    def test_scalar_density_is_not_zero(self):
        """Integrals of bare eps powers are nonzero constants."""
        assert not LocalFunctional(DiffPoly.monomial(1, eps=2)).is_zero()
        assert not LocalFunctional(DiffPoly.monomial(3, eps=2)).is_zero()
        assert LocalFunctional(DiffPoly.zero()).is_zero()

    def test_total_derivative_with_eps_is_zero(self):
        """eps^2 u' integrates to zero."""
        u1 = DiffPoly.gen(jet(1, 1))
        assert LocalFunctional(DiffPoly.eps(2) * u1).is_zero()
