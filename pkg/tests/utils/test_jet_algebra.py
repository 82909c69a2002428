import pytest
from fractions import Fraction

from supertau.models.diffpoly import DiffPoly
from supertau.models.errors import NotATotalDerivative
from supertau.models.generators import jet, theta
from supertau.utils.jet_algebra import RewriteSystem, antiderivative, is_total_derivative
from supertau.utils.variational import LocalFunctional, variational_derivative


class TestJetAlgebra:

    @pytest.fixture(autouse=True)
    def setup_teardown(self):
        """Free rewrite system and the first few jets of u and theta."""
        self.free = RewriteSystem()
        self.u = [DiffPoly.gen(jet(1, s)) for s in range(4)]
        self.theta = [DiffPoly.gen(theta(1, s)) for s in range(4)]
        yield

    def test_dx_of_free_jets(self):
        """dx raises the derivative order and obeys the graded Leibniz rule."""
        assert self.free.dx(self.u[0] ** 2) == (self.u[0] * self.u[1]).scale(2)
        assert self.free.dx(self.theta[0] * self.theta[1]) == self.theta[0] * self.theta[2]

    def test_antiderivative_recovers_polynomial(self):
        """Integrating dx(p) returns p without its constant."""
        p = (self.u[0] ** 2).scale(Fraction(1, 2)) + self.u[0] * self.theta[0] * self.theta[1]
        assert antiderivative(self.free.dx(p)) == p

    def test_antiderivative_drops_eps_constants(self):
        """Bare eps powers are integration constants and are not recovered."""
        eps2 = DiffPoly.eps(2)
        p = DiffPoly.constant(-3) + eps2 - (eps2 * self.theta[0]).scale(2)
        assert antiderivative(self.free.dx(p)) == p.without_constant()
        assert antiderivative(self.free.dx(p)) == -(eps2 * self.theta[0]).scale(2)

    def test_antiderivative_rejects_non_total_derivative(self):
        """u u'' is not a total derivative."""
        with pytest.raises(NotATotalDerivative):
            antiderivative(self.u[0] * self.u[2])
        assert is_total_derivative(self.u[0] * self.u[2]) == (False, None)

    def test_variational_derivative(self):
        """delta/delta u of u'^2/2 is -u''."""
        density = (self.u[1] ** 2).scale(Fraction(1, 2))
        assert variational_derivative(density, "u", 1) == -self.u[2]

    def test_total_derivative_functional_is_zero(self):
        """A functional whose density is a total derivative vanishes."""
        assert LocalFunctional(self.u[0] * self.u[1]).is_zero()
        assert not LocalFunctional(self.u[0] ** 3).is_zero()
