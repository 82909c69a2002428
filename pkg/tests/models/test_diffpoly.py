import pytest
from fractions import Fraction

from supertau.models.diffpoly import DiffPoly
from supertau.models.generators import even_time, jet, odd_time, theta


class TestDiffPoly:

    @pytest.fixture(autouse=True)
    def setup_teardown(self):
        """Common generators for each test."""
        self.u = DiffPoly.gen(jet(1))
        self.u1 = DiffPoly.gen(jet(1, 1))
        self.theta = DiffPoly.gen(theta(1))
        self.theta1 = DiffPoly.gen(theta(1, 1))
        yield

    def test_odd_generators_anticommute(self):
        """Odd generators square to zero and change sign when swapped."""
        assert not self.theta * self.theta
        assert self.theta * self.theta1 == -(self.theta1 * self.theta)

    def test_even_generators_commute(self):
        """Even products do not depend on the order of factors."""
        assert self.u * self.u1 == self.u1 * self.u
        assert self.u * self.theta == self.theta * self.u

    def test_left_derivative_of_odd_generator(self):
        """The odd partial derivative acts from the left."""
        product = self.theta * self.theta1
        assert product.partial(theta(1)) == self.theta1
        assert product.partial(theta(1, 1)) == -self.theta

    def test_even_partial_derivative(self):
        """d/du of u^3/6 is u^2/2."""
        cube = (self.u ** 3).scale(Fraction(1, 6))
        assert cube.partial(jet(1)) == (self.u ** 2).scale(Fraction(1, 2))

    def test_constants(self):
        """Constants compare equal to plain numbers."""
        value = DiffPoly.constant(Fraction(3, 4))
        assert value.is_constant()
        assert value == Fraction(3, 4)
        assert DiffPoly.zero() == 0
        assert not (self.u + 1).is_constant()
        assert (self.u + 1).constant_term() == 1
        assert (self.u + 1).without_constant() == self.u

    def test_text_uses_field_names(self):
        """Plain text rendering uses the supplied field names."""
        half_square = (self.u ** 2).scale(Fraction(1, 2))
        assert half_square.to_text({1: 'u'}) == "1/2*u^2"
        assert (self.u - self.u1).to_text({1: 'u'}) == "u - u'"
        assert DiffPoly.zero().to_text() == "0"

    def test_json_keeps_signs_of_odd_monomials(self):
        """Serialized polynomials come back with their odd ordering signs."""
        value = (self.u * self.theta1 * self.theta).scale(Fraction(-2, 3)) + DiffPoly.eps(2)
        assert DiffPoly.from_json(value.to_json()) == value

    def test_substitute_even_generator(self):
        """Substitution replaces every power of the generator."""
        value = self.u ** 2 + self.u1
        result = value.substitute(jet(1), DiffPoly.constant(2))
        assert result == self.u1 + 4

    def test_at_eps_zero(self):
        """The dispersionless part drops positive eps powers and rejects negative ones."""
        value = self.u + DiffPoly.eps(2) * self.u1
        assert value.at_eps_zero() == self.u
        with pytest.raises(ValueError):
            (DiffPoly.eps(-2) * self.u).at_eps_zero()

    def test_split_times(self):
        """Terms are grouped by their explicit time part."""
        t0 = DiffPoly.gen(even_time(1, 0))
        tau1 = DiffPoly.gen(odd_time(1))
        value = t0 * self.u + t0 * self.u1 + self.theta * tau1
        groups = value.split_times()
        assert groups[(((even_time(1, 0), 1),), ())] == self.u + self.u1
        assert groups[((), (odd_time(1),))] == self.theta

    def test_without_constant_drops_eps_powers(self):
        """Generator-free terms go regardless of their eps power; exponentials stay."""
        p = DiffPoly.constant(-3) + DiffPoly.eps(2) - (DiffPoly.eps(2) * self.theta).scale(2)
        assert p.has_scalar_terms()
        assert p.without_constant() == -(DiffPoly.eps(2) * self.theta).scale(2)
        assert not DiffPoly.exp({2: 1}).has_scalar_terms()
        assert DiffPoly.exp({2: 1}).without_constant() == DiffPoly.exp({2: 1})
