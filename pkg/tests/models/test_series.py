import pytest
from fractions import Fraction

from supertau.models.diffpoly import DiffPoly
from supertau.models.errors import NotInvertible, WindowError
from supertau.models.generators import jet
from supertau.models.series import LaurentJet


class TestLaurentJet:

    @pytest.fixture(autouse=True)
    def setup_teardown(self):
        """1 - lam^{-1}, known down to lam^{-5}."""
        self.series = LaurentJet({(0,): 1, (-1,): -1}, (-5,))
        yield

    def test_invert_geometric_series(self):
        """The inverse of 1 - 1/lam is the geometric series in 1/lam."""
        inverse = self.series.invert()
        for k in range(6):
            assert inverse.coefficient(-k) == DiffPoly.constant(1)
        assert self.series * inverse == LaurentJet({(0,): 1}, (-5,))

    def test_coefficient_below_window(self):
        """Coefficients below the floor are unknown."""
        with pytest.raises(WindowError):
            self.series.coefficient(-6)

    def test_invert_needs_constant_leading_term(self):
        """A leading coefficient that depends on the fields cannot be inverted."""
        series = LaurentJet({(0,): DiffPoly.gen(jet(1)), (-1,): 1}, (-3,))
        with pytest.raises(NotInvertible):
            series.invert()

    def test_split_at_zero(self):
        """split returns the nonnegative and negative parts."""
        series = LaurentJet({(1,): 1, (0,): 2, (-1,): 3}, (-3,))
        plus, minus = series.split()
        assert sorted(plus.coefficients) == [(Fraction(0),), (Fraction(1),)]
        assert plus.floors == (None,)
        assert list(minus.coefficients) == [(Fraction(-1),)]

    def test_half_shift(self):
        """Half-integer exponents mark a half-shifted series."""
        assert LaurentJet({(Fraction(-1, 2),): 1}, (Fraction(-9, 2),)).half_shift
        assert not self.series.half_shift

    def test_shift_moves_floor(self):
        """Multiplying by a power of lam moves both exponents and floor."""
        shifted = self.series.shift(2)
        assert shifted.floors == (Fraction(-3),)
        assert shifted.coefficient(2) == DiffPoly.constant(1)
        assert shifted.coefficient(1) == DiffPoly.constant(-1)
