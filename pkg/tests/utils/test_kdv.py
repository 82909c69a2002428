import pytest
from fractions import Fraction

from supertau.models.diffpoly import DiffPoly
from supertau.models.generators import jet, theta
from supertau.utils.frobenius_flows import check_commutativity
from supertau.utils.kdv import KdvCover, check_recursion, gamma_ratio, kdv_R


class TestKdv:

    @pytest.fixture(autouse=True)
    def setup_teardown(self):
        """A KdV cover without truncation."""
        self.cover = KdvCover()
        self.u = DiffPoly.gen(jet(1))
        self.eps2 = DiffPoly.eps(2)
        yield

    def test_first_gelfand_dickey_polynomials(self):
        """R_1 = u and R_2 = u^2/2 + eps^2 u''/12."""
        assert kdv_R(0) == 1
        assert kdv_R(1) == self.u
        expected = (self.u ** 2).scale(Fraction(1, 2)) + (self.eps2 * DiffPoly.gen(jet(1, 2))).scale(Fraction(1, 12))
        assert kdv_R(2) == expected

    def test_gamma_ratio(self):
        """Gamma(j + 1/2) / Gamma(1/2) for small j."""
        assert gamma_ratio(-1) == 0
        assert gamma_ratio(0) == 1
        assert gamma_ratio(2) == Fraction(3, 4)

    def test_recursion_checks_pass(self):
        """The recursion and Hamiltonian checks hold for the first levels."""
        results = check_recursion(3, threads=1)
        assert results
        assert all(r.passed for r in results), [r.residue for r in results if not r.passed]

    def test_first_flows_on_u(self):
        """du/dt_0 = u', du/dt_1 = R_2' and du/dtau_0 = theta'."""
        assert self.cover.t_flow(1, 0)(self.u) == DiffPoly.gen(jet(1, 1))
        assert self.cover.t_flow(1, 1)(self.u) == self.cover.system.dx(kdv_R(2))
        assert self.cover.tau_flow(0)(self.u) == DiffPoly.gen(theta(1, 1))

    def test_flows_commute(self):
        """t- and tau-flows commute on u, sigma_k and f_p."""
        results = check_commutativity(self.cover, 1, 1, threads=1)
        assert results
        failed = [(r.check_id, r.residue) for r in results if not r.passed]
        assert not failed, failed
