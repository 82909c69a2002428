import pytest
from fractions import Fraction

from supertau.models.diffpoly import DiffPoly
from supertau.models.errors import UnsupportedOrder
from supertau.models.generators import CENTRAL, even_time, odd_time
from supertau.utils.dispersionless import check_dispersionless_limit
from supertau.utils.kdv import KdvCover
from supertau.utils.spec_import import load_spec
from supertau.utils import virasoro as vir


def _failed(results):
    return [(r.check_id, r.residue) for r in results if not r.passed]


class TestVirasoroCoefficients:

    @pytest.fixture(autouse=True)
    def setup_teardown(self):
        """The one-dimensional manifold."""
        self.spec = load_spec('onedim')
        yield

    def test_kdv_tables(self):
        """L_1 has a = 1/8, L_0 has constant 1/16 and L_{-1} has c = 1/2."""
        assert vir.kdv_coefficients(1, 4).a == {((1, 0), (1, 0)): Fraction(1, 8)}
        assert vir.kdv_coefficients(0, 4).const == Fraction(1, 16)
        assert vir.kdv_coefficients(0, 4).b_of((1, 2), (1, 2)) == Fraction(5, 2)
        assert vir.kdv_coefficients(-1, 4).c == {((1, 0), (1, 0)): Fraction(1, 2)}
        with pytest.raises(UnsupportedOrder):
            vir.kdv_coefficients(-2, 4)

    def test_onedim_tables_match_kdv(self):
        """The even tables of the onedim manifold coincide with the KdV ones."""
        for m in (-1, 0, 1):
            builtin = vir.builtin_coefficients(self.spec, m, 6)
            kdv = vir.kdv_coefficients(m, 6)
            assert builtin.b == kdv.b
            assert builtin.a == kdv.a
            assert builtin.const == kdv.const

    def test_higher_orders_need_a_table(self):
        """Orders m >= 2 are only available from a supplied table."""
        with pytest.raises(UnsupportedOrder):
            vir.builtin_coefficients(self.spec, 2, 6)


class TestVirasoroOperators:

    @pytest.fixture(autouse=True)
    def setup_teardown(self):
        """KdV coefficient family with room for the compositions."""
        self.family = vir.kdv_family(6)
        yield

    def test_resolve_c0(self):
        """c0 is the central generator unless a rational is given."""
        assert vir.resolve_c0(None) == DiffPoly.gen(CENTRAL)
        assert vir.resolve_c0('symbolic') == DiffPoly.gen(CENTRAL)
        assert vir.resolve_c0('1/2') == Fraction(1, 2)

    def test_boundary_term(self):
        """Only [L_{-1}, L_n] with n >= 1 carries the tau_0 term, weighted by c0 - c0^2."""
        half = vir.resolve_c0('1/2')
        assert vir.boundary_term(-1, 2, half) == (1, DiffPoly.constant(Fraction(1, 4)))
        assert vir.boundary_term(1, -1, half) == (0, DiffPoly.constant(Fraction(-1, 4)))
        assert vir.boundary_term(0, 1, half) is None
        assert vir.boundary_term(-1, 1, vir.resolve_c0('0')) is None
        assert vir.boundary_term(-1, 1, vir.resolve_c0('1')) is None

    def test_operator_on_constants(self):
        """L_0 1 = 1/16 and L_{-1} 1 = t_0^2 / (2 eps^2)."""
        c0 = vir.resolve_c0(None)
        assert vir.VirasoroOperator(self.family(0), c0)(DiffPoly.constant(1)) == Fraction(1, 16)
        t0 = DiffPoly.gen(even_time(1, 0))
        expected = (DiffPoly.eps(-2) * t0 * t0).scale(Fraction(1, 2))
        assert vir.VirasoroOperator(self.family(-1), c0)(DiffPoly.constant(1)) == expected

    def test_odd_part(self):
        """L_1 tau_1 = c0 tau_0 and L_{-1} tau_0 = (1 + c0) tau_1 + t_0^2 tau_0 / (2 eps^2)."""
        c0 = vir.resolve_c0(None)
        tau0, tau1 = DiffPoly.gen(odd_time(0)), DiffPoly.gen(odd_time(1))
        assert vir.VirasoroOperator(self.family(1), c0)(tau1) == c0 * tau0
        t0 = DiffPoly.gen(even_time(1, 0))
        expected = (c0 + 1) * tau1 + (DiffPoly.eps(-2) * t0 * t0 * tau0).scale(Fraction(1, 2))
        assert vir.VirasoroOperator(self.family(-1), c0)(tau0) == expected

    @pytest.mark.parametrize('c0', ['0', '1', 'symbolic', '1/2'])
    def test_algebra_closes(self, c0):
        """[L_m, L_n] = (m - n) L_{m+n} up to the tau_0 boundary term."""
        results = vir.verify_virasoro_algebra(self.family, [-1, 0, 1, 2], [1], 2, 2, c0,
                                              degree=2, threads=1)
        assert len(results) == 6
        assert not _failed(results)


class TestVirasoroSymmetries:

    @pytest.fixture(autouse=True)
    def setup_teardown(self):
        """Truncated KdV cover with its Virasoro flows."""
        self.cover = KdvCover(truncation=(2, 2))
        self.flows = vir.VirasoroFlows(self.cover, vir.kdv_family(6), '0')
        yield

    def test_needs_truncation(self):
        """Symmetry flows are only defined on a truncated cover."""
        with pytest.raises(ValueError):
            vir.VirasoroFlows(KdvCover(), vir.kdv_family(6))

    def test_symmetries_commute_with_flows(self):
        """d/ds_0 commutes with the first t- and tau-flows."""
        results = vir.verify_symmetry_commutation(self.flows, [0], 1, 1, threads=1)
        assert results
        assert not _failed(results)

    def test_flow_algebra(self):
        """[d/ds_{-1}, d/ds_0] = d/ds_{-1} on the cover generators."""
        results = vir.verify_flow_algebra(self.flows, [-1, 0], 1, 1, threads=1)
        assert results
        assert not _failed(results)

    def test_flow_algebra_past_largest_order(self):
        """[d/ds_1, d/ds_2] = d/ds_3 is checked even though 3 is not a requested order."""
        results = vir.verify_flow_algebra(self.flows, [1, 2], 1, 1, threads=1)
        assert any(".s1.s2." in r.check_id for r in results)
        assert not _failed(results)

    def test_dispersionless_limit(self):
        """KdV at eps = 0 reproduces the onedim cover."""
        results = check_dispersionless_limit(1, 1, orders=(0,), c0='0', threads=1,
                                             spec=load_spec('onedim'))
        assert results
        assert not _failed(results)
