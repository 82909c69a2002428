import pytest

from supertau.models.diffpoly import DiffPoly
from supertau.models.errors import TruncationTooSmall
from supertau.models.generators import jet
from supertau.utils import frobenius_flows as ff
from supertau.utils.spec_import import load_spec


def _failed(results):
    return [(r.check_id, r.residue) for r in results if not r.passed]


class TestSuperTauCover:

    @pytest.fixture(autouse=True)
    def setup_teardown(self):
        """Covers of the two shipped manifolds."""
        self.onedim = ff.SuperTauCover(load_spec('onedim'))
        self.cp1 = ff.SuperTauCover(load_spec('cp1'))
        yield

    def test_unit_two_point_function(self):
        """Omega_{1,0;1,0} = h_{1,0} = v."""
        assert self.onedim.omega(1, 0, 1, 0) == DiffPoly.gen(jet(1))

    def test_unit_flow_is_translation(self):
        """d/dt^{1,0} acts as dx on every generator."""
        assert not _failed(ff.check_unit_flow(self.onedim, 2, 2, threads=1))

    def test_flows_commute(self):
        """All t- and tau-flows of the onedim cover commute."""
        results = ff.check_commutativity(self.onedim, 1, 1, threads=1)
        assert results
        assert not _failed(results)

    def test_phi_and_delta(self):
        """Phi and Delta are x-antiderivatives of the odd flows of h."""
        assert not _failed(ff.check_phi(self.onedim, 2, 2, threads=1))
        assert not _failed(ff.check_delta(self.onedim, 1, 2, threads=1))

    def test_omega_identities(self):
        """Omega is symmetric and its x-derivative is dh/dt."""
        assert not _failed(ff.check_omega(self.onedim, 2, threads=1))
        assert not _failed(ff.check_omega(self.cp1, 1, threads=1))

    def test_tau_symmetry_cp1(self):
        """dh_{a,p}/dt^{b,q} = dh_{b,q}/dt^{a,p} on cp1."""
        results = ff.check_tau_symmetry(self.cp1, 2, threads=1)
        assert results
        assert not _failed(results)

    def test_truncation_guard(self):
        """Flows beyond the truncation are refused."""
        cover = ff.SuperTauCover(load_spec('onedim'), truncation=(1, 1))
        with pytest.raises(TruncationTooSmall):
            cover.tau_flow(2)
        with pytest.raises(TruncationTooSmall):
            cover.t_flow(1, 2)
