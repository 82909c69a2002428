"""
The KdV super tau-cover at eps = 0 against the cover of the one-dimensional
Frobenius manifold. Generator tuples coincide, so images compare directly.
"""
import logging

from supertau.models.diffpoly import DiffPoly
from supertau.models.generators import jet, sigma
from supertau.utils.batch import run_checks
from supertau.utils.frobenius_flows import SuperTauCover, _label, _residue
from supertau.utils.kdv import KdvCover, kdv_poisson_pair
from supertau.utils.spec_import import load_spec
from supertau.utils.variational import dp_flow
from supertau.utils.virasoro import VirasoroFlows, builtin_family, kdv_family

logger = logging.getLogger(__name__)


def limit_residue(dispersive, dispersionless):
    return _residue(dispersive.at_eps_zero() - dispersionless)


def _gen_label(gen):
    return "_".join(str(x) for x in gen)


def check_dispersionless_limit(pmax, kmax, orders=(-1, 0, 1), c0=None, threads=None, spec=None):
    """
    Flows, Omega, Phi and Virasoro symmetries of KdV reduce to those of the onedim cover.

    Args:
        pmax (int): Largest t-flow and one-point index compared
        kmax (int): Largest tau-flow and sigma index compared
        orders: Virasoro orders whose symmetries are compared
        c0: Odd Virasoro constant, symbolic when None
        spec (FrobeniusSpec): the onedim manifold, loaded when omitted
    """
    spec = spec or load_spec("onedim")
    truncation = (pmax + 1, kmax + 1)
    kdv = KdvCover(truncation=truncation)
    onedim = SuperTauCover(spec, truncation=truncation)
    levels = truncation[0] + 4
    kdv_sym = VirasoroFlows(kdv, kdv_family(levels), c0)
    dl_sym = VirasoroFlows(onedim, builtin_family(spec, onedim.tables, levels), c0)
    targets = onedim.targets(pmax, kmax)
    checks = []

    pairs = [(kdv.t_flow(1, n), onedim.t_flow(1, n)) for n in range(pmax + 1)]
    pairs += [(kdv.tau_flow(k), onedim.tau_flow(k)) for k in range(kmax + 1)]
    pairs += [(kdv_sym.flow(m), dl_sym.flow(m)) for m in orders]
    for dispersive, dispersionless in pairs:
        for gen in targets:
            checks.append((f"limit.{_label(dispersive.name)}.{_gen_label(gen)}",
                           lambda d=dispersive, e=dispersionless, g=gen: limit_residue(
                               d(DiffPoly.gen(g)), e(DiffPoly.gen(g)))))

    for p in range(pmax + 1):
        for q in range(pmax + 1):
            checks.append((f"limit.omega.{p}{q}", lambda p=p, q=q: limit_residue(
                kdv.omega(1, p, 1, q), onedim.omega(1, p, 1, q))))
        for n in range(kmax + 1):
            checks.append((f"limit.phi.{p}{n}", lambda p=p, n=n: limit_residue(
                kdv.phi_value(1, p, n), onedim.phi_value(1, p, n))))

    checks.extend(hamiltonian_flow_checks(kdv))
    return run_checks(checks, threads)


def hamiltonian_flow_checks(kdv):
    """tau_0 and tau_1 on u and theta agree with the flows of P0 and P1 at full eps."""
    checks = []
    P0, P1 = kdv_poisson_pair()
    for k, P in ((0, P0), (1, P1)):
        bracket = dp_flow(P, system=kdv.system)
        flow = kdv.tau_flow(k, check=False)
        for gen in (jet(1), sigma(1, 0)):
            checks.append((f"kdv.hamiltonian-flow.tau{k}.{_gen_label(gen)}",
                           lambda b=bracket, f=flow, g=gen: _residue(
                               kdv.system.normalize(b(DiffPoly.gen(g)) - f(DiffPoly.gen(g))))))
    return checks
