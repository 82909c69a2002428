"""
Suite manifest: target -> suite name -> check builder.

A builder takes (engine, options) and returns a list of CheckResults. New
identities are registered here; the command line only looks names up.
"""
import copy
import logging
from dataclasses import dataclass, field

from supertau.models.report import CheckResult, FAIL, PASS
from supertau.utils import frobenius_flows as ff
from supertau.utils.batch import run_checks
from supertau.utils.dispersionless import check_dispersionless_limit
from supertau.utils.frobenius_tables import FrobeniusTables, detect_resonance
from supertau.utils.kdv import KdvCover, check_kdv_poisson_pair, check_recursion
from supertau.utils.kdv_series import check_generating_identities, check_zero_curvature
from supertau.utils.properties import check_properties
from supertau.utils.variational import (
    check_bracket_flow_compatibility, check_flat_exactness, check_poisson_pair, hydrodynamic_pair,
)
from supertau.utils import virasoro as vir

logger = logging.getLogger(__name__)


@dataclass
class SuiteOptions:
    spec: str = "onedim"
    pmax: int = 3
    kmax: int = 3
    P: int = 4
    K: int = 4
    window: int = 6
    nmax: int = 3
    mmax: int = 3
    orders: list = field(default_factory=lambda: [-1, 0, 1])
    c0: str = vir.SYMBOLIC
    threads: int = None
    cases: int = None

    @classmethod
    def from_config(cls, config, **overrides):
        options = cls(pmax=config['PMAX'], kmax=config['KMAX'], P=config['TRUNCATION_P'],
                      K=config['TRUNCATION_K'], window=config['SERIES_WINDOW'],
                      nmax=config['PMAX'], mmax=config['KMAX'], c0=config['C0'],
                      threads=config['THREADS'], cases=config['PROPERTY_CASES'])
        for key, value in overrides.items():
            if value is not None:
                setattr(options, key, value)
        return options

    def environment(self):
        return {"spec": self.spec, "pmax": self.pmax, "kmax": self.kmax, "P": self.P, "K": self.K,
                "window": self.window, "orders": list(self.orders), "c0": str(self.c0)}


# -- frobenius -----------------------------------------------------------------

def _cover(engine, options, truncation=None):
    return engine.cover(options.spec, truncation=truncation)


def frobenius_h_golden(engine, options):
    """Solved h levels reproduce the h_table shipped in the manifold document."""
    spec = engine.frobenius(options.spec)
    bare = copy.copy(spec)
    bare.h_table = {}
    solved = FrobeniusTables(bare)
    checks = []
    for (alpha, p), expected in sorted(spec.h_table.items()):
        checks.append((f"{spec.name}.h.golden.{alpha}{p}",
                       lambda a=alpha, p=p, e=expected: ff._residue(solved.h(a, p) - e)))
    results = run_checks(checks, options.threads)
    return FrobeniusTables(spec).check_h(options.pmax) + results


def frobenius_flows(engine, options):
    cover = _cover(engine, options)
    threads = options.threads
    return (ff.check_commutativity(cover, options.pmax, options.kmax, threads)
            + ff.check_tau_symmetry(cover, options.pmax, threads)
            + ff.check_omega(cover, options.pmax, threads)
            + ff.check_unit_flow(cover, options.pmax, options.kmax, threads)
            + ff.check_rewrite_compatibility(cover, options.pmax, options.kmax, threads))


def resonance_check(spec, pmax):
    """Detected resonant pairs against the ones the manifold document lists, up to pmax."""
    found = detect_resonance(spec, pmax)
    details = {"pairs": [list(x) for x in found]}
    if spec.resonance is None:
        return CheckResult(f"{spec.name}.resonance", PASS, details=details)
    expected = [pair for pair in spec.resonance if pair[1] <= pmax]
    details["expected"] = [list(x) for x in expected]
    if sorted(found) == expected:
        return CheckResult(f"{spec.name}.resonance", PASS, details=details)
    return CheckResult(f"{spec.name}.resonance", FAIL, residue=f"found {found}, expected {expected}", details=details)


def frobenius_phi(engine, options):
    cover = _cover(engine, options)
    results = (ff.check_phi(cover, options.pmax, options.kmax, options.threads)
               + ff.check_delta(cover, options.pmax, options.kmax, options.threads))
    results.append(resonance_check(cover.spec, options.pmax))
    return results


def frobenius_poisson(engine, options):
    spec = engine.frobenius(options.spec)
    P0, P1 = hydrodynamic_pair(spec)
    return (check_poisson_pair(P0, P1, label=f"{spec.name}.poisson")
            + [check_flat_exactness(spec),
               check_bracket_flow_compatibility(P0, P1, label=f"{spec.name}.poisson")])


# -- kdv -------------------------------------------------------------------------

def kdv_recursion(engine, options):
    return check_recursion(options.pmax + 2, options.threads) + check_kdv_poisson_pair()


def kdv_commutativity(engine, options):
    return ff.check_commutativity(engine.kdv(), options.pmax, options.kmax, options.threads)


def kdv_series(engine, options):
    return check_generating_identities(engine.kdv(), options.window, options.threads)


def kdv_zero_curvature(engine, options):
    return check_zero_curvature(engine.kdv(), options.nmax, options.mmax, options.window, options.threads)


# -- virasoro --------------------------------------------------------------------

def _levels(options):
    return options.P + 4


def virasoro_algebra(engine, options):
    spec = engine.frobenius(options.spec)
    tables = FrobeniusTables(spec)
    family = vir.builtin_family(spec, tables, _levels(options))
    results = vir.verify_virasoro_algebra(family, options.orders, spec.fields, options.P, options.K,
                                          options.c0, threads=options.threads)
    for m in options.orders:
        results += vir.verify_euler_omega_identity(spec, tables, family(m), options.pmax, options.threads)
    return results


def virasoro_symmetries(engine, options):
    truncation = (options.P, options.K)
    cover = _cover(engine, options, truncation)
    spec = cover.spec
    family = vir.builtin_family(spec, cover.tables, _levels(options))
    flows = vir.VirasoroFlows(cover, family, options.c0)
    pmax, kmax = min(options.pmax, options.P), min(options.kmax, options.K)
    return (vir.verify_symmetry_commutation(flows, options.orders, pmax, kmax, options.threads)
            + vir.verify_flow_algebra(flows, options.orders, pmax, kmax, options.threads)
            + vir.verify_ab_identities(flows, spec, options.orders, options.threads))


def kdv_virasoro(engine, options):
    """KdV operators and symmetries, m up to 2 by default."""
    orders = sorted(set(options.orders) | {2})
    family = vir.kdv_family(_levels(options))
    results = vir.verify_virasoro_algebra(family, orders, [1], options.P, options.K, options.c0,
                                          threads=options.threads)
    cover = KdvCover(truncation=(options.P, options.K))
    flows = vir.VirasoroFlows(cover, family, options.c0)
    pmax, kmax = min(options.pmax, options.P), min(options.kmax, options.K)
    return (results
            + vir.verify_symmetry_commutation(flows, orders, pmax, kmax, options.threads)
            + vir.verify_flow_algebra(flows, orders, pmax, kmax, options.threads))


def dispersionless(engine, options):
    return check_dispersionless_limit(options.pmax, options.kmax, options.orders, options.c0,
                                      options.threads, spec=engine.frobenius("onedim"))


def properties(engine, options):
    return check_properties(options.cases, threads=options.threads)


SUITES = {
    "frobenius": {
        "h": frobenius_h_golden,
        "flows": frobenius_flows,
        "phi": frobenius_phi,
        "poisson": frobenius_poisson,
    },
    "kdv": {
        "recursion": kdv_recursion,
        "commutativity": kdv_commutativity,
        "series": kdv_series,
        "zero-curvature": kdv_zero_curvature,
    },
    "virasoro": {
        "algebra": virasoro_algebra,
        "symmetries": virasoro_symmetries,
        "kdv": kdv_virasoro,
    },
    "limit": {
        "dispersionless": dispersionless,
    },
    "properties": {
        "random": properties,
    },
}


def suite_names(target):
    return sorted(SUITES[target])


def run_suite(engine, target, suite, options):
    """
    Run one suite, or every suite of a target when `suite` is 'all'.

    Returns:
        list: CheckResults ordered by check id
    """
    if target not in SUITES:
        raise KeyError(f"unknown target {target}")
    names = suite_names(target) if suite in (None, "all") else [suite]
    results = []
    for name in names:
        if name not in SUITES[target]:
            raise KeyError(f"unknown suite {target}/{name}")
        logger.info(f"Running suite {target}/{name}")
        results.extend(SUITES[target][name](engine, options))
    failed = sum(1 for r in results if r.status == FAIL)
    logger.info(f"{target}/{suite or 'all'}: {len(results) - failed} passed, {failed} failed")
    return sorted(results, key=lambda r: r.check_id)
