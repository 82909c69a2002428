"""
Randomized property checks of the jet-algebra machinery.

Every property draws its cases from a seeded random.Random so a failing case
can be replayed from the witness.
"""
import logging
import os
import random

from supertau.models.diffpoly import DiffPoly
from supertau.models.generators import jet, sigma
from supertau.utils.batch import run_checks
from supertau.utils.jet_algebra import RewriteSystem, antiderivative
from supertau.utils.kdv import KdvCover
from supertau.utils.variational import variational_derivative

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20160901


def property_cases(default=1000):
    return int(os.environ.get("SUPERTAU_PROPERTY_CASES", default))


def random_poly(rng, odd_degree=None, max_terms=3, max_order=2, sigma_levels=0, eps=True):
    """
    A random polynomial in u-jets and sigma-jets.

    Args:
        rng (random.Random): Source of randomness
        odd_degree (int): Fix the number of odd factors per monomial
        max_terms (int): Upper bound on the number of monomials
        max_order (int): Largest x-derivative order of a jet
        sigma_levels (int): Largest sigma level used; 0 means theta only
        eps (bool): Allow powers of eps^2
    """
    total = DiffPoly.zero()
    for _ in range(rng.randint(1, max_terms)):
        even = [(jet(1, rng.randint(0, max_order)), rng.randint(1, 2))
                for _ in range(rng.randint(0, 2))]
        degree = rng.randint(0, 2) if odd_degree is None else odd_degree
        odd = [sigma(1, rng.randint(0, sigma_levels), rng.randint(0, max_order)) for _ in range(degree)]
        power = 2 * rng.randint(0, 1) if eps else 0
        total = total + DiffPoly.monomial(rng.randint(-3, 3) or 1, even, odd, power)
    return total


def _first_failure(cases, seed, trial):
    rng = random.Random(seed)
    for index in range(cases):
        witness = trial(rng)
        if witness:
            return f"case {index} (seed {seed}): {witness}"
    return None


def leibniz_dx(rng):
    free = RewriteSystem()
    p, q = random_poly(rng), random_poly(rng)
    value = free.dx(p * q) - free.dx(p) * q - p * free.dx(q)
    return None if not value else f"p={p} q={q}"


def leibniz_odd(rng, cover=None):
    """D(pq) = D(p) q + (-1)^{|p|} p D(q) for the odd flow d/dtau_0."""
    cover = cover or KdvCover()
    flow = cover.tau_flow(0)
    degree = rng.randint(0, 2)
    p = random_poly(rng, odd_degree=degree)
    q = random_poly(rng)
    sign = -1 if degree % 2 else 1
    value = flow(p * q) - flow(p) * q - (p * flow(q)).scale(sign)
    return None if not value else f"p={p} q={q}"


def antiderivative_inverts_dx(rng):
    free = RewriteSystem()
    p = random_poly(rng)
    value = antiderivative(free.dx(p)) - p.without_constant()
    return None if not value else f"p={p}"


def variational_lift(rng):
    """Adding a total derivative does not change either variational derivative."""
    free = RewriteSystem()
    p, q = random_poly(rng), random_poly(rng)
    lifted = p + free.dx(q)
    for family in ("u", "theta"):
        if variational_derivative(lifted, family, 1) != variational_derivative(p, family, 1):
            return f"{family}: p={p} q={q}"
    return None


def _rewrite_reversed(system, poly):
    """normalize with the pending generators rewritten in reverse order."""
    while True:
        pending = sorted((g for g in poly.generators() if system.needs_rewrite(g)), reverse=True)
        if not pending:
            return poly
        for g in pending:
            _, k, alpha, s = g
            poly = poly.substitute(g, system.sigma_jet(alpha, k, s))


def normal_form_confluence(rng, cover=None):
    """
    Normal forms do not depend on how products are bracketed or rewritten.

    Also checks that normalize is idempotent, leaves no reducible generator
    and commutes with dx.
    """
    system = (cover or KdvCover()).system
    a, b, c = (random_poly(rng, max_terms=2, sigma_levels=2) for _ in range(3))
    left = system.normalize((a * b) * c)
    if system.normalize(a * (b * c)) != left:
        return f"bracketing: a={a} b={b} c={c}"
    factorwise = system.normalize(system.normalize(a) * system.normalize(b) * system.normalize(c))
    if factorwise != left:
        return f"factor-by-factor: a={a} b={b} c={c}"
    if _rewrite_reversed(system, (a * b) * c) != left:
        return f"rewrite order: a={a} b={b} c={c}"
    p = random_poly(rng, sigma_levels=2)
    normal = system.normalize(p)
    if system.normalize(normal) != normal:
        return f"not idempotent: p={p}"
    if any(system.needs_rewrite(g) for g in normal.generators()):
        return f"reducible generator left: p={p}"
    if system.normalize(system.dx(p)) != system.dx(normal):
        return f"dx does not commute: p={p}"
    return None


PROPERTIES = {
    "leibniz.dx": leibniz_dx,
    "leibniz.odd-flow": leibniz_odd,
    "antiderivative.dx": antiderivative_inverts_dx,
    "variational.lift": variational_lift,
    "normal-form.confluence": normal_form_confluence,
}


def check_properties(cases=None, seed=DEFAULT_SEED, threads=None):
    """Run every property on `cases` random inputs."""
    cases = cases if cases is not None else property_cases()
    logger.info(f"Running {len(PROPERTIES)} properties on {cases} cases each")
    checks = [(f"properties.{name}", lambda t=trial: _first_failure(cases, seed, t))
              for name, trial in PROPERTIES.items()]
    return run_checks(checks, threads)
