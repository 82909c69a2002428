"""
Derivation rules: named flows given by the images of free generators.
"""
import logging

from supertau.models.diffpoly import DiffPoly
from supertau.models.generators import (
    Kind, derivative_order, even_time, is_free_jet, is_time, lower_order,
)
from supertau.utils.jet_algebra import apply_derivation

logger = logging.getLogger(__name__)

UNIT_TIME = even_time(1, 0)


def truncate_times(poly, P=None, K=None):
    """Drop monomials containing t^{alpha,p} with p > P or tau_k with k > K."""
    if P is None and K is None:
        return poly

    def keep(mono):
        for gen, _ in mono[0]:
            if gen[0] == Kind.EVEN_TIME and P is not None and gen[2] > P:
                return False
        for gen in mono[1]:
            if gen[0] == Kind.ODD_TIME and K is not None and gen[1] > K:
                return False
        return True

    return poly.filter(keep)


class XFlow:
    """x-translation on the tau-cover: dx on jets plus d/dt^{1,0} on explicit times."""

    parity = 0
    name = "x"

    def __init__(self, system):
        self.system = system

    def image(self, gen):
        if gen == UNIT_TIME:
            return DiffPoly.constant(1)
        if is_time(gen) or gen[0] == Kind.CENTRAL:
            return None
        return self.system.dx_image(gen)

    def __call__(self, poly):
        return apply_derivation(poly, self.image, 0)


class DerivationRule:
    """
    A derivation of the jet algebra given on base generators.

    Args:
        name: flow label, e.g. ('t', alpha, p), ('tau', k), ('s', m)
        parity: 0 for even flows, 1 for odd flows
        base_image: callable returning the image of a base generator
            (v^alpha, theta_alpha, sigma_{alpha,k}, f, Phi, times) or None
        system: RewriteSystem used to normalize images
        truncation: optional (P, K) time truncation applied to images

    Images of jets v^{alpha,s} and theta^s_alpha are X^s applied to the image
    of the base variable, X being the x-translation flow.
    """

    def __init__(self, name, parity, base_image, system, truncation=None):
        self.name = name
        self.parity = parity
        self.base_image = base_image
        self.system = system
        self.truncation = truncation
        self.x_flow = XFlow(system)
        self._memo = {}

    def __repr__(self):
        return f"<DerivationRule {self.name} parity={self.parity}>"

    def _finish(self, poly):
        poly = self.system.normalize(poly)
        if self.truncation:
            poly = truncate_times(poly, *self.truncation)
        return poly

    def image(self, gen):
        cached = self._memo.get(gen)
        if cached is not None:
            return cached
        if is_free_jet(gen) and derivative_order(gen) > 0:
            result = self.x_flow(self.image(lower_order(gen)))
            if self.truncation:
                result = truncate_times(result, *self.truncation)
        else:
            raw = self.base_image(gen)
            result = DiffPoly.zero() if raw is None else self._finish(raw)
        self._memo[gen] = result
        return result

    def __call__(self, poly):
        return apply_derivation(poly, self.image, self.parity)


def commutator(first, second, poly):
    """[D1, D2] applied to poly, graded by the parities of the flows."""
    sign = -1 if (first.parity and second.parity) else 1
    left = first(second(poly))
    right = second(first(poly))
    return left + right if sign < 0 else left - right


def rule_from_table(name, parity, table, system, fallback=None, truncation=None):
    """Derivation given by a dict of base images, with an optional fallback callable."""

    def base_image(gen):
        if gen in table:
            return table[gen]
        return fallback(gen) if fallback else None

    return DerivationRule(name, parity, base_image, system, truncation)
