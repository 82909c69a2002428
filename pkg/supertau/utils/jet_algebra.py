"""
Total derivative, normal forms and antiderivatives on the jet algebra.

The RewriteSystem owns the rules that give dx of the nonlocal generators
(sigma_{alpha,k} with k >= 1, one-point functions, Phi generators) and the
undifferentiated relations that express some sigma_{alpha,k} through lower
levels. Every DiffPoly returned from here is in normal form.
"""
import logging
from fractions import Fraction
from math import factorial

from supertau.models.diffpoly import DiffPoly, ONE, mul_monomials
from supertau.models.errors import NotATotalDerivative, UnsupportedGenerators
from supertau.models.generators import (
    Kind, derivative_order, is_free_jet, is_odd, jet, lower_order, raise_order, sigma,
)

logger = logging.getLogger(__name__)


def _accumulate_product(out, img, left, right, coeff):
    """out += coeff * left * img * right for monomials left/right."""
    for mono, c in img.items():
        sign, merged = mul_monomials(mono, right) if right is not None else (1, mono)
        if not sign:
            continue
        sign2, merged = mul_monomials(left, merged)
        if not sign2:
            continue
        value = c * coeff * sign * sign2
        total = out.get(merged, 0) + value
        if total:
            out[merged] = total
        else:
            out.pop(merged, None)


def apply_derivation(poly, image, parity=0):
    """Apply the derivation defined by `image` (generator -> DiffPoly or None).

    Images of even factors are placed in front of the monomial; the image of
    the i-th odd factor picks up the sign (-1)^(i*parity). Exponential factors
    receive sum q_alpha D(v^alpha) exp(...).
    """
    out = {}
    for mono, coeff in poly.items():
        even, odd, eps, exps = mono
        for idx, (g, power) in enumerate(even):
            img = image(g)
            if not img:
                continue
            if power == 1:
                rest_even = even[:idx] + even[idx + 1:]
            else:
                rest_even = even[:idx] + ((g, power - 1),) + even[idx + 1:]
            _accumulate_product(out, img, ONE, (rest_even, odd, eps, exps), coeff * power)
        for alpha, q in exps:
            img = image(jet(alpha))
            if img:
                _accumulate_product(out, img, ONE, mono, coeff * q)
        for i, g in enumerate(odd):
            img = image(g)
            if not img:
                continue
            sign = -1 if (parity and i & 1) else 1
            left = (even, odd[:i], eps, exps)
            right = ((), odd[i + 1:], 0, ())
            _accumulate_product(out, img, left, right, coeff * sign)
    return DiffPoly._wrap(out)


class RewriteSystem:
    """
    Rules for the x-derivative of nonlocal generators.

    Args:
        sigma_rule: (alpha, k) -> dx(sigma_{alpha,k}) for k >= 1; may use
            sigma^1 of lower levels, the result is normalized here
        onepoint_rule: (alpha, p) -> dx(f_{alpha,p})
        phi_rule: (alpha, p, n) -> dx(Phi^n_{alpha,p})
        sigma_relation: (alpha, k) -> polynomial equal to sigma_{alpha,k}, or None
        debug: assert that every sigma rewrite lowers the sigma level
    """

    def __init__(self, sigma_rule=None, onepoint_rule=None, phi_rule=None,
                 sigma_relation=None, debug=False):
        self.sigma_rule = sigma_rule
        self.onepoint_rule = onepoint_rule
        self.phi_rule = phi_rule
        self.sigma_relation = sigma_relation
        self.debug = debug
        self._dx_memo = {}
        self._normal_memo = {}
        self._relation_memo = {}

    # -- rules --------------------------------------------------------

    def relation(self, alpha, k):
        """Undifferentiated normal form of sigma_{alpha,k}, or None if it is free."""
        if k < 1 or self.sigma_relation is None:
            return None
        key = (alpha, k)
        if key not in self._relation_memo:
            raw = self.sigma_relation(alpha, k)
            self._relation_memo[key] = None if raw is None else self.normalize(raw)
        return self._relation_memo[key]

    def _check_rank(self, gen, image):
        level = gen[1]
        for g in image.generators():
            if g[0] == Kind.SIGMA and g[1] >= level:
                raise AssertionError(f"rewrite of {gen} does not lower the sigma level: {image}")

    def dx_image(self, gen):
        kind = gen[0]
        if kind == Kind.JET:
            return DiffPoly.gen(raise_order(gen))
        if kind == Kind.SIGMA:
            if gen[1] == 0:
                return DiffPoly.gen(raise_order(gen))
            cached = self._dx_memo.get(gen)
            if cached is not None:
                return cached
            _, k, alpha, s = gen
            if s > 0:
                image = self.sigma_jet(alpha, k, s + 1)
            elif self.relation(alpha, k) is not None:
                image = self.dx(self.relation(alpha, k))
            else:
                if self.sigma_rule is None:
                    raise UnsupportedGenerators(f"no x-derivative rule for {gen}")
                image = self.normalize(self.sigma_rule(alpha, k))
                if self.debug:
                    self._check_rank(gen, image)
            self._dx_memo[gen] = image
            return image
        if kind == Kind.ONE_POINT:
            cached = self._dx_memo.get(gen)
            if cached is None:
                if self.onepoint_rule is None:
                    raise UnsupportedGenerators(f"no x-derivative rule for {gen}")
                cached = self.normalize(self.onepoint_rule(gen[1], gen[2]))
                self._dx_memo[gen] = cached
            return cached
        if kind == Kind.PHI:
            cached = self._dx_memo.get(gen)
            if cached is None:
                if self.phi_rule is None:
                    raise UnsupportedGenerators(f"no x-derivative rule for {gen}")
                _, n, alpha, p = gen
                cached = self.normalize(self.phi_rule(alpha, p, n))
                self._dx_memo[gen] = cached
            return cached
        return None

    def dx(self, poly):
        return apply_derivation(poly, self.dx_image, 0)

    # -- normal forms -------------------------------------------------

    def sigma_jet(self, alpha, k, s):
        """Normal form of sigma^s_{alpha,k}."""
        key = (alpha, k, s)
        cached = self._normal_memo.get(key)
        if cached is not None:
            return cached
        if s == 0:
            rel = self.relation(alpha, k)
            result = rel if rel is not None else DiffPoly.gen(sigma(alpha, k))
        else:
            result = self.dx(self.sigma_jet(alpha, k, s - 1))
        self._normal_memo[key] = result
        return result

    def needs_rewrite(self, gen):
        if gen[0] != Kind.SIGMA or gen[1] == 0:
            return False
        return gen[3] > 0 or self.relation(gen[2], gen[1]) is not None

    def normalize(self, poly):
        """Rewrite differentiated or related sigma generators into normal form."""
        while True:
            pending = sorted(g for g in poly.generators() if self.needs_rewrite(g))
            if not pending:
                return poly
            for g in pending:
                _, k, alpha, s = g
                poly = poly.substitute(g, self.sigma_jet(alpha, k, s))


# -- antiderivatives -------------------------------------------------------

FREE_KINDS = frozenset((Kind.JET, Kind.SIGMA, Kind.CENTRAL))


def check_free(poly, operation="antiderivative"):
    for g in poly.generators():
        if g[0] not in FREE_KINDS or (g[0] == Kind.SIGMA and g[1] != 0):
            raise UnsupportedGenerators(f"{operation} needs free jet generators, found {g}")


def _top_variables(poly):
    best = -1
    tops = set()
    for g in poly.generators():
        if not is_free_jet(g):
            continue
        order = derivative_order(g)
        if order > best:
            best, tops = order, {g}
        elif order == best:
            tops.add(g)
    return best, tops


def _integrate_even(poly, z):
    """Formal antiderivative in the even variable z with no constant term."""
    alpha = z[1] if z[0] == Kind.JET and z[2] == 0 else None
    result = DiffPoly.zero()
    for mono, coeff in poly.items():
        even, odd, eps, exps = mono
        power = dict(even).get(z, 0)
        rest_even = tuple(item for item in even if item[0] != z)
        q = dict(exps).get(alpha, Fraction(0)) if alpha is not None else Fraction(0)
        if not q:
            term = DiffPoly.monomial(coeff / (power + 1), even=rest_even + ((z, power + 1),),
                                     odd=odd, eps=eps, exps=exps)
            result = result + term
            continue
        # int z^a e^{qz} dz = e^{qz} sum_j (-1)^j a!/(a-j)! z^{a-j} / q^{j+1}
        for j in range(power + 1):
            c = coeff * Fraction((-1) ** j * factorial(power), factorial(power - j)) / q ** (j + 1)
            term = DiffPoly.monomial(c, even=rest_even + ((z, power - j),), odd=odd,
                                     eps=eps, exps=exps)
            result = result + term
    return result


def antiderivative(poly, system=None):
    """Return q with dx(q) = poly and no generator-free term.

    Raises:
        NotATotalDerivative: if poly is not in the image of dx
        UnsupportedGenerators: if poly leaves the free subalgebra
    """
    check_free(poly)
    system = system or RewriteSystem()
    result = DiffPoly.zero()
    remainder = poly
    eliminated = {}
    steps = 0
    while remainder:
        steps += 1
        order, tops = _top_variables(remainder)
        if order <= 0:
            raise NotATotalDerivative(
                f"remainder {remainder} has no derivative variables", residue=remainder)
        for mono in remainder.terms:
            degree = sum(p for g, p in mono[0] if g in tops) + sum(1 for g in mono[1] if g in tops)
            if degree > 1:
                raise NotATotalDerivative(
                    f"remainder is not linear in its top variables: {remainder}", residue=remainder)
        w = max(tops)
        if w in eliminated.get(order, ()):
            raise NotATotalDerivative(
                f"coefficients of order {order} are not closed: {remainder}", residue=remainder)
        eliminated.setdefault(order, set()).add(w)
        z = lower_order(w)
        coeff = remainder.partial(w)
        if is_odd(w):
            if z in coeff.generators():
                raise NotATotalDerivative(
                    f"odd coefficient depends on {z}: {remainder}", residue=remainder)
            piece = DiffPoly.gen(z) * coeff
        else:
            piece = _integrate_even(coeff, z)
        result = result + piece
        remainder = remainder - system.dx(piece)
        if steps > 10000:
            raise NotATotalDerivative("antiderivative did not terminate", residue=remainder)
    return result.without_constant()


def is_total_derivative(poly, system=None):
    """Return (True, witness) if poly = dx(witness), else (False, None)."""
    if not poly:
        return True, DiffPoly.zero()
    if poly.constant_term():
        return False, None
    try:
        return True, antiderivative(poly, system)
    except NotATotalDerivative:
        return False, None
