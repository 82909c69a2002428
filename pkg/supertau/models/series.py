"""
Truncated formal Laurent series in one or two spectral variables.

Exponents are exact rationals, so half-shifted series such as
sum R_n lam^{-n-1/2} need no separate flag. Every series records, per
variable, the floor below which coefficients are unknown; None means the
series is known exactly all the way down. Arithmetic narrows floors and
never widens them.
"""
from fractions import Fraction

from supertau.models.diffpoly import DiffPoly
from supertau.models.errors import NotInvertible, WindowError


def _max_floor(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


class LaurentJet:
    __slots__ = ("variables", "coefficients", "floors")

    def __init__(self, coefficients=None, floors=None, variables=("lam",)):
        self.variables = tuple(variables)
        if floors is None:
            floors = (None,) * len(self.variables)
        self.floors = tuple(None if f is None else Fraction(f) for f in floors)
        clean = {}
        for exps, coeff in (coefficients or {}).items():
            if not isinstance(exps, tuple):
                exps = (exps,)
            exps = tuple(Fraction(e) for e in exps)
            if not isinstance(coeff, DiffPoly):
                coeff = DiffPoly.constant(coeff)
            if coeff and self._known(exps):
                clean[exps] = clean.get(exps, DiffPoly.zero()) + coeff
        self.coefficients = {e: c for e, c in clean.items() if c}

    def _known(self, exps):
        return all(f is None or e >= f for e, f in zip(exps, self.floors))

    @classmethod
    def single(cls, terms, floor, variable="lam"):
        return cls({(Fraction(e),): c for e, c in terms.items()}, (floor,), (variable,))

    # -- inspection ---------------------------------------------------

    @property
    def half_shift(self):
        """True when the single-variable exponents are half-integers."""
        if len(self.variables) != 1:
            return False
        exps = [e[0] for e in self.coefficients]
        if self.floors[0] is not None:
            exps.append(self.floors[0])
        return any(e.denominator == 2 for e in exps)

    @property
    def window(self):
        """(floor, ceiling) of the first variable."""
        tops = [e[0] for e in self.coefficients]
        return self.floors[0], (max(tops) if tops else None)

    def ceilings(self):
        result = []
        for i, floor in enumerate(self.floors):
            tops = [e[i] for e in self.coefficients]
            if floor is not None:
                tops.append(floor)
            result.append(max(tops) if tops else None)
        return tuple(result)

    def coefficient(self, *exps):
        exps = tuple(Fraction(e) for e in exps)
        if not self._known(exps):
            raise WindowError(f"coefficient at {exps} lies below the known window {self.floors}")
        return self.coefficients.get(exps, DiffPoly.zero())

    def is_zero(self):
        return not self.coefficients

    def __eq__(self, other):
        if not isinstance(other, LaurentJet):
            return NotImplemented
        return (self.variables == other.variables and self.floors == other.floors
                and self.coefficients == other.coefficients)

    def __repr__(self):
        terms = ", ".join(f"{e}: {c}" for e, c in sorted(self.coefficients.items()))
        return f"LaurentJet({self.variables}, floors={self.floors}, {{{terms}}})"

    # -- structure ----------------------------------------------------

    def embed(self, variables):
        """View the series as a series in a larger tuple of variables."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        index = {name: i for i, name in enumerate(self.variables)}
        floors = tuple(self.floors[index[v]] if v in index else None for v in variables)
        coefficients = {}
        for exps, coeff in self.coefficients.items():
            key = tuple(exps[index[v]] if v in index else Fraction(0) for v in variables)
            coefficients[key] = coeff
        return LaurentJet(coefficients, floors, variables)

    def _align(self, other):
        if isinstance(other, LaurentJet):
            if other.variables == self.variables:
                return self, other
            variables = tuple(dict.fromkeys(self.variables + other.variables))
            return self.embed(variables), other.embed(variables)
        if isinstance(other, (DiffPoly, int, Fraction)):
            coeff = other if isinstance(other, DiffPoly) else DiffPoly.constant(other)
            zero = (Fraction(0),) * len(self.variables)
            return self, LaurentJet({zero: coeff}, None, self.variables)
        raise TypeError(f"cannot combine LaurentJet with {type(other).__name__}")

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        a, b = self._align(other)
        floors = tuple(_max_floor(x, y) for x, y in zip(a.floors, b.floors))
        coefficients = dict(a.coefficients)
        for exps, coeff in b.coefficients.items():
            coefficients[exps] = coefficients.get(exps, DiffPoly.zero()) + coeff
        return LaurentJet(coefficients, floors, a.variables)

    __radd__ = __add__

    def __neg__(self):
        return LaurentJet({e: -c for e, c in self.coefficients.items()}, self.floors, self.variables)

    def __sub__(self, other):
        a, b = self._align(other)
        return a + (-b)

    def __rsub__(self, other):
        a, b = self._align(other)
        return b + (-a)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.map(lambda c: c.scale(other))
        a, b = self._align(other)
        ceil_a, ceil_b = a.ceilings(), b.ceilings()
        floors = []
        for fa, ca, fb, cb in zip(a.floors, ceil_a, b.floors, ceil_b):
            bounds = []
            if fa is not None and cb is not None:
                bounds.append(fa + cb)
            if fb is not None and ca is not None:
                bounds.append(fb + ca)
            floors.append(max(bounds) if bounds else None)
        floors = tuple(floors)
        product = {}
        for ea, ca_poly in a.coefficients.items():
            for eb, cb_poly in b.coefficients.items():
                exps = tuple(x + y for x, y in zip(ea, eb))
                if not all(f is None or e >= f for e, f in zip(exps, floors)):
                    continue
                term = ca_poly * cb_poly
                if term:
                    product[exps] = product.get(exps, DiffPoly.zero()) + term
        return LaurentJet(product, floors, a.variables)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        a, b = self._align(other)
        return b * a

    def map(self, func):
        """Apply a linear map coefficientwise (dx, a flow, a scaling)."""
        return LaurentJet({e: func(c) for e, c in self.coefficients.items()},
                          self.floors, self.variables)

    def shift(self, *amounts):
        """Multiply by lam^a (mu^b ...)."""
        amounts = tuple(Fraction(a) for a in amounts)
        coefficients = {tuple(e + d for e, d in zip(exps, amounts)): c
                        for exps, c in self.coefficients.items()}
        floors = tuple(None if f is None else f + d for f, d in zip(self.floors, amounts))
        return LaurentJet(coefficients, floors, self.variables)

    def split(self, variable=None):
        """Return (plus, minus): exponents >= 0 and < 0 in `variable`."""
        i = 0 if variable is None else self.variables.index(variable)
        plus, minus = {}, {}
        for exps, coeff in self.coefficients.items():
            (plus if exps[i] >= 0 else minus)[exps] = coeff
        plus_floors = list(self.floors)
        if plus_floors[i] is not None and plus_floors[i] <= 0:
            plus_floors[i] = None
        return (LaurentJet(plus, plus_floors, self.variables),
                LaurentJet(minus, self.floors, self.variables))

    def invert(self):
        """Multiplicative inverse of a single-variable series.

        The leading (highest exponent) coefficient must be a nonzero constant.
        """
        if len(self.variables) != 1:
            raise NotInvertible("only single-variable series can be inverted")
        if not self.coefficients:
            raise NotInvertible("the zero series has no inverse")
        top = max(self.coefficients)
        lead = self.coefficients[top]
        if not lead.is_constant() or not lead:
            raise NotInvertible(f"leading coefficient {lead} is not an invertible constant")
        floor = self.floors[0]
        inv_lead = Fraction(1) / lead.constant_term()
        # s = lead * lam^top * (1 + r)
        r_terms = {(e[0] - top[0],): c.scale(inv_lead)
                   for e, c in self.coefficients.items() if e != top}
        rel_floor = None if floor is None else floor - top[0]
        if not r_terms:
            return LaurentJet({(-top[0],): DiffPoly.constant(inv_lead)},
                              (None if rel_floor is None else rel_floor - top[0],),
                              self.variables)
        if rel_floor is None:
            raise NotInvertible("an infinite series needs a finite window to be inverted")
        r = LaurentJet(r_terms, (rel_floor,), self.variables)
        gap = -max(r_terms)[0]
        steps = int((-rel_floor) / gap) + 1
        total = LaurentJet({(Fraction(0),): DiffPoly.constant(1)}, (rel_floor,), self.variables)
        power = LaurentJet({(Fraction(0),): DiffPoly.constant(1)}, None, self.variables)
        for _ in range(steps):
            power = power * (-r)
            total = total + power
        return total.shift(-top[0]) * inv_lead


def kernel_quotient(numerator, small="lam", big="mu", box=None):
    """Coefficients of [numerator / (big - small)] with the small/big expansion.

    Uses 1/(mu - lam) = sum_i lam^i mu^{-i-1}, so the coefficient at
    (e_small, e_big) is sum_{i>=0} numerator[e_small - i, e_big + i + 1].
    `box` gives the exponent lists ((small exponents), (big exponents)) to
    evaluate; a WindowError is raised if a needed coefficient is unknown.
    """
    i_small = numerator.variables.index(small)
    i_big = numerator.variables.index(big)
    ceilings = numerator.ceilings()
    top_big = ceilings[i_big]
    result = {}
    small_exps, big_exps = box
    for e_small in small_exps:
        for e_big in big_exps:
            total = DiffPoly.zero()
            if top_big is not None:
                i = 0
                while e_big + i + 1 <= top_big:
                    key = [Fraction(0)] * len(numerator.variables)
                    key[i_small] = Fraction(e_small) - i
                    key[i_big] = Fraction(e_big) + i + 1
                    total = total + numerator.coefficient(*key)
                    i += 1
            if total:
                key = [Fraction(0)] * len(numerator.variables)
                key[i_small] = Fraction(e_small)
                key[i_big] = Fraction(e_big)
                result[tuple(key)] = total
    floors = [None] * len(numerator.variables)
    floors[i_small] = min(Fraction(e) for e in small_exps)
    floors[i_big] = min(Fraction(e) for e in big_exps)
    return LaurentJet(result, floors, numerator.variables)
