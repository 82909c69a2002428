"""
Frobenius manifold data and the tensors derived from its potential.

Field indices are 1-based throughout, matching the usual v^1 .. v^n
notation; v^1 is the direction of the unit field.
"""
from fractions import Fraction
from functools import cached_property

import sympy

from supertau.models.diffpoly import DiffPoly
from supertau.models.errors import ValidationError
from supertau.models.generators import jet

HALF = Fraction(1, 2)


def apply_vector_field(components, poly):
    """Apply sum_alpha X^alpha d/dv^alpha to a function of the flat coordinates."""
    result = DiffPoly.zero()
    for alpha, component in enumerate(components, start=1):
        if component:
            result = result + component * poly.partial(jet(alpha))
    return result


class FrobeniusSpec:
    """Validated Frobenius manifold with lazily cached tensors."""

    def __init__(self, name, n, d, potential, euler_linear, euler_constants, mu, R=None,
                 field_names=None, h_table=None, virasoro_tables=None, resonance=None, source=None):
        self.name = name
        self.n = n
        self.d = Fraction(d)
        self.potential = potential
        self.euler_linear = [Fraction(x) for x in euler_linear]
        self.euler_constants = [Fraction(x) for x in euler_constants]
        self.mu = [Fraction(x) for x in mu]
        self.R = [[[Fraction(x) for x in row] for row in matrix] for matrix in (R or [])]
        self.field_names = dict(field_names or {})
        self.h_table = dict(h_table or {})
        self.virasoro_tables = dict(virasoro_tables or {})
        # expected resonant (alpha, p); None when the document does not say
        self.resonance = None if resonance is None else sorted(tuple(x) for x in resonance)
        self.source = source
        self.hash = None
        self.warnings = []

    def __repr__(self):
        return f"<FrobeniusSpec {self.name} n={self.n} d={self.d}>"

    @property
    def fields(self):
        return range(1, self.n + 1)

    def v(self, alpha):
        return DiffPoly.gen(jet(alpha))

    def mu_of(self, alpha):
        return self.mu[alpha - 1]

    def d_v(self, poly, alpha):
        return poly.partial(jet(alpha))

    # -- potential and metric ---------------------------------------

    @cached_property
    def c_lower(self):
        """c_{alpha beta gamma} = third derivatives of the potential."""
        table = {}
        for a in self.fields:
            fa = self.d_v(self.potential, a)
            for b in self.fields:
                fab = self.d_v(fa, b)
                for g in self.fields:
                    table[(a, b, g)] = self.d_v(fab, g)
        return table

    @cached_property
    def eta(self):
        matrix = []
        for a in self.fields:
            row = []
            for b in self.fields:
                entry = self.c_lower[(1, a, b)]
                if not entry.is_constant():
                    raise ValidationError("eta-constant", f"eta_{a}{b} = {entry} is not constant")
                row.append(entry.constant_term())
            matrix.append(row)
        return matrix

    @cached_property
    def eta_inv(self):
        matrix = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row]
                               for row in self.eta])
        if matrix.det() == 0:
            raise ValidationError("eta-invertible", "the flat metric is degenerate")
        inverse = matrix.inv()
        return [[Fraction(int(sympy.fraction(x)[0]), int(sympy.fraction(x)[1]))
                 for x in inverse.row(i)] for i in range(self.n)]

    def eta_lo(self, a, b):
        return self.eta[a - 1][b - 1]

    def eta_up(self, a, b):
        return self.eta_inv[a - 1][b - 1]

    def h0(self, alpha):
        """h_{alpha,0} = eta_{alpha gamma} v^gamma."""
        result = DiffPoly.zero()
        for g in self.fields:
            if self.eta_lo(alpha, g):
                result = result + self.v(g).scale(self.eta_lo(alpha, g))
        return result

    # -- multiplication tensors ---------------------------------------

    @cached_property
    def c_mixed(self):
        """c^gamma_{alpha beta} keyed (gamma, alpha, beta)."""
        table = {}
        for g in self.fields:
            for a in self.fields:
                for b in self.fields:
                    total = DiffPoly.zero()
                    for z in self.fields:
                        if self.eta_up(g, z):
                            total = total + self.c_lower[(z, a, b)].scale(self.eta_up(g, z))
                    table[(g, a, b)] = total
        return table

    @cached_property
    def c_upper(self):
        """c^{alpha beta}_gamma = eta^{alpha zeta} c^beta_{zeta gamma}, keyed (alpha, beta, gamma)."""
        table = {}
        for a in self.fields:
            for b in self.fields:
                for g in self.fields:
                    total = DiffPoly.zero()
                    for z in self.fields:
                        if self.eta_up(a, z):
                            total = total + self.c_mixed[(b, z, g)].scale(self.eta_up(a, z))
                    table[(a, b, g)] = total
        return table

    @cached_property
    def euler(self):
        """Components E^alpha = (1 - d/2 - mu_alpha) v^alpha + r_alpha."""
        return [self.v(a).scale(self.euler_linear[a - 1]) + self.euler_constants[a - 1]
                for a in self.fields]

    @cached_property
    def g_upper(self):
        """Intersection form g^{alpha beta} = E^epsilon c^{alpha beta}_epsilon."""
        table = {}
        for a in self.fields:
            for b in self.fields:
                total = DiffPoly.zero()
                for e, component in enumerate(self.euler, start=1):
                    total = total + component * self.c_upper[(a, b, e)]
                table[(a, b)] = total
        return table

    @cached_property
    def gamma(self):
        """Gamma^{alpha beta}_gamma = (1/2 - mu_beta) c^{alpha beta}_gamma."""
        return {(a, b, g): self.c_upper[(a, b, g)].scale(HALF - self.mu_of(b))
                for a in self.fields for b in self.fields for g in self.fields}

    def R_entry(self, k, xi, alpha):
        """(R_k)^xi_alpha, zero beyond the supplied matrices."""
        if k < 1 or k > len(self.R):
            return Fraction(0)
        return self.R[k - 1][xi - 1][alpha - 1]

    # -- vector fields ------------------------------------------------

    def apply_euler(self, poly):
        return apply_vector_field(self.euler, poly)

    def product(self, x, y):
        """(X . Y)^gamma = c^gamma_{alpha beta} X^alpha Y^beta."""
        out = []
        for g in self.fields:
            total = DiffPoly.zero()
            for a in self.fields:
                if not x[a - 1]:
                    continue
                for b in self.fields:
                    if y[b - 1] and self.c_mixed[(g, a, b)]:
                        total = total + self.c_mixed[(g, a, b)] * x[a - 1] * y[b - 1]
            out.append(total)
        return out

    def frobenius_power(self, k):
        """E^{.k}: E^{.0} is the unit field d/dv^1."""
        powers = self.__dict__.setdefault("_powers", [
            [DiffPoly.constant(1 if a == 1 else 0) for a in self.fields]])
        while len(powers) <= k:
            powers.append(self.product(self.euler, powers[-1]))
        return powers[k]

    def apply_frobenius_power(self, k, poly):
        return apply_vector_field(self.frobenius_power(k), poly)
