"""
Local functionals, variational derivatives and the Schouten-Nijenhuis bracket.
"""
import logging
import time
from fractions import Fraction

from supertau.models.diffpoly import DiffPoly
from supertau.models.errors import DegreeError, DimensionMismatch
from supertau.models.generators import Kind, derivative_order, jet, theta
from supertau.models.report import CheckResult, FAIL, PASS
from supertau.utils.derivations import DerivationRule, commutator, rule_from_table
from supertau.utils.jet_algebra import RewriteSystem, check_free, is_total_derivative

logger = logging.getLogger(__name__)

_FREE = RewriteSystem()


def _exp_fields(poly):
    return {alpha for mono in poly.terms for alpha, _ in mono[3]}


def _fields_of(poly):
    fields = _exp_fields(poly)
    for g in poly.generators():
        if g[0] == Kind.JET:
            fields.add(g[1])
        elif g[0] == Kind.SIGMA:
            fields.add(g[2])
    return fields


def variational_derivative(density, family, alpha, system=None):
    """Euler operator sum_s (-dx)^s d/d(jet^s) for the even ('u') or odd ('theta') family."""
    check_free(density, "variational derivative")
    system = system or _FREE
    make = jet if family in ("u", "even") else theta
    top = -1
    for g in density.generators():
        if make(alpha, derivative_order(g)) == g:
            top = max(top, derivative_order(g))
    if make is jet and alpha in _exp_fields(density):
        top = max(top, 0)
    result = DiffPoly.zero()
    for s in range(top, -1, -1):
        # Horner form: (-dx)(... ) + d/d(jet^s)
        result = density.partial(make(alpha, s)) - system.dx(result)
    return result


class LocalFunctional:
    """
    Integral of a density modulo total x-derivatives.

    Args:
        density: DiffPoly in even jets and theta jets
        degree: odd degree; inferred when omitted
    """

    def __init__(self, density, degree=None):
        check_free(density, "local functional")
        degrees = density.odd_degrees()
        if len(degrees) > 1:
            raise DegreeError(f"density mixes odd degrees {sorted(degrees)}")
        found = next(iter(degrees)) if degrees else (degree or 0)
        if degree is not None and density and found != degree:
            raise DegreeError(f"density has odd degree {found}, expected {degree}")
        self.density = density
        self.degree = found if density else (degree or 0)

    def __repr__(self):
        return f"LocalFunctional(deg={self.degree}, {self.density})"

    @property
    def fields(self):
        return _fields_of(self.density)

    def delta_u(self, alpha):
        return variational_derivative(self.density, "u", alpha)

    def delta_theta(self, alpha):
        return variational_derivative(self.density, "theta", alpha)

    def __add__(self, other):
        return LocalFunctional(self.density + other.density)

    def __sub__(self, other):
        return LocalFunctional(self.density - other.density)

    def is_zero(self):
        if not self.density:
            return True
        if self.density.has_scalar_terms():
            return False
        for alpha in self.fields:
            if self.delta_u(alpha) or self.delta_theta(alpha):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, LocalFunctional):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None


def schouten_bracket(P, Q, fields=None):
    """[P, Q] = int(dP/dtheta . dQ/du + (-1)^p dP/du . dQ/dtheta)."""
    fields = sorted(fields or (P.fields | Q.fields))
    sign = -1 if P.degree % 2 else 1
    density = DiffPoly.zero()
    for alpha in fields:
        density = density + P.delta_theta(alpha) * Q.delta_u(alpha)
        density = density + (P.delta_u(alpha) * Q.delta_theta(alpha)).scale(sign)
    return LocalFunctional(density, P.degree + Q.degree - 1)


def dp_flow(P, fields=None, system=None, name=None):
    """Flow D_P: du^alpha = dP/dtheta_alpha, dtheta_alpha = (-1)^p dP/du^alpha."""
    fields = sorted(fields or P.fields)
    sign = -1 if P.degree % 2 else 1
    table = {}
    for alpha in fields:
        table[jet(alpha)] = P.delta_theta(alpha)
        table[theta(alpha)] = P.delta_u(alpha).scale(sign)
    return rule_from_table(name or ("P", P.degree), (P.degree - 1) % 2, table, system or _FREE)


class DiffOperator:
    """Matrix of differential operators; entries map (alpha, beta) to [A_0, A_1, ...]."""

    def __init__(self, n, entries=None):
        self.n = n
        self.entries = {key: list(value) for key, value in (entries or {}).items()}

    def entry(self, alpha, beta):
        return self.entries.get((alpha, beta), [])

    def __repr__(self):
        return f"DiffOperator(n={self.n}, {self.entries})"


def apply_operator(operator, vector, system=None):
    """(D w)^alpha = sum_beta sum_s A^{alpha beta}_s dx^s w_beta."""
    if len(vector) != operator.n:
        raise DimensionMismatch(f"operator of size {operator.n} applied to vector of length {len(vector)}")
    system = system or _FREE
    out = []
    for alpha in range(1, operator.n + 1):
        total = DiffPoly.zero()
        for beta in range(1, operator.n + 1):
            coefficients = operator.entry(alpha, beta)
            if not coefficients:
                continue
            jets = vector[beta - 1]
            for s, coeff in enumerate(coefficients):
                if s:
                    jets = system.dx(jets)
                if coeff:
                    total = total + coeff * jets
        out.append(total)
    return out


def hamiltonian_operator(P, n=None):
    """Operator of a bivector read off from dP/dtheta_alpha = P^{alpha beta} theta_beta."""
    if P.degree != 2:
        raise DegreeError(f"hamiltonian operator needs a bivector, got degree {P.degree}")
    n = n or max(P.fields, default=1)
    entries = {}
    for alpha in range(1, n + 1):
        image = P.delta_theta(alpha)
        for beta in range(1, n + 1):
            top = max((derivative_order(g) for g in image.generators()
                       if g[0] == Kind.SIGMA and g[2] == beta), default=-1)
            if top < 0:
                continue
            entries[(alpha, beta)] = [image.partial(theta(beta, s)) for s in range(top + 1)]
    return DiffOperator(n, entries)


def _bracket_check(check_id, P, Q):
    start = time.perf_counter()
    bracket = schouten_bracket(P, Q)
    passed = bracket.is_zero()
    witness = None
    if passed and bracket.density:
        ok, q = is_total_derivative(bracket.density)
        witness = q.to_text() if ok else None
    return CheckResult(check_id, PASS if passed else FAIL, time.perf_counter() - start,
                       residue=None if passed else bracket.density.to_text(), witness=witness)


def check_poisson_pair(P0, P1, label="pair"):
    """[P0,P0], [P0,P1], [P1,P1] each vanish as local functionals."""
    for P in (P0, P1):
        if P.degree != 2:
            raise DegreeError(f"Poisson pair members must be bivectors, got degree {P.degree}")
    results = [
        _bracket_check(f"{label}.P0P0", P0, P0),
        _bracket_check(f"{label}.P0P1", P0, P1),
        _bracket_check(f"{label}.P1P1", P1, P1),
    ]
    for result in results:
        logger.debug(f"{result.check_id}: {result.status}")
    return results


def hydrodynamic_pair(spec):
    """P0 = 1/2 int eta theta theta', P1 = 1/2 int (g theta theta' + Gamma v' theta theta)."""
    half = Fraction(1, 2)
    p0 = DiffPoly.zero()
    p1 = DiffPoly.zero()
    for a in spec.fields:
        for b in spec.fields:
            pair = DiffPoly.gen(theta(a)) * DiffPoly.gen(theta(b, 1))
            if spec.eta_up(a, b):
                p0 = p0 + pair.scale(half * spec.eta_up(a, b))
            if spec.g_upper[(a, b)]:
                p1 = p1 + (spec.g_upper[(a, b)] * pair).scale(half)
            if a != b:
                flat = DiffPoly.gen(theta(a)) * DiffPoly.gen(theta(b))
                for g in spec.fields:
                    gam = spec.gamma[(a, b, g)]
                    if gam:
                        p1 = p1 + (gam * DiffPoly.gen(jet(g, 1)) * flat).scale(half)
    return LocalFunctional(p0, 2), LocalFunctional(p1, 2)


def check_flat_exactness(spec):
    """[X1, P1] = P0 with X1 = int theta_1."""
    start = time.perf_counter()
    P0, P1 = hydrodynamic_pair(spec)
    X1 = LocalFunctional(DiffPoly.gen(theta(1)), 1)
    difference = schouten_bracket(X1, P1, spec.fields) - P0
    passed = difference.is_zero()
    return CheckResult(f"{spec.name}.flat-exactness", PASS if passed else FAIL,
                       time.perf_counter() - start,
                       residue=None if passed else difference.density.to_text())


def check_bracket_flow_compatibility(P, Q, label="flows"):
    """(-1)^{p-1} D_[P,Q] = D_P D_Q - (-1)^{(p-1)(q-1)} D_Q D_P on u^alpha and theta_alpha."""
    start = time.perf_counter()
    fields = sorted(P.fields | Q.fields)
    DP, DQ = dp_flow(P, fields), dp_flow(Q, fields)
    bracket = schouten_bracket(P, Q, fields)
    DB = dp_flow(bracket, fields)
    sign = -1 if (P.degree - 1) % 2 else 1
    residues = []
    for alpha in fields:
        for g in (jet(alpha), theta(alpha)):
            single = DiffPoly.gen(g)
            residue = commutator(DP, DQ, single) - DB(single).scale(sign)
            if residue:
                residues.append(residue.to_text())
    return CheckResult(f"{label}.bracket-flow", FAIL if residues else PASS,
                       time.perf_counter() - start,
                       residue="; ".join(residues) if residues else None)
