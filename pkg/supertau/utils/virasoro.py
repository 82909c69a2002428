"""
Virasoro operators L_m = L_m^even + L_m^odd and the symmetries they induce.

    L_m^odd = sum_{k >= max(0, -m)} (k + c0) tau_k d/dtau_{k+m}

On the truncated time algebra these close up to a boundary term at tau_0:
for n >= 1

    [L_{-1}, L_n] = -(n + 1) L_{n-1} + c0 (1 - c0) tau_0 d/dtau_{n-1}

so the relations hold exactly for c0 in {0, 1} and the term is carried
explicitly otherwise. The symmetry flows satisfy
[d/ds_m, d/ds_n] = (n - m) d/ds_{m+n} plus the flow of the same boundary term.
"""
import itertools
import logging
from fractions import Fraction

from supertau.models.diffpoly import DiffPoly
from supertau.models.errors import UnsupportedOrder
from supertau.models.frobenius_spec import HALF
from supertau.models.generators import CENTRAL, even_time, jet, odd_time, one_point, sigma, Kind
from supertau.models.virasoro_coefficients import VirasoroCoefficients
from supertau.utils.batch import run_checks
from supertau.utils.derivations import DerivationRule, commutator
from supertau.utils.frobenius_flows import _label, _residue
from supertau.utils.kdv import EPS2, gamma_ratio

logger = logging.getLogger(__name__)

SYMBOLIC = "symbolic"


def resolve_c0(value=None):
    """c0 as a DiffPoly: the central generator when symbolic, else a rational constant."""
    if value is None or value == SYMBOLIC:
        return DiffPoly.gen(CENTRAL)
    if isinstance(value, DiffPoly):
        return value
    return DiffPoly.constant(Fraction(str(value)))


def boundary_term(m, n, c0):
    """(j, weight) with [L_m^odd, L_n^odd] - (m - n) L_{m+n}^odd = weight tau_0 d/dtau_j, or None."""
    kappa = c0 - c0 * c0
    if not kappa:
        return None
    if m == -1 and n >= 1:
        return n - 1, kappa
    if n == -1 and m >= 1:
        return m - 1, -kappa
    return None


def _time(index):
    return DiffPoly.gen(even_time(*index))


# -- coefficient tables -----------------------------------------------------------

def _matrix_product(x, y):
    size = len(x)
    return [[sum((x[i][k] * y[k][j] for k in range(size)), Fraction(0)) for j in range(size)]
            for i in range(size)]


def euler_rhs(tables, coeffs, a, p, b, q, with_c=True):
    """2 a Omega Omega + b Omega + b Omega (+ 2 c) for one pair of indices."""
    total = DiffPoly.zero()
    for (left, right), value in coeffs.a.items():
        total = total + (tables.omega(a, p, *left) * tables.omega(*right, b, q)).scale(2 * value)
    for upper, value in coeffs.b_column((a, p)):
        total = total + tables.omega(*upper, b, q).scale(value)
    for upper, value in coeffs.b_column((b, q)):
        total = total + tables.omega(*upper, a, p).scale(value)
    if with_c:
        total = total + DiffPoly.constant(2 * coeffs.c_of((a, p), (b, q)))
    return total


def euler_lhs(spec, tables, m, a, p, b, q):
    """E^{.(m+1)} applied to Omega_{a,p;b,q}."""
    return spec.apply_frobenius_power(m + 1, tables.omega(a, p, b, q))


def derive_c(spec, tables, coeffs, bound):
    """c coefficients forced by the Euler identity for p + q <= bound."""
    values = {}
    for a in spec.fields:
        for b in spec.fields:
            for p in range(bound + 1):
                for q in range(bound + 1 - p):
                    rest = euler_lhs(spec, tables, coeffs.m, a, p, b, q) - euler_rhs(
                        tables, coeffs, a, p, b, q, with_c=False)
                    if not rest.is_constant():
                        logger.warning(f"Euler identity for L_{coeffs.m} leaves a non-constant "
                                       f"remainder at ({a},{p};{b},{q}): {rest}")
                        continue
                    if rest:
                        values[((a, p), (b, q))] = rest.constant_term() / 2
    return values


def builtin_coefficients(spec, m, levels, tables=None):
    """
    Coefficient table of L_m for a Frobenius manifold.

    Args:
        spec (FrobeniusSpec): Manifold data
        m (int): Order, -1 <= m <= 1 unless the manifold document supplies a table
        levels (int): Largest time level q for which b^{.}_{.,q} is generated
        tables (FrobeniusTables): Omega tables used to derive c

    Raises:
        UnsupportedOrder: for m >= 2 without a supplied table, or m = 1 when R_r R_s != 0
    """
    if m in spec.virasoro_tables:
        return spec.virasoro_tables[m]
    if m not in (-1, 0, 1):
        raise UnsupportedOrder(f"no Virasoro coefficients for m = {m} on {spec.name}")
    a, b = {}, {}
    fields = list(spec.fields)
    if m == -1:
        for alpha in fields:
            for q in range(1, levels + 1):
                b[((alpha, q - 1), (alpha, q))] = 1
    elif m == 0:
        for alpha in fields:
            for q in range(levels + 1):
                b[((alpha, q), (alpha, q))] = q + HALF + spec.mu_of(alpha)
        for r in range(1, len(spec.R) + 1):
            for alpha in fields:
                for beta in fields:
                    value = spec.R_entry(r, alpha, beta)
                    for q in range(r, levels + 1):
                        if value:
                            key = ((alpha, q - r), (beta, q))
                            b[key] = b.get(key, 0) + value
    else:
        for i in range(len(spec.R)):
            for j in range(len(spec.R)):
                if any(any(row) for row in _matrix_product(spec.R[i], spec.R[j])):
                    raise UnsupportedOrder("L_1 needs R_{r,2}, which is only available as a supplied table")
        for alpha in fields:
            for beta in fields:
                value = spec.eta_up(alpha, beta) * (HALF + spec.mu_of(alpha)) * (HALF + spec.mu_of(beta)) / 2
                if value:
                    a[((alpha, 0), (beta, 0))] = value
            mu = spec.mu_of(alpha)
            for q in range(levels + 1):
                b[((alpha, q + 1), (alpha, q))] = (q + HALF + mu) * (q + Fraction(3, 2) + mu)
        for r in range(1, len(spec.R) + 1):
            for alpha in fields:
                for beta in fields:
                    value = spec.R_entry(r, alpha, beta)
                    if not value:
                        continue
                    for q in range(max(r - 1, 0), levels + 1):
                        key = ((alpha, q + 1 - r), (beta, q))
                        b[key] = b.get(key, 0) + value * (2 * q + 2 + 2 * spec.mu_of(beta))
    const = Fraction(0)
    if m == 0:
        const = sum((Fraction(1, 4) - mu * mu for mu in spec.mu), Fraction(0)) / 4
    coeffs = VirasoroCoefficients(m=m, a=a, b=b, const=const)
    if tables is not None:
        coeffs.c = derive_c(spec, tables, coeffs, m + 2 + len(spec.R))
    return coeffs


def kdv_coefficients(m, levels):
    """Closed-form KdV tables; a and c carry eps^2 and eps^-2 in the operator."""
    if m < -1:
        raise UnsupportedOrder(f"no Virasoro operator L_{m}")
    one = 1
    a, b, c = {}, {}, {}
    for k in range(max(m, 0)):
        l = m - 1 - k
        a[((one, k), (one, l))] = gamma_ratio(k + 1) * gamma_ratio(l + 1) / 2
    for k in range(max(0, -m), levels + 1):
        b[((one, k + m), (one, k))] = gamma_ratio(k + m + 1) / gamma_ratio(k)
    if m == -1:
        c[((one, 0), (one, 0))] = HALF
    const = Fraction(1, 16) if m == 0 else Fraction(0)
    return VirasoroCoefficients(m=m, a=a, b=b, c=c, const=const, dispersive=True)


class CoefficientFamily:
    """Memoized m -> VirasoroCoefficients."""

    def __init__(self, name, build):
        self.name = name
        self._build = build
        self._tables = {}

    def __call__(self, m):
        if m not in self._tables:
            self._tables[m] = self._build(m)
        return self._tables[m]

    def __repr__(self):
        return f"<CoefficientFamily {self.name} orders={sorted(self._tables)}>"


def builtin_family(spec, tables, levels):
    return CoefficientFamily(spec.name, lambda m: builtin_coefficients(spec, m, levels, tables))


def kdv_family(levels):
    return CoefficientFamily("kdv", lambda m: kdv_coefficients(m, levels))


def verify_euler_omega_identity(spec, tables, coeffs, pmax, threads=None):
    """E^{.(m+1)} Omega = 2 a Omega Omega + b Omega + b Omega + 2 c for p, q <= pmax."""
    checks = []
    for a in spec.fields:
        for b in spec.fields:
            for p in range(pmax + 1):
                for q in range(pmax + 1):
                    checks.append((f"{spec.name}.euler.L{coeffs.m}.{a}{p}-{b}{q}",
                                   lambda a=a, b=b, p=p, q=q: _residue(
                                       euler_lhs(spec, tables, coeffs.m, a, p, b, q)
                                       - euler_rhs(tables, coeffs, a, p, b, q))))
    return run_checks(checks, threads)


# -- operators on the time algebra ------------------------------------------------

class VirasoroOperator:
    """
    L_m acting on polynomials in the times t^{alpha,p} and tau_k.

    Args:
        coeffs (VirasoroCoefficients): even part
        c0 (DiffPoly): the constant of the odd part
        boundary (tuple): optional (j, weight) replacing the odd part by weight tau_0 d/dtau_j
    """

    def __init__(self, coeffs, c0, boundary=None):
        self.coeffs = coeffs
        self.c0 = c0
        self.boundary = boundary
        self._by_upper = {}
        if coeffs is not None:
            for (upper, lower), value in coeffs.b.items():
                self._by_upper.setdefault(upper, []).append((lower, value))

    def __repr__(self):
        m = None if self.coeffs is None else self.coeffs.m
        return f"<VirasoroOperator m={m} boundary={self.boundary}>"

    def _odd_part(self, poly, gens):
        total = DiffPoly.zero()
        if self.boundary is not None:
            j, weight = self.boundary
            derivative = poly.partial(odd_time(j))
            if derivative:
                total = total + weight * DiffPoly.gen(odd_time(0)) * derivative
            return total
        m = self.coeffs.m
        for gen in gens:
            if gen[0] != Kind.ODD_TIME:
                continue
            k = gen[1] - m
            if k < 0:
                continue
            total = total + (self.c0 + k) * DiffPoly.gen(odd_time(k)) * poly.partial(gen)
        return total

    def __call__(self, poly):
        gens = poly.generators()
        total = self._odd_part(poly, gens)
        coeffs = self.coeffs
        if coeffs is None or self.boundary is not None:
            return total
        even_scale = EPS2 if coeffs.dispersive else DiffPoly.constant(1)
        c_scale = DiffPoly.eps(-2) if coeffs.dispersive else DiffPoly.constant(1)
        total = total + poly.scale(coeffs.const)
        for gen in gens:
            if gen[0] != Kind.EVEN_TIME:
                continue
            derivative = poly.partial(gen)
            for lower, value in self._by_upper.get((gen[1], gen[2]), ()):
                total = total + (_time(lower) * derivative).scale(value)
        for (left, right), value in coeffs.a.items():
            first = poly.partial(even_time(*left))
            if first:
                total = total + (even_scale * first.partial(even_time(*right))).scale(value)
        for (left, right), value in coeffs.c.items():
            total = total + (c_scale * _time(left) * _time(right) * poly).scale(value)
        return total


def time_monomials(fields, P, K, degree):
    """Every monomial of degree <= `degree` in t^{alpha,p <= P} and tau_{k <= K}."""
    even = [even_time(a, p) for a in fields for p in range(P + 1)]
    odd = [odd_time(k) for k in range(K + 1)]
    variables = even + odd
    monomials = [DiffPoly.constant(1)]
    for d in range(1, degree + 1):
        for combo in itertools.combinations_with_replacement(variables, d):
            odd_part = [g for g in combo if g in odd]
            if len(set(odd_part)) != len(odd_part):
                continue
            term = DiffPoly.constant(1)
            for g in combo:
                term = term * DiffPoly.gen(g)
            monomials.append(term)
    return monomials


def algebra_residue(family, m, n, c0, monomials):
    L_m = VirasoroOperator(family(m), c0)
    L_n = VirasoroOperator(family(n), c0)
    L_mn = VirasoroOperator(family(m + n), c0)
    boundary = boundary_term(m, n, c0)
    extra = VirasoroOperator(None, c0, boundary) if boundary else None
    residues = []
    for mono in monomials:
        value = L_m(L_n(mono)) - L_n(L_m(mono)) - L_mn(mono).scale(m - n)
        if extra is not None:
            value = value - extra(mono)
        if value:
            residues.append(f"[{mono}] {value}")
            if len(residues) >= 3:
                break
    return "; ".join(residues) or None


def verify_virasoro_algebra(family, orders, fields, P, K, c0=None, degree=3, threads=None):
    """[L_m, L_n] = (m - n) L_{m+n} (plus the tau_0 boundary term) on time monomials."""
    c0 = resolve_c0(c0)
    monomials = time_monomials(fields, P, K, degree)
    checks = []
    for m, n in itertools.combinations(sorted(orders), 2):
        checks.append((f"{family.name}.virasoro.algebra.L{m}.L{n}",
                       lambda m=m, n=n: algebra_residue(family, m, n, c0, monomials)))
    return run_checks(checks, threads)


# -- symmetry flows ---------------------------------------------------------------

class VirasoroFlows:
    """
    Virasoro symmetries d/ds_m of a super tau-cover.

    df_{g,r}/ds_m = a (Omega_{g,r;.} f_. + f_. Omega_{.;g,r}) + b f + b t Omega + 2 c t
                    + sum_k (k + c0) tau_k Phi^{k+m}_{g,r}

    with an extra eps^2 a dOmega/dt term for dispersive families. The images
    of v, sigma and Phi generators follow from those of the one-point functions.

    Args:
        cover: SuperTauCover or KdvCover with a (P, K) truncation
        family (CoefficientFamily): m -> even coefficients
        c0: 'symbolic', None or a rational
    """

    def __init__(self, cover, family, c0=None):
        if cover.truncation is None:
            raise ValueError("Virasoro flows need a cover with a (P, K) truncation")
        self.cover = cover
        self.family = family
        self.c0 = resolve_c0(c0)
        self.truncation = cover.truncation
        self._rules = {}

    def __repr__(self):
        return f"<VirasoroFlows {self.cover.name} c0={self.c0}>"

    def _odd(self, m):
        c0 = self.c0

        def weight(k):
            if k < max(0, -m):
                return None
            return k + m, c0 + k
        return weight

    def _one_point_image(self, coeffs, odd, gamma, r):
        cover = self.cover
        P, K = self.truncation
        target = (gamma, r)
        total = DiffPoly.zero()
        if coeffs is not None:
            for (left, right), value in coeffs.a.items():
                om = cover.omega(gamma, r, *left)
                total = total + (om * DiffPoly.gen(one_point(*right))
                                 + DiffPoly.gen(one_point(*left)) * cover.omega(*right, gamma, r)).scale(value)
                if coeffs.dispersive:
                    total = total + (EPS2 * cover.t_flow(right[0], right[1], check=False)(om)).scale(value)
            for upper, value in coeffs.b_column(target):
                total = total + DiffPoly.gen(one_point(*upper)).scale(value)
            for (upper, lower), value in coeffs.b.items():
                if lower[1] <= P:
                    total = total + (_time(lower) * cover.omega(gamma, r, *upper)).scale(value)
            for (left, right), value in coeffs.c.items():
                if left == target and right[1] <= P:
                    total = total + _time(right).scale(2 * value)
        for k in range(K + 1):
            term = odd(k)
            if term is not None:
                j, weight = term
                total = total + weight * DiffPoly.gen(odd_time(k)) * cover.phi_value(gamma, r, j)
        return total

    def _past_truncation(self, odd, alpha, p, n):
        """d/dtau_n of the dropped tau_n Phi term, n > K."""
        term = odd(n)
        if term is None:
            return DiffPoly.zero()
        j, weight = term
        return weight * self.cover.phi_value(alpha, p, j)

    def _base_image(self, coeffs, odd, gen):
        cover = self.cover
        K = self.truncation[1]
        kind = gen[0]
        if kind == Kind.ONE_POINT:
            return self._one_point_image(coeffs, odd, gen[1], gen[2])
        if kind == Kind.JET:
            alpha = gen[1]
            total = DiffPoly.zero()
            for beta in cover.fields:
                eta = cover.eta_up(alpha, beta)
                if eta:
                    total = total + cover.x_flow(self._one_point_image(coeffs, odd, beta, 0)).scale(eta)
            return total
        if kind == Kind.SIGMA:
            _, p, alpha, _ = gen
            image = cover.tau_flow(p, check=False)(self._one_point_image(coeffs, odd, alpha, 0))
            if p > K:
                image = image + self._past_truncation(odd, alpha, 0, p)
            return image
        if kind == Kind.PHI:
            _, n, alpha, p = gen
            image = cover.tau_flow(n, check=False)(self._one_point_image(coeffs, odd, alpha, p))
            if n > K:
                image = image + self._past_truncation(odd, alpha, p, n)
            return image
        return None

    def _rule(self, name, coeffs, odd):
        return DerivationRule(name, 0, lambda gen: self._base_image(coeffs, odd, gen),
                              self.cover.system, self.truncation)

    def flow(self, m):
        if m not in self._rules:
            self._rules[m] = self._rule(("s", m), self.family(m), self._odd(m))
        return self._rules[m]

    def boundary_flow(self, j, weight):
        """Flow of weight tau_0 d/dtau_j."""
        key = ("boundary", j, weight)
        if key not in self._rules:
            self._rules[key] = self._rule(key, None, lambda k: (j, weight) if k == 0 else None)
        return self._rules[key]

    def commutation_residue(self, m, n, poly):
        """[d/ds_m, d/ds_n] - (n - m) d/ds_{m+n} - boundary flow, applied to poly."""
        value = commutator(self.flow(m), self.flow(n), poly) - self.flow(m + n)(poly).scale(n - m)
        boundary = boundary_term(n, m, self.c0)
        if boundary is not None:
            value = value - self.boundary_flow(*boundary)(poly)
        return value


def _gen_label(gen):
    return "_".join(str(x) for x in gen)


def verify_symmetry_commutation(vflows, orders, pmax, kmax, threads=None):
    """[d/ds_m, d/dt^{b,q}] = 0 and [d/ds_m, d/dtau_n] = 0 on the cover generators."""
    cover = vflows.cover
    targets = cover.targets(pmax, kmax)
    checks = []
    for m in orders:
        s = vflows.flow(m)
        others = [cover.t_flow(beta, q) for beta in cover.fields for q in range(pmax + 1)]
        others += [cover.tau_flow(k) for k in range(kmax + 1)]
        for other in others:
            for gen in targets:
                checks.append((f"{cover.name}.virasoro.s{m}.{_label(other.name)}.{_gen_label(gen)}",
                               lambda o=other, g=gen, s=s: _residue(commutator(s, o, DiffPoly.gen(g)))))
    return run_checks(checks, threads)


def verify_flow_algebra(vflows, orders, pmax, kmax, threads=None):
    """[d/ds_m, d/ds_n] = (n - m) d/ds_{m+n} on the cover generators."""
    cover = vflows.cover
    targets = cover.targets(pmax, kmax)
    checks = []
    for m, n in itertools.combinations(sorted(orders), 2):
        try:
            vflows.family(m + n)
        except UnsupportedOrder as e:
            logger.warning(f"Skipping [s{m}, s{n}] on {cover.name}: {e}")
            continue
        for gen in targets:
            checks.append((f"{cover.name}.virasoro.s{m}.s{n}.{_gen_label(gen)}",
                           lambda m=m, n=n, g=gen: _residue(
                               vflows.commutation_residue(m, n, DiffPoly.gen(g)))))
    return run_checks(checks, threads)


def verify_ab_identities(vflows, spec, orders, threads=None):
    """Christoffel identities behind the symmetry proof and the tau_0 tau_1 relation."""
    cover = vflows.cover
    checks = []
    fields = list(spec.fields)
    mu1 = spec.mu_of(1)
    for a in fields:
        for b in fields:
            for lam in fields:
                gam = spec.gamma[(a, b, lam)]
                checks.append((f"{spec.name}.ab.unit.{a}{b}{lam}",
                               lambda gam=gam: _residue(gam.partial(jet(1)))))
                weight = spec.mu_of(lam) - spec.mu_of(a) - spec.mu_of(b) - mu1
                checks.append((f"{spec.name}.ab.homogeneous.{a}{b}{lam}",
                               lambda gam=gam, weight=weight: _residue(
                                   spec.apply_euler(gam) - gam.scale(weight))))
                rhs = DiffPoly.zero()
                for x in fields:
                    for y in fields:
                        factor = spec.eta_up(x, b) * (HALF + spec.mu_of(x)) * spec.eta_lo(x, y)
                        if factor:
                            rhs = rhs + spec.c_upper[(a, y, lam)].scale(factor)
                checks.append((f"{spec.name}.ab.raised.{a}{b}{lam}",
                               lambda gam=gam, rhs=rhs: _residue(gam - rhs)))
    for lam in fields:
        def a_minus_b(lam=lam):
            A = cover.tau_flow(1)(DiffPoly.gen(sigma(lam, 0))).scale(Fraction(3, 2) + spec.mu_of(lam))
            B = DiffPoly.zero()
            for g in fields:
                for b in fields:
                    gam = spec.gamma[(g, b, lam)]
                    if not gam:
                        continue
                    pair = DiffPoly.gen(sigma(b, 0)) * DiffPoly.gen(sigma(g, 0, 1))
                    weight = Fraction(3, 2) + spec.mu_of(g) + spec.mu_of(b) + mu1
                    B = B + (spec.apply_euler(gam) + gam.scale(weight)) * pair
            return _residue(cover.system.normalize(A - B))
        checks.append((f"{spec.name}.ab.a-equals-b.{lam}", a_minus_b))
        for m in orders:
            def tau_relation(lam=lam, m=m):
                f = DiffPoly.gen(one_point(lam, 0))
                tau0, tau1, s = cover.tau_flow(0), cover.tau_flow(1), vflows.flow(m)
                return _residue(s(tau1(tau0(f))) - tau1(tau0(s(f))))
            checks.append((f"{spec.name}.ab.tau-relation.s{m}.{lam}", tau_relation))
    return run_checks(checks, threads)
