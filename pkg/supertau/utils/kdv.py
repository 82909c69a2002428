"""
Super tau-cover of the KdV hierarchy.

The dependent variables are u = v^1, the odd sigma_k (sigma_0 = theta) and
the one-point functions f_k; times are t_n = t^{1,n} and tau_n. Everything
is polynomial in eps^2:

    R_0 = 1,  (n + 1/2) R_{n+1}' = P1 R_n,   P1 = u d + u'/2 + (eps^2/8) d^3
    du/dt_n = R_{n+1}',  du/dtau_n = sigma_n'
    sigma_k' = P1 sigma_{k-1}
    df_k/dt_n = Omega_{k,n},  df_k/dtau_n = Phi^n_k,  f_k' = R_{k+1}

The generator tuples coincide with those of the one-dimensional Frobenius
cover, so dispersionless images can be compared term by term.
"""
import logging
from fractions import Fraction

from supertau.models.diffpoly import DiffPoly
from supertau.models.errors import TruncationTooSmall
from supertau.models.generators import Kind, even_time, jet, odd_time, one_point, sigma
from supertau.utils.batch import run_checks
from supertau.utils.cache import cached
from supertau.utils.derivations import DerivationRule, XFlow
from supertau.utils.frobenius_flows import _residue
from supertau.utils.jet_algebra import RewriteSystem, antiderivative
from supertau.utils.variational import LocalFunctional, check_poisson_pair, variational_derivative

logger = logging.getLogger(__name__)

U = jet(1)
FREE = RewriteSystem()
EPS2 = DiffPoly.eps(2)


def gamma_ratio(j):
    """Gamma(j + 1/2) / Gamma(1/2) = (2j - 1)!! / 2^j; zero for j < 0."""
    if j < 0:
        return Fraction(0)
    value = Fraction(1)
    for i in range(j):
        value *= Fraction(2 * i + 1, 2)
    return value


def p1_operator(poly, system=None):
    """P1 f = u f' + u' f / 2 + (eps^2/8) f'''."""
    system = system or FREE
    first = system.dx(poly)
    third = system.dx(system.dx(first))
    u = DiffPoly.gen(U)
    return u * first + (DiffPoly.gen(jet(1, 1)) * poly).scale(Fraction(1, 2)) + (EPS2 * third).scale(Fraction(1, 8))


@cached
def kdv_R(n):
    """Gelfand-Dickey polynomial R_n with vanishing integration constants."""
    if n == 0:
        return DiffPoly.constant(1)
    value = antiderivative(p1_operator(kdv_R(n - 1))).scale(1 / Fraction(2 * n - 1, 2))
    logger.debug(f"R_{n} = {value}")
    return value


def kdv_R_table(rmax):
    return {n: kdv_R(n) for n in range(rmax + 1)}


class KdvCover:
    """
    Super tau-cover of the KdV hierarchy with the same protocol as SuperTauCover.

    Args:
        truncation (tuple): Optional (P, K) truncation of explicit times
        debug (bool): Assert that sigma rewrites lower the level
    """

    name = "kdv"

    def __init__(self, truncation=None, debug=False):
        self.truncation = truncation
        self.system = RewriteSystem(
            sigma_rule=self._sigma_rule,
            onepoint_rule=lambda alpha, p: kdv_R(p + 1),
            debug=debug,
        )
        self.x_flow = XFlow(self.system)
        self._omega = {}
        self._phi = {}
        self._t_rules = {}
        self._tau_rules = {}

    def __repr__(self):
        return f"<KdvCover truncation={self.truncation}>"

    @property
    def fields(self):
        return [1]

    def eta_up(self, a, b):
        return Fraction(1)

    def eta_lo(self, a, b):
        return Fraction(1)

    def h(self, alpha, p):
        return kdv_R(p + 1)

    def resonant(self, alpha, p):
        return False

    def is_free_sigma(self, alpha, k):
        return True

    def _sigma_rule(self, alpha, k):
        return p1_operator(DiffPoly.gen(sigma(1, k - 1)), self.system)

    def sigma_jet(self, k, s=0):
        return self.system.sigma_jet(1, k, s)

    # -- densities -----------------------------------------------------

    def omega(self, a, k, b, n):
        """Omega_{k,n} with Omega_{k,n}' = dR_{k+1}/dt_n and no constant term."""
        key = (k, n)
        cached_value = self._omega.get(key)
        if cached_value is None:
            if n == 0:
                cached_value = kdv_R(k + 1)
            else:
                cached_value = antiderivative(self.t_flow(1, n, check=False)(kdv_R(k + 1)))
            self._omega[key] = cached_value
        return cached_value

    def phi_value(self, alpha, k, n):
        """Phi^n_k with Phi^n_k' = dR_{k+1}/dtau_n.

        Closed form read off from b(mu) c(lambda)' = -d[B S]_{lambda-}, where
        B = (u - mu) b c + (eps^2/8)(b c'' - b' c' + b'' c) and S = 1/(mu - lambda).
        """
        key = (k, n)
        cached_value = self._phi.get(key)
        if cached_value is not None:
            return cached_value
        u = DiffPoly.gen(U)
        dx = self.system.dx
        total = DiffPoly.zero()
        for i in range(k + 1):
            m = k - i - 1
            s0 = self.sigma_jet(n + i)
            s1 = self.sigma_jet(n + i, 1)
            s2 = self.sigma_jet(n + i, 2)
            rm = kdv_R(m) if m >= 0 else DiffPoly.zero()
            gm = gamma_ratio(m)
            inner = (u * rm).scale(gm) - kdv_R(m + 1).scale(gamma_ratio(m + 1))
            piece = inner * s0
            if m >= 0:
                rm1 = dx(rm)
                rm2 = dx(rm1)
                piece = piece + (EPS2 * (rm * s2 - rm1 * s1 + rm2 * s0)).scale(gm / 8)
            total = total + piece.scale(i + 1)
            total = total + (kdv_R(k - i) * s0).scale(gamma_ratio(k - i) / 2)
        value = self.system.normalize(total.scale(-1 / gamma_ratio(k + 1)))
        self._phi[key] = value
        return value

    # -- flows ---------------------------------------------------------

    def _require(self, kind, index):
        if self.truncation is None:
            return
        P, K = self.truncation
        limit = P if kind == "t" else K
        if index > limit:
            raise TruncationTooSmall(f"{kind}-flow of index {index} leaves the truncation {limit}")

    def t_image(self, beta, n, gen):
        kind = gen[0]
        if kind == Kind.JET:
            return self.system.dx(kdv_R(n + 1))
        if kind == Kind.SIGMA:
            k = gen[1]
            total = DiffPoly.zero()
            top = gamma_ratio(n + 1)
            for i in range(n + 1):
                r = kdv_R(n - i)
                piece = r * self.sigma_jet(k + i, 1) - self.system.dx(r) * self.sigma_jet(k + i)
                total = total + piece.scale(gamma_ratio(n - i) / top)
            return total.scale(Fraction(1, 2))
        if kind == Kind.ONE_POINT:
            return self.omega(1, gen[2], 1, n)
        if gen == even_time(1, n):
            return DiffPoly.constant(1)
        return None

    def tau_image(self, m, gen):
        kind = gen[0]
        if kind == Kind.JET:
            return self.sigma_jet(m, 1)
        if kind == Kind.SIGMA:
            k = gen[1]
            if k == m:
                return None
            low, high = (k, m) if m > k else (m, k)
            total = DiffPoly.zero()
            for i in range(high - low):
                total = total + DiffPoly.gen(sigma(1, low + i)) * self.sigma_jet(high - i - 1, 1)
            total = total.scale(Fraction(1, 2))
            return total if m > k else -total
        if kind == Kind.ONE_POINT:
            return self.phi_value(1, gen[2], m)
        if gen == odd_time(m):
            return DiffPoly.constant(1)
        return None

    def t_flow(self, beta, n, check=True):
        if check:
            self._require("t", n)
        if n not in self._t_rules:
            self._t_rules[n] = DerivationRule(("t", 1, n), 0, lambda gen: self.t_image(1, n, gen),
                                              self.system, self.truncation)
        return self._t_rules[n]

    def tau_flow(self, m, check=True):
        if check:
            self._require("tau", m)
        if m not in self._tau_rules:
            self._tau_rules[m] = DerivationRule(("tau", m), 1, lambda gen: self.tau_image(m, gen),
                                                self.system, self.truncation)
        return self._tau_rules[m]

    def targets(self, pmax, kmax, one_points=True):
        gens = [U] + [sigma(1, k) for k in range(kmax + 1)]
        if one_points:
            gens += [one_point(1, p) for p in range(pmax + 1)]
        return gens


def kdv_flows(cover, rmax, kmax):
    flows = {("t", 1, n): cover.t_flow(1, n) for n in range(rmax + 1)}
    flows.update({("tau", m): cover.tau_flow(m) for m in range(kmax + 1)})
    return flows


def kdv_omega_phi(cover, kmax, nmax):
    omega = {(k, n): cover.omega(1, k, 1, n) for k in range(kmax + 1) for n in range(nmax + 1)}
    phi = {(k, n): cover.phi_value(1, k, n) for k in range(kmax + 1) for n in range(nmax + 1)}
    return omega, phi


# -- Hamiltonian structure -----------------------------------------------------

def kdv_poisson_pair():
    """P0 = 1/2 int theta theta', P1 = 1/2 int (u theta theta' + (eps^2/8) theta theta''')."""
    theta0 = DiffPoly.gen(sigma(1, 0))
    p0 = (theta0 * DiffPoly.gen(sigma(1, 0, 1))).scale(Fraction(1, 2))
    p1 = (DiffPoly.gen(U) * theta0 * DiffPoly.gen(sigma(1, 0, 1))
          + (EPS2 * theta0 * DiffPoly.gen(sigma(1, 0, 3))).scale(Fraction(1, 8))).scale(Fraction(1, 2))
    return LocalFunctional(p0, 2), LocalFunctional(p1, 2)


def check_recursion(rmax, threads=None):
    """(n + 1/2) R_{n+1}' = P1 R_n and delta H_p / delta u = R_{p+1} with H_p = int R_{p+2}."""
    checks = []
    for n in range(rmax):
        checks.append((f"kdv.recursion.R{n + 1}", lambda n=n: _residue(
            FREE.dx(kdv_R(n + 1)).scale(Fraction(2 * n + 1, 2)) - p1_operator(kdv_R(n)))))
    for p in range(max(rmax - 1, 0)):
        checks.append((f"kdv.hamiltonian.H{p}", lambda p=p: _residue(
            variational_derivative(kdv_R(p + 2), "u", 1) - kdv_R(p + 1))))
    return run_checks(checks, threads)


def check_kdv_poisson_pair():
    P0, P1 = kdv_poisson_pair()
    return check_poisson_pair(P0, P1, label="kdv.poisson")
