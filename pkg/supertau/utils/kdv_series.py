"""
Generating series of the KdV super tau-cover and the identities they satisfy.

With the factor sqrt(pi) removed the series are rational:

    b(lam) = sum_n g_n R_n lam^{-n-1/2},   g_n = Gamma(n+1/2)/Gamma(1/2)
    c(lam) = -sum_n sigma_n lam^{-n-1}
    B_n = (lam^{n+1/2} b)_+ / g_{n+1},     C_n = (lam^n c)_-

Two-variable identities expand 1/(mu - lam) as sum_i lam^i mu^{-i-1}.
"""
import logging
from fractions import Fraction

from supertau.models.diffpoly import DiffPoly
from supertau.models.generators import sigma
from supertau.models.series import LaurentJet, kernel_quotient
from supertau.utils.batch import run_checks
from supertau.utils.frobenius_flows import _residue
from supertau.utils.kdv import EPS2, U, gamma_ratio, kdv_R, p1_operator

logger = logging.getLogger(__name__)

LAM = "lam"
MU = "mu"
PAIR = (LAM, MU)
HALF = Fraction(1, 2)


def series_residue(series):
    """Text of the nonzero coefficients of a series, or None when it vanishes."""
    if series.is_zero():
        return None
    return "; ".join(f"{exps}: {coeff}" for exps, coeff in sorted(series.coefficients.items()))


class KdvSeries:
    """
    b, c, B_n and C_n to a fixed number of terms.

    Args:
        cover (KdvCover): supplies the sigma normal forms and the flows
        window (int): number of terms kept in b and c
    """

    def __init__(self, cover, window):
        self.cover = cover
        self.window = window

    def b(self, variable=LAM, window=None):
        window = window or self.window
        terms = {(-n - HALF,): kdv_R(n).scale(gamma_ratio(n)) for n in range(window)}
        return LaurentJet(terms, (-window + HALF,), (variable,))

    def c(self, variable=LAM, window=None):
        window = window or self.window
        terms = {(-n - 1,): -DiffPoly.gen(sigma(1, n)) for n in range(window)}
        return LaurentJet(terms, (-window,), (variable,))

    def B(self, n):
        """Polynomial part of lam^{n+1/2} b divided by g_{n+1}."""
        top = gamma_ratio(n + 1)
        terms = {(i,): kdv_R(n - i).scale(gamma_ratio(n - i) / top) for i in range(n + 1)}
        return LaurentJet(terms, None, (LAM,))

    def C(self, m, window=None):
        window = window or self.window
        return self.c(window=window).shift(m).split()[1]

    # -- helpers -------------------------------------------------------

    def dx(self, series):
        return series.map(self.cover.system.dx)

    def p_lambda(self, series):
        """(P1 - lam d) applied coefficientwise."""
        return series.map(lambda c: p1_operator(c, self.cover.system)) - self.dx(series).shift(1)

    def flow(self, rule, series):
        return series.map(rule)


# -- single-variable identities ----------------------------------------------------

def check_generating_identities(cover, window, threads=None):
    """Every generating-series identity of the KdV super tau-cover, to the given window."""
    series = KdvSeries(cover, window)
    wide = KdvSeries(cover, 2 * window + 2)
    system = cover.system
    checks = []

    def p_lambda_c():
        residue = series.p_lambda(series.c()) - system.dx(DiffPoly.gen(sigma(1, 0)))
        return series_residue(residue)

    checks.append(("kdv.series.p-lambda-c", p_lambda_c))

    for n in range(window):
        checks.append((f"kdv.series.p-lambda-B.{n}", lambda n=n: series_residue(
            series.p_lambda(series.B(n)) - system.dx(kdv_R(n + 1)))))

    def c_tau0():
        c = series.c()
        residue = series.flow(cover.tau_flow(0, check=False), c) - (c * series.dx(c)) * HALF
        return series_residue(residue)

    checks.append(("kdv.series.c-tau0", c_tau0))

    for n in range(1, window + 1):
        def tau_theta(n=n):
            expected = DiffPoly.zero()
            for i in range(n):
                expected = expected + DiffPoly.gen(sigma(1, i)) * cover.sigma_jet(n - i - 1, 1)
            return _residue(cover.tau_flow(n, check=False)(DiffPoly.gen(sigma(1, 0))) - expected.scale(HALF))
        checks.append((f"kdv.series.tau-theta.{n}", tau_theta))

    for n in range(window - 1):
        def tau_on_c(n=n):
            c = series.c()
            C = series.C(n)
            lhs = series.flow(cover.tau_flow(n, check=False), c)
            cc = (c * series.dx(c)).shift(n).split()[1]
            rhs = (C * series.dx(c) + c * series.dx(C) - cc) * HALF
            return series_residue(lhs - rhs)
        checks.append((f"kdv.series.tau-on-c.{n}", tau_on_c))

    def b_quadratic():
        b = series.b()
        u = DiffPoly.gen(U)
        squared = b * b
        lhs = squared * u - squared.shift(1)
        lhs = lhs + (b * series.dx(series.dx(b)) * 2 - series.dx(b) * series.dx(b)).map(lambda c: EPS2 * c.scale(Fraction(1, 8)))
        return series_residue(lhs + 1)

    checks.append(("kdv.series.b-quadratic", b_quadratic))

    checks.append(("kdv.series.c-tau", lambda: _c_tau_residue(cover, window, wide)))
    checks.append(("kdv.series.bc-prime", lambda: _bc_prime_residue(cover, window)))
    checks.append(("kdv.series.c-t", lambda: _c_t_residue(cover, window)))

    for k in range(window):
        for n in range(window):
            checks.append((f"kdv.series.duality.{k}{n}", lambda k=k, n=n: _residue(
                cover.tau_flow(n, check=False)(kdv_R(k + 1))
                - cover.t_flow(1, k, check=False)(DiffPoly.gen(sigma(1, n))))))

    return run_checks(checks, threads)


# -- two-variable identities ---------------------------------------------------

def _box(window, offset=1):
    return [-i - offset for i in range(window)]


def _c_tau_residue(cover, window, wide):
    """dc(lam)/dtau(mu) = (c(lam) - c(mu))(c(lam)' - c(mu)') / (2 (mu - lam))."""
    c_lam = wide.c(LAM).embed(PAIR)
    c_mu = wide.c(MU).embed(PAIR)
    difference = c_lam - c_mu
    numerator = difference * (wide.dx(c_lam) - wide.dx(c_mu))
    lam_box = _box(window)
    mu_box = _box(window)
    rhs = kernel_quotient(numerator, LAM, MU, (lam_box, mu_box))
    problems = {}
    for k in range(window):
        for n in range(window):
            lhs = -cover.tau_flow(n, check=False)(DiffPoly.gen(sigma(1, k)))
            value = lhs - rhs.coefficient(-k - 1, -n - 1).scale(HALF)
            if value:
                problems[(-k - 1, -n - 1)] = value
    return series_residue(LaurentJet(problems, None, (LAM, MU)))


def _concomitant(series, b_mu, c_lam):
    """(u - mu) b c + (eps^2/8)(b c'' - b' c' + b'' c)."""
    u = DiffPoly.gen(U)
    product = b_mu * c_lam
    b1, c1 = series.dx(b_mu), series.dx(c_lam)
    b2, c2 = series.dx(b1), series.dx(c1)
    dispersive = (b_mu * c2 - b1 * c1 + b2 * c_lam).map(lambda c: EPS2 * c.scale(Fraction(1, 8)))
    return product * u - product.shift(0, 1) + dispersive


def _bc_prime_residue(cover, window):
    """b(mu) c(lam)' = -d [B / (mu - lam)]_{lam/mu, lam-} with B the concomitant above."""
    series = KdvSeries(cover, 2 * window + 1)
    b_mu = series.b(MU, window + 1).embed(PAIR)
    c_lam = series.c(LAM).embed(PAIR)
    lam_box = _box(window)
    mu_box = [-i - HALF for i in range(window)]
    quotient = kernel_quotient(_concomitant(series, b_mu, c_lam), LAM, MU, (lam_box, mu_box))
    lhs = b_mu * series.dx(c_lam)
    problems = {}
    for e_lam in lam_box:
        for e_mu in mu_box:
            value = lhs.coefficient(e_lam, e_mu) + cover.system.dx(quotient.coefficient(e_lam, e_mu))
            if value:
                problems[(e_lam, e_mu)] = value
    return series_residue(LaurentJet(problems, None, (LAM, MU)))


def _c_t_residue(cover, window):
    """dc(lam)/dt(mu) = [(b(mu) c(lam)' - c(lam) b(mu)') / (2 (mu - lam))]_{lam-}.

    t(mu) = sum_n g_{n+1} mu^{-n-3/2} d/dt_n.
    """
    series = KdvSeries(cover, 2 * window + 1)
    b_mu = series.b(MU, window + 1).embed(PAIR)
    c_lam = series.c(LAM).embed(PAIR)
    wronskian = b_mu * series.dx(c_lam) - c_lam * series.dx(b_mu)
    lam_box = _box(window)
    mu_box = [-i - Fraction(3, 2) for i in range(window)]
    quotient = kernel_quotient(wronskian, LAM, MU, (lam_box, mu_box))
    problems = {}
    for k in range(window):
        for n in range(window):
            flow = cover.t_flow(1, n, check=False)(DiffPoly.gen(sigma(1, k)))
            lhs = -flow.scale(gamma_ratio(n + 1))
            value = lhs - quotient.coefficient(-k - 1, -n - Fraction(3, 2)).scale(HALF)
            if value:
                problems[(-k - 1, -n - Fraction(3, 2))] = value
    return series_residue(LaurentJet(problems, None, (LAM, MU)))


# -- zero curvature ----------------------------------------------------------------

def zero_curvature_residue(cover, n, m, window=None):
    """dC_m/dt_n - dB_n/dtau_m - (B_n C_m' - C_m B_n')/2 over the known window."""
    window = max(window or 0, n + m + 3)
    series = KdvSeries(cover, window)
    B, C = series.B(n), series.C(m)
    lhs = series.flow(cover.t_flow(1, n, check=False), C) - series.flow(cover.tau_flow(m, check=False), B)
    rhs = (B * series.dx(C) - C * series.dx(B)) * HALF
    return lhs - rhs


def sigma_flow_residue(cover, n, m, window=None):
    """dsigma_m/dt_n + res (B_n C_m' - C_m B_n') / 2."""
    window = max(window or 0, n + m + 3)
    series = KdvSeries(cover, window)
    B, C = series.B(n), series.C(m)
    residue = (B * series.dx(C) - C * series.dx(B)).coefficient(-1)
    return cover.t_flow(1, n, check=False)(DiffPoly.gen(sigma(1, m))) + residue.scale(HALF)


def check_zero_curvature(cover, nmax, mmax, window=None, threads=None):
    checks = []
    for n in range(nmax + 1):
        for m in range(mmax + 1):
            checks.append((f"kdv.zero-curvature.{n}{m}", lambda n=n, m=m: series_residue(
                zero_curvature_residue(cover, n, m, window))))
            checks.append((f"kdv.sigma-flow.{n}{m}", lambda n=n, m=m: _residue(
                sigma_flow_residue(cover, n, m, window))))
    return run_checks(checks, threads)
