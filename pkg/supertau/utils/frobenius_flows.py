"""
Principal hierarchy, its super extension and the super tau-cover of a Frobenius manifold.

Flows are DerivationRules on the generators v^alpha, sigma_{alpha,k},
f_{alpha,p}, the resonant Phi generators and the explicit times:

    dv^alpha/dt^{beta,p}        = eta^{alpha gamma} dx(d_gamma h_{beta,p+1})
    dsigma_{alpha,k}/dt^{beta,p} = eta^{gamma eps} d_alpha d_eps h_{beta,p+1} sigma^1_{gamma,k}
    dv^alpha/dtau_m             = eta^{alpha beta} sigma^1_{beta,m}
    dsigma_{alpha,k}/dtau_m     = Gamma^{gamma beta}_alpha sum_i sigma_{beta,k+i} sigma^1_{gamma,m-i-1}
    df_{alpha,p}/dt^{beta,q}    = Omega_{alpha,p;beta,q}
    df_{alpha,p}/dtau_n         = Phi^n_{alpha,p}
"""
import logging
from fractions import Fraction

import sympy

from supertau.models.diffpoly import DiffPoly
from supertau.models.errors import TruncationTooSmall
from supertau.models.frobenius_spec import HALF
from supertau.models.generators import (
    Kind, even_time, jet, odd_time, one_point, phi, sigma,
)
from supertau.utils.batch import run_checks
from supertau.utils.derivations import DerivationRule, XFlow, commutator
from supertau.utils.frobenius_tables import FrobeniusTables, detect_resonance, from_sympy, to_sympy
from supertau.utils.jet_algebra import RewriteSystem

logger = logging.getLogger(__name__)


def _sigma_pair(mu, low, delta, high):
    """sigma_{mu,low} sigma^1_{delta,high}."""
    return DiffPoly.gen(sigma(mu, low)) * DiffPoly.gen(sigma(delta, high, 1))


def sigma_relations(spec):
    """
    Undifferentiated relations among the sigma variables.

    For every alpha with mu_alpha = 1/2 the recursion forces
    eta^{alpha beta} sigma_{beta,k+1} = g^{alpha beta} sigma_{beta,k}. The rows
    are brought to reduced echelon form; each pivot sigma is then expressed
    through lower levels and the non-pivot sigma of the same level.

    Returns:
        dict: pivot index -> list of (beta, level offset, coefficient DiffPoly),
        offset 0 meaning sigma_{beta,k} and 1 meaning sigma_{beta,k+1}
    """
    rows = [a for a in spec.fields if spec.mu_of(a) == HALF]
    if not rows:
        return {}
    n = spec.n
    augmented = sympy.Matrix([[to_sympy(spec.eta_up(a, b)) for b in spec.fields]
                              + [1 if r == i else 0 for r in range(len(rows))]
                              for i, a in enumerate(rows)])
    reduced, pivots = augmented.rref()
    relations = {}
    for r, column in enumerate(pivots):
        if column >= n:
            continue
        pivot = column + 1
        terms = []
        for b in spec.fields:
            if b != pivot and reduced[r, b - 1] != 0:
                terms.append((b, 1, DiffPoly.constant(-from_sympy(reduced[r, b - 1]))))
        for b in spec.fields:
            total = DiffPoly.zero()
            for i, a in enumerate(rows):
                weight = reduced[r, n + i]
                if weight != 0:
                    total = total + spec.g_upper[(a, b)].scale(from_sympy(weight))
            if total:
                terms.append((b, 0, total))
        relations[pivot] = terms
    return relations


class SuperTauCover:
    """
    Super tau-cover of the principal hierarchy of one Frobenius manifold.

    Args:
        spec (FrobeniusSpec): Validated manifold data
        tables (FrobeniusTables): Shared h/Omega tables, built when omitted
        truncation (tuple): Optional (P, K); explicit times t^{alpha,p > P}
            and tau_{k > K} are dropped from every image
        debug (bool): Assert that sigma rewrites lower the level
    """

    def __init__(self, spec, tables=None, truncation=None, debug=False):
        self.spec = spec
        self.tables = tables or FrobeniusTables(spec)
        self.truncation = truncation
        self.relations = sigma_relations(spec)
        self.system = RewriteSystem(
            sigma_rule=self._sigma_rule,
            onepoint_rule=lambda alpha, p: self.tables.h(alpha, p),
            phi_rule=self._phi_rule,
            sigma_relation=self._sigma_relation,
            debug=debug,
        )
        self.x_flow = XFlow(self.system)
        self._phi = {}
        self._delta = {}
        self._t_rules = {}
        self._tau_rules = {}
        logger.info(f"Built super tau-cover for {spec.name} "
                    f"({len(self.relations)} sigma relations)")

    def __repr__(self):
        return f"<SuperTauCover {self.spec.name} truncation={self.truncation}>"

    # -- protocol shared with the KdV cover ----------------------------

    @property
    def name(self):
        return self.spec.name

    @property
    def fields(self):
        return list(self.spec.fields)

    def eta_up(self, a, b):
        return self.spec.eta_up(a, b)

    def eta_lo(self, a, b):
        return self.spec.eta_lo(a, b)

    def h(self, alpha, p):
        return self.tables.h(alpha, p)

    def omega(self, a, p, b, q):
        return self.tables.omega(a, p, b, q)

    def resonant(self, alpha, p):
        return p >= 1 and 1 - 2 * p - 2 * self.spec.mu_of(alpha) == 0

    def is_free_sigma(self, alpha, k):
        return self.system.relation(alpha, k) is None

    # -- rewrite rules -------------------------------------------------

    def _sigma_rule(self, beta, k):
        """dx sigma_{beta,k} = eta_{beta alpha}(g^{alpha gamma} sigma^1_{gamma,k-1} + Gamma^{alpha gamma}_delta v^{delta,1} sigma_{gamma,k-1})."""
        spec = self.spec
        total = DiffPoly.zero()
        for alpha in spec.fields:
            eta = spec.eta_lo(beta, alpha)
            if not eta:
                continue
            for g in spec.fields:
                if spec.g_upper[(alpha, g)]:
                    total = total + (spec.g_upper[(alpha, g)] * DiffPoly.gen(sigma(g, k - 1, 1))).scale(eta)
                for d in spec.fields:
                    gam = spec.gamma[(alpha, g, d)]
                    if gam:
                        total = total + (gam * DiffPoly.gen(jet(d, 1))
                                         * DiffPoly.gen(sigma(g, k - 1))).scale(eta)
        return total

    def _sigma_relation(self, alpha, k):
        terms = self.relations.get(alpha)
        if terms is None:
            return None
        total = DiffPoly.zero()
        for beta, offset, coeff in terms:
            total = total + coeff * DiffPoly.gen(sigma(beta, k - 1 + offset))
        return total

    def _phi_rule(self, alpha, p, n):
        """(Phi^n_{alpha,p})' = d_beta h_{alpha,p} eta^{beta gamma} sigma^1_{gamma,n}."""
        total = DiffPoly.zero()
        h = self.h(alpha, p)
        for b in self.spec.fields:
            dh = h.partial(jet(b))
            if not dh:
                continue
            for g in self.spec.fields:
                if self.eta_up(b, g):
                    total = total + (dh * DiffPoly.gen(sigma(g, n, 1))).scale(self.eta_up(b, g))
        return total

    # -- Phi and Delta -------------------------------------------------

    def phi_value(self, alpha, p, n):
        """Phi^n_{alpha,p}: a differential polynomial, or a generator at resonance."""
        key = (alpha, p, n)
        cached = self._phi.get(key)
        if cached is not None:
            return cached
        spec = self.spec
        if p == 0:
            value = self.system.sigma_jet(alpha, n, 0)
        elif self.resonant(alpha, p):
            value = DiffPoly.gen(phi(alpha, p, n))
        else:
            rhs = DiffPoly.zero()
            h = self.h(alpha, p)
            for lam in spec.fields:
                dh = h.partial(jet(lam))
                if not dh:
                    continue
                weight = HALF + spec.mu_of(lam)
                for e in spec.fields:
                    if spec.eta_up(lam, e) and weight:
                        rhs = rhs + (dh * DiffPoly.gen(sigma(e, n))).scale(weight * spec.eta_up(lam, e))
            for k in range(1, p + 1):
                for xi in spec.fields:
                    r = spec.R_entry(k, xi, alpha)
                    if r:
                        rhs = rhs + self.phi_value(xi, p - k, n).scale(r)
            rhs = rhs - self.phi_value(alpha, p - 1, n + 1)
            divisor = -(Fraction(2 * p - 1, 2) + spec.mu_of(alpha))
            value = self.system.normalize(rhs.scale(1 / divisor))
        self._phi[key] = value
        return value

    def delta(self, alpha, p, k, n):
        """Delta^{k,n}_{alpha,p} = d^2 h_{alpha,p}/dtau_k dtau_n up to dx, antisymmetric in (k, n)."""
        if k == n:
            return DiffPoly.zero()
        if k < n:
            return -self.delta(alpha, p, n, k)
        key = (alpha, p, k, n)
        cached = self._delta.get(key)
        if cached is not None:
            return cached
        spec = self.spec
        h = self.h(alpha, p)
        total = DiffPoly.zero()
        for g in spec.fields:
            front = DiffPoly.zero()
            for lam in spec.fields:
                if spec.eta_up(g, lam):
                    front = front + h.partial(jet(lam)).scale(spec.eta_up(g, lam))
            if not front:
                continue
            for d in spec.fields:
                for mu in spec.fields:
                    gam = spec.gamma[(d, mu, g)]
                    if not gam:
                        continue
                    for i in range(k - n):
                        total = total + front * gam * _sigma_pair(mu, n + i, d, k - i - 1)
        value = self.system.normalize(total)
        self._delta[key] = value
        return value

    # -- flows ---------------------------------------------------------

    def _finish(self, poly):
        return self.system.normalize(poly)

    def _require(self, kind, index):
        if self.truncation is None:
            return
        P, K = self.truncation
        if (kind == "t" and index > P) or (kind == "tau" and index > K):
            limit = P if kind == "t" else K
            raise TruncationTooSmall(f"{kind}-flow of index {index} leaves the truncation {limit}")

    def t_image(self, beta, q, gen):
        spec = self.spec
        kind = gen[0]
        if kind == Kind.JET:
            alpha = gen[1]
            total = DiffPoly.zero()
            h = self.h(beta, q + 1)
            for g in spec.fields:
                if spec.eta_up(alpha, g):
                    total = total + h.partial(jet(g)).scale(spec.eta_up(alpha, g))
            return self.system.dx(total)
        if kind == Kind.SIGMA:
            _, k, alpha, _ = gen
            h = self.h(beta, q + 1).partial(jet(alpha))
            total = DiffPoly.zero()
            for g in spec.fields:
                for e in spec.fields:
                    if spec.eta_up(g, e):
                        coeff = h.partial(jet(e))
                        if coeff:
                            total = total + (coeff * DiffPoly.gen(sigma(g, k, 1))).scale(spec.eta_up(g, e))
            return total
        if kind == Kind.ONE_POINT:
            return self.omega(gen[1], gen[2], beta, q)
        if kind == Kind.PHI:
            _, n, alpha, p = gen
            return self.tau_flow(n, check=False)(self.omega(alpha, p, beta, q))
        if gen == even_time(beta, q):
            return DiffPoly.constant(1)
        return None

    def tau_image(self, m, gen):
        spec = self.spec
        kind = gen[0]
        if kind == Kind.JET:
            alpha = gen[1]
            total = DiffPoly.zero()
            for b in spec.fields:
                if spec.eta_up(alpha, b):
                    total = total + DiffPoly.gen(sigma(b, m, 1)).scale(spec.eta_up(alpha, b))
            return total
        if kind == Kind.SIGMA:
            _, k, alpha, _ = gen
            if k == m:
                return None
            low, high, sign = (k, m, 1) if m > k else (m, k, -1)
            total = DiffPoly.zero()
            for g in spec.fields:
                for b in spec.fields:
                    gam = spec.gamma[(g, b, alpha)]
                    if gam:
                        for i in range(high - low):
                            total = total + gam * _sigma_pair(b, low + i, g, high - i - 1)
            return total if sign > 0 else -total
        if kind == Kind.ONE_POINT:
            return self.phi_value(gen[1], gen[2], m)
        if kind == Kind.PHI:
            _, n, alpha, p = gen
            return self.delta(alpha, p, m, n)
        if gen == odd_time(m):
            return DiffPoly.constant(1)
        return None

    def t_flow(self, beta, q, check=True):
        """Flow d/dt^{beta,q}; `check=False` allows indices beyond the truncation."""
        if check:
            self._require("t", q)
        key = (beta, q)
        if key not in self._t_rules:
            self._t_rules[key] = DerivationRule(("t", beta, q), 0, lambda gen: self.t_image(beta, q, gen),
                                                self.system, self.truncation)
        return self._t_rules[key]

    def tau_flow(self, m, check=True):
        if check:
            self._require("tau", m)
        if m not in self._tau_rules:
            self._tau_rules[m] = DerivationRule(("tau", m), 1, lambda gen: self.tau_image(m, gen),
                                                self.system, self.truncation)
        return self._tau_rules[m]

    def targets(self, pmax, kmax, one_points=True):
        """Generators on which flow identities are evaluated."""
        gens = [jet(a) for a in self.fields]
        gens += [sigma(a, k) for k in range(kmax + 1) for a in self.fields if self.is_free_sigma(a, k)]
        if one_points:
            gens += [one_point(a, p) for p in range(pmax + 1) for a in self.fields]
            gens += [phi(a, p, n) for a, p in detect_resonance(self.spec, pmax)
                     for n in range(kmax + 1)]
        return gens


# -- table wrappers ----------------------------------------------------------

def principal_flows(cover, pmax):
    return {("t", beta, p): cover.t_flow(beta, p) for beta in cover.fields for p in range(pmax + 1)}


def super_extension_flows(cover, pmax, kmax):
    flows = principal_flows(cover, pmax)
    flows.update({("tau", m): cover.tau_flow(m) for m in range(kmax + 1)})
    return flows


def compute_phi(cover, pmax, nmax):
    return {(a, p, n): cover.phi_value(a, p, n)
            for a in cover.fields for p in range(pmax + 1) for n in range(nmax + 1)}


def compute_delta(cover, pmax, kmax):
    return {(a, p, k, n): cover.delta(a, p, k, n)
            for a in cover.fields for p in range(pmax + 1)
            for k in range(kmax + 1) for n in range(k)}


def tau_cover_rules(cover, pmax, kmax):
    """Every t- and tau-flow of the cover up to the given indices."""
    return super_extension_flows(cover, pmax, kmax)


# -- checks ------------------------------------------------------------------

def _residue(poly):
    return None if not poly else poly.to_text()


def flow_pairs(flows):
    names = sorted(flows)
    return [(names[i], names[j]) for i in range(len(names)) for j in range(i + 1, len(names))]


def _label(name):
    return "".join(str(x) for x in name)


def commutativity_checks(cover, flows, targets, label):
    checks = []
    for first, second in flow_pairs(flows):
        for gen in targets:
            check_id = f"{label}.commute.{_label(first)}-{_label(second)}.{'_'.join(map(str, gen))}"
            checks.append((check_id, lambda f=flows[first], s=flows[second], g=gen:
                           _residue(commutator(f, s, DiffPoly.gen(g)))))
    return checks


def check_commutativity(cover, pmax, kmax, threads=None, one_points=True):
    """Pairwise commutators of all t- and tau-flows vanish on the cover generators."""
    flows = super_extension_flows(cover, pmax, kmax)
    targets = cover.targets(pmax, kmax, one_points)
    return run_checks(commutativity_checks(cover, flows, targets, cover.name), threads)


def check_tau_symmetry(cover, pmax, threads=None):
    checks = []
    for a in cover.fields:
        for b in cover.fields:
            for p in range(pmax + 1):
                for q in range(pmax + 1 - p):
                    if (a, p) >= (b, q):
                        continue
                    checks.append((f"{cover.name}.tau-symmetry.{a}{p}-{b}{q}",
                                   lambda a=a, b=b, p=p, q=q: _residue(
                                       cover.t_flow(b, q)(cover.h(a, p)) - cover.t_flow(a, p)(cover.h(b, q)))))
    return run_checks(checks, threads)


def check_omega(cover, pmax, threads=None):
    """Omega symmetry, Omega_{alpha,p;1,0} = h_{alpha,p} and dx Omega = dh/dt."""
    checks = []
    for a in cover.fields:
        for b in cover.fields:
            for p in range(pmax + 1):
                for q in range(pmax + 1 - p):
                    checks.append((f"{cover.name}.omega.symmetric.{a}{p}-{b}{q}",
                                   lambda a=a, b=b, p=p, q=q: _residue(
                                       cover.omega(a, p, b, q) - cover.omega(b, q, a, p))))
                    checks.append((f"{cover.name}.omega.flow.{a}{p}-{b}{q}",
                                   lambda a=a, b=b, p=p, q=q: _residue(
                                       cover.system.dx(cover.omega(a, p, b, q))
                                       - cover.t_flow(b, q)(cover.h(a, p)))))
            checks.append((f"{cover.name}.omega.unit.{a}", lambda a=a: _residue(
                sum((cover.omega(a, p, 1, 0) - cover.h(a, p) for p in range(pmax + 1)), DiffPoly.zero()))))
    return run_checks(checks, threads)


def check_unit_flow(cover, pmax, kmax, threads=None):
    """d/dt^{1,0} is x-translation."""
    unit = cover.t_flow(1, 0)
    checks = []
    for gen in cover.targets(pmax, kmax):
        checks.append((f"{cover.name}.unit-flow.{'_'.join(map(str, gen))}", lambda g=gen: _residue(
            unit(DiffPoly.gen(g)) - cover.x_flow(DiffPoly.gen(g)))))
    return run_checks(checks, threads)


def check_rewrite_compatibility(cover, pmax, kmax, threads=None):
    """Flows commute with dx on sigma variables and respect the sigma relations."""
    flows = super_extension_flows(cover, pmax, kmax)
    checks = []
    for name, flow in sorted(flows.items()):
        for k in range(1, kmax + 1):
            for a in cover.fields:
                if cover.is_free_sigma(a, k):
                    checks.append((f"{cover.name}.rewrite.{_label(name)}.sigma{a}{k}",
                                   lambda f=flow, g=sigma(a, k): _residue(
                                       commutator(f, cover.x_flow, DiffPoly.gen(g)))))
                else:
                    relation = cover.system.relation(a, k)
                    checks.append((f"{cover.name}.rewrite.{_label(name)}.relation{a}{k}",
                                   lambda f=flow, a=a, k=k, rel=relation: _residue(
                                       f(rel) - cover.system.normalize(
                                           (cover.tau_image(f.name[1], sigma(a, k)) if f.name[0] == "tau"
                                            else cover.t_image(f.name[1], f.name[2], sigma(a, k)))
                                           or DiffPoly.zero()))))
    for k in range(1, kmax + 1):
        for a in cover.fields:
            if not cover.is_free_sigma(a, k):
                checks.append((f"{cover.name}.rewrite.dx-relation{a}{k}", lambda a=a, k=k: _residue(
                    cover.system.normalize(cover._sigma_rule(a, k))
                    - cover.system.dx(cover.system.relation(a, k)))))
    return run_checks(checks, threads)


def check_phi(cover, pmax, nmax, threads=None):
    """dx Phi^n_{alpha,p} = dh_{alpha,p}/dtau_n."""
    checks = []
    for a in cover.fields:
        for p in range(pmax + 1):
            for n in range(nmax + 1):
                checks.append((f"{cover.name}.phi.{a}{p}.{n}", lambda a=a, p=p, n=n: _residue(
                    cover.system.dx(cover.phi_value(a, p, n)) - cover.tau_flow(n)(cover.h(a, p)))))
    return run_checks(checks, threads)


def check_delta(cover, pmax, kmax, threads=None):
    """dx Delta^{k,n}_{alpha,p} = d^2 h_{alpha,p}/dtau_k dtau_n."""
    checks = []
    for a in cover.fields:
        for p in range(pmax + 1):
            for k in range(kmax + 1):
                for n in range(k):
                    checks.append((f"{cover.name}.delta.{a}{p}.{k}{n}", lambda a=a, p=p, k=k, n=n: _residue(
                        cover.system.dx(cover.delta(a, p, k, n))
                        - cover.tau_flow(k)(cover.tau_flow(n)(cover.h(a, p))))))
    return run_checks(checks, threads)
