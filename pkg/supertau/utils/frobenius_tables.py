"""
Hamiltonian densities h_{alpha,p} and two-point functions Omega of a Frobenius manifold.
"""
import logging
import time
from fractions import Fraction
from itertools import combinations_with_replacement

import sympy

from supertau.models.diffpoly import DiffPoly, ONE, merge_even
from supertau.models.errors import DivisibilityError, SolveError
from supertau.models.generators import jet
from supertau.models.report import CheckResult, FAIL, PASS

logger = logging.getLogger(__name__)


def to_sympy(value):
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def from_sympy(value):
    value = sympy.nsimplify(value)
    if not value.is_Rational:
        raise SolveError(f"non-rational solution coefficient {value}")
    return Fraction(int(value.p), int(value.q))


def detect_resonance(spec, pmax):
    """Pairs (alpha, p), 1 <= p <= pmax, with 1 - 2p - 2 mu_alpha = 0."""
    found = []
    for p in range(1, pmax + 1):
        for alpha in spec.fields:
            if 1 - 2 * p - 2 * spec.mu_of(alpha) == 0:
                found.append((alpha, p))
    return found


def _coefficient_equations(images, symbols, target):
    """Equations sum_i s_i images[i] = target, one per monomial."""
    monos = set(target.terms)
    for image in images:
        monos.update(image.terms)
    equations = []
    for mono in monos:
        expr = -to_sympy(target.coefficient(mono))
        for sym, image in zip(symbols, images):
            c = image.coefficient(mono)
            if c:
                expr += to_sympy(c) * sym
        if expr != 0:
            equations.append(expr)
    return equations


class Parametric:
    """A DiffPoly depending linearly on sympy parameters: {None: constant part, sym: coefficient}."""

    def __init__(self, parts):
        self.parts = {k: v for k, v in parts.items() if v}

    @classmethod
    def from_solution(cls, values, basis):
        parts = {}
        for value, mono in zip(values, basis):
            value = sympy.expand(value)
            monomial = DiffPoly.monomial(1, even=mono[0], exps=mono[3])
            free = sorted(value.free_symbols, key=str)
            constant = value.subs({s: 0 for s in free})
            if constant != 0:
                parts[None] = parts.get(None, DiffPoly.zero()) + monomial.scale(from_sympy(constant))
            for sym in free:
                coeff = value.coeff(sym)
                if coeff != 0:
                    parts[sym] = parts.get(sym, DiffPoly.zero()) + monomial.scale(from_sympy(coeff))
        return cls(parts)

    def map(self, func):
        return Parametric({k: func(v) for k, v in self.parts.items()})

    def __add__(self, other):
        parts = dict(self.parts)
        for k, v in other.parts.items():
            parts[k] = parts.get(k, DiffPoly.zero()) + v
        return Parametric(parts)

    def scale(self, factor):
        return self.map(lambda poly: poly.scale(factor))

    def equations(self, known=None):
        """Equations making self + known vanish identically."""
        total = dict(self.parts)
        if known:
            total[None] = total.get(None, DiffPoly.zero()) + known
        monos = set()
        for poly in total.values():
            monos.update(poly.terms)
        equations = []
        for mono in monos:
            expr = sympy.Integer(0)
            for key, poly in total.items():
                c = poly.coefficient(mono)
                if c:
                    expr += to_sympy(c) * (1 if key is None else key)
            if expr != 0:
                equations.append(expr)
        return equations

    def evaluate(self, values):
        result = self.parts.get(None, DiffPoly.zero())
        for key, poly in self.parts.items():
            if key is None:
                continue
            value = values.get(key, sympy.Integer(0))
            if value != 0:
                result = result + poly.scale(from_sympy(value))
        return result


class FrobeniusTables:
    """Lazily computed h and Omega tables of one spec."""

    def __init__(self, spec):
        self.spec = spec
        self._h = {}
        self._level = -1
        self._omega = {}
        self._divisible = set()
        self.gauge = []

    # -- h tables -----------------------------------------------------

    def h(self, alpha, p):
        if p < 0:
            return DiffPoly.zero()
        self.ensure_h(p)
        return self._h[(alpha, p)]

    def grad(self, alpha, p):
        return [self.h(alpha, p).partial(jet(b)) for b in self.spec.fields]

    def table(self, pmax):
        self.ensure_h(pmax)
        return {key: value for key, value in self._h.items() if key[1] <= pmax}

    def ensure_h(self, pmax):
        while self._level < pmax:
            level = self._level + 1
            supplied = {alpha: self.spec.h_table.get((alpha, level)) for alpha in self.spec.fields}
            if all(value is not None for value in supplied.values()):
                problems = self.level_residues(level, supplied)
                if problems:
                    condition, alpha, residue = problems[0]
                    raise SolveError(f"supplied h_{alpha},{level} violates {condition}: {residue}")
                self._h.update({(alpha, level): value for alpha, value in supplied.items()})
                logger.debug(f"{self.spec.name}: verified supplied h level {level}")
            elif level == 0:
                for alpha in self.spec.fields:
                    self._h[(alpha, 0)] = self.spec.h0(alpha)
            else:
                start = time.perf_counter()
                self._h.update(self._solve_level(level))
                logger.info(f"{self.spec.name}: solved h level {level} in {time.perf_counter() - start:.2f}s")
            self._level = level

    def _hessian_target(self, gamma, N, a, b):
        """c^lambda_{ab} d_lambda h_{gamma,N-1}."""
        total = DiffPoly.zero()
        for lam in self.spec.fields:
            c = self.spec.c_mixed[(lam, a, b)]
            if c:
                total = total + c * self._h[(gamma, N - 1)].partial(jet(lam))
        return total

    def _homog_target(self, gamma, N, b):
        total = DiffPoly.zero()
        for k in range(1, N + 1):
            for xi in self.spec.fields:
                r = self.spec.R_entry(k, xi, gamma)
                if r:
                    total = total + self._h[(xi, N - k)].partial(jet(b)).scale(r)
        return total

    def _inner(self, x, y):
        """<grad x, grad y> with the flat metric."""
        total = DiffPoly.zero()
        for lam in self.spec.fields:
            dx = x[lam - 1]
            if not dx:
                continue
            for mu in self.spec.fields:
                eta = self.spec.eta_up(lam, mu)
                if eta and y[mu - 1]:
                    total = total + (dx * y[mu - 1]).scale(eta)
        return total

    def _candidate_basis(self, gamma, N):
        spec = self.spec
        seeds = set(self._h[(gamma, N - 1)].terms)
        for a in spec.fields:
            for b in spec.fields:
                seeds.update(self._hessian_target(gamma, N, a, b).terms)
        if any(mono[3] for mono in seeds):
            expanded = set()
            for even, odd, eps, exps in seeds:
                ranges = [[(g, k) for k in range(p + 1)] for g, p in even]
                subs = [()]
                for options in ranges:
                    subs = [s + (o,) for s in subs for o in options]
                for sub in subs:
                    expanded.add((tuple((g, k) for g, k in sub if k), odd, eps, exps))
            seeds = expanded
        raisers = [()]
        fields = list(spec.fields)
        for degree in (1, 2):
            for combo in combinations_with_replacement(fields, degree):
                powers = {}
                for alpha in combo:
                    powers[jet(alpha)] = powers.get(jet(alpha), 0) + 1
                raisers.append(tuple(sorted(powers.items())))
        basis = set()
        for even, odd, eps, exps in seeds:
            for extra in raisers:
                basis.add((merge_even(even, extra), (), 0, exps))
        basis.add(ONE)
        for alpha in fields:
            basis.add((((jet(alpha), 1),), (), 0, ()))
        return sorted(basis)

    def _solve_single(self, gamma, N):
        spec = self.spec
        basis = self._candidate_basis(gamma, N)
        symbols = sympy.symbols(f"h{gamma}_{N}_0:{len(basis)}")
        monomials = [DiffPoly.monomial(1, even=m[0], exps=m[3]) for m in basis]
        equations = []
        fields = list(spec.fields)
        for i, a in enumerate(fields):
            for b in fields[i:]:
                images = [m.partial(jet(a)).partial(jet(b)) for m in monomials]
                equations += _coefficient_equations(images, symbols, self._hessian_target(gamma, N, a, b))
        images = [m.partial(jet(1)) for m in monomials]
        equations += _coefficient_equations(images, symbols, self._h[(gamma, N - 1)])
        for b in fields:
            weight = N + spec.mu_of(gamma) + spec.mu_of(b)
            images = []
            for m in monomials:
                d = m.partial(jet(b))
                images.append(spec.apply_euler(d) - d.scale(weight))
            equations += _coefficient_equations(images, symbols, self._homog_target(gamma, N, b))
        solution = sympy.linsolve(equations, symbols) if equations else None
        if solution is None:
            values = symbols
        else:
            if solution == sympy.S.EmptySet:
                raise SolveError(f"{spec.name}: no density h_{gamma},{N} satisfies the recursion")
            values = next(iter(solution))
        return Parametric.from_solution(values, basis)

    def _solve_level(self, N):
        spec = self.spec
        fields = list(spec.fields)
        candidates = {gamma: self._solve_single(gamma, N) for gamma in fields}
        grads = {gamma: [candidates[gamma].map(lambda poly, b=b: poly.partial(jet(b))) for b in fields]
                 for gamma in fields}
        equations = []
        sign = -1 if N % 2 else 1
        for i, a in enumerate(fields):
            for b in fields[i:]:
                expr = grads[b][a - 1] + grads[a][b - 1].scale(sign)
                known = DiffPoly.zero()
                for k in range(1, N):
                    term = self._inner(self.grad(a, k), self.grad(b, N - k))
                    known = known + (term if k % 2 == 0 else -term)
                equations += expr.equations(known)
        params = sorted({key for c in candidates.values() for key in c.parts if key is not None}, key=str)
        values = {}
        if equations:
            solution = sympy.linsolve(equations, params) if params else sympy.S.EmptySet
            if solution == sympy.S.EmptySet:
                raise SolveError(f"{spec.name}: normalization fails at level {N}")
            values = dict(zip(params, next(iter(solution))))
        free = set()
        for value in values.values():
            free.update(value.free_symbols)
        if not equations:
            free.update(params)
        if free:
            logger.warning(f"{spec.name}: level {N} has {len(free)} residual constants, set to zero")
            self.gauge.append((N, sorted(str(s) for s in free)))
        zero = {s: 0 for s in free}
        resolved = {p: sympy.sympify(values.get(p, p)).subs(zero) for p in params}
        return {(gamma, N): candidates[gamma].evaluate(resolved) for gamma in fields}

    def level_residues(self, N, level_table):
        """Violations of the defining conditions by candidate densities at level N."""
        spec = self.spec
        problems = []
        fields = list(spec.fields)
        if N == 0:
            for alpha in fields:
                residue = level_table[alpha] - spec.h0(alpha)
                if residue:
                    problems.append(("hamil-ini", alpha, residue))
            return problems
        previous = {alpha: self._h[(alpha, N - 1)] for alpha in fields}
        for gamma in fields:
            h = level_table[gamma]
            for i, a in enumerate(fields):
                for b in fields[i:]:
                    residue = h.partial(jet(a)).partial(jet(b)) - self._hessian_target(gamma, N, a, b)
                    if residue:
                        problems.append(("hamil-rec", gamma, residue))
            residue = h.partial(jet(1)) - previous[gamma]
            if residue:
                problems.append(("unit", gamma, residue))
            for b in fields:
                d = h.partial(jet(b))
                weight = N + spec.mu_of(gamma) + spec.mu_of(b)
                residue = spec.apply_euler(d) - d.scale(weight) - self._homog_target(gamma, N, b)
                if residue:
                    problems.append(("homog", gamma, residue))
        grads = {alpha: [level_table[alpha].partial(jet(b)) for b in fields] for alpha in fields}
        sign = -1 if N % 2 else 1
        for i, a in enumerate(fields):
            for b in fields[i:]:
                total = grads[b][a - 1] + grads[a][b - 1].scale(sign)
                for k in range(1, N):
                    term = self._inner(self.grad(a, k), self.grad(b, N - k))
                    total = total + (term if k % 2 == 0 else -term)
                if total:
                    problems.append(("norm", a, total))
        return problems

    def check_h(self, pmax, label=None):
        """CheckResults for every level of the h table up to pmax."""
        label = label or self.spec.name
        self.ensure_h(pmax)
        results = []
        for N in range(pmax + 1):
            start = time.perf_counter()
            problems = self.level_residues(N, {a: self._h[(a, N)] for a in self.spec.fields})
            residue = "; ".join(f"{c}[{a}]: {r}" for c, a, r in problems) or None
            results.append(CheckResult(f"{label}.h.level{N}", FAIL if problems else PASS,
                                       time.perf_counter() - start, residue=residue))
        return results

    # -- two-point functions ------------------------------------------

    def pairing(self, a, i, b, j):
        """<grad h_{a,i}, grad h_{b,j}> - eta_{ab} delta_{i0} delta_{j0}."""
        total = self._inner(self.grad(a, i), self.grad(b, j))
        if i == 0 and j == 0:
            total = total - self.spec.eta_lo(a, b)
        return total

    def _check_divisible(self, a, b, D):
        key = (a, b, D)
        if key in self._divisible:
            return
        total = DiffPoly.zero()
        for i in range(D + 1):
            term = self.pairing(a, D - i, b, i)
            total = total + (term if i % 2 == 0 else -term)
        if total:
            raise DivisibilityError(f"{self.spec.name}: generating function ({a},{b}) at degree {D} "
                                    f"is not divisible by z1 + z2: {total}")
        self._divisible.add(key)

    def omega(self, a, p, b, q):
        """Omega_{a,p;b,q} from (z1 + z2) Omega(z1, z2) = <grad h_a(z1), grad h_b(z2)> - eta."""
        key = (a, p, b, q)
        cached = self._omega.get(key)
        if cached is not None:
            return cached
        self._check_divisible(a, b, p + q + 1)
        total = DiffPoly.zero()
        for i in range(p + 1):
            term = self.pairing(a, p - i, b, q + 1 + i)
            total = total + (term if i % 2 == 0 else -term)
        self._omega[key] = total
        return total

    def omega_table(self, pmax):
        return {(a, p, b, q): self.omega(a, p, b, q)
                for a in self.spec.fields for b in self.spec.fields
                for p in range(pmax + 1) for q in range(pmax + 1 - p)}


def compute_h(spec, pmax, tables=None):
    """h table {(alpha, p): DiffPoly} for p <= pmax."""
    tables = tables or FrobeniusTables(spec)
    return tables.table(pmax)


def compute_omega(spec, pmax, tables=None):
    tables = tables or FrobeniusTables(spec)
    return tables.omega_table(pmax)
