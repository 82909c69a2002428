"""
Graded differential polynomials with exact rational coefficients.

A monomial is the tuple (even, odd, eps, exps):

    even  sorted tuple of (generator, power) pairs
    odd   sorted tuple of distinct odd generators
    eps   integer power of the dispersion parameter (may be negative)
    exps  sorted tuple of (alpha, q) pairs standing for exp(sum q_alpha v^alpha)

A DiffPoly maps monomials to nonzero Fractions and is immutable once
built. Rewriting of nonlocal generators lives in utils.jet_algebra; the
arithmetic here never creates generators that need rewriting.
"""
from fractions import Fraction

from supertau.models.generators import (
    Kind, TIME_KINDS, is_odd, text_label, to_json as gen_to_json,
    from_json as gen_from_json,
)

ONE = ((), (), 0, ())


def merge_even(a, b):
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for gen, power in b:
        merged[gen] = merged.get(gen, 0) + power
    return tuple(sorted(merged.items()))


def merge_odd(a, b):
    """Merge two sorted odd tuples. Returns (sign, merged) or (0, None)."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    out = []
    inversions = 0
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        x, y = a[i], b[j]
        if x < y:
            out.append(x)
            i += 1
        elif y < x:
            out.append(y)
            inversions += la - i
            j += 1
        else:
            return 0, None
    out.extend(a[i:])
    out.extend(b[j:])
    return (-1 if inversions & 1 else 1), tuple(out)


def merge_exps(a, b):
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for alpha, q in b:
        total = merged.get(alpha, 0) + q
        if total:
            merged[alpha] = total
        else:
            merged.pop(alpha, None)
    return tuple(sorted(merged.items()))


def mul_monomials(a, b):
    sign, odd = merge_odd(a[1], b[1])
    if not sign:
        return 0, None
    return sign, (merge_even(a[0], b[0]), odd, a[2] + b[2], merge_exps(a[3], b[3]))


def sort_odd(gens):
    """Sort odd generators, returning (sign, tuple) or (0, None) on a repeat."""
    items = list(gens)
    sign = 1
    # insertion sort keeps the permutation parity visible
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and items[j - 1] == items[j]:
            return 0, None
    return sign, tuple(items)


def is_scalar(mono):
    return not mono[0] and not mono[1] and not mono[3]


def monomial_generators(mono):
    for gen, _ in mono[0]:
        yield gen
    yield from mono[1]


class DiffPoly:
    """Immutable graded differential polynomial."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        if terms:
            self._terms = {m: Fraction(c) for m, c in terms.items() if c}
        else:
            self._terms = {}
        self._hash = None

    @classmethod
    def _wrap(cls, terms):
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls):
        return cls._wrap({})

    @classmethod
    def constant(cls, value):
        value = Fraction(value)
        return cls._wrap({ONE: value} if value else {})

    @classmethod
    def gen(cls, generator, power=1):
        if is_odd(generator):
            if power != 1:
                return cls.zero() if power > 1 else cls.constant(1)
            return cls._wrap({((), (generator,), 0, ()): Fraction(1)})
        if power == 0:
            return cls.constant(1)
        return cls._wrap({(((generator, power),), (), 0, ()): Fraction(1)})

    @classmethod
    def eps(cls, power=1):
        return cls._wrap({((), (), power, ()): Fraction(1)})

    @classmethod
    def exp(cls, pairs):
        """exp(sum q_alpha v^alpha) from a mapping or pairs alpha -> q."""
        items = pairs.items() if isinstance(pairs, dict) else pairs
        exps = tuple(sorted((a, Fraction(q)) for a, q in items if q))
        return cls._wrap({((), (), 0, exps): Fraction(1)})

    @classmethod
    def monomial(cls, coeff=1, even=(), odd=(), eps=0, exps=()):
        sign, odd_sorted = sort_odd(odd)
        if not sign or not coeff:
            return cls.zero()
        merged = {}
        for gen, power in even:
            if power:
                merged[gen] = merged.get(gen, 0) + power
        mono = (tuple(sorted(merged.items())), odd_sorted, eps,
                tuple(sorted((a, Fraction(q)) for a, q in exps if q)))
        return cls._wrap({mono: Fraction(coeff) * sign})

    # -- protocol -----------------------------------------------------

    @property
    def terms(self):
        return self._terms

    def items(self):
        return self._terms.items()

    def sorted_items(self):
        return sorted(self._terms.items(), key=lambda item: item[0])

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self):
        return not self._terms

    def __eq__(self, other):
        if isinstance(other, DiffPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({ONE: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"DiffPoly({self.to_text()})"

    def __str__(self):
        return self.to_text()

    # -- arithmetic ---------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, DiffPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return DiffPoly.constant(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for mono, coeff in other._terms.items():
            total = out.get(mono, 0) + coeff
            if total:
                out[mono] = total
            else:
                out.pop(mono, None)
        return DiffPoly._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly._wrap({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, factor):
        factor = Fraction(factor)
        if not factor:
            return DiffPoly.zero()
        if factor == 1:
            return self
        return DiffPoly._wrap({m: c * factor for m, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        out = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                sign, mono = mul_monomials(ma, mb)
                if not sign:
                    continue
                coeff = ca * cb if sign > 0 else -(ca * cb)
                total = out.get(mono)
                if total is None:
                    out[mono] = coeff
                else:
                    total += coeff
                    if total:
                        out[mono] = total
                    else:
                        del out[mono]
        return DiffPoly._wrap(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = DiffPoly.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def mul_monomial(self, mono, coeff=1, left=False):
        """Multiply by a single monomial, on the right unless `left`."""
        out = {}
        coeff = Fraction(coeff)
        for m, c in self._terms.items():
            sign, merged = mul_monomials(mono, m) if left else mul_monomials(m, mono)
            if not sign:
                continue
            value = c * coeff * sign
            total = out.get(merged, 0) + value
            if total:
                out[merged] = total
            else:
                out.pop(merged, None)
        return DiffPoly._wrap(out)

    # -- inspection ---------------------------------------------------

    def generators(self):
        gens = set()
        for mono in self._terms:
            gens.update(monomial_generators(mono))
        return gens

    def odd_degrees(self):
        return {len(mono[1]) for mono in self._terms}

    def min_eps(self):
        return min((mono[2] for mono in self._terms), default=0)

    def is_constant(self):
        return all(mono == ONE for mono in self._terms)

    def constant_term(self):
        return self._terms.get(ONE, Fraction(0))

    def has_scalar_terms(self):
        """True when some monomial is a bare eps power (no generators, no exponentials)."""
        return any(is_scalar(mono) for mono in self._terms)

    def coefficient(self, mono):
        return self._terms.get(mono, Fraction(0))

    def filter(self, predicate):
        return DiffPoly._wrap({m: c for m, c in self._terms.items() if predicate(m)})

    def without_constant(self):
        """Drop every generator-free term, eps powers included."""
        return self.filter(lambda mono: not is_scalar(mono))

    def eps_coefficient(self, power):
        out = {}
        for (even, odd, eps, exps), coeff in self._terms.items():
            if eps == power:
                out[(even, odd, 0, exps)] = coeff
        return DiffPoly._wrap(out)

    def at_eps_zero(self):
        if self.min_eps() < 0:
            raise ValueError("polynomial has negative powers of eps; no dispersionless limit")
        return self.eps_coefficient(0)

    def split_times(self):
        """Group terms by their time part.

        Returns a dict mapping (even time part, odd time part) to the DiffPoly
        coefficient in front of it. Odd times sort last, so no sign arises.
        """
        groups = {}
        for (even, odd, eps, exps), coeff in self._terms.items():
            times_even = tuple(item for item in even if item[0][0] in TIME_KINDS)
            rest_even = tuple(item for item in even if item[0][0] not in TIME_KINDS)
            cut = len(odd)
            while cut and odd[cut - 1][0] == Kind.ODD_TIME:
                cut -= 1
            key = (times_even, odd[cut:])
            bucket = groups.setdefault(key, {})
            bucket[(rest_even, odd[:cut], eps, exps)] = coeff
        return {key: DiffPoly._wrap(terms) for key, terms in groups.items()}

    # -- calculus -----------------------------------------------------

    def partial(self, gen):
        """Partial derivative; the left Grassmann derivative for odd generators."""
        out = {}
        if is_odd(gen):
            for (even, odd, eps, exps), coeff in self._terms.items():
                if gen not in odd:
                    continue
                i = odd.index(gen)
                mono = (even, odd[:i] + odd[i + 1:], eps, exps)
                out[mono] = -coeff if i & 1 else coeff
            return DiffPoly._wrap(out)
        exp_alpha = gen[1] if gen[0] == Kind.JET and gen[2] == 0 else None
        for (even, odd, eps, exps), coeff in self._terms.items():
            for idx, (g, power) in enumerate(even):
                if g == gen:
                    if power == 1:
                        new_even = even[:idx] + even[idx + 1:]
                    else:
                        new_even = even[:idx] + ((g, power - 1),) + even[idx + 1:]
                    mono = (new_even, odd, eps, exps)
                    total = out.get(mono, 0) + coeff * power
                    if total:
                        out[mono] = total
                    else:
                        out.pop(mono, None)
                    break
            if exp_alpha is not None:
                for alpha, q in exps:
                    if alpha == exp_alpha:
                        mono = (even, odd, eps, exps)
                        total = out.get(mono, 0) + coeff * q
                        if total:
                            out[mono] = total
                        else:
                            out.pop(mono, None)
        return DiffPoly._wrap(out)

    def substitute(self, gen, value):
        """Replace a generator by a polynomial (no derivative bookkeeping)."""
        if isinstance(value, (int, Fraction)):
            value = DiffPoly.constant(value)
        untouched = {}
        pieces = []
        odd_gen = is_odd(gen)
        for mono, coeff in self._terms.items():
            even, odd, eps, exps = mono
            if odd_gen:
                if gen not in odd:
                    untouched[mono] = coeff
                    continue
                i = odd.index(gen)
                left = (even, odd[:i], eps, exps)
                right = ((), odd[i + 1:], 0, ())
                pieces.append(value.mul_monomial(right).mul_monomial(left, coeff, left=True))
            else:
                power = dict(even).get(gen, 0)
                if not power:
                    untouched[mono] = coeff
                    continue
                rest = (tuple(item for item in even if item[0] != gen), odd, eps, exps)
                pieces.append((value ** power).mul_monomial(rest, coeff, left=True))
        result = DiffPoly._wrap(untouched)
        for piece in pieces:
            result = result + piece
        return result

    # -- serialization ------------------------------------------------

    def to_json(self):
        data = []
        for (even, odd, eps, exps), coeff in self.sorted_items():
            data.append([
                str(coeff),
                [[gen_to_json(g), p] for g, p in even],
                [gen_to_json(g) for g in odd],
                eps,
                [[alpha, str(q)] for alpha, q in exps],
            ])
        return data

    @classmethod
    def from_json(cls, data):
        result = cls.zero()
        for entry in data:
            coeff, even, odd, eps = entry[:4]
            exps = entry[4] if len(entry) > 4 else []
            result = result + cls.monomial(
                Fraction(coeff),
                even=[(gen_from_json(g), int(p)) for g, p in even],
                odd=[gen_from_json(g) for g in odd],
                eps=int(eps),
                exps=[(int(a), Fraction(q)) for a, q in exps],
            )
        return result

    def to_text(self, field_names=None):
        if not self._terms:
            return "0"
        parts = []
        for (even, odd, eps, exps), coeff in self.sorted_items():
            factors = []
            if eps:
                factors.append("eps" if eps == 1 else f"eps^{eps}")
            for gen, power in even:
                label = text_label(gen, field_names)
                factors.append(label if power == 1 else f"{label}^{power}")
            if exps:
                arg = "+".join(
                    (text_label((Kind.JET, a, 0), field_names) if q == 1
                     else f"{q}*{text_label((Kind.JET, a, 0), field_names)}")
                    for a, q in exps)
                factors.append(f"exp({arg})")
            factors.extend(text_label(gen, field_names) for gen in odd)
            body = "*".join(factors)
            magnitude = abs(coeff)
            if not body:
                body = str(magnitude)
            elif magnitude != 1:
                body = f"{magnitude}*{body}"
            parts.append(("-" if coeff < 0 else "+", body))
        text = parts[0][1] if parts[0][0] == "+" else "-" + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


def gen(generator, power=1):
    return DiffPoly.gen(generator, power)


def const(value):
    return DiffPoly.constant(value)


ZERO = DiffPoly.zero()
UNIT = DiffPoly.constant(1)
