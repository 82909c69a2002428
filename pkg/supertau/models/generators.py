"""
Generator identifiers of the graded differential polynomial ring.

A generator is a plain tuple whose first entry is a Kind. Tuples keep the
ring arithmetic hashable and cheap to sort; the constructors below are the
only supported way to build them.

    jet(alpha, s)             v^{alpha,s}, even
    one_point(alpha, p)       f_{alpha,p}, even
    even_time(alpha, p)       t^{alpha,p}, even
    CENTRAL                   the symbolic Virasoro constant c0, even
    sigma(alpha, k, s)        sigma^s_{alpha,k}, odd (k = 0 is theta^s_alpha)
    phi(alpha, p, n)          Phi^n_{alpha,p}, odd
    odd_time(k)               tau_k, odd

Odd generators sort by kind first, so every sigma precedes every Phi and
odd times come last; sigma tuples are laid out (kind, k, alpha, s) so the
canonical order within sigma is level, field index, derivative order.
"""
from enum import IntEnum


class Kind(IntEnum):
    JET = 0
    ONE_POINT = 1
    EVEN_TIME = 2
    CENTRAL = 3
    SIGMA = 10
    PHI = 11
    ODD_TIME = 12


ODD_KINDS = frozenset((Kind.SIGMA, Kind.PHI, Kind.ODD_TIME))
TIME_KINDS = frozenset((Kind.EVEN_TIME, Kind.ODD_TIME))

CENTRAL = (Kind.CENTRAL,)


def jet(alpha, s=0):
    return (Kind.JET, alpha, s)


def sigma(alpha, k=0, s=0):
    return (Kind.SIGMA, k, alpha, s)


def theta(alpha, s=0):
    return (Kind.SIGMA, 0, alpha, s)


def one_point(alpha, p):
    return (Kind.ONE_POINT, alpha, p)


def phi(alpha, p, n):
    return (Kind.PHI, n, alpha, p)


def even_time(alpha, p):
    return (Kind.EVEN_TIME, alpha, p)


def odd_time(k):
    return (Kind.ODD_TIME, k)


def is_odd(gen):
    return gen[0] in ODD_KINDS


def is_time(gen):
    return gen[0] in TIME_KINDS


def is_free_jet(gen):
    """True for generators whose x-derivative is the next jet (v^{alpha,s}, theta^s)."""
    kind = gen[0]
    return kind == Kind.JET or (kind == Kind.SIGMA and gen[1] == 0)


def derivative_order(gen):
    kind = gen[0]
    if kind == Kind.JET:
        return gen[2]
    if kind == Kind.SIGMA:
        return gen[3]
    return 0


def raise_order(gen, by=1):
    """Return the generator differentiated `by` more times (free jets only)."""
    kind = gen[0]
    if kind == Kind.JET:
        return (kind, gen[1], gen[2] + by)
    if kind == Kind.SIGMA:
        return (kind, gen[1], gen[2], gen[3] + by)
    raise ValueError(f"generator {gen!r} has no jet derivative")


def lower_order(gen):
    kind = gen[0]
    if kind == Kind.JET:
        return (kind, gen[1], gen[2] - 1)
    return (kind, gen[1], gen[2], gen[3] - 1)


def field_name(alpha, field_names):
    if field_names and alpha in field_names:
        return field_names[alpha]
    if field_names and len(field_names) == 1:
        return next(iter(field_names.values()))
    return f"v{alpha}"


def _order_suffix(s):
    if s == 0:
        return ""
    if s <= 2:
        return "'" * s
    return f"^({s})"


def text_label(gen, field_names=None):
    """Plain text label of a generator, e.g. u'', sigma_{2,1}', tau_3."""
    kind = gen[0]
    single = bool(field_names) and len(field_names) == 1
    if kind == Kind.JET:
        return field_name(gen[1], field_names) + _order_suffix(gen[2])
    if kind == Kind.SIGMA:
        _, k, alpha, s = gen
        if k == 0:
            base = "theta" if single else f"theta_{alpha}"
        else:
            base = f"sigma_{k}" if single else f"sigma_{{{alpha},{k}}}"
        return base + _order_suffix(s)
    if kind == Kind.ONE_POINT:
        return f"f_{gen[2]}" if single else f"f_{{{gen[1]},{gen[2]}}}"
    if kind == Kind.PHI:
        _, n, alpha, p = gen
        return f"Phi^{n}_{p}" if single else f"Phi^{n}_{{{alpha},{p}}}"
    if kind == Kind.EVEN_TIME:
        return f"t_{gen[2]}" if single else f"t^{{{gen[1]},{gen[2]}}}"
    if kind == Kind.ODD_TIME:
        return f"tau_{gen[1]}"
    return "c0"


def latex_label(gen, field_names=None):
    kind = gen[0]
    single = bool(field_names) and len(field_names) == 1
    if kind == Kind.JET:
        name = field_name(gen[1], field_names)
        if name.startswith("v") and name[1:].isdigit():
            name = f"v^{{{name[1:]}}}"
        s = gen[2]
        if s == 0:
            return name
        if s <= 2:
            return name + "'" * s
        return f"{name}^{{({s})}}"
    if kind == Kind.SIGMA:
        _, k, alpha, s = gen
        if k == 0:
            base = r"\theta" if single else rf"\theta_{{{alpha}}}"
        else:
            base = rf"\sigma_{{{k}}}" if single else rf"\sigma_{{{alpha},{k}}}"
        if s == 0:
            return base
        return base + "'" * s if s <= 2 else rf"{base}^{{({s})}}"
    if kind == Kind.ONE_POINT:
        return f"f_{{{gen[2]}}}" if single else f"f_{{{gen[1]},{gen[2]}}}"
    if kind == Kind.PHI:
        _, n, alpha, p = gen
        return rf"\Phi^{{{n}}}_{{{p}}}" if single else rf"\Phi^{{{n}}}_{{{alpha},{p}}}"
    if kind == Kind.EVEN_TIME:
        return f"t_{{{gen[2]}}}" if single else f"t^{{{gen[1]},{gen[2]}}}"
    if kind == Kind.ODD_TIME:
        return rf"\tau_{{{gen[1]}}}"
    return "c_0"


def to_json(gen):
    return [int(x) for x in gen]


def from_json(data):
    kind = Kind(int(data[0]))
    return (kind,) + tuple(int(x) for x in data[1:])
