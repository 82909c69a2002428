"""
Coefficient tables of the even Virasoro operators.

    L_m = sum a^{alpha,p;beta,q} d^2/dt^{alpha,p} dt^{beta,q}
        + sum b^{alpha,p}_{beta,q} t^{beta,q} d/dt^{alpha,p}
        + sum c_{alpha,p;beta,q} t^{alpha,p} t^{beta,q} + const

Index pairs are (alpha, p) tuples. In `b` the key ((alpha, p), (beta, q))
is the coefficient of t^{beta,q} d/dt^{alpha,p}.
"""
from dataclasses import dataclass, field
from fractions import Fraction


def _index_json(index):
    return [int(index[0]), int(index[1])]


@dataclass
class VirasoroCoefficients:
    m: int
    a: dict = field(default_factory=dict)
    b: dict = field(default_factory=dict)
    c: dict = field(default_factory=dict)
    const: Fraction = Fraction(0)
    dispersive: bool = False

    def __post_init__(self):
        self.a = {k: Fraction(v) for k, v in self.a.items() if v}
        self.b = {k: Fraction(v) for k, v in self.b.items() if v}
        self.c = {k: Fraction(v) for k, v in self.c.items() if v}
        self.const = Fraction(self.const)

    def b_of(self, upper, lower):
        return self.b.get((upper, lower), Fraction(0))

    def c_of(self, left, right):
        return self.c.get((left, right), Fraction(0))

    def b_column(self, lower):
        """All (upper, value) with b^{upper}_{lower} nonzero."""
        return [(up, value) for (up, low), value in self.b.items() if low == lower]

    def symmetry_violations(self):
        problems = []
        for name, table in (("a", self.a), ("c", self.c)):
            for (left, right), value in table.items():
                if table.get((right, left), Fraction(0)) != value:
                    problems.append(f"{name}{left}{right}")
        return problems

    def to_json(self):
        def dump(table):
            return [[_index_json(k[0]), _index_json(k[1]), str(v)]
                    for k, v in sorted(table.items())]
        return {"m": self.m, "a": dump(self.a), "b": dump(self.b), "c": dump(self.c),
                "const": str(self.const), "dispersive": self.dispersive}

    @classmethod
    def from_json(cls, data):
        def load(rows):
            return {(tuple(r[0]), tuple(r[1])): Fraction(r[2]) for r in rows or []}
        return cls(m=int(data["m"]), a=load(data.get("a")), b=load(data.get("b")),
                   c=load(data.get("c")), const=Fraction(data.get("const", 0)),
                   dispersive=bool(data.get("dispersive", False)))
