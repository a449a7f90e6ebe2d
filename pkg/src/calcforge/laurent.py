"""Multivariate Laurent polynomials with cyclotomic coefficients."""
from __future__ import annotations

import enum
from typing import Mapping

from .cyclo import CycloNumber


class Bottom(enum.Enum):
    """Degree of the zero polynomial."""

    BOTTOM = "bottom"

    def __repr__(self):
        return "BOTTOM"


BOTTOM = Bottom.BOTTOM
Degree = int | Bottom


def deg_max(a: Degree, b: Degree) -> Degree:
    if a is BOTTOM:
        return b
    if b is BOTTOM:
        return a
    return max(a, b)


def deg_add(a: Degree, b: Degree) -> Degree:
    if a is BOTTOM or b is BOTTOM:
        return BOTTOM
    return a + b


def deg_le(a: Degree, b: Degree) -> bool:
    if a is BOTTOM:
        return True
    if b is BOTTOM:
        return False
    return a <= b


class LaurentPoly:
    """Sum of coefficient * prod Y_j^e_j; exponent vectors follow `vars` order."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars: tuple[str, ...], terms: Mapping[tuple[int, ...], object] | None = None):
        self.vars = tuple(vars)
        clean = {}
        for e, c in (terms or {}).items():
            c = CycloNumber.coerce(c)
            if len(e) != len(self.vars):
                raise ValueError("exponent length does not match variables")
            if not c.is_zero():
                clean[tuple(e)] = c
        self.terms = clean

    @classmethod
    def const(cls, c, vars: tuple[str, ...] = ()) -> "LaurentPoly":
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "LaurentPoly":
        return cls((name,), {(power,): 1})

    def with_vars(self, vars: tuple[str, ...]) -> "LaurentPoly":
        """Re-index into a superset of variables."""
        if tuple(vars) == self.vars:
            return self
        idx = {v: i for i, v in enumerate(vars)}
        for v in self.vars:
            if v not in idx:
                raise ValueError(f"variable {v} missing from target")
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(vars)
            for v, k in zip(self.vars, e):
                ne[idx[v]] = k
            out[tuple(ne)] = c
        return LaurentPoly(tuple(vars), out)

    def _align(self, other: "LaurentPoly"):
        vs = tuple(sorted(set(self.vars) | set(other.vars)))
        return self.with_vars(vs), other.with_vars(vs), vs

    @staticmethod
    def coerce(x) -> "LaurentPoly":
        return x if isinstance(x, LaurentPoly) else LaurentPoly.const(x)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        a, b, vs = self._align(LaurentPoly.coerce(other))
        out = dict(a.terms)
        for e, c in b.terms.items():
            out[e] = out[e] + c if e in out else c
        return LaurentPoly(vs, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-LaurentPoly.coerce(other))

    def __rsub__(self, other):
        return LaurentPoly.coerce(other) - self

    def __mul__(self, other):
        a, b, vs = self._align(LaurentPoly.coerce(other))
        out: dict = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out[e] + c1 * c2 if e in out else c1 * c2
        return LaurentPoly(vs, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials have Laurent inverses")
            (e, c), = self.terms.items()
            return LaurentPoly(self.vars, {tuple(x * k for x in e): c.inverse() ** (-k)})
        out = LaurentPoly.const(1, self.vars)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            try:
                other = LaurentPoly.coerce(other)
            except TypeError:
                return NotImplemented
        a, b, _ = self._align(other)
        return a.terms == b.terms

    def __hash__(self):
        return hash(frozenset((tuple(sorted((v, k) for v, k in zip(self.vars, e) if k)), c)
                              for e, c in self.terms.items()))

    def degrees(self, var: str) -> tuple[Degree, Degree]:
        """(deg+, deg-) in `var`; both BOTTOM for the zero polynomial."""
        if not self.terms:
            return BOTTOM, BOTTOM
        if var not in self.vars:
            return 0, 0
        i = self.vars.index(var)
        exps = [e[i] for e in self.terms]
        return max(0, max(exps)), max(0, -min(exps))

    def evaluate(self, assignment: Mapping[str, object]):
        """Substitute values (CycloNumber or complex) for every variable."""
        missing = [v for v in self.vars if v not in assignment]
        if missing:
            raise KeyError(f"no value for variable(s) {missing}")
        vals = [assignment[v] for v in self.vars]
        exact = all(isinstance(x, (CycloNumber, int)) for x in vals)
        if exact:
            vals = [CycloNumber.coerce(x) for x in vals]
        acc = CycloNumber.zero() if exact else 0j
        for e, c in self.terms.items():
            term = c if exact else c.to_complex()
            for x, k in zip(vals, e):
                if k:
                    term = term * (x ** k if exact else complex(x) ** k)
            acc = acc + term
        return acc

    def constant_value(self) -> CycloNumber:
        if any(any(e) for e in self.terms):
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()), CycloNumber.zero())

    def substitute(self, var: str, poly: "LaurentPoly") -> "LaurentPoly":
        if var not in self.vars:
            return self
        i = self.vars.index(var)
        rest = tuple(v for v in self.vars if v != var)
        out = LaurentPoly.const(0, rest)
        for e, c in self.terms.items():
            mono = LaurentPoly(rest, {tuple(x for j, x in enumerate(e) if j != i): c})
            out = out + mono * (poly ** e[i])
        return out

    def to_json(self) -> dict:
        return {"vars": list(self.vars),
                "terms": [[list(e), c.to_json()] for e, c in sorted(self.terms.items())]}

    @classmethod
    def from_json(cls, obj) -> "LaurentPoly":
        return cls(tuple(obj["vars"]), {tuple(e): CycloNumber.from_json(c) for e, c in obj["terms"]})

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items()):
            mono = "*".join(f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)
