"""Phase expressions: affine group phases, Laurent ring phases, quaternion and scalar terms."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .cyclo import CycloNumber
from .laurent import LaurentPoly, BOTTOM
from .quaternion import Quaternion, from_angle_axis_exact, quat_from_angle_vector

_PI_RE = re.compile(r"^\s*([+-]?\d*)\s*(?:/\s*(\d+))?\s*(?:[·*]?\s*pi)?\s*(?:/\s*(\d+))?\s*$")


def parse_pi_fraction(s) -> Fraction:
    """Parse "a/b·pi", "3pi/4", "-pi", "0" into the rational multiple of pi."""
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    text = str(s).strip()
    m = _PI_RE.match(text)
    if not m or text in ("", "+", "-"):
        raise ValueError(f"cannot parse phase constant {s!r}")
    num, den1, den2 = m.groups()
    has_pi = "pi" in text
    if num in ("", "+"):
        num = "1" if has_pi else "0"
    elif num == "-":
        num = "-1"
    val = Fraction(int(num), int(den1 or 1) * int(den2 or 1))
    return val


def format_pi_fraction(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}·pi"


def _norm_const(c):
    if isinstance(c, float):
        return c % 2.0
    return Fraction(c) % 2


@dataclass(frozen=True)
class GroupPhase:
    """const·pi + sum coeff_v · v, constants taken modulo 2pi.

    `const` is a Fraction (exact) or float (a multiple of pi).
    """

    const: Fraction | float = Fraction(0)
    coeffs: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "const", _norm_const(self.const))
        merged: dict[str, int] = {}
        for v, k in self.coeffs:
            merged[v] = merged.get(v, 0) + int(k)
        object.__setattr__(self, "coeffs", tuple(sorted((v, k) for v, k in merged.items() if k)))

    @classmethod
    def of(cls, c=0, **vars) -> "GroupPhase":
        return cls(c if isinstance(c, float) else Fraction(c), tuple(vars.items()))

    @classmethod
    def var(cls, name: str, k: int = 1, const=0) -> "GroupPhase":
        return cls(const if isinstance(const, float) else Fraction(const), ((name, k),))

    @property
    def exact(self) -> bool:
        return isinstance(self.const, Fraction)

    def vars(self) -> set[str]:
        return {v for v, _ in self.coeffs}

    def coeff(self, v: str) -> int:
        return dict(self.coeffs).get(v, 0)

    def is_constant(self) -> bool:
        return not self.coeffs

    def __add__(self, o: "GroupPhase") -> "GroupPhase":
        if not isinstance(o, GroupPhase):
            o = GroupPhase(o)
        c = self.const + o.const if self.exact == o.exact else float(self.const) + float(o.const)
        return GroupPhase(c, self.coeffs + o.coeffs)

    def __neg__(self) -> "GroupPhase":
        return GroupPhase(-self.const, tuple((v, -k) for v, k in self.coeffs))

    def __sub__(self, o):
        return self + (-o)

    def scale(self, k: int) -> "GroupPhase":
        return GroupPhase(self.const * k, tuple((v, c * k) for v, c in self.coeffs))

    def evaluate(self, assignment: Mapping[str, object]) -> "GroupPhase":
        out = GroupPhase(self.const)
        rest = []
        for v, k in self.coeffs:
            if v in assignment:
                val = assignment[v]
                if not isinstance(val, GroupPhase):
                    val = GroupPhase(val if isinstance(val, float) else Fraction(val))
                out = out + val.scale(k)
            else:
                rest.append((v, k))
        return GroupPhase(out.const, out.coeffs + tuple(rest))

    def term_size(self) -> int:
        return len(self.coeffs) + (1 if self.const != 0 else 0)

    def root(self) -> CycloNumber:
        """e^{i const pi}, exactly."""
        if not self.is_constant():
            raise ValueError("phase has free variables")
        if not self.exact:
            raise TypeError("float phase has no exact root")
        return CycloNumber.exp_i_pi(self.const)

    def conductor(self) -> int:
        return 2 * self.const.denominator if self.exact else 0

    def to_complex(self) -> complex:
        return complex(math.cos(math.pi * float(self.const)), math.sin(math.pi * float(self.const)))

    def radians(self) -> float:
        return math.pi * float(self.const)

    def to_json(self):
        out = {"const": format_pi_fraction(self.const) if self.exact else self.radians()}
        if self.coeffs:
            out["vars"] = dict(self.coeffs)
        return out

    @classmethod
    def from_json(cls, obj) -> "GroupPhase":
        c = obj.get("const", "0")
        const = float(c) / math.pi if isinstance(c, float) else parse_pi_fraction(c)
        return cls(const, tuple((v, int(k)) for v, k in obj.get("vars", {}).items()))

    def __repr__(self):
        parts = [v if k == 1 else f"-{v}" if k == -1 else f"{k}*{v}" for v, k in self.coeffs]
        if self.const != 0 or not parts:
            parts.append(f"{self.const}pi" if self.exact else f"{float(self.const):.6g}pi")
        return "+".join(parts).replace("+-", "-")


class RingPhase:
    """A ring label: a Laurent polynomial (exact) or a complex constant (float)."""

    __slots__ = ("poly", "value_f")

    def __init__(self, poly: LaurentPoly | None = None, value_f: complex | None = None):
        self.poly = poly
        self.value_f = value_f

    @classmethod
    def const(cls, c) -> "RingPhase":
        if isinstance(c, (complex, float)):
            return cls(value_f=complex(c))
        return cls(LaurentPoly.const(c))

    @classmethod
    def var(cls, name: str, power: int = 1) -> "RingPhase":
        return cls(LaurentPoly.var(name, power))

    @property
    def exact(self) -> bool:
        return self.poly is not None

    def vars(self) -> set[str]:
        if not self.exact:
            return set()
        return {v for i, v in enumerate(self.poly.vars) if any(e[i] for e in self.poly.terms)}

    def is_constant(self) -> bool:
        return not self.vars()

    def value(self):
        if not self.exact:
            return self.value_f
        return self.poly.constant_value()

    def to_complex(self) -> complex:
        if not self.exact:
            return self.value_f
        return self.poly.constant_value().to_complex()

    def degrees(self, var: str):
        if not self.exact:
            return (0, 0)
        d = self.poly.degrees(var)
        return (0, 0) if d[0] is BOTTOM else d

    def evaluate(self, assignment: Mapping[str, object]) -> "RingPhase":
        if not self.exact or not (self.vars() & set(assignment)):
            return self
        vals = {v: assignment[v] for v in self.vars() if v in assignment}
        if any(isinstance(x, (complex, float)) for x in vals.values()):
            if self.vars() - set(vals):
                raise ValueError("partial float evaluation of a ring phase")
            return RingPhase(value_f=complex(self.poly.evaluate({v: vals.get(v, 1) for v in self.poly.vars})))
        out = self.poly
        for v, x in vals.items():
            x = x.value() if isinstance(x, RingPhase) else x
            out = out.substitute(v, LaurentPoly.coerce(x))
        return RingPhase(out)

    def map_constants(self, f) -> "RingPhase":
        if not self.exact:
            raise TypeError("float ring phase")
        return RingPhase(LaurentPoly(self.poly.vars, {e: f(c) for e, c in self.poly.terms.items()}))

    def term_size(self) -> int:
        if not self.exact:
            return 1
        t = self.poly.terms
        if len(t) == 1 and not any(any(e) for e in t) and next(iter(t.values())) == 1:
            return 0
        return len(t)

    def __eq__(self, o):
        if not isinstance(o, RingPhase):
            return NotImplemented
        if self.exact and o.exact:
            return self.poly == o.poly
        if not self.exact and not o.exact:
            return abs(self.value_f - o.value_f) <= 1e-12
        return False

    def __hash__(self):
        return hash(self.poly) if self.exact else hash(round(self.value_f.real, 9))

    def to_json(self):
        if self.exact:
            return {"laurent": self.poly.to_json()}
        return {"complex": [self.value_f.real, self.value_f.imag]}

    @classmethod
    def from_json(cls, obj) -> "RingPhase":
        if "laurent" in obj:
            return cls(LaurentPoly.from_json(obj["laurent"]))
        if "complex" in obj:
            re_, im = obj["complex"]
            return cls(value_f=complex(re_, im))
        if "value" in obj:
            return cls(LaurentPoly.const(CycloNumber.from_json(obj["value"])))
        raise ValueError("unrecognised ring phase")

    def __repr__(self):
        return f"RingPhase({self.poly!r})" if self.exact else f"RingPhase({self.value_f})"


# -- quaternion expressions -------------------------------------------------

class QuatExpr:
    def vars(self) -> set[str]:
        return set()

    def evaluate(self, assignment) -> "QuatExpr":
        return self

    def value(self) -> Quaternion:
        raise ValueError(f"{self!r} is not a constant quaternion")

    def is_constant(self) -> bool:
        return not self.vars()

    def term_size(self) -> int:
        return 1


@dataclass(frozen=True)
class QConst(QuatExpr):
    q: Quaternion

    def value(self):
        return self.q

    def term_size(self):
        return 0 if self.q == Quaternion.one(self.q.exact) else 1

    def to_json(self):
        return {"quat": self.q.to_json()}


@dataclass(frozen=True)
class QVar(QuatExpr):
    name: str

    def vars(self):
        return {self.name}

    def evaluate(self, a):
        if self.name in a:
            v = a[self.name]
            return v if isinstance(v, QuatExpr) else QConst(v)
        return self

    def to_json(self):
        return {"qvar": self.name}


def _fold(e: QuatExpr) -> QuatExpr:
    return QConst(e.value()) if e.is_constant() else e


@dataclass(frozen=True)
class QMul(QuatExpr):
    a: QuatExpr
    b: QuatExpr

    def vars(self):
        return self.a.vars() | self.b.vars()

    def evaluate(self, asg):
        return _fold(QMul(self.a.evaluate(asg), self.b.evaluate(asg)))

    def value(self):
        x, y = self.a.value(), self.b.value()
        if x.exact != y.exact:
            x, y = x.to_float(), y.to_float()
        return x * y

    def term_size(self):
        return self.a.term_size() + self.b.term_size()

    def to_json(self):
        return {"qmul": [self.a.to_json(), self.b.to_json()]}


@dataclass(frozen=True)
class QTilde(QuatExpr):
    a: QuatExpr

    def vars(self):
        return self.a.vars()

    def evaluate(self, asg):
        return _fold(QTilde(self.a.evaluate(asg)))

    def value(self):
        return self.a.value().tilde()

    def term_size(self):
        return self.a.term_size() + 1

    def to_json(self):
        return {"qtilde": self.a.to_json()}


@dataclass(frozen=True)
class QNeg(QuatExpr):
    a: QuatExpr

    def vars(self):
        return self.a.vars()

    def evaluate(self, asg):
        return _fold(QNeg(self.a.evaluate(asg)))

    def value(self):
        return -self.a.value()

    def term_size(self):
        return self.a.term_size() + 1

    def to_json(self):
        return {"qneg": self.a.to_json()}


@dataclass(frozen=True)
class QZRot(QuatExpr):
    """The z-rotation (alpha, z) for a group phase alpha (possibly symbolic)."""

    alpha: GroupPhase

    def vars(self):
        return self.alpha.vars()

    def evaluate(self, asg):
        return _fold(QZRot(self.alpha.evaluate(asg)))

    def value(self):
        if not self.alpha.is_constant():
            raise ValueError("symbolic rotation")
        if self.alpha.exact:
            return from_angle_axis_exact(self.alpha.const, "z")
        return quat_from_angle_vector(self.alpha.radians(), (0, 0, 1))

    def term_size(self):
        return self.alpha.term_size()

    def to_json(self):
        return {"qzrot": self.alpha.to_json()}


def quat_expr_from_json(obj) -> QuatExpr:
    if "quat" in obj:
        return QConst(Quaternion.from_json(obj["quat"]))
    if "qvar" in obj:
        return QVar(obj["qvar"])
    if "qmul" in obj:
        a, b = obj["qmul"]
        return QMul(quat_expr_from_json(a), quat_expr_from_json(b))
    if "qtilde" in obj:
        return QTilde(quat_expr_from_json(obj["qtilde"]))
    if "qneg" in obj:
        return QNeg(quat_expr_from_json(obj["qneg"]))
    if "qzrot" in obj:
        return QZRot(GroupPhase.from_json(obj["qzrot"]))
    raise ValueError("unrecognised quaternion expression")


# -- scalar expressions (ZQ lambda labels) ---------------------------------

class ScalarExpr:
    def vars(self) -> set[str]:
        return set()

    def evaluate(self, assignment) -> "ScalarExpr":
        return self

    def is_constant(self) -> bool:
        return not self.vars()

    def term_size(self) -> int:
        return 1


@dataclass(frozen=True)
class SConst(ScalarExpr):
    c: CycloNumber | complex

    def value(self):
        return self.c

    def term_size(self):
        return 0 if (isinstance(self.c, CycloNumber) and self.c == 1) else 1

    def to_json(self):
        if isinstance(self.c, CycloNumber):
            return {"scalar": self.c.to_json()}
        return {"scalar": [self.c.real, self.c.imag]}

    def __eq__(self, o):
        if not isinstance(o, SConst):
            return NotImplemented
        a, b = self.c, o.c
        if isinstance(a, CycloNumber) and isinstance(b, CycloNumber):
            return a == b
        return abs(complex(a) - complex(b)) <= 1e-12

    def __hash__(self):
        return hash(self.c) if isinstance(self.c, CycloNumber) else hash(round(self.c.real, 9))


@dataclass(frozen=True)
class SVar(ScalarExpr):
    name: str

    def vars(self):
        return {self.name}

    def evaluate(self, a):
        if self.name in a:
            v = a[self.name]
            return v if isinstance(v, ScalarExpr) else SConst(v)
        return self

    def to_json(self):
        return {"svar": self.name}


def _sfold(e: ScalarExpr) -> ScalarExpr:
    return SConst(e.value()) if e.is_constant() else e


@dataclass(frozen=True)
class SMul(ScalarExpr):
    a: ScalarExpr
    b: ScalarExpr

    def vars(self):
        return self.a.vars() | self.b.vars()

    def evaluate(self, asg):
        return _sfold(SMul(self.a.evaluate(asg), self.b.evaluate(asg)))

    def value(self):
        x, y = self.a.value(), self.b.value()
        if isinstance(x, CycloNumber) != isinstance(y, CycloNumber):
            x, y = complex(x), complex(y)
        return x * y

    def term_size(self):
        return self.a.term_size() + self.b.term_size()

    def to_json(self):
        return {"smul": [self.a.to_json(), self.b.to_json()]}


@dataclass(frozen=True)
class STrace(ScalarExpr):
    """2(q_w - i q_x): the value of a Z effect, Q(q), Z state chain."""

    q: QuatExpr

    def vars(self):
        return self.q.vars()

    def evaluate(self, asg):
        return _sfold(STrace(self.q.evaluate(asg)))

    def value(self):
        q = self.q.value()
        if q.exact:
            return (q.w - CycloNumber.i() * q.x) * 2
        return 2 * complex(q.w, -q.x)

    def term_size(self):
        return self.q.term_size() + 1

    def to_json(self):
        return {"strace": self.q.to_json()}


@dataclass(frozen=True)
class SHalfPhase(ScalarExpr):
    """e^{i alpha/2}, alpha taken with its constant part in [0, 2pi)."""

    alpha: GroupPhase

    def vars(self):
        return self.alpha.vars()

    def evaluate(self, asg):
        return _sfold(SHalfPhase(self.alpha.evaluate(asg)))

    def value(self):
        if not self.alpha.is_constant():
            raise ValueError("symbolic half phase")
        if self.alpha.exact:
            return CycloNumber.exp_i_pi(self.alpha.const / 2)
        h = self.alpha.radians() / 2
        return complex(math.cos(h), math.sin(h))

    def term_size(self):
        return self.alpha.term_size() + 1

    def to_json(self):
        return {"shalf": self.alpha.to_json()}


def scalar_expr_from_json(obj) -> ScalarExpr:
    if "scalar" in obj:
        v = obj["scalar"]
        if isinstance(v, list):
            return SConst(complex(v[0], v[1]))
        return SConst(CycloNumber.from_json(v))
    if "svar" in obj:
        return SVar(obj["svar"])
    if "smul" in obj:
        a, b = obj["smul"]
        return SMul(scalar_expr_from_json(a), scalar_expr_from_json(b))
    if "strace" in obj:
        return STrace(quat_expr_from_json(obj["strace"]))
    if "shalf" in obj:
        return SHalfPhase(GroupPhase.from_json(obj["shalf"]))
    raise ValueError("unrecognised scalar expression")


def phase_to_json(p):
    if p is None:
        return None
    return p.to_json()


def phase_from_json(obj):
    if obj is None:
        return None
    if "const" in obj or "vars" in obj:
        return GroupPhase.from_json(obj)
    if "laurent" in obj or "complex" in obj or "value" in obj:
        return RingPhase.from_json(obj)
    if any(k in obj for k in ("quat", "qvar", "qmul", "qtilde", "qneg", "qzrot")):
        return quat_expr_from_json(obj)
    if any(k in obj for k in ("scalar", "svar", "smul", "strace", "shalf")):
        return scalar_expr_from_json(obj)
    raise ValueError(f"unrecognised phase {obj!r}")
