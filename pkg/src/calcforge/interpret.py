"""Matrix interpretation of diagrams (exact, float and Laurent-polynomial)."""
from __future__ import annotations

import itertools
import json
from math import gcd, lcm
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cyclo import CycloNumber
from .diagram import Diagram
from .laurent import LaurentPoly, BOTTOM
from .phase import GroupPhase, RingPhase, QuatExpr, ScalarExpr
from .quaternion import quat_to_su2
from .tensor import GTensor, FTensor, contract_network


class InterpretError(ValueError):
    pass


def inv_sqrt2_power(k: int) -> CycloNumber:
    """(1/sqrt2)^k exactly."""
    if k % 2 == 0:
        return CycloNumber.rational(Fraction(1, 2 ** (k // 2)))
    return CycloNumber.sqrt2() * Fraction(1, 2 ** ((k + 1) // 2))


# -- generator tensors ------------------------------------------------------

def _phase_value(phase, mode: str, vars: tuple[str, ...]):
    """e^{i alpha} for group phases, the label itself for ring phases."""
    if phase is None:
        return CycloNumber.one() if mode != "float" else 1.0 + 0j
    if isinstance(phase, GroupPhase):
        if mode == "float":
            if not phase.is_constant():
                raise InterpretError("phase variables present; evaluate them or use interpret_laurent")
            return phase.to_complex()
        if not phase.exact:
            raise InterpretError("float phase in exact mode")
        root = CycloNumber.exp_i_pi(phase.const)
        if phase.is_constant():
            return root if mode == "exact" else LaurentPoly.const(root, vars)
        if mode != "laurent":
            raise InterpretError("phase variables present; evaluate them or use interpret_laurent")
        exps = tuple(phase.coeff(v) for v in vars)
        return LaurentPoly(vars, {exps: root})
    if isinstance(phase, RingPhase):
        if mode == "float":
            if not phase.is_constant():
                raise InterpretError("phase variables present")
            return phase.to_complex()
        if not phase.exact:
            raise InterpretError("float ring label in exact mode")
        if mode == "exact":
            if not phase.is_constant():
                raise InterpretError("phase variables present; evaluate them or use interpret_laurent")
            return phase.value()
        return phase.poly.with_vars(vars) if set(phase.poly.vars) <= set(vars) else _restrict(phase.poly, vars)
    raise InterpretError(f"unexpected phase type {type(phase).__name__}")


def _restrict(poly: LaurentPoly, vars):
    used = [v for i, v in enumerate(poly.vars) if any(e[i] for e in poly.terms)]
    if set(used) - set(vars):
        raise InterpretError(f"variables {set(used) - set(vars)} not declared")
    keep = [i for i, v in enumerate(poly.vars) if v in vars]
    sub = LaurentPoly(tuple(poly.vars[i] for i in keep), {tuple(e[i] for i in keep): c for e, c in poly.terms.items()})
    return sub.with_vars(vars)


def _one(mode):
    return 1.0 + 0j if mode == "float" else CycloNumber.one()


def generator_entries(kind: str, phase, k: int, mode: str, vars=()) -> list[tuple[tuple[int, ...], object]]:
    """Nonzero entries of a generator with k legs (legs in port order)."""
    one = _one(mode)
    if kind == "Wire":
        return [((0, 0), one), ((1, 1), one)]
    if kind in ("ZSpider", "ZhZ", "ZwWhite", "RingMult", "RingState"):
        top = one if kind == "ZhZ" else _phase_value(phase, mode, vars)
        if k == 0:
            return [((), one + top)]
        return [((0,) * k, one), ((1,) * k, top)]
    if kind == "XSpider":
        val = _phase_value(phase, mode, vars)
        norm = (2 ** -0.5) ** k if mode == "float" else inv_sqrt2_power(k)
        out = []
        for idx in itertools.product((0, 1), repeat=k):
            sign = -1 if sum(idx) % 2 else 1
            out.append((idx, (one + val * sign) * norm if mode != "laurent" else (LaurentPoly.const(1, vars) + val * sign) * norm))
        return out
    if kind == "Hadamard":
        h = 2 ** -0.5 if mode == "float" else inv_sqrt2_power(1)
        return [((0, 0), h), ((0, 1), h), ((1, 0), h), ((1, 1), -h)]
    if kind == "HBox":
        val = _phase_value(phase, mode, vars)
        out = []
        for idx in itertools.product((0, 1), repeat=k):
            out.append((idx, val if all(idx) else one))
        return out
    if kind == "ZwBlack":
        if k == 0:
            return []
        return [(tuple(1 if j == i else 0 for j in range(k)), one) for i in range(k)]
    if kind == "ZwCross":
        out = []
        for i0, i1 in itertools.product((0, 1), repeat=2):
            sign = -one if (i0 and i1) else one
            out.append(((i0, i1, i1, i0), sign))
        return out
    if kind == "RingAdd":
        out = [((0,) * k, one)]
        for j in range(1, k):
            out.append(((1,) + tuple(1 if t == j else 0 for t in range(1, k)), one))
        return out
    if kind == "QNode":
        q = _quat_value(phase)
        if mode == "float":
            m = quat_to_su2(q.to_float())
            return [((i, o), complex(m[o][i])) for i in (0, 1) for o in (0, 1)]
        if not q.exact:
            raise InterpretError("float quaternion in exact mode")
        m = quat_to_su2(q)
        return [((i, o), m[o][i]) for i in (0, 1) for o in (0, 1)]
    if kind == "ScalarNode":
        v = _scalar_value(phase)
        if mode == "float":
            return [((), complex(v))]
        if not isinstance(v, CycloNumber):
            raise InterpretError("float scalar in exact mode")
        return [((), v)]
    raise InterpretError(f"unknown generator kind {kind!r}")


def _quat_value(phase):
    if isinstance(phase, QuatExpr):
        if not phase.is_constant():
            raise InterpretError("symbolic quaternion; instantiate before interpreting")
        return phase.value()
    raise InterpretError("QNode without quaternion")


def _scalar_value(phase):
    if isinstance(phase, ScalarExpr):
        if not phase.is_constant():
            raise InterpretError("symbolic scalar; instantiate before interpreting")
        return phase.value()
    if phase is None:
        return CycloNumber.one()
    raise InterpretError("ScalarNode without value")


def _leg_order(d: Diagram, v: str) -> list[int]:
    """Edge indices of v's legs in port order (self-loops contribute two legs)."""
    legs = d.adjacency()[v]
    kind = d.vertices[v].kind
    if kind in ("QNode", "ZwCross", "RingAdd"):
        legs = sorted(legs, key=lambda t: t[1])
    return [i for i, _, _ in legs]


# -- matrices -----------------------------------------------------------------

@dataclass
class TensorMatrix:
    """2^m x 2^n matrix stored as a tensor with legs (outputs..., inputs...)."""

    tensor: GTensor | FTensor
    m: int
    n: int

    @property
    def kind(self) -> str:
        if isinstance(self.tensor, FTensor):
            return "float"
        return "laurent" if self.tensor.vars else "exact"

    @property
    def shape(self) -> tuple[int, int]:
        return 2 ** self.m, 2 ** self.n

    def _legs(self, r: int, c: int) -> tuple[int, ...]:
        bits_r = [(r >> (self.m - 1 - k)) & 1 for k in range(self.m)]
        bits_c = [(c >> (self.n - 1 - k)) & 1 for k in range(self.n)]
        return tuple(bits_r + bits_c)

    def entry(self, r: int, c: int):
        legs = self._legs(r, c)
        if isinstance(self.tensor, FTensor):
            return complex(self.tensor.arr[legs]) if legs else complex(self.tensor.arr)
        return self.tensor.entry(legs)

    def to_numpy(self, assignment: dict | None = None) -> np.ndarray:
        if isinstance(self.tensor, FTensor):
            arr = self.tensor.arr
        else:
            arr = self.tensor.to_complex(assignment)
        return np.asarray(arr, dtype=complex).reshape(self.shape)

    def evaluate(self, assignment: dict) -> "TensorMatrix":
        return TensorMatrix(self.tensor.evaluate(assignment), self.m, self.n)

    def fold(self, var: str, n: int) -> "TensorMatrix":
        return TensorMatrix(self.tensor.fold_var(var, n), self.m, self.n)

    def degrees(self, var: str):
        """True (deg+, deg-) of the entries in `var`."""
        t = self.tensor
        if not isinstance(t, GTensor) or var not in t.vars:
            return (0, 0) if (isinstance(t, GTensor) and not t.is_zero()) else (BOTTOM, BOTTOM)
        red = t.reduced()
        j = t.vars.index(var)
        axis = 1 + j
        other = tuple(a for a in range(red.ndim) if a != axis)
        present = np.any(red != 0, axis=other)
        idx = np.nonzero(present)[0]
        if idx.size == 0:
            return BOTTOM, BOTTOM
        lo, hi = t.low[j] + int(idx.min()), t.low[j] + int(idx.max())
        return max(0, hi), max(0, -lo)

    def to_json(self) -> dict:
        rows, cols = self.shape
        out = {"rows": rows, "cols": cols, "kind": self.kind}
        if self.kind == "float":
            arr = self.to_numpy()
            out["entries"] = [[[z.real, z.imag] for z in row] for row in arr]
        elif self.kind == "exact":
            out["entries"] = [[self.entry(r, c).to_json() for c in range(cols)] for r in range(rows)]
        else:
            out["entries"] = [[self.entry(r, c).to_json() for c in range(cols)] for r in range(rows)]
        return out

    def to_text(self, digits: int = 12) -> str:
        arr = self.to_numpy() if self.kind != "laurent" else None
        if arr is None:
            raise InterpretError("Laurent matrices have no float grid; evaluate first")
        lines = []
        for row in arr:
            lines.append(" ".join(f"{z.real:+.{digits}f}{z.imag:+.{digits}f}j" for z in row))
        return "\n".join(lines) + "\n"


def _labels(d: Diagram):
    """Tensor nodes with edge labels, plus open labels in (outputs, inputs) order."""
    nodes = []
    open_in, open_out = {}, {}
    extra = len(d.edges)
    for i, (a, b) in enumerate(d.edges):
        va, vb = d.vertices[a[0]], d.vertices[b[0]]
        if va.is_boundary and vb.is_boundary:
            # bare wire between two boundaries: identity tensor
            la, lb = i, extra
            extra += 1
            nodes.append(("Wire", None, [la, lb]))
            (open_in if va.kind == "BoundaryIn" else open_out)[a[0]] = la
            (open_in if vb.kind == "BoundaryIn" else open_out)[b[0]] = lb
        else:
            if va.is_boundary:
                (open_in if va.kind == "BoundaryIn" else open_out)[a[0]] = i
            if vb.is_boundary:
                (open_in if vb.kind == "BoundaryIn" else open_out)[b[0]] = i
    for v, x in d.vertices.items():
        if x.is_boundary:
            continue
        nodes.append((x.kind, x.phase, _leg_order(d, v)))
    try:
        opens = [open_out[v] for v in d.outputs] + [open_in[v] for v in d.inputs]
    except KeyError as e:
        raise InterpretError(f"boundary {e} is not connected") from e
    return nodes, opens


def interpret(d: Diagram, mode: str = "exact") -> TensorMatrix:
    """Interpret a simple diagram as a matrix (rows: outputs, columns: inputs)."""
    if d.bboxes:
        raise InterpretError("diagram has !-boxes; instantiate them first")
    if d.vars():
        raise InterpretError(f"diagram has phase variables {sorted(d.vars())}; evaluate them first")
    if mode not in ("exact", "float"):
        raise InterpretError(f"unknown mode {mode!r}")
    return _interpret(d, mode, ())


def interpret_laurent(d: Diagram, vars: Sequence[str] | None = None) -> TensorMatrix:
    """Interpret with one Laurent indeterminate Y_j per phase variable."""
    if d.bboxes:
        raise InterpretError("diagram has !-boxes; instantiate them first")
    if d.calculus == "zq":
        raise InterpretError("ZQ has a non-commutative phase group; no Laurent interpretation")
    vs = tuple(sorted(set(vars) if vars is not None else d.vars()))
    return _interpret(d, "laurent", vs)


def _interpret(d: Diagram, mode: str, vars: tuple[str, ...]) -> TensorMatrix:
    nodes, opens = _labels(d)
    built = []
    for kind, phase, labels in nodes:
        entries = generator_entries(kind, phase, len(labels), mode, vars)
        if mode == "float":
            t = FTensor.from_entries(len(labels), entries)
        else:
            t = GTensor.from_entries(len(labels), entries, vars=vars if mode == "laurent" else ())
        built.append((t, labels))
    unit = FTensor(np.array(1.0 + 0j)) if mode == "float" else GTensor.from_entries(0, [((), 1)], vars=())
    t = contract_network(built, opens, unit)
    if mode == "laurent" and isinstance(t, GTensor) and t.vars != vars:
        from .tensor import _window
        t = t.align_vars(vars, *_window(t, vars))
    return TensorMatrix(t, len(d.outputs), len(d.inputs))


# -- degrees ------------------------------------------------------------------

def vertex_degree(kind: str, phase, var: str) -> tuple[int, int]:
    if phase is None:
        return 0, 0
    if isinstance(phase, GroupPhase):
        k = phase.coeff(var)
        return (k, 0) if k > 0 else (0, -k)
    if isinstance(phase, RingPhase):
        return phase.degrees(var)
    if var in getattr(phase, "vars", lambda: set())():
        raise InterpretError("degree bounds are not defined for quaternion/scalar phases")
    return 0, 0


def degree_bounds(d: Diagram, var: str) -> tuple[int, int]:
    """Syntactic (deg+, deg-) bound: the sum of generator degrees."""
    if d.bboxes:
        raise InterpretError("degree bounds need a diagram without !-boxes")
    if d.calculus == "zq":
        raise InterpretError("ZQ has no degree bounds (non-commutative phases)")
    pos = neg = 0
    for x in d.vertices.values():
        p, n = vertex_degree(x.kind, x.phase, var)
        pos += p
        neg += n
    return pos, neg


# -- equality -----------------------------------------------------------------

@dataclass
class Comparison:
    equal: bool
    witness: object = None      # scalar lambda with m1 = lambda * m2 under the scalar policy
    residual: float = 0.0

    def __bool__(self):
        return self.equal


def _scale(t: GTensor, c: CycloNumber) -> GTensor:
    return t.contract(GTensor.from_entries(0, [((), c)]), [], [])


def parse_policy(policy) -> tuple[str, float]:
    if isinstance(policy, tuple):
        return policy
    if policy in ("exact", None):
        return "exact", 1e-9
    if policy in ("scalar", "up_to_nonzero_scalar"):
        return "scalar", 1e-9
    if isinstance(policy, str) and policy.startswith("tol="):
        return "tol", float(policy[4:])
    if isinstance(policy, (int, float)):
        return "tol", float(policy)
    raise ValueError(f"unknown policy {policy!r}")


def matrices_equal(m1: TensorMatrix, m2: TensorMatrix, policy="exact") -> Comparison:
    if m1.shape != m2.shape:
        raise ValueError(f"dimension mismatch: {m1.shape} vs {m2.shape}")
    how, tol = parse_policy(policy)
    exact = isinstance(m1.tensor, GTensor) and isinstance(m2.tensor, GTensor) and how != "tol"
    if exact:
        if how == "exact":
            eq = m1.tensor.sub(m2.tensor).is_zero()
            return Comparison(eq, CycloNumber.one() if eq else None)
        return _scalar_exact(m1, m2)
    a, b = m1.to_numpy(), m2.to_numpy()
    if how == "scalar":
        flat_b = b.ravel()
        flat_a = a.ravel()
        p = int(np.argmax(np.abs(flat_b)))
        if abs(flat_b[p]) <= tol:
            ok = float(np.max(np.abs(flat_a), initial=0.0)) <= tol
            return Comparison(ok, 1.0 + 0j if ok else None)
        lam = flat_a[p] / flat_b[p]
        res = float(np.max(np.abs(a - lam * b)))
        ok = res <= tol and abs(lam) > tol
        return Comparison(ok, lam if ok else None, res)
    res = float(np.max(np.abs(a - b), initial=0.0))
    return Comparison(res <= tol, 1.0 + 0j if res <= tol else None, res)


def first_nonzero(m: TensorMatrix):
    """(row, col) of the first nonzero entry in row-major order, or None."""
    t = m.tensor
    red = t.reduced()
    g = t.ngrade
    nz = np.any(red != 0, axis=tuple(range(g)))
    if not np.any(nz):
        return None
    legs = tuple(int(x) for x in np.argwhere(nz)[0]) if nz.ndim else ()
    r = int("".join(map(str, legs[:m.m])) or "0", 2)
    c = int("".join(map(str, legs[m.m:])) or "0", 2)
    # argwhere enumerates legs in lexicographic order = row-major order of (row, col)
    return r, c


def _scalar_exact(m1: TensorMatrix, m2: TensorMatrix) -> Comparison:
    p1, p2 = first_nonzero(m1), first_nonzero(m2)
    if p1 is None or p2 is None:
        ok = p1 is None and p2 is None
        return Comparison(ok, CycloNumber.one() if ok else None)
    if p1 != p2:
        return Comparison(False)
    a, b = m1.entry(*p1), m2.entry(*p2)
    if isinstance(a, LaurentPoly) or isinstance(b, LaurentPoly):
        raise InterpretError("scalar policy on Laurent matrices is not supported")
    ok = _scale(m1.tensor, b).sub(_scale(m2.tensor, a)).is_zero()
    return Comparison(ok, (a / b) if ok else None)


def normalised_fingerprint(m: TensorMatrix, conductor: int | None = None) -> str:
    """Scalar-free fingerprint: divide by the first nonzero entry, then hash canonically."""
    t = m.tensor
    if not isinstance(t, GTensor):
        raise InterpretError("fingerprints need exact matrices")
    p = first_nonzero(m)
    if p is None:
        body = "zero"
        return json.dumps([m.m, m.n, body])
    piv = m.entry(*p)
    scaled = _scale(t, piv.inverse())
    scaled = scaled.lift(lcm(conductor or 1, scaled.N))
    red = scaled.reduced()
    den = scaled.den
    g = den
    for x in red.flat:
        if x:
            g = gcd(g, int(x))
    vals = [int(x) // g for x in red.flat]
    return json.dumps([m.m, m.n, scaled.N, den // g, vals], separators=(",", ":"))
