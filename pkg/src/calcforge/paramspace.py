"""Parameter spaces of equation skeletons, affine integer submodules, HNF and inference heuristics.

Coordinates: a finite group slot of order n holds an integer k (phase 2 pi k / n, taken mod n);
an infinite group slot holds a rational multiple of pi; a ring slot holds the label itself.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .cyclo import CycloNumber
from .diagram import Builder, Diagram, Equation, phase_slots
from .laurent import LaurentPoly
from .phase import GroupPhase, RingPhase

INF = None      # modulus of an infinite slot


class ParamSpaceError(ValueError):
    pass


# -- parameter spaces -------------------------------------------------------------

@dataclass(frozen=True)
class Slot:
    side: str           # "lhs" | "rhs"
    vertex: str
    modulus: int | None
    kind: str           # "group" | "ring"

    def to_json(self):
        return [self.side, self.vertex, self.modulus, self.kind]


@dataclass(frozen=True)
class ParameterSpace:
    slots: tuple[Slot, ...]

    @property
    def moduli(self) -> list[int | None]:
        return [s.modulus for s in self.slots]

    def __len__(self):
        return len(self.slots)

    def size(self) -> int | None:
        out = 1
        for n in self.moduli:
            if n is None:
                return None
            out *= n
        return out

    def reduce(self, p: Sequence) -> tuple:
        return tuple(x % n if n is not None else x for x, n in zip(p, self.moduli))

    def points(self) -> Iterable[tuple]:
        if self.size() is None:
            raise ParamSpaceError("infinite parameter space")
        return itertools.product(*(range(n) for n in self.moduli))

    def describe(self) -> str:
        return " x ".join(f"Z_{n}" if n else ("R" if s.kind == "ring" else "U(1)")
                          for n, s in zip(self.moduli, self.slots)) or "trivial"


def _slot_kind(phase) -> str:
    if isinstance(phase, GroupPhase):
        return "group"
    if isinstance(phase, RingPhase):
        return "ring"
    raise ParamSpaceError(f"{type(phase).__name__} phases have no linear parameter space here")


def parameter_space(eq: Equation, modulus: int | None = None) -> ParameterSpace:
    """One slot per phase-bearing vertex, lhs first; group slots take the fragment order as modulus."""
    n = modulus if modulus is not None else (eq.fragment if isinstance(eq.fragment, int) else None)
    slots = []
    for side, d in (("lhs", eq.lhs), ("rhs", eq.rhs)):
        for v in phase_slots(d):
            kind = _slot_kind(d.vertices[v].phase)
            slots.append(Slot(side, v, n if kind == "group" else None, kind))
    return ParameterSpace(tuple(slots))


def slot_phase(slot: Slot, value, coeffs: dict | None = None):
    """Phase for a slot from a coordinate (and optional integer variable coefficients)."""
    coeffs = {k: c for k, c in (coeffs or {}).items() if c}
    if slot.kind == "group":
        const = Fraction(2 * value, slot.modulus) if slot.modulus else (
            value if isinstance(value, float) else Fraction(value))
        return GroupPhase(const, tuple((k, int(c)) for k, c in coeffs.items()))
    poly = LaurentPoly.const(value)
    for k, c in coeffs.items():
        poly = poly + LaurentPoly.var(k) * Fraction(c)
    return RingPhase(poly)


def point_to_equation(eq: Equation, space: ParameterSpace, p: Sequence) -> Equation:
    """Write p's coordinates into the slots of eq's skeleton."""
    if len(p) != len(space):
        raise ParamSpaceError(f"point has {len(p)} coordinates, space has {len(space)}")
    ph = {"lhs": {}, "rhs": {}}
    for s, x in zip(space.slots, p):
        ph[s.side][s.vertex] = slot_phase(s, x)
    return Equation(eq.lhs.with_phases(ph["lhs"]), eq.rhs.with_phases(ph["rhs"]), dict(eq.bbox_pairing), eq.name)


def point_of(eq: Equation, space: ParameterSpace) -> tuple:
    """Coordinates of a concrete equation in its own parameter space."""
    out = []
    for s in space.slots:
        d = eq.lhs if s.side == "lhs" else eq.rhs
        p = d.vertices[s.vertex].phase
        if s.kind == "group":
            if not p.is_constant():
                raise ParamSpaceError("equation has phase variables")
            if s.modulus:
                k = p.const * s.modulus / 2
                if Fraction(k).denominator != 1:
                    raise ParamSpaceError(f"phase {p} is outside the order-{s.modulus} fragment")
                out.append(int(k) % s.modulus)
            else:
                out.append(p.const)
        else:
            out.append(p.value())
    return tuple(out)


# -- Hermite normal form ---------------------------------------------------------------

def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hnf(M: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Row-style Hermite normal form: (H, U) with H = U M and U unimodular.

    Pivots are positive and strictly to the right of the pivot above; entries above a pivot
    lie in [0, pivot); zero rows come last.
    """
    A = [[int(x) for x in row] for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        for i in range(r + 1, m):
            if A[i][c] == 0:
                continue
            a, b = A[r][c], A[i][c]
            g, x, y = _egcd(a, b)
            p, q = -b // g, a // g
            for T in (A, U):
                ri, rr = T[i], T[r]
                T[r] = [x * u + y * v for u, v in zip(rr, ri)]
                T[i] = [p * u + q * v for u, v in zip(rr, ri)]
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-v for v in A[r]]
            U[r] = [-v for v in U[r]]
        piv = A[r][c]
        for i in range(r):
            f = A[i][c] // piv
            if f:
                A[i] = [u - f * v for u, v in zip(A[i], A[r])]
                U[i] = [u - f * v for u, v in zip(U[i], U[r])]
        r += 1
    return A, U


def rank_int(M: Sequence[Sequence[int]]) -> int:
    H, _ = hnf(M)
    return sum(1 for row in H if any(row))


def _det(M: list[list[int]]) -> int:
    from sympy import Matrix
    return int(Matrix(M).det()) if M else 1


def in_lattice(v: Sequence[int], rows: Sequence[Sequence[int]]) -> bool:
    """Is v an integer combination of the rows?"""
    if not rows:
        return not any(v)
    H, _ = hnf(rows)
    rest = [int(x) for x in v]
    for row in H:
        if not any(row):
            continue
        c = next(i for i, x in enumerate(row) if x)
        if rest[c] % row[c]:
            return False
        f = rest[c] // row[c]
        rest = [a - f * b for a, b in zip(rest, row)]
    return not any(rest)


# -- affine submodules --------------------------------------------------------------------

def _scale_rows(rows: Sequence[Sequence], extra: Sequence = ()) -> tuple[list[list[int]], int]:
    """Scale rational rows (and an optional vector) to integers; returns (rows + [extra], L)."""
    vals = [Fraction(x) for row in list(rows) + ([list(extra)] if extra else []) for x in row]
    L = 1
    for x in vals:
        L = L * x.denominator // gcd(L, x.denominator)
    return [[int(Fraction(x) * L) for x in row] for row in list(rows) + ([list(extra)] if extra else [])], L


@dataclass
class AffineSubmodule:
    """offset + Z-span (or field span on infinite slots) of the generator rows, reduced by the moduli."""

    offset: tuple
    generators: list[list]
    moduli: list[int | None]
    span: str = "Z"          # "Z" or "field" (only meaningful for infinite slots)

    def __post_init__(self):
        self.offset = tuple(self._red(self.offset))
        self.generators = [list(self._red(g)) for g in self.generators]

    def _red(self, v):
        return [x % n if n is not None else x for x, n in zip(v, self.moduli)]

    @property
    def dim(self) -> int:
        return len(self.moduli)

    def to_json(self) -> dict:
        def enc(x):
            return x if isinstance(x, int) else str(x) if isinstance(x, Fraction) else x
        out = {"offset": [enc(x) for x in self.offset], "generators": [[enc(x) for x in g] for g in self.generators],
               "moduli": list(self.moduli)}
        if self.span != "Z":
            out["span"] = self.span
        return out

    @classmethod
    def from_json(cls, obj) -> "AffineSubmodule":
        for k in ("offset", "generators", "moduli"):
            if k not in obj:
                raise ParamSpaceError(f"missing field '{k}'")

        def dec(x):
            if isinstance(x, str):
                return Fraction(x)
            return x
        moduli = [None if m is None else int(m) for m in obj["moduli"]]
        if len(obj["offset"]) != len(moduli) or any(len(g) != len(moduli) for g in obj["generators"]):
            raise ParamSpaceError("field 'generators': rows must have one entry per modulus")
        return cls(tuple(dec(x) for x in obj["offset"]), [[dec(x) for x in g] for g in obj["generators"]],
                   moduli, obj.get("span", "Z"))

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    def points(self, limit: int = 1_000_000) -> set[tuple]:
        """All points (finite moduli only), by closure under the generators."""
        if any(n is None for n in self.moduli):
            raise ParamSpaceError("point enumeration needs finite moduli")
        seen = {tuple(self.offset)}
        frontier = [tuple(self.offset)]
        while frontier:
            nxt = []
            for p in frontier:
                for g in self.generators:
                    q = tuple((a + b) % n for a, b, n in zip(p, g, self.moduli))
                    if q not in seen:
                        seen.add(q)
                        nxt.append(q)
                        if len(seen) > limit:
                            raise ParamSpaceError("submodule too large to enumerate")
            frontier = nxt
        return seen

    def contains(self, p: Sequence) -> bool:
        diff = [a - b for a, b in zip(p, self.offset)]
        rows = list(self.generators) + [[n if j == i else 0 for j in range(self.dim)]
                                        for i, n in enumerate(self.moduli) if n is not None]
        ints, _ = _scale_rows(rows, diff)
        return in_lattice(ints[-1], ints[:-1])

    def independent_basis(self) -> list[list]:
        """The supplied generators if independent over Z, else the nonzero HNF rows."""
        if not self.generators:
            return []
        ints, L = _scale_rows(self.generators)
        if rank_int(ints) == len(ints):
            return [list(g) for g in self.generators]
        H, _ = hnf(ints)
        return [[Fraction(x, L) if L != 1 else x for x in row] for row in H if any(row)]


# -- submodules <-> rules ------------------------------------------------------------------

VAR_NAMES = "abcdefghjkmnpqrstuvwxyz"


def var_name(k: int) -> str:
    return VAR_NAMES[k] if k < len(VAR_NAMES) else f"v{k}"


def submodule_to_rule(eq: Equation, sub: AffineSubmodule, space: ParameterSpace | None = None) -> Equation:
    """One fresh variable per independent generator; slot phase = offset + sum of column entries times variables."""
    space = space or parameter_space(eq)
    if len(space) != sub.dim:
        raise ParamSpaceError(f"submodule has {sub.dim} coordinates, space has {len(space)}")
    basis = sub.independent_basis()
    if any(s.modulus is None and s.kind == "ring" for s in space.slots) and basis:
        basis = _rref(basis)
    ph = {"lhs": {}, "rhs": {}}
    for j, s in enumerate(space.slots):
        coeffs = {}
        for k, row in enumerate(basis):
            c = Fraction(row[j])
            if s.kind == "group" and c.denominator != 1:
                raise ParamSpaceError("group slots need integer generator entries")
            if s.kind == "group" and s.modulus:
                c = _sym(int(c), s.modulus)      # so -a reads as -a
            coeffs[var_name(k)] = c if s.kind == "ring" else int(c)
        ph[s.side][s.vertex] = slot_phase(s, sub.offset[j], coeffs)
    return Equation(eq.lhs.with_phases(ph["lhs"]), eq.rhs.with_phases(ph["rhs"]), dict(eq.bbox_pairing), eq.name)


def _rref(rows: list[list]) -> list[list]:
    """Reduced row echelon form over Q (rebasing field-like slots to independent variables)."""
    A = [[Fraction(x) for x in r] for r in rows]
    out, r = A, 0
    for c in range(len(A[0]) if A else 0):
        piv = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        A[r] = [x / A[r][c] for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        r += 1
    return [row for row in out if any(row)]


def rule_to_submodule(eq: Equation, space: ParameterSpace | None = None) -> AffineSubmodule:
    """Inverse of submodule_to_rule for phases affine-linear in the variables."""
    space = space or parameter_space_of_rule(eq)
    names = eq.vars()
    offset, cols = [], []
    for s in space.slots:
        d = eq.lhs if s.side == "lhs" else eq.rhs
        p = d.vertices[s.vertex].phase
        if s.kind == "group":
            const = p.const
            if s.modulus:
                k = Fraction(const) * s.modulus / 2
                if k.denominator != 1:
                    raise ParamSpaceError(f"constant {const}pi is outside the order-{s.modulus} fragment")
                offset.append(int(k))
            else:
                offset.append(const)
            cols.append([p.coeff(v) for v in names])
        else:
            offset_c, col = _linear_ring(p, names)
            offset.append(offset_c)
            cols.append(col)
    gens = [[cols[j][i] for j in range(len(space))] for i in range(len(names))]
    return AffineSubmodule(tuple(offset), gens, space.moduli, "field" if any(m is None for m in space.moduli) else "Z")


def parameter_space_of_rule(eq: Equation) -> ParameterSpace:
    return parameter_space(eq)


def _linear_ring(p: RingPhase, names: list[str]):
    if not p.exact:
        return p.to_complex(), [0] * len(names)
    poly = p.poly
    const = Fraction(0)
    col = [Fraction(0)] * len(names)
    for exps, c in poly.terms.items():
        c = CycloNumber.coerce(c)
        if not c.is_rational():
            raise ParamSpaceError("ring submodules need rational coefficients")
        nz = [(poly.vars[i], e) for i, e in enumerate(exps) if e]
        if not nz:
            const = c.to_fraction()
        elif len(nz) == 1 and nz[0][1] == 1:
            col[names.index(nz[0][0])] = c.to_fraction()
        else:
            raise ParamSpaceError("phase is not affine-linear in the variables")
    return const, col


# -- inference heuristics -------------------------------------------------------------------

def _sym(x: int, n: int) -> int:
    x %= n
    return x - n if 2 * x > n else x


def _diff(p, q, moduli):
    """q - p with finite coordinates in the symmetric range, so the line through p and q is the short one."""
    return [_sym(b - a, n) if n is not None else b - a for a, b, n in zip(p, q, moduli)]


def infer_full_linear(p: Sequence, q: Sequence, moduli: Sequence[int | None]) -> AffineSubmodule:
    """p + R(q - p): the line through p and q, meeting the slot lattice at its primitive step."""
    v = _diff(p, q, moduli)
    if not any(v):
        raise ParamSpaceError("interpolation needs two distinct points")
    if all(n is not None for n in moduli):
        g = 0
        for x in v:
            g = gcd(g, int(x))
        for n in moduli:
            g = gcd(g, n)
        return AffineSubmodule(tuple(p), [[x // g for x in v]], list(moduli))
    ints, _ = _scale_rows([v])
    g = 0
    for x in ints[0]:
        g = gcd(g, x)
    return AffineSubmodule(tuple(p), [[x // g for x in ints[0]]], list(moduli), "field")


def infer_sparse_linear(p: Sequence, q: Sequence, moduli: Sequence[int | None]) -> AffineSubmodule | None:
    """p + Z(q - p); None when it coincides with the full line."""
    v = _diff(p, q, moduli)
    if not any(v):
        raise ParamSpaceError("interpolation needs two distinct points")
    full = infer_full_linear(p, q, moduli)
    sparse = AffineSubmodule(tuple(p), [list(v)], list(moduli))
    if full.generators == sparse.generators and full.span == "Z":
        return None
    return sparse


def intersection_point(s: AffineSubmodule, t: AffineSubmodule) -> tuple | None:
    """A point of (s.offset + S) and (t.offset + T), by an integer lattice solve; None if disjoint."""
    k = s.dim
    mod_rows = [[n if j == i else 0 for j in range(k)] for i, n in enumerate(s.moduli) if n is not None]
    rows = [list(g) for g in s.generators] + [[-x for x in g] for g in t.generators] + mod_rows
    target = [b - a for a, b in zip(s.offset, t.offset)]
    if not rows:
        return tuple(s.offset) if not any(target) else None
    ints, L = _scale_rows(rows, target)
    M, tv = ints[:-1], ints[-1]
    H, U = hnf(M)
    y = [0] * len(H)
    rest = list(tv)
    for i, row in enumerate(H):
        if not any(row):
            continue
        c = next(j for j, x in enumerate(row) if x)
        if rest[c] % row[c]:
            return None
        y[i] = rest[c] // row[c]
        rest = [a - y[i] * b for a, b in zip(rest, row)]
    if any(rest):
        return None
    x = [sum(y[i] * U[i][j] for i in range(len(H))) for j in range(len(M))]
    pt = list(s.offset)
    for i, g in enumerate(s.generators):
        pt = [a + x[i] * b for a, b in zip(pt, g)]
    return tuple(a % n if n is not None else a for a, n in zip(pt, s.moduli))


def infer_sum(s: AffineSubmodule, t: AffineSubmodule) -> AffineSubmodule | None:
    """q + S + T, rebased at an intersection point q; None if the submodules do not meet."""
    if list(s.moduli) != list(t.moduli):
        raise ParamSpaceError("submodules live in different parameter spaces")
    q = intersection_point(s, t)
    if q is None:
        return None
    span = "field" if "field" in (s.span, t.span) else "Z"
    return AffineSubmodule(q, [list(g) for g in s.generators] + [list(g) for g in t.generators], list(s.moduli), span)


# -- symmetries ------------------------------------------------------------------------------

def apply_symmetry(obj, h, space: ParameterSpace):
    """Coordinate-wise image of points (a set/list of tuples, or one tuple) or of a submodule."""
    def img(p):
        out = []
        for x, s in zip(p, space.slots):
            if s.kind == "group":
                y = x * h.j
                out.append(y % s.modulus if s.modulus else (Fraction(y) % 2 if not isinstance(y, float) else y % 2))
            else:
                out.append(h.cyclo(CycloNumber.coerce(x)) if not isinstance(x, (float, complex)) else
                           complex(x).conjugate())
        return tuple(out)
    if isinstance(obj, AffineSubmodule):
        gens = [[x * h.j if s.kind == "group" else x for x, s in zip(g, space.slots)] for g in obj.generators]
        return AffineSubmodule(img(obj.offset), gens, list(obj.moduli), obj.span)
    if isinstance(obj, tuple):
        return img(obj)
    return type(obj)(img(p) for p in obj)


# -- sound point sets --------------------------------------------------------------------------

@dataclass
class SoundPointSet:
    equation: Equation
    space: ParameterSpace
    points: set = field(default_factory=set)

    def is_sound(self, p) -> bool:
        from .verify import check_simple
        return check_simple(point_to_equation(self.equation, self.space, p))[0]

    def add(self, p) -> bool:
        p = self.space.reduce(p)
        if self.is_sound(p):
            self.points.add(p)
            return True
        return False

    def recheck(self) -> bool:
        return all(self.is_sound(p) for p in self.points)


def sound_points(eq: Equation, space: ParameterSpace | None = None, policy="exact") -> set[tuple]:
    """Exhaustive scan of a finite parameter space."""
    from .verify import check_simple
    space = space or parameter_space(eq)
    return {p for p in space.points() if check_simple(point_to_equation(eq, space, p), policy)[0]}


# -- boundary generalisation ---------------------------------------------------------------------

SPIDERS = {"ZSpider", "XSpider", "ZhZ", "RingMult", "ZwWhite"}


@dataclass
class Generalisation:
    equation: Equation
    status: str          # "deduced" | "verified" | "conjectured" | "refuted"
    note: str = ""


def _neighbour(d: Diagram, b: str) -> str:
    (_, _, (v, _)), = d.adjacency()[b]
    return v


def _fresh_var(eq: Equation) -> str:
    used = set(eq.vars())
    k = 0
    while var_name(k) in used:
        k += 1
    return var_name(k)


def _bang(d: Diagram, b: str, s: str, var: str, box: str) -> Diagram:
    """Put boundary b in a !-box and add the variable to the spider s it touches."""
    x = d.vertices[s]
    phases = {}
    extra_vertices = {}
    extra_edges = []
    if x.kind in ("ZSpider", "XSpider"):
        phases[s] = (x.phase or GroupPhase()) + GroupPhase.var(var)
    elif x.kind in ("RingMult", "ZwWhite"):
        label = x.phase if x.phase is not None else RingPhase.const(1)
        if label.exact:
            phases[s] = RingPhase(label.poly * LaurentPoly.var(var))
        else:
            raise ParamSpaceError("float ring labels cannot carry a variable")
    elif x.kind == "ZhZ":
        h = f"{s}_h{var}"
        from .diagram import Vertex
        extra_vertices[h] = Vertex("HBox", RingPhase.var(var))
        extra_edges.append(((s, 0), (h, 0)))
    from .diagram import BBox
    out = d.with_phases(phases)
    verts = dict(out.vertices)
    verts.update(extra_vertices)
    boxes = dict(out.bboxes)
    boxes[box] = BBox(frozenset({b}), None)
    return Diagram(out.calculus, verts, list(out.edges) + extra_edges, out.inputs, out.outputs, boxes, out.fragment)


def generalize_boundary(eq: Equation) -> list[Generalisation]:
    """For each boundary meeting same-colour spiders on both sides: !-box it and add a variable.

    Plugging any spider into the boxed boundary and fusing recovers an instance, so the family is
    deduced from the original equation (no further verification needed)."""
    out = []
    bounds_l = eq.lhs.inputs + eq.lhs.outputs
    bounds_r = eq.rhs.inputs + eq.rhs.outputs
    for bl, br in zip(bounds_l, bounds_r):
        sl, sr = _neighbour(eq.lhs, bl), _neighbour(eq.rhs, br)
        kl, kr = eq.lhs.vertices[sl].kind, eq.rhs.vertices[sr].kind
        if kl != kr or kl not in SPIDERS:
            continue
        if eq.lhs.calculus == "zq":
            continue
        var = _fresh_var(eq)
        box = f"G{bl}"
        lhs = _bang(eq.lhs, bl, sl, var, box)
        rhs = _bang(eq.rhs, br, sr, var, box)
        pairing = dict(eq.bbox_pairing)
        pairing[box] = box
        out.append(Generalisation(Equation(lhs, rhs, pairing, eq.name + f"+{box}"), "deduced",
                                  f"boundary {bl} !-boxed with variable {var}"))
    return out


def add_boundary(eq: Equation, lhs_vertex: str, rhs_vertex: str, sub: AffineSubmodule,
                 space: ParameterSpace | None = None) -> Generalisation:
    """Attach one new boundary to lhs_vertex and rhs_vertex.  The one-boundary equation is sound on Q
    exactly when the closed equation is sound on Q + Z(e_lhs + e_rhs); that shifted family is verified."""
    from .verify import verify
    space = space or parameter_space(eq)
    idx = {(s.side, s.vertex): i for i, s in enumerate(space.slots)}
    if ("lhs", lhs_vertex) not in idx or ("rhs", rhs_vertex) not in idx:
        raise ParamSpaceError("add_boundary needs phase-bearing vertices on each side")
    il, ir = idx[("lhs", lhs_vertex)], idx[("rhs", rhs_vertex)]
    kl, kr = eq.lhs.vertices[lhs_vertex].kind, eq.rhs.vertices[rhs_vertex].kind
    if kl != kr or kl not in SPIDERS:
        raise ParamSpaceError("both vertices must be spiders of the same colour")
    e = [0] * len(space)
    e[il] = e[ir] = 1
    shifted = AffineSubmodule(sub.offset, [list(g) for g in sub.generators] + [e], list(sub.moduli), sub.span)
    fam = submodule_to_rule(eq, shifted, space)
    verdict = verify(fam, "grid")
    new = []
    for d, v in ((eq.lhs, lhs_vertex), (eq.rhs, rhs_vertex)):
        b = Builder(d.calculus, d.fragment)
        b.vertices = dict(d.vertices)
        b.edges = list(d.edges)
        b.inputs, b.outputs = list(d.inputs), list(d.outputs)
        b.bboxes = dict(d.bboxes)
        b.output(v, id="new_out")
        new.append(b.build())
    base = Equation(new[0], new[1], dict(eq.bbox_pairing), eq.name + "+boundary")
    fam_new = submodule_to_rule(base, sub, parameter_space(base))
    status = {"Verified": "verified", "Refuted": "refuted"}.get(verdict.status, "conjectured")
    return Generalisation(fam_new, status, f"shifted subspace check: {verdict.status}")
