"""Finite verification of equation families: phase-variable grids, !-box bounds and Galois certificates."""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import sympy

from .cyclo import CycloNumber
from .diagram import Diagram, Equation, join, nesting_order, separation_violations
from .interpret import InterpretError, degree_bounds, interpret, matrices_equal
from .laurent import BOTTOM
from .phase import GroupPhase, QuatExpr, RingPhase, ScalarExpr

VERIFIED, REFUTED, INAPPLICABLE = "Verified", "Refuted", "Inapplicable"
FLOAT_TOL = 1e-9


@dataclass
class Verdict:
    status: str
    certificate: list[dict] = field(default_factory=list)
    witness: Equation | None = None
    witness_assignment: dict | None = None
    reason: str = ""
    method: str = ""
    grid_sizes: dict = field(default_factory=dict)
    bbox_bounds: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return self.status == VERIFIED

    def to_json(self) -> dict:
        out = {"status": self.status, "method": self.method,
               "grid_sizes": dict(sorted(self.grid_sizes.items())),
               "bbox_bounds": dict(sorted(self.bbox_bounds.items())),
               "certificate": self.certificate}
        if self.reason:
            out["reason"] = self.reason
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
            out["witness_assignment"] = self.witness_assignment
        return out


class Inapplicable(Exception):
    pass


# -- variables and degrees ------------------------------------------------------

def var_kinds(eq: Equation) -> dict[str, str]:
    """variable -> "group" | "ring" | "quat" | "scalar"."""
    out: dict[str, str] = {}
    for d in (eq.lhs, eq.rhs):
        for x in d.vertices.values():
            p = x.phase
            if p is None:
                continue
            kind = ("group" if isinstance(p, GroupPhase) else "ring" if isinstance(p, RingPhase)
                    else "quat" if isinstance(p, QuatExpr) else "scalar" if isinstance(p, ScalarExpr) else "?")
            for v in p.vars():
                out.setdefault(v, kind)
    return out


def _check_commutative(eq: Equation) -> None:
    if eq.calculus == "zq" and eq.vars():
        raise Inapplicable("ZQ phase variables: the phase group is non-commutative, so no Laurent degree bound exists")
    bad = [v for v, k in var_kinds(eq).items() if k not in ("group", "ring")]
    if bad:
        raise Inapplicable(f"variables {bad} are not group or ring phases")


def required_grid_sizes(eq: Equation) -> dict[str, int]:
    """d_j = max deg+ over both sides + max deg- over both sides + 1."""
    if eq.lhs.bboxes or eq.rhs.bboxes:
        raise Inapplicable("grid sizes need an equation without !-boxes")
    _check_commutative(eq)
    out = {}
    for v in eq.vars():
        pos = neg = 0
        for d in (eq.lhs, eq.rhs):
            p, n = degree_bounds(d, v)
            pos = max(pos, 0 if p is BOTTOM else p)
            neg = max(neg, 0 if n is BOTTOM else n)
        out[v] = pos + neg + 1
    return out


def fragment_order(eq: Equation) -> int | None:
    frag = eq.fragment
    return frag if isinstance(frag, int) and frag > 0 else None


def default_grid(kind: str, d: int, n: int | None) -> list:
    """d distinct admissible values: multiples of 2pi/n in a fragment, 2pi k/d otherwise, or d-th roots of unity."""
    if kind == "ring":
        return [CycloNumber.root(d, k) if d > 1 else CycloNumber.one() for k in range(d)]
    if n is not None:
        if d > n:
            d = n      # exhaustive: the fragment only has n values
        return [GroupPhase(Fraction(2 * k, n)) for k in range(d)]
    return [GroupPhase(Fraction(2 * k, d)) for k in range(d)]


def _value_json(v) -> object:
    if isinstance(v, GroupPhase):
        return v.to_json()
    if isinstance(v, CycloNumber):
        return {"value": v.to_json()}
    return repr(v)


def has_float_constants(d: Diagram) -> bool:
    for x in d.vertices.values():
        p = x.phase
        if isinstance(p, GroupPhase) and not p.exact:
            return True
        if isinstance(p, RingPhase) and not p.exact:
            return True
        if isinstance(p, (QuatExpr, ScalarExpr)) and p.is_constant():
            v = p.value()
            if not getattr(v, "exact", isinstance(v, CycloNumber)):
                return True
    return False


def check_simple(eq: Equation, policy="exact") -> tuple[bool, float, object]:
    """(equal, residual, scalar witness) for a simple equation without variables."""
    floaty = has_float_constants(eq.lhs) or has_float_constants(eq.rhs)
    mode = "float" if floaty else "exact"
    if floaty and policy == "exact":
        policy = f"tol={FLOAT_TOL}"
    c = matrices_equal(interpret(eq.lhs, mode), interpret(eq.rhs, mode), policy)
    return c.equal, c.residual, c.witness


def _check_task(args):
    eq, asg = args
    ok, res, _ = check_simple(eq.evaluate(asg))
    return ok, res


def _run(tasks: list[tuple[Equation, dict]], jobs: int) -> list[tuple[bool, float]]:
    if jobs > 1 and len(tasks) > 8:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_check_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    return [_check_task(t) for t in tasks]


# -- phase variables ----------------------------------------------------------------

def grid_for(eq: Equation, sizes: dict[str, int] | None = None) -> dict[str, list]:
    sizes = sizes if sizes is not None else required_grid_sizes(eq)
    kinds = var_kinds(eq)
    n = fragment_order(eq)
    return {v: default_grid(kinds.get(v, "group"), sizes.get(v, 1), n) for v in sorted(sizes)}


def _assignments(grids: dict[str, list]):
    names = sorted(grids)
    for combo in itertools.product(*(grids[v] for v in names)):
        yield dict(zip(names, combo))


def verify_phase_vars(eq: Equation, grids: dict[str, list] | None = None, jobs: int = 1) -> Verdict:
    """Check every grid instantiation exactly; success certifies the whole family."""
    try:
        sizes = required_grid_sizes(eq)
    except Inapplicable as e:
        return Verdict(INAPPLICABLE, reason=str(e), method="grid")
    if grids is None:
        grids = grid_for(eq, sizes)
    else:
        for v, pts in grids.items():
            if len(set(map(repr, pts))) != len(pts):
                return Verdict(INAPPLICABLE, reason=f"grid for {v} has repeated points", method="grid")
            n = fragment_order(eq)
            if len(pts) < sizes.get(v, 1) and not (n is not None and len(pts) >= n):
                return Verdict(INAPPLICABLE, reason=f"grid for {v} has {len(pts)} < {sizes[v]} points", method="grid")
    asgs = list(_assignments(grids))
    results = _run([(eq, a) for a in asgs], jobs)
    v = Verdict(VERIFIED, method="grid", grid_sizes=sizes)
    for a, (ok, res) in zip(asgs, results):
        v.certificate.append({"assignment": {k: _value_json(x) for k, x in a.items()}, "equal": ok, "residual": res})
        if not ok and v.status == VERIFIED:
            v.status = REFUTED
            v.witness = eq.evaluate(a)
            v.witness_assignment = {k: _value_json(x) for k, x in a.items()}
    return v


# -- !-boxes --------------------------------------------------------------------------

def _paired(eq: Equation, box: str) -> str | None:
    return eq.bbox_pairing.get(box)


def bbox_bound(eq: Equation, box: str) -> int:
    """N = 2^{n1} + 2^{n2} with n1, n2 the joins of the paired boxes on each side."""
    n1 = join(eq.lhs, box)
    rb = _paired(eq, box)
    n2 = join(eq.rhs, rb) if rb is not None else 0
    return 2 ** n1 + 2 ** n2


def _check_boxes(eq: Equation) -> None:
    for side, d in (("lhs", eq.lhs), ("rhs", eq.rhs)):
        bad = separation_violations(d)
        if bad:
            raise Inapplicable(
                "separability: !-boxes " + ", ".join(f"{a}/{b}" for a, b in bad) + f" on the {side} share a wire; "
                "separate them first (a Z or X spider between two boxes can be split by spider fusion, "
                "an H or Q node by inserting an identity spider)")
    paired_rhs = set(eq.bbox_pairing.values())
    if set(eq.bbox_pairing) != set(eq.lhs.bboxes) or paired_rhs != set(eq.rhs.bboxes):
        raise Inapplicable("every !-box must be paired with exactly one !-box on the other side")


def expand_family(eq: Equation, bounds: dict | None = None, prefix: str = "") -> list[tuple[dict, Equation]]:
    """All simple (box-free) instances up to the !-box bounds, outermost boxes first."""
    if not eq.lhs.bboxes and not eq.rhs.bboxes:
        return [({}, eq)]
    _check_boxes(eq)
    box = nesting_order(eq.lhs)[0] if eq.lhs.bboxes else None
    if box is None:
        raise Inapplicable("rhs has unpaired !-boxes")
    if eq.lhs.bboxes[box].parent is not None:
        raise Inapplicable(f"!-box {box} is not outermost")
    N = bbox_bound(eq, box)
    if bounds is not None:
        bounds[box] = N
    out = []
    for d in range(N + 1):
        for counts, sub in expand_family(eq.instantiate(box, d), bounds):
            out.append(({box: d, **counts}, sub))
    return out


def verify_bbox(eq: Equation, box: str, jobs: int = 1) -> Verdict:
    try:
        _check_boxes(eq)
        if eq.lhs.bboxes[box].parent is not None:
            raise Inapplicable(f"!-box {box} is not outermost")
    except Inapplicable as e:
        return Verdict(INAPPLICABLE, reason=str(e), method="bbox")
    N = bbox_bound(eq, box)
    out = Verdict(VERIFIED, method="bbox", bbox_bounds={box: N})
    for d in range(N + 1):
        sub = verify_family(eq.instantiate(box, d), jobs=jobs)
        for c in sub.certificate:
            out.certificate.append({**c, "bbox": {box: d, **c.get("bbox", {})}})
        out.bbox_bounds.update(sub.bbox_bounds)
        if sub.status == INAPPLICABLE:
            return Verdict(INAPPLICABLE, reason=sub.reason, method="bbox")
        if sub.status == REFUTED and out.status == VERIFIED:
            out.status, out.witness, out.witness_assignment = REFUTED, sub.witness, sub.witness_assignment
    return out


def verify_family(eq: Equation, jobs: int = 1) -> Verdict:
    """!-Remove every box up to its bound, then check each simple instance on grids sized for the largest one."""
    bounds: dict = {}
    try:
        instances = expand_family(eq, bounds)
        largest = max(instances, key=lambda t: (len(t[1].lhs.vertices) + len(t[1].rhs.vertices)))[1]
        sizes = required_grid_sizes(largest) if largest.vars() else {}
    except Inapplicable as e:
        return Verdict(INAPPLICABLE, reason=str(e), method="family")
    except InterpretError as e:
        return Verdict(INAPPLICABLE, reason=str(e), method="family")
    tasks, meta = [], []
    for counts, sub in instances:
        vs = set(sub.vars())
        grids = grid_for(sub, {v: sizes[v] for v in vs if v in sizes})
        for a in _assignments(grids):
            tasks.append((sub, a))
            meta.append((counts, a))
    results = _run(tasks, jobs)
    v = Verdict(VERIFIED, method="family" if bounds else "grid", grid_sizes=sizes, bbox_bounds=bounds)
    for (counts, a), (sub, _), (ok, res) in zip(meta, tasks, results):
        entry = {"assignment": {k: _value_json(x) for k, x in a.items()}, "equal": ok, "residual": res}
        if counts:
            entry["bbox"] = counts
        v.certificate.append(entry)
        if not ok and v.status == VERIFIED:
            v.status = REFUTED
            v.witness = sub.evaluate(a)
            v.witness_assignment = entry["assignment"] | ({"bbox": counts} if counts else {})
    return v


# -- Galois single-instance certificates ---------------------------------------------

def constant_conductor(eq: Equation) -> int:
    """lcm of the conductors of every phase constant (times 8 for ZX, whose generators use sqrt 2)."""
    M = 8 if eq.calculus in ("zx", "zq") else 1
    for d in (eq.lhs, eq.rhs):
        for x in d.vertices.values():
            p = x.phase
            if p is None:
                continue
            if isinstance(p, GroupPhase):
                if not p.exact:
                    raise Inapplicable("float phase constants are not cyclotomic")
                M = _lcm(M, 2 * Fraction(p.const).denominator)
            elif isinstance(p, RingPhase):
                if not p.exact:
                    raise Inapplicable("float ring constants are not cyclotomic")
                for c in p.poly.terms.values():
                    M = _lcm(M, CycloNumber.coerce(c).canonical().n)
            else:
                raise Inapplicable("Galois certificates cover group and ring phases only")
    return M


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def galois_verifying_instance(eq: Equation) -> dict:
    """alpha_j -> omega_{p_j} with distinct primes p_j not dividing the constants' conductor and p_j - 1 >= d_j."""
    if eq.lhs.bboxes or eq.rhs.bboxes:
        raise Inapplicable("Galois certificates need an equation without !-boxes")
    sizes = required_grid_sizes(eq)
    M = constant_conductor(eq)
    kinds = var_kinds(eq)
    out, used = {}, set()
    for v in sorted(sizes):
        p = 2
        while p in used or M % p == 0 or p - 1 < sizes[v]:
            p = sympy.nextprime(p)
        used.add(p)
        out[v] = GroupPhase(Fraction(2, p)) if kinds[v] == "group" else CycloNumber.root(p, 1)
    return out


def verify_single_equation_galois(eq: Equation) -> Verdict:
    try:
        sizes = required_grid_sizes(eq)
        asg = galois_verifying_instance(eq)
        M = constant_conductor(eq)
    except Inapplicable as e:
        return Verdict(INAPPLICABLE, reason=str(e), method="galois")
    ok, res, _ = check_simple(eq.evaluate(asg))
    a_json = {k: _value_json(x) for k, x in asg.items()}
    v = Verdict(VERIFIED if ok else REFUTED, method="galois", grid_sizes=sizes,
                certificate=[{"assignment": a_json, "equal": ok, "residual": res, "conductor": M}])
    if not ok:
        v.witness, v.witness_assignment = eq.evaluate(asg), a_json
    return v


def verify(eq: Equation, mode: str = "auto", jobs: int = 1) -> Verdict:
    """grid: the !-box and grid theorems; galois: one instance at prime roots of unity; auto picks."""
    if mode == "grid":
        return verify_family(eq, jobs=jobs)
    if mode == "galois":
        return verify_single_equation_galois(eq)
    if mode != "auto":
        raise ValueError(f"unknown verification mode {mode!r}")
    if eq.lhs.bboxes or eq.rhs.bboxes or fragment_order(eq) is not None or not eq.vars():
        return verify_family(eq, jobs=jobs)
    g = verify_single_equation_galois(eq)
    return g if g.status != INAPPLICABLE else verify_family(eq, jobs=jobs)
