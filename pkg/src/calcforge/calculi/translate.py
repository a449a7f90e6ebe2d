"""Interpretation-preserving translations between calculi, generator by generator."""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Callable

from ..cyclo import CycloNumber, common_conductor
from ..diagram import Builder, Diagram
from ..laurent import LaurentPoly
from ..phase import GroupPhase, QConst, QZRot, QuatExpr, RingPhase, SConst, SHalfPhase, ScalarExpr
from ..quaternion import Quaternion, complex_canonical_form, from_angle_axis_exact, quat_euler_zxz
from . import zx as zxr

Leg = tuple[int, int]           # (edge index, side)
Gadget = Callable[[Builder, str, object, list], dict]


class TranslationError(ValueError):
    pass


def _legs(d: Diagram) -> dict[str, list[tuple[Leg, int]]]:
    """Per vertex, its legs (edge index, side) with their ports, in port order."""
    out: dict[str, list] = {v: [] for v in d.vertices}
    for j, (a, b) in enumerate(d.edges):
        out[a[0]].append(((j, 0), a[1]))
        out[b[0]].append(((j, 1), b[1]))
    for v in out:
        out[v].sort(key=lambda t: t[1])
    return out


def _rebuild(d: Diagram, target: str, gadget: Gadget) -> Diagram:
    if d.bboxes:
        raise TranslationError("translate instantiated diagrams; !-boxes are not supported")
    b = Builder(target, d.fragment if target == d.calculus else None)
    legs = _legs(d)
    ends: dict[Leg, tuple] = {}
    for v in d.inputs:
        b.add("BoundaryIn", id=v)
        ends[legs[v][0][0]] = (v, 0)
    for v in d.outputs:
        b.add("BoundaryOut", id=v)
        ends[legs[v][0][0]] = (v, 0)
    b.inputs, b.outputs = list(d.inputs), list(d.outputs)
    for v, x in d.vertices.items():
        if x.is_boundary:
            continue
        if x.kind == "Wire":
            w = b.add("Wire", id=v)
            for leg, _ in legs[v]:
                ends[leg] = (w, 0)
            continue
        ends.update(gadget(b, v, x, legs[v]))
    for j in range(len(d.edges)):
        b.edge(ends[(j, 0)], ends[(j, 1)])
    return b.build()


def _fresh_builder_ids(b: Builder, prefix: str):
    def add(kind, phase=None):
        return b.add(kind, phase, id=b._fresh(prefix + "_"))
    return add


# -- ZX <-> ZQ ---------------------------------------------------------------

QH = QConst(Quaternion.hadamard())


def _zq_scalar(b: Builder, v: str, c) -> None:
    b.add("ScalarNode", c if isinstance(c, ScalarExpr) else SConst(c), id=b._fresh(f"{v}_l"))


def _zx_to_zq_gadget(b: Builder, v: str, x, legs) -> dict:
    add = _fresh_builder_ids(b, v)
    i = CycloNumber.i()
    if x.kind == "Hadamard":
        q = add("QNode", QH)
        _zq_scalar(b, v, i)
        return {legs[0][0]: (q, 0), legs[1][0]: (q, 1)}
    if x.kind not in ("ZSpider", "XSpider"):
        raise TranslationError(f"no ZQ translation for {x.kind}")
    alpha = x.phase if x.phase is not None else GroupPhase()
    s = add("ZSpider")
    if not (alpha.is_constant() and alpha.const == 0):
        q = add("QNode", QZRot(alpha))
        t = add("ZSpider")
        b.edge(s, (q, 0))
        b.edge((q, 1), t)
        _zq_scalar(b, v, SHalfPhase(alpha))
    out = {}
    for leg, _ in legs:
        if x.kind == "XSpider":
            h = add("QNode", QH)
            _zq_scalar(b, v, i)
            b.edge(s, (h, 0))
            out[leg] = (h, 1)
        else:
            out[leg] = (s, 0)
    return out


def translate_zx_to_zq(d: Diagram) -> Diagram:
    """Z(alpha) becomes a phase-free Z spider with a (alpha, z) loop-leg and lambda e^{i alpha/2};
    H becomes Q(H) lambda_i; X spiders are H-conjugated Z spiders."""
    if d.calculus != "zx":
        raise TranslationError(f"expected a zx diagram, got {d.calculus}")
    return _rebuild(d, "zq", _zx_to_zq_gadget)


def _exact_euler(q: Quaternion):
    """Rational-pi Euler angles (alpha, beta, gamma) for an exact q, or None."""
    if not q.exact:
        return None
    # half-angles of q live in conductor 4N; anything coarser would only inflate the field
    n = 4 * common_conductor((q.w, q.x, q.y, q.z))
    raw = [a / math.pi for a in quat_euler_zxz(q)]
    angles = [Fraction(t).limit_denominator(n) for t in raw]
    if any(n % f.denominator or abs(f - t) > 1e-9 for f, t in zip(angles, raw)):
        return None
    a, bt, g = angles
    rec = from_angle_axis_exact(a, "z") * from_angle_axis_exact(bt, "x") * from_angle_axis_exact(g, "z")
    return angles if rec == q else None


def _zx_scalar(b: Builder, c, exact: bool) -> None:
    """Append a closed ZX gadget worth c (exact cyclotomic when possible)."""
    sub = zxr.scalar_diagram(complex(c))
    if exact and isinstance(c, CycloNumber):
        from ..interpret import interpret
        if any(x.phase is not None and not x.phase.exact for x in sub.vertices.values()) or \
                interpret(sub).entry(0, 0) != c:
            raise TranslationError(f"scalar {c} has no exact ZX gadget in this library")
    _paste(b, sub)


def _paste(b: Builder, sub: Diagram) -> None:
    names = {}
    for v, x in sub.vertices.items():
        names[v] = b.add(x.kind, x.phase, id=b._fresh("g"))
    for (a, p), (c, q) in sub.edges:
        b.edge((names[a], p), (names[c], q))


def _zq_to_zx_gadget(b: Builder, v: str, x, legs) -> dict:
    add = _fresh_builder_ids(b, v)
    if x.kind == "ZSpider":
        s = add("ZSpider", GroupPhase())
        return {leg: (s, 0) for leg, _ in legs}
    if x.kind == "ScalarNode":
        c = x.phase.value() if isinstance(x.phase, ScalarExpr) and x.phase.is_constant() else None
        if c is None:
            raise TranslationError(f"symbolic scalar on {v}")
        _scalar_or_float(b, c)
        return {}
    if x.kind == "QNode":
        if not isinstance(x.phase, QuatExpr) or not x.phase.is_constant():
            raise TranslationError(f"symbolic quaternion on {v}")
        q = x.phase.value()
        rat = _exact_euler(q)
        if rat is not None:
            a, bt, g = (GroupPhase(t) for t in rat)
            theta = -(rat[0] + rat[1] + rat[2]) / 2
            zxr.g_pi(b, GroupPhase(theta))
            zxr.inv_sqrt2(b)
        else:
            fa, fb, fg = quat_euler_zxz(q)
            a, bt, g = (GroupPhase(t / math.pi) for t in (fa, fb, fg))
            _zx_scalar(b, cmath.exp(-0.5j * (fa + fb + fg)), exact=False)
        zg = add("ZSpider", g)
        xb = add("XSpider", bt)
        za = add("ZSpider", a)
        b.edge(zg, xb)
        b.edge(xb, za)
        ends = {0: (zg, 0), 1: (za, 0)}
        return {leg: ends[port] for leg, port in legs}
    raise TranslationError(f"no ZX translation for {x.kind}")


def _scalar_or_float(b: Builder, c) -> None:
    if isinstance(c, CycloNumber):
        try:
            _zx_scalar(b, c, exact=True)
            return
        except TranslationError:
            pass
    _paste(b, _float_scalar(complex(c)))


def _float_scalar(c: complex) -> Diagram:
    n, alpha, beta = complex_canonical_form(c)
    b = Builder("zx")
    if c == 0:
        zxr.cos_gadget(b, GroupPhase(Fraction(1, 2)))
        return b.build()
    zxr.g_pi(b, GroupPhase(alpha / math.pi))
    zxr.inv_sqrt2(b)
    zxr.inv_sqrt2(b)
    for _ in range(abs(n)):
        (zxr.sqrt2_pair if n > 0 else zxr.inv_sqrt2)(b)
    zxr.cos_gadget(b, GroupPhase(beta / math.pi))
    return b.build()


def translate_zq_to_zx(d: Diagram) -> Diagram:
    """Q(q) becomes Z(gamma) X(beta) Z(alpha) for the Euler angles of q with scalar e^{-i(alpha+beta+gamma)/2};
    lambda_c becomes a closed scalar gadget."""
    if d.calculus != "zq":
        raise TranslationError(f"expected a zq diagram, got {d.calculus}")
    return _rebuild(d, "zx", _zq_to_zx_gadget)


# -- RING <-> ZH ---------------------------------------------------------------

def _ring_label(x) -> RingPhase:
    return x.phase if x.phase is not None else RingPhase.const(1)


def _ring_to_zh_gadget(b: Builder, v: str, x, legs) -> dict:
    add = _fresh_builder_ids(b, v)
    if x.kind in ("RingMult", "RingState"):
        label = _ring_label(x)
        if x.kind == "RingState" and len(legs) == 1:
            h = add("HBox", label)
            return {legs[0][0]: (h, 0)}
        s = add("ZhZ")
        b.edge(s, add("HBox", label))
        return {leg: (s, 0) for leg, _ in legs}
    if x.kind == "RingAdd":
        outs = [leg for leg, p in legs if p == 0]
        ins = [leg for leg, p in legs if p != 0]
        par = add("ZhZ")
        add("HBox", RingPhase.const(Fraction(1, 2)))
        ends = {}
        h = add("HBox", RingPhase.const(-1))
        b.edge(par, h)
        ends[outs[0]] = (h, 0)
        copies = []
        for leg in ins:
            h = add("HBox", RingPhase.const(-1))
            b.edge(par, h)
            if len(ins) > 1:
                c = add("ZhZ")
                b.edge(c, h)
                copies.append(c)
                ends[leg] = (c, 0)
            else:
                ends[leg] = (h, 0)
        for i in range(len(copies)):
            for j in range(i + 1, len(copies)):
                z = add("HBox", RingPhase.const(0))
                b.edge(copies[i], z)
                b.edge(z, copies[j])
        return ends
    raise TranslationError(f"no ZH translation for {x.kind}")


def _zh_to_ring_gadget(b: Builder, v: str, x, legs) -> dict:
    add = _fresh_builder_ids(b, v)
    if x.kind == "ZhZ":
        s = add("RingMult", RingPhase.const(1))
        return {leg: (s, 0) for leg, _ in legs}
    if x.kind == "HBox":
        return dict(zip((leg for leg, _ in legs), _ring_hbox(b, add, _ring_label(x), len(legs))))
    raise TranslationError(f"no RING translation for {x.kind}")


def _ring_hbox(b: Builder, add, label: RingPhase, k: int) -> list:
    """H-box a with k legs: RingMult(a - 1), each leg an addition with a spare RingState(1)."""
    m = add("RingMult", _minus_one(label))
    ends = []
    for _ in range(k):
        a = add("RingAdd")
        b.edge((a, 1), m)
        b.edge((a, 2), add("RingState", RingPhase.const(1)))
        ends.append((a, 0))
    return ends


def _minus_one(label: RingPhase) -> RingPhase:
    if label.exact:
        return RingPhase(label.poly - LaurentPoly.const(1, label.poly.vars))
    return RingPhase.const(label.value_f - 1)


def translate_ring_zh(d: Diagram, direction: str = "ring->zh") -> Diagram:
    if direction == "ring->zh":
        _expect(d, "ring")
        return _rebuild(d, "zh", _ring_to_zh_gadget)
    if direction == "zh->ring":
        _expect(d, "zh")
        return _rebuild(d, "ring", _zh_to_ring_gadget)
    raise TranslationError(f"unknown direction {direction!r}")


# -- RING <-> ZW ---------------------------------------------------------------

def _ring_to_zw_gadget(b: Builder, v: str, x, legs) -> dict:
    add = _fresh_builder_ids(b, v)
    if x.kind in ("RingMult", "RingState"):
        s = add("ZwWhite", _ring_label(x))
        return {leg: (s, 0) for leg, _ in legs}
    if x.kind == "RingAdd":
        w = add("ZwBlack")
        ends = {leg: (w, 0) for leg, p in legs if p != 0}
        neg = add("ZwBlack")
        b.edge(w, neg)
        ends.update({leg: (neg, 0) for leg, p in legs if p == 0})
        return ends
    raise TranslationError(f"no ZW translation for {x.kind}")


def _ring_not(b: Builder, add, cur):
    """NOT = L_1 U_{-1} L_1 diag(1, -1) in RING; returns the output end."""
    one, mone = RingPhase.const(1), RingPhase.const(-1)
    m = add("RingMult", mone)
    b.edge(cur, m)
    cur = m
    for kind, s in (("L", one), ("U", mone), ("L", one)):
        a = add("RingAdd")
        b.edge((a, 2), add("RingState", s))
        if kind == "L":
            b.edge(cur, (a, 1))
            cur = (a, 0)
        else:
            b.edge(cur, (a, 0))
            cur = (a, 1)
    return cur


def _zw_to_ring_gadget(b: Builder, v: str, x, legs) -> dict:
    add = _fresh_builder_ids(b, v)
    if x.kind == "ZwWhite":
        s = add("RingMult", _ring_label(x))
        return {leg: (s, 0) for leg, _ in legs}
    if x.kind == "ZwBlack":
        if not legs:
            add("RingMult", RingPhase.const(-1))
            return {}
        a = add("RingAdd")
        end = _ring_not(b, add, (a, 0))
        b.edge(end, add("RingMult", RingPhase.const(0)))
        return {leg: (a, 1) for leg, _ in legs}
    if x.kind == "ZwCross":
        # swap (in 0 -> out 3, in 1 -> out 2) followed by CZ = two copies joined by H(-1)
        c0, c1 = add("RingMult", RingPhase.const(1)), add("RingMult", RingPhase.const(1))
        e0, e1 = _ring_hbox(b, add, RingPhase.const(-1), 2)
        b.edge(c0, e0)
        b.edge(c1, e1)
        ports = {p: leg for leg, p in legs}
        return {ports[0]: (c0, 0), ports[3]: (c0, 0), ports[1]: (c1, 0), ports[2]: (c1, 0)}
    raise TranslationError(f"no RING translation for {x.kind}")


def translate_ring_zw(d: Diagram, direction: str = "ring->zw") -> Diagram:
    if direction == "ring->zw":
        _expect(d, "ring")
        return _rebuild(d, "zw", _ring_to_zw_gadget)
    if direction == "zw->ring":
        _expect(d, "zw")
        return _rebuild(d, "ring", _zw_to_ring_gadget)
    raise TranslationError(f"unknown direction {direction!r}")


def _expect(d: Diagram, calc: str) -> None:
    if d.calculus != calc:
        raise TranslationError(f"expected a {calc} diagram, got {d.calculus}")


TRANSLATIONS = {
    ("zx", "zq"): translate_zx_to_zq,
    ("zq", "zx"): translate_zq_to_zx,
    ("ring", "zh"): lambda d: translate_ring_zh(d, "ring->zh"),
    ("zh", "ring"): lambda d: translate_ring_zh(d, "zh->ring"),
    ("ring", "zw"): lambda d: translate_ring_zw(d, "ring->zw"),
    ("zw", "ring"): lambda d: translate_ring_zw(d, "zw->ring"),
}


def translate(d: Diagram, target: str) -> Diagram:
    fn = TRANSLATIONS.get((d.calculus, target))
    if fn is None:
        raise TranslationError(f"no translation from {d.calculus} to {target}")
    return fn(d)
