"""The ZH rule set: phase-free Z spiders (ZhZ) and labelled H-boxes (HBox), scalars as 0-ary H-boxes."""
from __future__ import annotations

from fractions import Fraction

from ..diagram import Builder
from ..laurent import LaurentPoly
from ..phase import RingPhase
from ..rewrite import RewriteRule
from .base import RuleSet

Z, HB = "ZhZ", "HBox"


def rc(c) -> RingPhase:
    return RingPhase.const(c)


def hbox(b: Builder, label, id: str | None = None) -> str:
    return b.add(HB, label if isinstance(label, RingPhase) else rc(label), id=id)


def h_edge(b: Builder, x, y) -> str:
    """Connect x and y through a 2-ary H-box labelled -1 (sqrt2 times a Hadamard)."""
    h = hbox(b, -1)
    b.edge(x, h)
    b.edge(h, y)
    return h


def _fusion() -> RewriteRule:
    lb = Builder("zh")
    s1, s2 = lb.add(Z, id="s1"), lb.add(Z, id="s2")
    lb.edge(s1, s2)
    lb.bbox([lb.input(s1, id="p")], id="A")
    lb.bbox([lb.output(s2, id="q")], id="B")
    rb = Builder("zh")
    s = rb.add(Z, id="s")
    rb.bbox([rb.input(s, id="p")], id="A")
    rb.bbox([rb.output(s, id="q")], id="B")
    return RewriteRule("ZS1", lb.build(), rb.build(), bbox_pairing={"A": "A", "B": "B"})


def _loop() -> RewriteRule:
    lb = Builder("zh")
    s = lb.add(Z, id="s")
    lb.edge(s, s)
    lb.bbox([lb.input(s, id="p")], id="A")
    rb = Builder("zh")
    rb.bbox([rb.input(rb.add(Z, id="s"), id="p")], id="A")
    return RewriteRule("ZS-loop", lb.build(), rb.build(), bbox_pairing={"A": "A"})


def _wire() -> Builder:
    b = Builder("zh")
    b.output(b.input(id="i"), id="o")
    return b


def _identity() -> RewriteRule:
    lb = Builder("zh")
    s = lb.add(Z, id="s")
    lb.input(s, id="i")
    lb.output(s, id="o")
    return RewriteRule("ZS2", lb.build(), _wire().build())


def _h_fusion() -> RewriteRule:
    """H(a) -- H(-1) -- H(-1) with free legs on both ends fuses into 2 H(a)."""
    lb = Builder("zh")
    h1 = hbox(lb, RingPhase.var("a"), id="h1")
    h3 = hbox(lb, -1, id="h3")
    h_edge(lb, h1, h3)
    lb.bbox([lb.input(h1, id="p")], id="A")
    lb.bbox([lb.output(h3, id="q")], id="B")
    hbox(lb, Fraction(1, 2))
    rb = Builder("zh")
    h = hbox(rb, RingPhase.var("a"), id="h1")
    rb.bbox([rb.input(h, id="p")], id="A")
    rb.bbox([rb.output(h, id="q")], id="B")
    return RewriteRule("HS1", lb.build(), rb.build(), bbox_pairing={"A": "A", "B": "B"})


def _h_involution() -> RewriteRule:
    lb = Builder("zh")
    i = lb.input(id="i")
    h1, h2 = hbox(lb, -1, id="h1"), hbox(lb, -1, id="h2")
    lb.edge(i, h1)
    lb.edge(h1, h2)
    lb.output(h2, id="o")
    hbox(lb, Fraction(1, 2))
    return RewriteRule("HS2", lb.build(), _wire().build())


def _multiply() -> RewriteRule:
    lb = Builder("zh")
    s = lb.add(Z, id="s")
    lb.edge(s, hbox(lb, RingPhase.var("a"), id="ha"))
    lb.edge(s, hbox(lb, RingPhase.var("b"), id="hb"))
    lb.bbox([lb.input(s, id="p")], id="A")
    rb = Builder("zh")
    t = rb.add(Z, id="s")
    rb.edge(t, hbox(rb, RingPhase(LaurentPoly.var("a") * LaurentPoly.var("b")), id="ha"))
    rb.bbox([rb.input(t, id="p")], id="A")
    return RewriteRule("M", lb.build(), rb.build(), bbox_pairing={"A": "A"})


def _unit() -> RewriteRule:
    lb = Builder("zh")
    lb.output(hbox(lb, 1, id="h"), id="o")
    rb = Builder("zh")
    rb.output(rb.add(Z, id="s"), id="o")
    return RewriteRule("U", lb.build(), rb.build())


def _x_spider(b: Builder, legs: list) -> str:
    """Phase-free X spider: a Z spider with an H-edge on every leg (scalar handled by the caller)."""
    s = b.add(Z)
    for x in legs:
        h_edge(b, x, s)
    return s


def _bialgebra(merge_first_z: bool) -> RewriteRule:
    """Both sides of the Z / H-conjugated-Z bialgebra, without scalars."""
    lb = Builder("zh")
    i0, i1 = lb.input(id="i0"), lb.input(id="i1")
    o0, o1 = lb.output(id="o0"), lb.output(id="o1")
    if merge_first_z:
        m = lb.add(Z, id="m")
        lb.edge(i0, m)
        lb.edge(i1, m)
        c = _x_spider(lb, [m, o0, o1])
    else:
        m = _x_spider(lb, [i0, i1])
        c = lb.add(Z, id="c")
        h_edge(lb, m, c)
        lb.edge(c, o0)
        lb.edge(c, o1)
    rb = Builder("zh")
    j0, j1 = rb.input(id="i0"), rb.input(id="i1")
    p0, p1 = rb.output(id="o0"), rb.output(id="o1")
    if merge_first_z:
        x0, x1 = _x_spider(rb, [j0]), _x_spider(rb, [j1])
        z0, z1 = rb.add(Z), rb.add(Z)
        for x in (x0, x1):
            for z in (z0, z1):
                h_edge(rb, x, z)
        rb.edge(z0, p0)
        rb.edge(z1, p1)
        rb_name = "BA2"
    else:
        z0, z1 = rb.add(Z), rb.add(Z)
        rb.edge(j0, z0)
        rb.edge(j1, z1)
        x0, x1 = _x_spider(rb, [p0]), _x_spider(rb, [p1])
        for z in (z0, z1):
            for x in (x0, x1):
                h_edge(rb, z, x)
        rb_name = "BA1"
    return lb, rb, rb_name


def _bialgebra_rule(merge_first_z: bool, lhs_scalar, rhs_scalar) -> RewriteRule:
    lb, rb, name = _bialgebra(merge_first_z)
    if lhs_scalar != 1:
        hbox(lb, lhs_scalar)
    if rhs_scalar != 1:
        hbox(rb, rhs_scalar)
    return RewriteRule(name, lb.build(), rb.build())


def zh() -> RuleSet:
    rules = [_fusion(), _loop(), _identity(), _h_fusion(), _h_involution(), _multiply(), _unit(),
             _bialgebra_rule(False, 1, Fraction(1, 2)), _bialgebra_rule(True, 1, Fraction(1, 2))]
    status = {r.name: "axiom" for r in rules}
    status["ZS-loop"] = "derived"
    return RuleSet("zh", "zh", tuple(rules), "universal", status)
