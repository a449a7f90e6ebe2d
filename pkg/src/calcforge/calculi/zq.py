"""The ZQ rule set: Z spiders, quaternion-labelled wires (QNode) and lambda scalars (ScalarNode)."""
from __future__ import annotations

from ..cyclo import CycloNumber
from ..diagram import Builder
from ..phase import QConst, QMul, QNeg, QTilde, QVar, SConst, SMul, STrace, SVar
from ..quaternion import Quaternion
from ..rewrite import CONDITION_HOOKS, RewriteRule
from .base import RuleSet, chain

Z, Q, L = "ZSpider", "QNode", "ScalarNode"
QH = QConst(Quaternion.hadamard())
Q1 = QConst(Quaternion.one())


def lam(b: Builder, c) -> str:
    return b.add(L, SConst(CycloNumber.coerce(c)) if not isinstance(c, complex) else SConst(c))


def _fusion() -> RewriteRule:
    lb = Builder("zq")
    s1, s2 = lb.add(Z, id="s1"), lb.add(Z, id="s2")
    lb.edge(s1, s2)
    lb.bbox([lb.input(s1, id="p")], id="A")
    lb.bbox([lb.output(s2, id="q")], id="B")
    rb = Builder("zq")
    s = rb.add(Z, id="s")
    rb.bbox([rb.input(s, id="p")], id="A")
    rb.bbox([rb.output(s, id="q")], id="B")
    return RewriteRule("S", lb.build(), rb.build(), bbox_pairing={"A": "A", "B": "B"})


def _loop() -> RewriteRule:
    lb = Builder("zq")
    s = lb.add(Z, id="s")
    lb.edge(s, s)
    lb.bbox([lb.input(s, id="p")], id="A")
    rb = Builder("zq")
    rb.bbox([rb.input(rb.add(Z, id="s"), id="p")], id="A")
    return RewriteRule("S-loop", lb.build(), rb.build(), bbox_pairing={"A": "A"})


def _wire_rule(name: str, kinds, extra=None) -> Builder:
    """1 -> 1 chain of generators, plus optional closed scalar parts."""
    b = Builder("zq")
    last = chain(b, b.input(id="i"), kinds)
    b.output(last, id="o")
    if extra:
        extra(b)
    return b


def _wire() -> Builder:
    b = Builder("zq")
    b.output(b.input(id="i"), id="o")
    return b


def _q_rule() -> RewriteRule:
    lhs = _wire_rule("Q", [(Q, QVar("q1")), (Q, QVar("q2"))]).build()
    rhs = _wire_rule("Q", [(Q, QMul(QVar("q2"), QVar("q1")))]).build()
    return RewriteRule("Q", lhs, rhs)


def _y_rule() -> RewriteRule:
    """A quaternion wire read against its orientation is the tilde quaternion."""
    lb = Builder("zq")
    q = lb.add(Q, QVar("q"), id="n")
    lb.edge(lb.input(id="i"), (q, 1))
    lb.edge((q, 0), lb.output(id="o"))
    rhs = _wire_rule("Y", [(Q, QTilde(QVar("q")))]).build()
    return RewriteRule("Y", lb.build(), rhs)


def _n_rule() -> RewriteRule:
    lhs = _wire_rule("N", [(Q, QVar("q"))], lambda b: lam(b, -1)).build()
    rhs = _wire_rule("N", [(Q, QNeg(QVar("q")))]).build()
    return RewriteRule("N", lhs, rhs)


def _iq_rule() -> RewriteRule:
    return RewriteRule("I_q", _wire_rule("I_q", [(Q, Q1)]).build(), _wire().build())


def _iz_rule() -> RewriteRule:
    return RewriteRule("I_z", _wire_rule("I_z", [(Z, None)]).build(), _wire().build())


def _a_rule() -> RewriteRule:
    lb = Builder("zq")
    chain(lb, lb.add(Z, id="s"), [(Q, QVar("q")), (Z, None)])
    rb = Builder("zq")
    rb.add(L, STrace(QVar("q")), id="l")
    return RewriteRule("A", lb.build(), rb.build())


def _m_rule() -> RewriteRule:
    lb = Builder("zq")
    lb.add(L, SVar("x"), id="l1")
    lb.add(L, SVar("y"), id="l2")
    rb = Builder("zq")
    rb.add(L, SMul(SVar("x"), SVar("y")), id="l")
    return RewriteRule("M", lb.build(), rb.build())


def _i1_rule() -> RewriteRule:
    lb = Builder("zq")
    lam(lb, 1)
    return RewriteRule("I_1", lb.build(), Builder("zq").build())


def _b_rule() -> RewriteRule:
    """Bialgebra: two copies crossed through H wires into two merges, against a single H-conjugated channel."""
    lb = Builder("zq")
    c0, c1 = lb.add(Z, id="c0"), lb.add(Z, id="c1")
    m0, m1 = lb.add(Z, id="m0"), lb.add(Z, id="m1")
    lb.input(c0, id="i0")
    lb.input(c1, id="i1")
    for x in (c0, c1):
        for y in (m0, m1):
            h = lb.add(Q, QH)
            lb.edge(x, (h, 0))
            lb.edge((h, 1), y)
    lb.output(m0, id="o0")
    lb.output(m1, id="o1")
    lam(lb, -CycloNumber.sqrt2() * CycloNumber.i())
    rb = Builder("zq")
    m = rb.add(Z, id="m")
    c = rb.add(Z, id="c")
    for k in range(2):
        rb.edge(chain(rb, rb.input(id=f"i{k}"), [(Q, QH)]), m)
    mid = rb.add(Q, QH, id="hm")
    rb.edge(m, (mid, 0))
    rb.edge((mid, 1), c)
    for k in range(2):
        h = rb.add(Q, QH, id=f"ho{k}")
        rb.edge(c, (h, 0))
        rb.output((h, 1), id=f"o{k}")
    return RewriteRule("B", lb.build(), rb.build())


def _cp_rule() -> RewriteRule:
    lb = Builder("zq")
    m = lb.add(Z, id="m")
    lb.input(m, id="i0")
    lb.input(m, id="i1")
    chain(lb, m, [(Q, QH), (Z, None)])
    rb = Builder("zq")
    for k in range(2):
        chain(rb, rb.input(id=f"i{k}"), [(Q, QH), (Z, None)])
    lam(rb, CycloNumber.i() * CycloNumber.sqrt2() * CycloNumber.rational(1) / 2)
    return RewriteRule("CP", lb.build(), rb.build())


def _is_z_rotation(asg: dict) -> bool:
    q = asg.get("q")
    if q is None:
        return False
    v = q.value() if hasattr(q, "value") else q
    if v.exact:
        return v.x == 0 and v.y == 0
    return abs(v.x) <= 1e-12 and abs(v.y) <= 1e-12


CONDITION_HOOKS["z_rotation"] = _is_z_rotation


def _p_rule() -> RewriteRule:
    """A z-rotation commutes through a merge from one input to the other."""
    def side(first: bool) -> RewriteRule:
        b = Builder("zq")
        m = b.add(Z, id="m")
        for k in range(2):
            i = b.input(id=f"i{k}")
            b.edge(chain(b, i, [(Q, QVar("q"))]) if (k == 0) == first else i, m)
        b.output(m, id="o")
        return b.build()
    return RewriteRule("P", side(True), side(False), condition=_is_z_rotation, meta={"condition": "z_rotation"})


def zq() -> RuleSet:
    rules = [_fusion(), _loop(), _q_rule(), _y_rule(), _n_rule(), _iq_rule(), _iz_rule(), _a_rule(),
             _m_rule(), _i1_rule(), _b_rule(), _cp_rule(), _p_rule()]
    status = {r.name: "axiom" for r in rules}
    status["S-loop"] = "derived"
    return RuleSet("zq", "zq", tuple(rules), "universal", status)
