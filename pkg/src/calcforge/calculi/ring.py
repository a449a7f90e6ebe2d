"""The RING rule set: multiplication spiders (RingMult), states (RingState) and addition (RingAdd)."""
from __future__ import annotations

from ..diagram import Builder
from ..laurent import LaurentPoly
from ..phase import RingPhase
from ..rewrite import RewriteRule
from .base import RuleSet

M, S, A = "RingMult", "RingState", "RingAdd"


def rc(c) -> RingPhase:
    return RingPhase.const(c)


def rv(name: str) -> RingPhase:
    return RingPhase.var(name)


def rpoly(p: LaurentPoly) -> RingPhase:
    return RingPhase(p)


# -- 1 -> 1 gadgets (return the output end) -----------------------------------

def lower(b: Builder, cur, s) -> tuple:
    """[[1,0],[s,1]]: add the input to a state s."""
    a = b.add(A)
    b.edge(cur, (a, 1))
    b.edge(b.add(S, rc(s)), (a, 2))
    return (a, 0)


def upper(b: Builder, cur, s) -> tuple:
    """[[1,s],[0,1]]: an addition read backwards, its spare input capped by a state s."""
    a = b.add(A)
    b.edge(cur, (a, 0))
    b.edge(b.add(S, rc(s)), (a, 2))
    return (a, 1)


def mult(b: Builder, cur, r) -> str:
    m = b.add(M, r if isinstance(r, RingPhase) else rc(r))
    b.edge(cur, m)
    return m


def not_gate(b: Builder, cur) -> tuple:
    """NOT = L_1 U_{-1} L_1 diag(1, -1)."""
    cur = mult(b, cur, -1)
    cur = lower(b, cur, 1)
    cur = upper(b, cur, -1)
    return lower(b, cur, 1)


# -- rules -------------------------------------------------------------------

def _mult_fusion() -> RewriteRule:
    lb = Builder("ring")
    s1, s2 = lb.add(M, rv("r"), id="s1"), lb.add(M, rv("s"), id="s2")
    lb.edge(s1, s2)
    lb.bbox([lb.input(s1, id="p")], id="A")
    lb.bbox([lb.output(s2, id="q")], id="B")
    rb = Builder("ring")
    s = rb.add(M, rpoly(LaurentPoly.var("r") * LaurentPoly.var("s")), id="s")
    rb.bbox([rb.input(s, id="p")], id="A")
    rb.bbox([rb.output(s, id="q")], id="B")
    return RewriteRule("Mfuse", lb.build(), rb.build(), bbox_pairing={"A": "A", "B": "B"})


def _mult_loop() -> RewriteRule:
    lb = Builder("ring")
    s = lb.add(M, rv("r"), id="s")
    lb.edge(s, s)
    lb.bbox([lb.input(s, id="p")], id="A")
    rb = Builder("ring")
    rb.bbox([rb.input(rb.add(M, rv("r"), id="s"), id="p")], id="A")
    return RewriteRule("Mloop", lb.build(), rb.build(), bbox_pairing={"A": "A"})


def _wire() -> Builder:
    b = Builder("ring")
    b.output(b.input(id="i"), id="o")
    return b


def _mult_id() -> RewriteRule:
    lb = Builder("ring")
    lb.output(mult(lb, lb.input(id="i"), 1), id="o")
    return RewriteRule("Mid", lb.build(), _wire().build())


def _add_fusion() -> RewriteRule:
    lb = Builder("ring")
    outer, inner = lb.add(A, id="a1"), lb.add(A, id="a2")
    lb.output((outer, 0), id="o")
    lb.edge((inner, 0), (outer, 1))
    lb.bbox([lb.input((outer, 1), id="p")], id="P")
    lb.bbox([lb.input((inner, 1), id="q")], id="Q")
    rb = Builder("ring")
    a = rb.add(A, id="a")
    rb.output((a, 0), id="o")
    rb.bbox([rb.input((a, 1), id="p")], id="P")
    rb.bbox([rb.input((a, 1), id="q")], id="Q")
    return RewriteRule("Afuse", lb.build(), rb.build(), bbox_pairing={"P": "P", "Q": "Q"})


def _add_consts() -> RewriteRule:
    lb = Builder("ring")
    a = lb.add(A, id="a")
    lb.edge(lb.add(S, rv("r"), id="x"), (a, 1))
    lb.edge(lb.add(S, rv("s"), id="y"), (a, 2))
    lb.output((a, 0), id="o")
    rb = Builder("ring")
    rb.output(rb.add(S, rpoly(LaurentPoly.var("r") + LaurentPoly.var("s")), id="x"), id="o")
    return RewriteRule("Aconst", lb.build(), rb.build())


def _add_zero() -> RewriteRule:
    lb = Builder("ring")
    a = lb.add(A, id="a")
    lb.edge(lb.add(S, rc(0), id="z"), (a, 1))
    lb.output((a, 0), id="o")
    lb.bbox([lb.input((a, 1), id="p")], id="P")
    rb = Builder("ring")
    a2 = rb.add(A, id="a")
    rb.output((a2, 0), id="o")
    rb.bbox([rb.input((a2, 1), id="p")], id="P")
    return RewriteRule("Azero", lb.build(), rb.build(), bbox_pairing={"P": "P"})


def _add_unary() -> RewriteRule:
    lb = Builder("ring")
    a = lb.add(A, id="a")
    lb.input((a, 1), id="i")
    lb.output((a, 0), id="o")
    return RewriteRule("Aid", lb.build(), _wire().build())


def _distribute() -> RewriteRule:
    lb = Builder("ring")
    a = lb.add(A, id="a")
    lb.output(mult(lb, (a, 0), rv("r")), id="o")
    lb.bbox([lb.input((a, 1), id="p")], id="P")
    rb = Builder("ring")
    a2 = rb.add(A, id="a")
    rb.output((a2, 0), id="o")
    m = rb.add(M, rv("r"), id="m")
    rb.edge(m, (a2, 1))
    rb.bbox([rb.input(m, id="p"), m], id="P")
    return RewriteRule("D", lb.build(), rb.build(), bbox_pairing={"P": "P"})


def _unit() -> RewriteRule:
    lb = Builder("ring")
    lb.add(M, rc(0), id="z")
    return RewriteRule("I", lb.build(), Builder("ring").build())


def _hopf() -> RewriteRule:
    lb = Builder("ring")
    c = lb.add(M, rc(1), id="c")
    a = lb.add(A, id="a")
    lb.input(c, id="i")
    lb.edge(c, (a, 1))
    lb.edge(c, (a, 2))
    lb.output((a, 0), id="o")
    rb = Builder("ring")
    rb.input(rb.add(M, rc(0), id="e"), id="i")
    rb.output(rb.add(S, rc(0), id="s"), id="o")
    return RewriteRule("Hopf", lb.build(), rb.build())


def _loop_rule() -> RewriteRule:
    lb = Builder("ring")
    a = lb.add(A, id="a")
    lb.edge((a, 0), (a, 1))
    lb.input((a, 2), id="i")
    rb = Builder("ring")
    rb.input(rb.add(M, rc(0), id="e"), id="i")
    rb.add(M, rc(1), id="two")
    return RewriteRule("L", lb.build(), rb.build())


def _bialgebra() -> RewriteRule:
    lb = Builder("ring")
    a = lb.add(A, id="a")
    c = lb.add(M, rc(1), id="c")
    lb.input((a, 1), id="i0")
    lb.input((a, 2), id="i1")
    lb.edge((a, 0), c)
    lb.output(c, id="o0")
    lb.output(c, id="o1")
    rb = Builder("ring")
    c0, c1 = rb.add(M, rc(1), id="c0"), rb.add(M, rc(1), id="c1")
    a0, a1 = rb.add(A, id="a0"), rb.add(A, id="a1")
    rb.input(c0, id="i0")
    rb.input(c1, id="i1")
    for k, x in enumerate((c0, c1)):
        for y in (a0, a1):
            rb.edge(x, (y, k + 1))
    rb.output((a0, 0), id="o0")
    rb.output((a1, 0), id="o1")
    return RewriteRule("B2", lb.build(), rb.build())


def _copy_zero() -> RewriteRule:
    lb = Builder("ring")
    s = lb.add(S, rc(0), id="s")
    c = lb.add(M, rc(1), id="c")
    lb.edge(s, c)
    lb.output(c, id="o0")
    lb.output(c, id="o1")
    rb = Builder("ring")
    rb.output(rb.add(S, rc(0), id="s0"), id="o0")
    rb.output(rb.add(S, rc(0), id="s1"), id="o1")
    return RewriteRule("B1", lb.build(), rb.build())


def _cp() -> RewriteRule:
    lb = Builder("ring")
    a = lb.add(A, id="a")
    lb.input((a, 1), id="i0")
    lb.input((a, 2), id="i1")
    lb.edge((a, 0), lb.add(M, rc(0), id="e"))
    rb = Builder("ring")
    rb.input(rb.add(M, rc(0), id="e0"), id="i0")
    rb.input(rb.add(M, rc(0), id="e1"), id="i1")
    return RewriteRule("CP", lb.build(), rb.build())


def _not_not() -> RewriteRule:
    lb = Builder("ring")
    cur = not_gate(lb, lb.input(id="i"))
    lb.output(not_gate(lb, cur), id="o")
    return RewriteRule("N", lb.build(), _wire().build())


def ring() -> RuleSet:
    rules = [_mult_fusion(), _mult_loop(), _mult_id(), _add_fusion(), _add_consts(), _add_zero(),
             _add_unary(), _distribute(), _unit(), _hopf(), _loop_rule(), _bialgebra(), _copy_zero(),
             _cp(), _not_not()]
    status = {r.name: "axiom" for r in rules}
    status.update({"Mloop": "derived", "Aid": "derived"})
    return RuleSet("ring", "ring", tuple(rules), "universal", status)
