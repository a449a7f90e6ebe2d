"""The Vilmart-style ZX rule set with explicit scalar gadgets, and the EU' side conditions."""
from __future__ import annotations

import cmath
import math
from fractions import Fraction

from ..diagram import Builder, Diagram
from ..phase import GroupPhase
from ..rewrite import DERIVE_HOOKS, RewriteRule
from .base import RuleSet, chain

Z, X, H = "ZSpider", "XSpider", "Hadamard"
COLOURS = {Z: X, X: Z}


def ph(c=0, **vars) -> GroupPhase:
    return GroupPhase.of(Fraction(c), **vars)


# -- scalar gadgets (closed sub-diagrams) -------------------------------------

def sqrt2_pair(b: Builder) -> None:
    """Green 0 state plugged into a red 0 effect: sqrt 2."""
    g = b.add(Z, ph(0))
    r = b.add(X, ph(0))
    b.edge(g, r)


def inv_sqrt2(b: Builder) -> None:
    """Green pi/3 -- H -- green -pi/3: 1/sqrt 2."""
    g1 = b.add(Z, ph(Fraction(1, 3)))
    h = b.add(H)
    g2 = b.add(Z, ph(Fraction(-1, 3)))
    b.edge(g1, h)
    b.edge(h, g2)


def g_pi(b: Builder, alpha: GroupPhase) -> None:
    """Green alpha state plugged into a red pi effect: sqrt2 e^{i alpha}."""
    g = b.add(Z, alpha)
    r = b.add(X, ph(1))
    b.edge(g, r)


def cos_gadget(b: Builder, beta: GroupPhase) -> None:
    """Red beta state plugged into a green -beta effect: sqrt2 cos beta."""
    r = b.add(X, beta)
    g = b.add(Z, -beta)
    b.edge(r, g)


def scalar_diagram(c: complex, calculus: str = "zx") -> Diagram:
    """A closed diagram worth c, built from g_pi, inv_sqrt2, sqrt2_pair and cos_gadget."""
    from ..quaternion import complex_canonical_form
    b = Builder(calculus)
    n, alpha, beta = complex_canonical_form(c)
    if abs(c) == 0:
        cos_gadget(b, ph(Fraction(1, 2)))
        return b.build()
    n -= 1      # the cos gadget contributes one sqrt2
    g_pi(b, _rad(alpha))
    inv_sqrt2(b)
    inv_sqrt2(b)
    n += 1      # g_pi adds sqrt2, two inverse gadgets remove two
    for _ in range(abs(n)):
        (sqrt2_pair if n > 0 else inv_sqrt2)(b)
    cos_gadget(b, _rad(beta))
    return b.build()


def _rad(x: float) -> GroupPhase:
    """A float angle in radians as a group phase, rationalised when it is an exact small fraction of pi."""
    q = Fraction(x / math.pi).limit_denominator(48)
    if abs(float(q) * math.pi - x) <= 1e-13:
        return GroupPhase(q)
    return GroupPhase(x / math.pi)


# -- EU' ---------------------------------------------------------------------

def _arg(z: complex) -> float:
    return 0.0 if z == 0 else cmath.phase(z)


def eu_prime_params(alpha1: float, alpha2: float) -> tuple[float, float, float, float]:
    """(beta1, beta2, beta3, gamma) with Z(a1) H Z(a2) = e^{i gamma} X(b1) Z(b2) X(b3), in radians."""
    xp = (alpha1 + alpha2) / 2
    xm = xp - alpha2
    z = complex(-math.sin(xp), math.cos(xm))
    zp = complex(math.cos(xp), -math.sin(xm))
    b1 = _arg(z) + _arg(zp)
    b2 = 0.0 if zp == 0 else 2 * _arg(1j + abs(z / zp))
    b3 = _arg(z) - _arg(zp)
    g = xp - _arg(z) + (math.pi - b2) / 2
    tau = 2 * math.pi
    return b1 % tau, b2 % tau, b3 % tau, g % tau


def _eu_derive(asg: dict) -> dict:
    a1, a2 = (asg[k] for k in ("a1", "a2"))
    b1, b2, b3, g = eu_prime_params(a1.radians(), a2.radians())
    return dict(asg, b1=_rad(b1), b2=_rad(b2), b3=_rad(b3), g=_rad(g))


DERIVE_HOOKS["eu_prime"] = _eu_derive


# -- rules -------------------------------------------------------------------

def _fusion(c: str) -> RewriteRule:
    lb = Builder("zx")
    s1, s2 = lb.add(c, ph(a=1), id="s1"), lb.add(c, ph(b=1), id="s2")
    lb.edge(s1, s2)
    lb.bbox([lb.input(s1, id="p")], id="A")
    lb.bbox([lb.output(s2, id="q")], id="B")
    rb = Builder("zx")
    s = rb.add(c, ph(a=1, b=1), id="s")
    rb.bbox([rb.input(s, id="p")], id="A")
    rb.bbox([rb.output(s, id="q")], id="B")
    return RewriteRule("S1" + _suffix(c), lb.build(), rb.build(), bbox_pairing={"A": "A", "B": "B"})


def _loop(c: str) -> RewriteRule:
    lb = Builder("zx")
    s = lb.add(c, ph(a=1), id="s")
    lb.edge(s, s)
    lb.bbox([lb.input(s, id="p")], id="A")
    rb = Builder("zx")
    t = rb.add(c, ph(a=1), id="s")
    rb.bbox([rb.input(t, id="p")], id="A")
    return RewriteRule("S1-loop" + _suffix(c), lb.build(), rb.build(), bbox_pairing={"A": "A"})


def _identity(c: str) -> RewriteRule:
    lb = Builder("zx")
    s = lb.add(c, ph(0), id="s")
    lb.input(s, id="i")
    lb.output(s, id="o")
    rb = Builder("zx")
    rb.output(rb.input(id="i"), id="o")
    return RewriteRule("S2" + _suffix(c), lb.build(), rb.build())


def _colour_change(c: str) -> RewriteRule:
    """A spider of colour c with H on every leg becomes the other colour."""
    lb = Builder("zx")
    s = lb.add(c, ph(a=1), id="s")
    h = lb.add(H, id="h")
    lb.edge(s, h)
    p = lb.input(h, id="p")
    lb.bbox([p, h], id="A")
    rb = Builder("zx")
    t = rb.add(COLOURS[c], ph(a=1), id="s")
    rb.bbox([rb.input(t, id="p")], id="A")
    return RewriteRule("H" + _suffix(c), lb.build(), rb.build(), bbox_pairing={"A": "A"})


def _copy(c: str) -> RewriteRule:
    """A phase-free state of the other colour copied through a c spider."""
    o = COLOURS[c]
    lb = Builder("zx")
    st = lb.add(o, ph(0), id="st")
    s = lb.add(c, ph(0), id="s")
    lb.edge(st, s)
    lb.output(s, id="o0")
    lb.output(s, id="o1")
    sqrt2_pair(lb)
    rb = Builder("zx")
    rb.output(rb.add(o, ph(0), id="t0"), id="o0")
    rb.output(rb.add(o, ph(0), id="t1"), id="o1")
    return RewriteRule("CP" + _suffix(c), lb.build(), rb.build())


def _bialgebra(c: str) -> RewriteRule:
    """Merge with the other colour then copy with c equals the crossed form, up to sqrt 2."""
    o = COLOURS[c]
    lb = Builder("zx")
    m = lb.add(o, ph(0), id="m")
    s = lb.add(c, ph(0), id="s")
    lb.input(m, id="i0")
    lb.input(m, id="i1")
    lb.edge(m, s)
    lb.output(s, id="o0")
    lb.output(s, id="o1")
    rb = Builder("zx")
    c0, c1 = rb.add(c, ph(0), id="c0"), rb.add(c, ph(0), id="c1")
    m0, m1 = rb.add(o, ph(0), id="m0"), rb.add(o, ph(0), id="m1")
    rb.input(c0, id="i0")
    rb.input(c1, id="i1")
    for x in (c0, c1):
        for y in (m0, m1):
            rb.edge(x, y)
    rb.output(m0, id="o0")
    rb.output(m1, id="o1")
    sqrt2_pair(rb)
    return RewriteRule("B" + _suffix(c), lb.build(), rb.build())


def _hopf(c: str) -> RewriteRule:
    o = COLOURS[c]
    lb = Builder("zx")
    s = lb.add(c, ph(0), id="s")
    t = lb.add(o, ph(0), id="t")
    lb.input(s, id="i")
    lb.edge(s, t)
    lb.edge(s, t)
    lb.output(t, id="o")
    rb = Builder("zx")
    rb.input(rb.add(c, ph(0), id="s"), id="i")
    rb.output(rb.add(o, ph(0), id="t"), id="o")
    inv_sqrt2(rb)
    inv_sqrt2(rb)
    return RewriteRule("Hopf" + _suffix(c), lb.build(), rb.build())


def _iv() -> RewriteRule:
    lb = Builder("zx")
    g_pi(lb, ph(a=1))
    g_pi(lb, ph(a=-1))
    inv_sqrt2(lb)
    inv_sqrt2(lb)
    return RewriteRule("IV", lb.build(), Builder("zx").build())


def _eu_prime() -> RewriteRule:
    lb = Builder("zx")
    last = chain(lb, lb.input(id="i"), [(Z, ph(a2=1)), (H, None), (Z, ph(a1=1))])
    lb.output(last, id="o")
    sqrt2_pair(lb)
    rb = Builder("zx")
    last = chain(rb, rb.input(id="i"), [(X, ph(b3=1)), (Z, ph(b2=1)), (X, ph(b1=1))])
    rb.output(last, id="o")
    g_pi(rb, ph(g=1))
    return RewriteRule("EU'", lb.build(), rb.build(), derive=_eu_derive, meta={"derive": "eu_prime"})


def _suffix(c: str) -> str:
    return "" if c == Z else "-red"


def zx_vilmart() -> RuleSet:
    rules, status = [], {}
    for c in (Z, X):
        for make in (_fusion, _loop, _identity, _colour_change, _copy, _bialgebra, _hopf):
            r = make(c)
            rules.append(r)
            status[r.name] = "derived" if make in (_loop, _hopf) else "axiom"
    rules += [_iv(), _eu_prime()]
    status.update({"IV": "axiom", "EU'": "axiom"})
    return RuleSet("zx_vilmart", "zx", tuple(rules), "universal", status)
