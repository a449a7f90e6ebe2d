"""Shared builders and hypothesis strategies."""
from __future__ import annotations

import os
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from calcforge.cyclo import CycloNumber
from calcforge.diagram import Builder, Equation
from calcforge.phase import GroupPhase

settings.register_profile("calcforge", derandomize=True, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("calcforge")

CONDUCTORS = (1, 2, 3, 4, 5, 6, 8, 12, 15)


@st.composite
def cyclo_numbers(draw, nonzero: bool = False):
    n = draw(st.sampled_from(CONDUCTORS))
    coeffs = draw(st.lists(st.integers(-5, 5), min_size=n, max_size=n))
    den = draw(st.integers(1, 4))
    c = CycloNumber.from_powers(n, coeffs, den)
    if nonzero and c.is_zero():
        c = c + 1
    return c


def spider_law(fragment: int | None = 8, la=0, lb=0, r=0) -> Equation:
    """Z(la) - Z(lb) = Z(r), one input and one output."""
    ph = lambda x: x if isinstance(x, GroupPhase) else GroupPhase(Fraction(x))
    lhs = Builder("zx", fragment)
    u = lhs.add("ZSpider", ph(la), id="u")
    w = lhs.add("ZSpider", ph(lb), id="w")
    lhs.edge(u, w)
    lhs.input(u, id="i0")
    lhs.output(w, id="o0")
    rhs = Builder("zx", fragment)
    s = rhs.add("ZSpider", ph(r), id="s")
    rhs.input(s, id="i0")
    rhs.output(s, id="o0")
    return Equation(lhs.build(), rhs.build(), {}, "spider")


def random_zx(rng: random.Random, n_vertices: int, n_in: int, n_out: int, phases=(0, Fraction(1, 2), 1, Fraction(1, 4)),
              vars=(), hadamard: bool = True, fragment: int | None = None):
    """Connected-ish random ZX diagram with exact phases (optionally linear in `vars`)."""
    b = Builder("zx", fragment)
    kinds = ["ZSpider", "XSpider"] + (["Hadamard"] if hadamard else [])
    vs = []
    for k in range(n_vertices):
        kind = rng.choice(kinds)
        if kind == "Hadamard":
            vs.append(b.add("Hadamard", id=f"h{k}"))
            continue
        ph = GroupPhase(Fraction(rng.choice(phases)))
        if vars and rng.random() < 0.6:
            v = rng.choice(vars)
            ph = ph + GroupPhase.var(v, rng.choice((1, 1, -1, 2)))
        vs.append(b.add(kind, ph, id=f"s{k}"))
    deg = {v: 0 for v in vs}
    cap = {v: (2 if v.startswith("h") else 99) for v in vs}

    def free(v):
        return deg[v] < cap[v]

    for k in range(1, len(vs)):
        cands = [u for u in vs[:k] if free(u)]
        if cands and free(vs[k]):
            u = rng.choice(cands)
            b.edge(u, vs[k])
            deg[u] += 1
            deg[vs[k]] += 1
    for _ in range(rng.randint(0, 2)):
        u, w = rng.choice(vs), rng.choice(vs)
        if u != w and free(u) and free(w):
            b.edge(u, w)
            deg[u] += 1
            deg[w] += 1
    for side in ("in", "out"):
        for _ in range(n_in if side == "in" else n_out):
            cands = [u for u in vs if free(u)]
            if not cands:
                u = b.add("ZSpider", GroupPhase(0))
                vs.append(u)
                deg[u], cap[u] = 0, 99
                cands = [u]
            u = rng.choice(cands)
            (b.input if side == "in" else b.output)(u)
            deg[u] += 1
    # Hadamards need exactly two legs
    for v in vs:
        while v.startswith("h") and deg[v] < 2:
            z = b.add("ZSpider", GroupPhase(0))
            b.edge(v, z)
            deg[v] += 1
    return b.build()


@pytest.fixture
def rng():
    return random.Random(0)


@pytest.fixture
def tmp_store(tmp_path, monkeypatch):
    monkeypatch.delenv("CALCFORGE_STORE", raising=False)
    return tmp_path / "store"


def slow_enabled() -> bool:
    return os.environ.get("CALCFORGE_FAST") is None


def bbox_join_example() -> Equation:
    """ZH family whose !-box joins 1 wire on the left and none on the right (N = 2^1 + 2^0)."""
    from calcforge.phase import RingPhase
    lhs = Builder("zh")
    z = lhs.add("ZhZ", id="z")
    lhs.output(z, id="o0")
    h = lhs.add("HBox", RingPhase.const(2), id="h")
    lhs.edge(z, h)
    lhs.bbox([h], id="B")
    rhs = Builder("zh")
    z2 = rhs.add("ZhZ", id="z")
    rhs.output(z2, id="o0")
    h2 = rhs.add("HBox", RingPhase.const(2), id="h")
    rhs.bbox([h2], id="B")
    return Equation(lhs.build(), rhs.build(), {"B": "B"}, "join-1-0")


def bbox_two_one_example() -> Equation:
    """Sound Universal ZX family whose !-box meets the rest in 2 wires on the left and 1 on the right (N = 6).

    Left: each copy is an X(0) spider with both legs on c, which acts as a trivial loop.
    Right: each copy is a Z(0) state that fuses into c without changing it.
    """
    lhs = Builder("zx")
    c = lhs.add("ZSpider", GroupPhase(0), id="c")
    lhs.input(c, id="i0")
    x = lhs.add("XSpider", GroupPhase(0), id="x")
    lhs.edge(c, x)
    lhs.edge(c, x)
    lhs.bbox([x], id="B")
    rhs = Builder("zx")
    c2 = rhs.add("ZSpider", GroupPhase(0), id="c")
    rhs.input(c2, id="i0")
    w = rhs.add("ZSpider", GroupPhase(0), id="w")
    rhs.edge(c2, w)
    rhs.bbox([w], id="B")
    return Equation(lhs.build(), rhs.build(), {"B": "B"}, "join-2-1")
