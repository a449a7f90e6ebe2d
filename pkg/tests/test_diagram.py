"""Diagram structure: validation, composition, !-boxes, skeletons, canonical bytes and JSON."""
import itertools
import json
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from calcforge.canon import canonical_bytes
from calcforge.diagram import (BBox, Builder, Diagram, DiagramFormatError, Equation, compose, evaluate_vars, identity,
                               instantiate_bbox, is_separated, join, nesting_order, skeleton, spider, tensor, validate)
from calcforge.interpret import interpret, matrices_equal
from calcforge.phase import GroupPhase, RingPhase

from conftest import bbox_join_example, random_zx

G = GroupPhase


def test_validate_examples():
    assert validate(identity("zx")) == []
    d = Diagram("zx", {"a": identity("zx").vertices["i0"]}, [(("a", 0), ("ghost", 0))], ["a"])
    assert any("dangling edge" in e for e in validate(d))
    b = Builder("zx")
    u, v, w = (b.add("ZSpider", G(0)) for _ in range(3))
    b.edge(u, v)
    b.edge(v, w)
    b.bbox([u, v], id="A")
    b.bbox([v, w], id="B")
    assert any("overlap without nesting" in e for e in validate(b.build()))


def test_compose_and_tensor():
    w = identity("zx")
    assert matrices_equal(interpret(compose(w, w)), interpret(w)).equal
    with pytest.raises(ValueError):
        compose(identity("zx", 2), w)
    s1, s2 = spider("zx", "ZSpider", G(Fraction(1, 2)), 0, 1), spider("zx", "ZSpider", G(1), 0, 1)
    t = interpret(tensor(s1, s2)).to_numpy().ravel()
    assert np.allclose(t, np.kron(interpret(s1).to_numpy().ravel(), interpret(s2).to_numpy().ravel()))


def test_interchange_law():
    rng = random.Random(0)
    for _ in range(10):
        a, b, c, dd = (random_zx(rng, 2, 1, 1) for _ in range(4))
        lhs = compose(tensor(c, dd), tensor(a, b))
        rhs = tensor(compose(c, a), compose(dd, b))
        assert matrices_equal(interpret(lhs), interpret(rhs)).equal


def _zh_family():
    """Z spider with one output and a !-box of H-box legs, each carrying an input."""
    b = Builder("zh")
    z = b.add("ZhZ", id="z")
    b.output(z, id="o0")
    h = b.add("HBox", RingPhase.const(-1), id="h")
    b.edge(z, h)
    i = b.input(h, id="p")
    b.bbox([h, i], id="B")
    return b.build()


def test_bbox_family_instances():
    d = _zh_family()
    sizes = []
    for n in range(4):
        inst = instantiate_bbox(d, "B", n)
        assert validate(inst) == [] and not inst.bboxes
        assert inst.arity == (n, 1)
        sizes.append(len(inst.vertices))
    assert sizes == [2, 4, 6, 8]          # each copy adds the H-box and its input
    assert set(instantiate_bbox(d, "B", 0).vertices) == {"z", "o0"}


def test_nested_bbox_expansion_counts():
    b = Builder("zx")
    c = b.add("ZSpider", G(0), id="c")
    a = b.add("XSpider", G(0), id="a")
    x = b.add("ZSpider", G.var("t"), id="x")
    b.edge(c, a)
    b.edge(a, x)
    b.bbox([a, x], id="outer")
    b.bbox([x], id="inner", parent="outer")
    d = b.build()
    with pytest.raises(ValueError):
        instantiate_bbox(d, "inner", 2)
    for m in range(4):
        e = instantiate_bbox(d, "outer", m)
        assert sorted(e.bboxes) == [f"inner.{k}" for k in range(m)]
        for k_in in range(3):
            f = e
            for k in range(m):
                f = instantiate_bbox(f, f"inner.{k}", k_in)
            assert len(f.vertices) == 1 + m + m * k_in      # hand count
            assert f.vars() == ({"t"} if m and k_in else set())


def test_instantiate_growth_invariant():
    rng = random.Random(1)
    d = _zh_family()
    content = len(d.bboxes["B"].vertices)
    for n in range(6):
        assert len(instantiate_bbox(d, "B", n + 1).vertices) - len(instantiate_bbox(d, "B", n).vertices) == content


def test_evaluate_vars():
    b = Builder("zx")
    s = b.add("ZSpider", G.var("a", 2, const=1), id="s")
    b.input(s)
    b.output(s)
    d = b.build()
    assert evaluate_vars(d, {}) is d
    e = evaluate_vars(d, {"a": G(Fraction(1, 2))})
    assert e.vertices["s"].phase == G(0) and e.is_simple()
    assert matrices_equal(interpret(e), interpret(identity("zx"))).equal
    assert skeleton(e).diagram == skeleton(d).diagram


def test_spider_family_instantiation_at_pi_and_two_inputs():
    from calcforge.calculi import builtin_ruleset
    eq = builtin_ruleset("zx_vilmart")["S1"].equation()
    inst = eq.instantiate("A", 2).evaluate({"a": G(1)})
    assert inst.lhs.arity[0] == 2 and inst.lhs.vertices["s1"].phase == G(1)
    assert inst.rhs.vertices["s"].phase == G.var("b", const=1)


def test_join_and_separation():
    eq = bbox_join_example()
    assert join(eq.lhs, "B") == 1 and join(eq.rhs, "B") == 0
    assert is_separated(identity("zx")) and nesting_order(identity("zx")) == []
    b = Builder("zx")
    u, v = b.add("ZSpider", G(0)), b.add("ZSpider", G(0))
    b.edge(u, v)
    b.bbox([u], id="A")
    b.bbox([v], id="B")
    assert not is_separated(b.build())


def test_skeleton_slot_order_survives_json():
    rng = random.Random(2)
    for _ in range(20):
        d = random_zx(rng, 4, 1, 1)
        again = Diagram.from_json(json.loads(json.dumps(d.to_json())))
        assert skeleton(again).slots == skeleton(d).slots


def _iso_oracle(d1: Diagram, d2: Diagram) -> bool:
    """Brute force over bijections of interior vertices; boundary order is fixed."""
    i1, i2 = d1.interior(), d2.interior()
    if len(i1) != len(i2) or d1.arity != d2.arity:
        return False
    base = {**dict(zip(d1.inputs, d2.inputs)), **dict(zip(d1.outputs, d2.outputs))}
    target = sorted(tuple(sorted((a[0], b[0]))) for a, b in d2.edges)
    for perm in itertools.permutations(i2):
        f = dict(base, **dict(zip(i1, perm)))
        if any(d1.vertices[u] != d2.vertices[f[u]] for u in i1):
            continue
        if sorted(tuple(sorted((f[a[0]], f[b[0]]))) for a, b in d1.edges) == target:
            return True
    return False


def test_canonical_bytes_coincide_with_isomorphism():
    rng = random.Random(3)
    pool = [random_zx(rng, 3, rng.randint(0, 2), rng.randint(0, 1), phases=(0, 1), hadamard=False)
            for _ in range(120)]
    # add relabelled copies so that equal pairs are exercised
    for d in pool[:40]:
        names = d.interior()
        shuffled = names[:]
        rng.shuffle(shuffled)
        pool.append(d.rename(dict(zip(names, [f"r{k}" for k in range(len(names))]))).rename({}))
        pool.append(d.rename(dict(zip(names, shuffled))))
    keys = [canonical_bytes(d) for d in pool]
    for (a, ka), (b, kb) in itertools.combinations(zip(pool, keys), 2):
        assert (ka == kb) == _iso_oracle(a, b)


def test_canonical_bytes_relabel():
    d = spider("zx", "ZSpider", G(Fraction(1, 2)), 1, 1)
    assert canonical_bytes(d) == canonical_bytes(d.rename({"s": "q"}))


@st.composite
def diagrams(draw):
    seed = draw(st.integers(0, 10 ** 6))
    rng = random.Random(seed)
    return random_zx(rng, rng.randint(1, 5), rng.randint(0, 2), rng.randint(0, 2), vars=("a", "b"))


@given(diagrams())
def test_json_roundtrip(d):
    assert validate(d) == []
    assert Diagram.loads(d.dumps()) == d
    assert set(d.to_json()) >= {"calculus", "vertices", "edges", "inputs", "outputs", "bboxes"}


@given(diagrams(), st.fractions(0, 2, max_denominator=8))
def test_evaluation_keeps_skeleton(d, x):
    e = evaluate_vars(d, {"a": G(x), "b": G(1)})
    assert skeleton(e).diagram == skeleton(d).diagram


def test_format_error_on_bad_json():
    with pytest.raises(DiagramFormatError):
        Diagram.from_json({"calculus": "zx", "vertices": [{"id": "a", "kind": "Nope"}], "edges": []})
    with pytest.raises(DiagramFormatError):
        Equation.from_json({"lhs": identity("zx").to_json()})


def test_ring_topology_matters_a_bit():
    from calcforge.cyclo import CycloNumber

    def adder(order, out_port=0):
        b = Builder("ring")
        a = b.add("RingAdd", id="a")
        states = [b.add("RingState", RingPhase.const(c), id=f"s{c}") for c in order]
        ports = [p for p in range(len(order) + 1) if p != out_port]
        b.output(id="o0")
        b.edge("o0", ("a", out_port))
        for s, p in zip(states, ports):
            b.edge(s, ("a", p))
        return b.build()

    base = interpret(adder([2, 3]))
    assert matrices_equal(base, interpret(adder([3, 2]))).equal
    assert not matrices_equal(base, interpret(adder([2, 3], out_port=1))).equal
