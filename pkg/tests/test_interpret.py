"""Tensor interpretation: generator values, functoriality, snakes, Laurent interpretation and degree bounds."""
import random
from fractions import Fraction

import numpy as np
import pytest

from calcforge.cyclo import CycloNumber
from calcforge.diagram import Builder, cap, compose, cup, evaluate_vars, identity, spider, tensor, empty
from calcforge.interpret import (InterpretError, degree_bounds, interpret, interpret_laurent, matrices_equal)
from calcforge.laurent import LaurentPoly, deg_le
from calcforge.phase import GroupPhase, QConst, RingPhase
from calcforge.quaternion import Quaternion

from conftest import random_zx

G = GroupPhase


def test_cap_and_empty():
    assert np.array_equal(interpret(cap("zx")).to_numpy(), np.array([[1, 0, 0, 1]]))
    assert np.array_equal(interpret(empty("zx")).to_numpy(), np.array([[1]]))


def test_zq_identity_node():
    b = Builder("zq")
    q = b.add("QNode", QConst(Quaternion.one()))
    b.edge(b.input(), (q, 0))
    b.edge((q, 1), b.output())
    assert matrices_equal(interpret(b.build()), interpret(identity("zq"))).equal


def test_ring_addition_of_two_states():
    b = Builder("ring")
    a = b.add("RingAdd", id="a")
    b.output(id="o0")
    b.edge("o0", ("a", 0))
    b.edge(b.add("RingState", RingPhase.const(2)), ("a", 1))
    b.edge(b.add("RingState", RingPhase.const(3)), ("a", 2))
    got = interpret(b.build()).to_numpy().ravel()
    # oracle: addition matrix (out x in1 in2) applied to the product state
    add = np.zeros((2, 4))
    add[0, 0] = add[1, 1] = add[1, 2] = 1
    assert np.allclose(got, add @ np.kron([1, 2], [1, 3]))
    assert np.allclose(got, [1, 5])


def test_laurent_spider_examples():
    m = interpret_laurent(spider("zx", "ZSpider", G.var("a"), 1, 1))
    assert m.entry(0, 0) == LaurentPoly.const(1) and m.entry(1, 1) == LaurentPoly.var("a")
    m = interpret_laurent(spider("zx", "ZSpider", G.var("a", -1), 1, 1))
    assert m.entry(1, 1) == LaurentPoly.var("a", -1)
    y = G(Fraction(1, 2)).root()
    ev = interpret(evaluate_vars(spider("zx", "ZSpider", G.var("a", -1), 1, 1), {"a": G(Fraction(1, 2))}))
    assert matrices_equal(m.evaluate({"a": y}), ev).equal
    const = spider("zx", "XSpider", G(Fraction(1, 4)), 1, 2)
    assert matrices_equal(interpret_laurent(const), interpret(const)).equal


def test_zq_has_no_laurent_interpretation():
    with pytest.raises(InterpretError):
        interpret_laurent(identity("zq"))
    with pytest.raises(InterpretError):
        interpret(spider("zx", "ZSpider", G.var("a"), 1, 1))


def _spider_chain(k: int, phase):
    b = Builder("zx")
    prev = b.input()
    for _ in range(k):
        s = b.add("ZSpider", phase)
        b.edge(prev, s)
        prev = s
    b.output(prev)
    return b.build()


def test_degree_bound_examples():
    from conftest import spider_law
    eq = spider_law(None, G.var("a1"), G.var("a2"), G.of(0, a1=1, a2=1))
    assert degree_bounds(eq.lhs, "a1") == (1, 0) and degree_bounds(eq.lhs, "a2") == (1, 0)
    assert degree_bounds(eq.lhs, "zz") == (0, 0)
    chain = _spider_chain(3, G.var("a", 2))
    assert degree_bounds(chain, "a") == (6, 0)
    true = interpret_laurent(chain).degrees("a")
    assert deg_le(true[0], 6) and deg_le(true[1], 0)


def test_snake_equations():
    w = identity("zx")
    left = compose(tensor(w, cup("zx")), tensor(cap("zx"), w))
    right = compose(tensor(cup("zx"), w), tensor(w, cap("zx")))
    for d in (left, right):
        assert matrices_equal(interpret(d), interpret(w)).equal


def test_functoriality_random():
    rng = random.Random(0)
    for _ in range(100):
        k = rng.randint(0, 2)
        a = random_zx(rng, rng.randint(1, 3), rng.randint(0, 2), k)
        b = random_zx(rng, rng.randint(1, 3), k, rng.randint(0, 2))
        A, B = interpret(a), interpret(b)
        comp = interpret(compose(a, b))
        assert np.allclose(comp.to_numpy(), B.to_numpy() @ A.to_numpy())
        ten = interpret(tensor(a, b)).to_numpy()
        assert np.allclose(ten, np.kron(A.to_numpy(), B.to_numpy()))


def test_float_mode_agrees_with_exact():
    rng = random.Random(1)
    for _ in range(50):
        d = random_zx(rng, rng.randint(1, 4), rng.randint(0, 2), rng.randint(0, 2))
        assert np.allclose(interpret(d, "float").to_numpy(), interpret(d).to_numpy(), atol=1e-12)


def test_laurent_eval_commutes_random():
    rng = random.Random(2)
    for _ in range(200):
        d = random_zx(rng, rng.randint(1, 4), rng.randint(0, 1), rng.randint(0, 2), vars=("a", "b"))
        if not d.vars():
            continue
        x = {v: G(Fraction(rng.randrange(16), 8)) for v in ("a", "b")}
        lhs = interpret_laurent(d, ("a", "b")).evaluate({v: p.root() for v, p in x.items()})
        assert matrices_equal(lhs, interpret(evaluate_vars(d, x))).equal


def test_degree_soundness_random():
    rng = random.Random(3)
    for _ in range(200):
        d = random_zx(rng, rng.randint(1, 4), rng.randint(0, 1), rng.randint(0, 2), vars=("a",))
        m = interpret_laurent(d, ("a",))
        pos, neg = m.degrees("a")
        bp, bn = degree_bounds(d, "a")
        assert deg_le(pos, bp) and deg_le(neg, bn)


def test_quotient_mod_y8():
    rng = random.Random(4)
    for _ in range(20):
        d = _spider_chain(rng.randint(3, 5), G.var("a", rng.choice((1, 2, 3)), const=Fraction(1, 4)))
        folded = interpret_laurent(d).fold("a", 8)
        for k in range(8):
            val = G(Fraction(2 * k, 8))
            assert matrices_equal(folded.evaluate({"a": val.root()}), interpret(evaluate_vars(d, {"a": val}))).equal


def test_matrices_equal_policies():
    m = interpret(spider("zx", "ZSpider", G(Fraction(1, 4)), 1, 1))
    assert matrices_equal(m, m).equal
    doubled = interpret(_doubled())
    assert not matrices_equal(doubled, m).equal
    c = matrices_equal(doubled, m, "scalar")
    assert c.equal and c.witness == CycloNumber.rational(2)
    with pytest.raises(ValueError):
        matrices_equal(m, interpret(identity("zx", 2)))


def _doubled():
    """Z(pi/4) next to a 0-legged Z(0), which is the scalar 2."""
    b = Builder("zx")
    s = b.add("ZSpider", G(Fraction(1, 4)))
    b.input(s)
    b.output(s)
    b.add("ZSpider", G(0))
    return b.build()


def test_vilmart_bialgebra_exact():
    from calcforge.calculi import builtin_ruleset
    rule = builtin_ruleset("zx_vilmart")["B"]
    eq = rule.equation()
    assert eq.is_simple()
    assert matrices_equal(interpret(eq.lhs), interpret(eq.rhs)).equal
