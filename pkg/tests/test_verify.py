"""Verification of parametrised equations: phase-variable grids, !-box bounds and Galois certificates."""
import itertools
import random
from fractions import Fraction

from calcforge.calculi import builtin_ruleset
from calcforge.diagram import Builder, Equation
from calcforge.laurent import LaurentPoly
from calcforge.phase import GroupPhase, RingPhase
from calcforge.verify import (check_simple, galois_verifying_instance, required_grid_sizes, verify,
                              verify_single_equation_galois)

from conftest import bbox_join_example, bbox_two_one_example, spider_law

G = GroupPhase


def _fusion(fragment=None, a=1, b=1, r=(1, 1)):
    return spider_law(fragment, G.var("a", a), G.var("b", b), G.of(0, a=r[0], b=r[1]))


def test_grid_sizes_fusion():
    assert required_grid_sizes(_fusion()) == {"a": 2, "b": 2}
    # Z(-2a) reaches Y^-2 while Z(a + b) reaches Y^1
    assert required_grid_sizes(_fusion(a=-2)) == {"a": 4, "b": 2}


def test_grid_size_ring_slot():
    lhs = Builder("zh")
    lhs.output(lhs.add("HBox", RingPhase(LaurentPoly.var("a") * LaurentPoly.var("a") + LaurentPoly.var("a"))))
    rhs = Builder("zh")
    rhs.output(rhs.add("HBox", RingPhase.var("a")))
    assert required_grid_sizes(Equation(lhs.build(), rhs.build())) == {"a": 3}


def test_pauli_grid_and_spot_checks():
    eq = _fusion()
    v = verify(eq, "grid")
    assert v.verified and v.method == "grid"
    assert len(v.certificate) == 4
    pauli = [G(0).to_json(), G(1).to_json()]
    assert [(c["assignment"]["a"], c["assignment"]["b"]) for c in v.certificate] == list(itertools.product(pauli, pauli))
    rng = random.Random(0)
    for _ in range(1000):
        asg = {"a": G(rng.uniform(0, 2)), "b": G(rng.uniform(0, 2))}
        assert check_simple(eq.evaluate(asg))[0]


def test_refuted_with_witness():
    eq = _fusion(r=(1, -1))
    v = verify(eq, "grid")
    assert v.status == "Refuted" and v.witness is not None
    assert not check_simple(v.witness)[0]
    assert any(not c["equal"] for c in v.certificate)


def test_fragment_grid_is_exhaustive():
    """Z(9a) Z(b) = Z(a + b) holds on the pi/4 fragment but not in general."""
    frag = _fusion(8, a=9)
    v = verify(frag, "grid")
    brute = all(check_simple(frag.evaluate({"a": G(Fraction(x, 4)), "b": G(Fraction(y, 4))}))[0]
                for x, y in itertools.product(range(8), repeat=2))
    assert v.verified == brute is True
    assert len({c["assignment"]["a"]["const"] for c in v.certificate}) == 8
    assert verify(_fusion(None, a=9), "grid").status == "Refuted"


def test_bbox_bound_refutes_join_example():
    v = verify(bbox_join_example(), "grid")
    assert v.status == "Refuted" and v.bbox_bounds == {"B": 3}
    assert len(v.certificate) == 4


def test_bbox_bound_two_one():
    eq = bbox_two_one_example()
    v = verify(eq, "grid")
    assert v.verified and v.bbox_bounds == {"B": 6}
    assert sorted(c["bbox"]["B"] for c in v.certificate) == list(range(7))


def test_spider_family_against_direct_checks():
    eq = builtin_ruleset("zx_vilmart")["S1"].equation()
    v = verify(eq, "grid")
    assert v.verified
    rng = random.Random(1)
    for d in range(max(v.bbox_bounds.values()) + 7):
        inst = eq
        while inst.lhs.bboxes:
            inst = inst.instantiate(next(iter(inst.bbox_pairing)), d)
        for _ in range(3):
            asg = {x: G(Fraction(rng.randrange(16), 8)) for x in inst.vars()}
            assert check_simple(inst.evaluate(asg))[0]


def test_galois_instance_uses_small_primes():
    eq = _fusion()
    asg = galois_verifying_instance(eq)
    assert asg == {"a": G(Fraction(2, 3)), "b": G(Fraction(2, 5))}
    v = verify_single_equation_galois(eq)
    assert v.verified and v.certificate[0]["conductor"] == 8
    rng = random.Random(2)
    for _ in range(25):
        x = {"a": G(rng.uniform(0, 2)), "b": G(rng.uniform(0, 2))}
        assert check_simple(eq.evaluate(x))[0]


def test_galois_agrees_with_grid():
    rng = random.Random(3)
    for _ in range(30):
        a, b = rng.choice((1, -1, 2)), rng.choice((1, -1, 3))
        r = (rng.choice((a, -a, 2 * a)), rng.choice((b, -b)))
        eq = _fusion(a=a, b=b, r=r)
        g, grid = verify(eq, "galois"), verify(eq, "grid")
        assert g.status == grid.status
        assert g.verified == (r == (a, b))


def test_auto_and_determinism():
    eq = _fusion()
    assert verify(eq).method == "galois"
    assert verify(_fusion(8)).method == "grid"
    assert verify(eq).to_json() == verify(eq).to_json()
    assert verify(bbox_join_example()).to_json() == verify(bbox_join_example()).to_json()


def test_zq_variables_inapplicable():
    eq = builtin_ruleset("zq")["Q"].equation()
    v = verify(eq, "grid")
    assert v.status == "Inapplicable" and "non-commutative" in v.reason
