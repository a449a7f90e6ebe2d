"""Parameter spaces, Hermite normal form, submodule/rule conversion and inference heuristics."""
import itertools
import json
import random
from fractions import Fraction
from math import gcd

import pytest
from sympy import Matrix

from calcforge.calculi import PhaseHom
from calcforge.diagram import Equation
from calcforge.paramspace import (AffineSubmodule, ParamSpaceError, add_boundary, apply_symmetry, generalize_boundary,
                                  hnf, in_lattice, infer_full_linear, infer_sparse_linear, infer_sum,
                                  parameter_space, point_of, point_to_equation, rule_to_submodule, sound_points,
                                  submodule_to_rule)
from calcforge.phase import GroupPhase
from calcforge.verify import check_simple

from conftest import spider_law

G = GroupPhase
M8 = [8, 8, 8]


def _fusion_oracle(n: int = 8) -> set:
    """Z(a) Z(b) = Z(r) holds exactly when r = a + b."""
    return {(a, b, (a + b) % n) for a in range(n) for b in range(n)}


def test_space_of_fusion_law():
    eq = spider_law(8)
    sp = parameter_space(eq)
    assert sp.moduli == M8 and sp.size() == 512
    assert sp.describe() == "Z_8 x Z_8 x Z_8"
    assert [(s.side, s.vertex) for s in sp.slots] == [("lhs", "u"), ("lhs", "w"), ("rhs", "s")]
    assert point_of(point_to_equation(eq, sp, (3, 6, 1)), sp) == (3, 6, 1)
    with pytest.raises(ParamSpaceError):
        point_to_equation(eq, sp, (1, 2))


def test_space_shapes():
    eq = spider_law(4)
    one_side = parameter_space(Equation(eq.lhs, eq.lhs))
    assert one_side.describe() == "Z_4 x Z_4 x Z_4 x Z_4"
    assert parameter_space(spider_law(None)).size() is None


def test_sound_points_exhaustive():
    assert sound_points(spider_law(8)) == _fusion_oracle()


# -- HNF ------------------------------------------------------------------------------

def _check_hnf(M):
    H, U = hnf(M)
    assert abs(Matrix(U).det()) == 1
    assert Matrix(H) == Matrix(U) * Matrix(M)
    nz = [r for r in H if any(r)]
    assert H[len(nz):] == [[0] * len(M[0])] * (len(H) - len(nz))
    pivots = [next(j for j, x in enumerate(r) if x) for r in nz]
    assert pivots == sorted(set(pivots))
    for i, (r, c) in enumerate(zip(nz, pivots)):
        assert r[c] > 0
        assert all(0 <= nz[k][c] < r[c] for k in range(i))
    # oracle: the gcd of maximal minors is a lattice invariant
    rank = Matrix(M).rank()
    assert rank == len(nz)
    if rank:
        assert _minor_gcd(H, rank) == _minor_gcd(M, rank)


def _minor_gcd(M, r):
    g = 0
    for rows in itertools.combinations(range(len(M)), r):
        for cols in itertools.combinations(range(len(M[0])), r):
            g = gcd(g, int(Matrix([[M[i][j] for j in cols] for i in rows]).det()))
    return g


def _unimodular(rng, m):
    V = Matrix.eye(m)
    for _ in range(6):
        i, j = rng.sample(range(m), 2) if m > 1 else (0, 0)
        E = Matrix.eye(m)
        if i == j:
            E[i, i] = -1
        else:
            E[i, j] = rng.randint(-3, 3)
        V = E * V
    return V


def test_hnf_examples():
    H, _ = hnf([[2, 4, 6], [3, 5, 7]])
    assert H == [[1, 1, 1], [0, 2, 4]]
    H, _ = hnf([[8, 0], [0, 8], [1, 1]])
    assert H == [[1, 1], [0, 8], [0, 0]]
    for M in ([[0, 0], [0, 0]], [[5]], [[4, 6]], [[2, 4, 6], [3, 5, 7]]):
        _check_hnf(M)


def test_hnf_random():
    rng = random.Random(0)
    for _ in range(200):
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        M = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]
        _check_hnf(M)
        # uniqueness: the same row lattice gives the same form
        VM = (_unimodular(rng, m) * Matrix(M)).tolist()
        assert hnf(VM)[0] == hnf(M)[0]


def test_in_lattice():
    assert in_lattice([2, 0], [[1, 1], [1, -1]]) and not in_lattice([1, 0], [[1, 1], [1, -1]])
    assert in_lattice([0, 0], [])


# -- submodules and rules --------------------------------------------------------------

def test_submodule_to_rule_fusion():
    eq = spider_law(8)
    sub = AffineSubmodule((0, 0, 0), [[1, 0, 1], [0, 1, 1]], M8)
    rule = submodule_to_rule(eq, sub)
    assert rule.lhs.vertices["u"].phase == G.var("a")
    assert rule.lhs.vertices["w"].phase == G.var("b")
    assert rule.rhs.vertices["s"].phase == G.of(0, a=1, b=1)
    alt = AffineSubmodule((0, 0, 0), [[-1, 1, 0], [0, 1, 1]], M8)
    rule2 = submodule_to_rule(eq, alt)
    assert rule2.lhs.vertices["u"].phase == G.var("a", -1)
    assert rule2.lhs.vertices["w"].phase == G.of(0, a=1, b=1)
    assert rule2.rhs.vertices["s"].phase == G.var("b")
    assert sub.points() == alt.points() == _fusion_oracle()


def test_rule_to_submodule_roundtrip():
    eq = spider_law(8)
    rng = random.Random(1)
    for _ in range(30):
        gens = [[rng.randint(-3, 3) for _ in range(3)] for _ in range(rng.randint(1, 2))]
        if not any(any(g) for g in gens):
            continue
        sub = AffineSubmodule(tuple(rng.randrange(8) for _ in range(3)), gens, M8)
        back = rule_to_submodule(submodule_to_rule(eq, sub))
        assert back.points() == sub.points()


def test_submodule_json_and_contains():
    sub = AffineSubmodule((1, 0, 1), [[1, 0, 1], [0, 2, 2]], M8)
    again = AffineSubmodule.from_json(json.loads(sub.dumps()))
    assert again.points() == sub.points()
    for p in itertools.product(range(8), repeat=3):
        assert sub.contains(p) == (p in sub.points())
    with pytest.raises(ParamSpaceError):
        AffineSubmodule.from_json({"offset": [0], "generators": []})


# -- inference ------------------------------------------------------------------------

def test_full_and_sparse_lines():
    full = infer_full_linear((0, 0, 0), (2, 0, 2), M8)
    assert full.generators == [[1, 0, 1]]
    assert full.points() == {(a, 0, a) for a in range(8)}
    sparse = infer_sparse_linear((0, 0, 0), (2, 0, 2), M8)
    assert sparse.points() == {(a, 0, a) for a in range(0, 8, 2)}
    assert infer_sparse_linear((0, 0, 0), (1, 0, 1), M8) is None
    # the short way round: 7 is -1 mod 8
    assert infer_full_linear((0, 0, 0), (7, 0, 7), M8).generators == [[7, 0, 7]]
    with pytest.raises(ParamSpaceError):
        infer_full_linear((1, 1, 2), (1, 1, 2), M8)


def test_sum_recovers_all_sound_points():
    s = infer_full_linear((0, 0, 0), (1, 0, 1), M8)
    t = infer_full_linear((0, 3, 3), (0, 4, 4), M8)
    q4 = infer_sum(s, t)
    assert q4.points() == sound_points(spider_law(8))
    disjoint = infer_sum(AffineSubmodule((0, 0, 0), [[2, 0, 0]], M8), AffineSubmodule((1, 0, 0), [[2, 0, 0]], M8))
    assert disjoint is None


def test_symmetry_maps_sound_points():
    eq = spider_law(8)
    sp = parameter_space(eq)
    h = PhaseHom("zx", j=7)
    pts = sound_points(eq)
    assert apply_symmetry(pts, h, sp) == pts
    assert apply_symmetry((1, 2, 3), h, sp) == (7, 6, 5)
    sub = AffineSubmodule((0, 0, 0), [[1, 0, 1]], M8)
    assert apply_symmetry(sub, h, sp).points() == {(7 * a % 8, 0, 7 * a % 8) for a in range(8)}


# -- boundary generalisation ----------------------------------------------------------------

def test_generalize_boundary_is_sound():
    eq = spider_law(8, 1, 2, 3)
    gens = generalize_boundary(eq)
    assert len(gens) == 2 and all(g.status == "deduced" for g in gens)
    fam = gens[0].equation
    box = next(iter(fam.lhs.bboxes))
    for n in range(4):
        inst = fam.instantiate(box, n)
        for x in range(8):
            concrete = inst.evaluate({v: G(Fraction(x, 4)) for v in inst.vars()})
            assert check_simple(concrete)[0]


def test_add_boundary_verified():
    eq = spider_law(8)
    sub = AffineSubmodule((0, 0, 0), [[1, 0, 1], [0, 1, 1]], M8)
    g = add_boundary(eq, "u", "s", sub)
    assert g.status == "verified"
    assert g.equation.lhs.arity == (1, 2)
    for x, y in itertools.product(range(8), repeat=2):
        assert check_simple(g.equation.evaluate({"a": G(Fraction(x, 4)), "b": G(Fraction(y, 4))}))[0]
    with pytest.raises(ParamSpaceError):
        add_boundary(eq, "u", "nope", sub)
