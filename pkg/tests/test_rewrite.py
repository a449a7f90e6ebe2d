"""Matching, DPO application and normalisation."""
import itertools
import json
import random
from fractions import Fraction

import pytest

from calcforge.calculi import builtin_ruleset
from calcforge.diagram import Builder, validate
from calcforge.interpret import interpret, matrices_equal
from calcforge.phase import GroupPhase
from calcforge.rewrite import (ReductionOrder, RewriteError, RewriteRule, apply, find_matches, is_reducible,
                               load_rules, normalize)

from conftest import random_zx

G = GroupPhase
ZX = builtin_ruleset("zx_vilmart")


def _pattern_ok(rule: RewriteRule) -> bool:
    """Phases are constants or distinct bare variables, so a plain oracle can decide matching."""
    seen = set()
    for v in rule.lhs.interior():
        p = rule.lhs.vertices[v].phase
        if isinstance(p, GroupPhase) and p.vars():
            if len(p.coeffs) != 1 or p.coeffs[0][1] != 1 or p.const != 0 or p.coeffs[0][0] in seen:
                return False
            seen.add(p.coeffs[0][0])
    return True


def _mult(d, u, v):
    return sum(1 for a, b in d.edges if {a[0], b[0]} == {u, v} and (u != v or a[0] == b[0]))


def _oracle_count(rule: RewriteRule, host) -> int:
    """Injective interior maps preserving kind, phase pattern and degree, with enough host edges per pair."""
    lhs = rule.lhs
    L, H = lhs.interior(), host.interior()
    n = 0
    for img in itertools.permutations(H, len(L)):
        f = dict(zip(L, img))
        ok = True
        for u in L:
            lu, hu = lhs.vertices[u], host.vertices[f[u]]
            if lu.kind != hu.kind or lhs.degree(u) != host.degree(f[u]):
                ok = False
                break
            if lu.phase is not None and not lu.phase.vars() and lu.phase != hu.phase:
                ok = False
                break
        if ok:
            ok = all(_mult(host, f[u], f[v]) >= _mult(lhs, u, v) for u, v in itertools.combinations_with_replacement(L, 2))
        n += ok
    return n


def test_match_completeness_against_brute_force():
    rng = random.Random(0)
    rules = [r for rule in ZX if rule.derive is None for r in rule.expansions(2) if _pattern_ok(r)]
    assert len(rules) >= 20
    checked = 0
    for _ in range(60):
        host = random_zx(rng, rng.randint(2, 6), rng.randint(0, 2), rng.randint(0, 2), phases=(0, 1, Fraction(1, 2)))
        for r in rules:
            if len(r.lhs.interior()) > len(host.interior()):
                continue
            assert len(find_matches(r, host)) == _oracle_count(r, host), (r.name, host)
            checked += 1
    assert checked > 500


def _two_spiders():
    b = Builder("zx")
    x, y = b.add("ZSpider", G(Fraction(1, 2)), id="x"), b.add("ZSpider", G(Fraction(1, 4)), id="y")
    b.edge(x, y)
    b.input(x)
    b.output(y)
    return b.build()


def test_spider_fusion_match_and_apply():
    host = _two_spiders()
    ms = find_matches(ZX["S1"], host)
    assert {frozenset(m.vertex_map.values()) for m in ms} == {frozenset({"x", "y"})}
    m = ms[0]
    assert {m.assignment["a"], m.assignment["b"]} == {G(Fraction(1, 2)), G(Fraction(1, 4))}
    expanded = next(r for r in ZX["S1"].expansions() if r.lhs.arity == (1, 1) and find_matches(r, host))
    out = apply(expanded, find_matches(expanded, host)[0], host)
    assert validate(out) == [] and len(out.interior()) == 1
    assert next(iter(out.vertices[v].phase for v in out.interior())) == G(Fraction(3, 4))
    assert matrices_equal(interpret(host), interpret(out)).equal


def test_identity_rule():
    b = Builder("zx")
    s = b.add("ZSpider", G(0))
    t = b.add("XSpider", G(1))
    b.edge(s, t)
    b.input(s)
    b.output(t)
    host = b.build()
    ms = find_matches(ZX["S2"], host)
    assert len(ms) == 1
    out = apply(ZX["S2"], ms[0], host)
    assert len(out.interior()) == 1 and matrices_equal(interpret(host), interpret(out)).equal


def test_no_match_when_lhs_larger():
    b = Builder("zx")
    b.output(b.add("ZSpider", G(0)))
    assert find_matches(ZX["B"], b.build()) == []


def test_hopf_on_double_edge():
    b = Builder("zx")
    z, x = b.add("ZSpider", G(0), id="z"), b.add("XSpider", G(0), id="x")
    b.edge(z, x)
    b.edge(z, x)
    b.input(z)
    b.output(x)
    host = b.build()
    ms = find_matches(ZX["Hopf"], host)
    assert len(ms) == 1 == _oracle_count(ZX["Hopf"], host)
    out = apply(ZX["Hopf"], ms[0], host)
    assert matrices_equal(interpret(host), interpret(out)).equal


def test_apply_soundness_random():
    rng = random.Random(1)
    rules = [r for rule in ZX if rule.derive is None for r in rule.expansions(2)]
    applied = 0
    for _ in range(80):
        host = random_zx(rng, rng.randint(2, 6), rng.randint(0, 2), rng.randint(0, 2))
        before = interpret(host)
        for r in rules:
            for m in find_matches(r, host, limit=2):
                out = apply(r, m, host)
                assert validate(out) == []
                assert matrices_equal(before, interpret(out)).equal, r.name
                applied += 1
    assert applied > 100


def test_invalid_match_rejected():
    host = _two_spiders()
    r = next(r for r in ZX["S1"].expansions() if r.lhs.arity == (1, 1))
    m = find_matches(r, host)[0]
    m.vertex_map = {k: "i1" for k in m.vertex_map}
    with pytest.raises(RewriteError):
        apply(r, m, host)


def test_normalize_preserves_interpretation_and_is_irreducible():
    rng = random.Random(2)
    order = ReductionOrder()
    rules = [r for r in ZX if r.derive is None and r.name not in ("IV",)]
    for _ in range(20):
        host = random_zx(rng, rng.randint(2, 6), rng.randint(0, 2), rng.randint(0, 2))
        res = normalize(host, rules, order, fuel=50)
        assert matrices_equal(interpret(host), interpret(res.diagram)).equal
        if not res.exhausted:
            assert not is_reducible(res.diagram, rules, order)
        assert order.key(res.diagram) <= order.key(host)


def test_normalize_fuel_flag():
    host = _two_spiders()
    res = normalize(host, [ZX["S1"]], fuel=0)
    assert res.exhausted and res.diagram is host


def test_rule_json_roundtrip():
    for name in ("S1", "B", "EU'"):
        r = ZX[name]
        again = load_rules(json.dumps(r.to_json()))[0]
        assert again.to_json() == r.to_json()
        assert (again.derive is None) == (r.derive is None)
