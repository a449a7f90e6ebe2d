"""Acceptance suite: one PASS/FAIL line per criterion.

Run with `pytest tests/test_acceptance.py -v` (the lines are printed even without -s), or directly
with `python tests/test_acceptance.py`.
"""
from __future__ import annotations

import cmath
import itertools
import json
import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from calcforge.calculi import (builtin_ruleset, check_soundness, eu_prime_params, phase_hom_classify_zx,
                               translate_zq_to_zx, translate_zx_to_zq)
from calcforge.calculi.phasehom import zx_multiplier_valid
from calcforge.cyclo import CycloNumber
from calcforge.diagram import Builder, Equation, spider
from calcforge.interpret import interpret, matrices_equal
from calcforge.paramspace import AffineSubmodule, submodule_to_rule
from calcforge.phase import GroupPhase
from calcforge.quaternion import Quaternion, complex_canonical_form, euler_recompose, quat_euler_zxz
from calcforge.synth import SynthConfig, synth_run
from calcforge.verify import check_simple, verify

from conftest import bbox_join_example, random_zx, spider_law
from test_calculi import random_zq, same

G = GroupPhase
SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def _report(k: int, title: str, ok: bool, detail: str, capsys=None) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {k:2d}: {title}: {detail}"
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)


# -- criteria ---------------------------------------------------------------------------

def c1_zq_soundness():
    t = time.perf_counter()
    rep = check_soundness(builtin_ruleset("zq"), n_exact=50, n_float=200, seed=0)
    dt = time.perf_counter() - t
    worst = max(e.get("max_residual", 0.0) for e in rep["rules"])
    counts = all(e["exact_instances"] >= 50 and e["float_instances"] >= 200
                 for e in rep["rules"] if e.get("method") == "sampled")
    ok = rep["all_sound"] and counts and worst <= 1e-9 and dt < 10
    return ok, f"{len(rep['rules'])} rules sound, max float residual {worst:.1e}, {dt:.1f} s"


def _eu_residual(a1, a2):
    H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    Z = lambda a: np.diag([1, cmath.exp(1j * a)])
    X = lambda a: H @ Z(a) @ H
    b1, b2, b3, g = eu_prime_params(a1, a2)
    return np.abs(Z(a1) @ H @ Z(a2) - cmath.exp(1j * g) * X(b1) @ Z(b2) @ X(b3)).max()


def c2_eu_prime():
    rng = random.Random(0)
    worst = max(_eu_residual(rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)) for _ in range(100))
    return worst <= 1e-9, f"max residual {worst:.1e} over 100 random pairs"


def c3_round_trips():
    rng = random.Random(0)
    worst_q = 0.0
    for _ in range(1000):
        v = np.array([rng.gauss(0, 1) for _ in range(4)])
        v /= np.linalg.norm(v)
        q = Quaternion(*map(float, v))
        r = euler_recompose(*quat_euler_zxz(q))
        worst_q = max(worst_q, max(abs(a - b) for a, b in zip((r.w, r.x, r.y, r.z), (q.w, q.x, q.y, q.z))))
    worst_c, minimal = 0.0, True
    s2 = math.sqrt(2)
    for _ in range(1000):
        c = complex(rng.uniform(-4, 4), rng.uniform(-4, 4))
        n, a, b = complex_canonical_form(c)
        worst_c = max(worst_c, abs(s2 ** n * cmath.exp(1j * a) * math.cos(b) - c))
        minimal &= s2 ** (n - 1) < abs(c)
    ok = worst_q <= 1e-9 and worst_c <= 1e-12 and minimal
    return ok, f"Euler residual {worst_q:.1e}, canonical residual {worst_c:.1e}, n minimal: {minimal}"


def c4_translations():
    gens = [spider("zx", k, G(p), i, o) for k in ("ZSpider", "XSpider")
            for p in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)) for i, o in ((0, 1), (1, 1), (1, 2))]
    h = Builder("zx")
    hv = h.add("Hadamard")
    h.input(hv)
    h.output(hv)
    gens.append(h.build())
    bad = sum(not same(d, translate_zx_to_zq(d)) for d in gens)
    rng = random.Random(0)
    bad_zx = sum(not same(d, translate_zx_to_zq(d)) for d in
                 (random_zx(rng, rng.randint(1, 4), rng.randint(0, 2), rng.randint(0, 2)) for _ in range(100)))
    bad_zq = 0
    for k in range(100):
        d = random_zq(rng, exact=k % 2 == 0)
        bad_zq += not same(d, translate_zx_to_zq(translate_zq_to_zx(d)))
    ok = bad == bad_zx == bad_zq == 0
    return ok, (f"generators {len(gens) - bad}/{len(gens)}, ZX compositions {100 - bad_zx}/100, "
                f"ZQ round trips {100 - bad_zq}/100")


def _fusion(fragment=None, a=1, b=1, r=(1, 1)):
    return spider_law(fragment, G.var("a", a), G.var("b", b), G.of(0, a=r[0], b=r[1]))


def c5_grid_example():
    eq = _fusion()
    v = verify(eq, "grid")
    pauli = [G(0).to_json(), G(1).to_json()]
    grid_ok = [(c["assignment"]["a"], c["assignment"]["b"]) for c in v.certificate] == \
        list(itertools.product(pauli, pauli))
    rng = random.Random(0)
    worst = 0.0
    spots = True
    for _ in range(1000):
        ok, res, _ = check_simple(eq.evaluate({"a": G(rng.uniform(0, 2)), "b": G(rng.uniform(0, 2))}))
        spots &= ok
        worst = max(worst, res)
    ok = v.verified and grid_ok and v.grid_sizes == {"a": 2, "b": 2} and spots
    return ok, f"{v.status} from {len(v.certificate)} grid points; 1000 spot checks agree (max residual {worst:.1e})"


def c6_fragment():
    details, ok = [], True
    for coeff in (9, 10, 17):
        eq = _fusion(8, a=coeff)
        v = verify(eq, "grid")
        brute = all(check_simple(eq.evaluate({"a": G(Fraction(x, 4)), "b": G(Fraction(y, 4))}))[0]
                    for x, y in itertools.product(range(8), repeat=2))
        deg = v.grid_sizes.get("a", 0)
        ok &= deg > 8 and v.verified == brute and v.status in ("Verified", "Refuted")
        details.append(f"Z({coeff}a): bound {deg}, {v.status}, exhaustive {'sound' if brute else 'unsound'}")
    return ok, "; ".join(details)


def c7_bbox():
    eq = bbox_join_example()
    v = verify(eq, "grid")
    structural = True
    for d in range(4):
        inst = eq.instantiate("B", d)
        hl = [x for x, y in inst.lhs.vertices.items() if y.kind == "HBox"]
        hr = [x for x, y in inst.rhs.vertices.items() if y.kind == "HBox"]
        structural &= len(hl) == len(hr) == d
        structural &= all(inst.lhs.degree(x) == 1 for x in hl) and all(inst.rhs.degree(x) == 0 for x in hr)
    n_instances = len({json.dumps(c.get("bbox")) for c in v.certificate})
    part1 = v.bbox_bounds == {"B": 3} and n_instances == 4 and structural
    s1 = builtin_ruleset("zx_vilmart")["S1"].equation()
    vs = verify(s1, "grid")
    N = max(vs.bbox_bounds.values())
    rng = random.Random(0)
    direct = True
    for da, db in itertools.product(range(N + 7), repeat=2):
        inst = s1.instantiate("A", da).instantiate("B", db)
        asg = {x: G(Fraction(rng.randrange(16), 8)) for x in inst.vars()}
        direct &= check_simple(inst.evaluate(asg))[0]
    ok = part1 and vs.verified and direct
    return ok, (f"join example N={v.bbox_bounds.get('B')} with {n_instances} instances ({v.status}); "
                f"spider law N={vs.bbox_bounds} {vs.status}, direct checks to d={N + 6}: {direct}")


def c8_galois():
    eq = Equation.from_json(json.loads((SAMPLES / "ring_mult_family.json").read_text()))
    g = verify(eq, "galois")
    asg = g.certificate[0]["assignment"] if g.certificate else {}
    roots = {k: v["value"]["n"] for k, v in asg.items()}
    inst = eq.evaluate({k: CycloNumber.root(n, 1) for k, n in roots.items()})
    m = interpret(inst.lhs)
    field_ok = all(15 % CycloNumber.coerce(m.entry(r, c)).canonical().n == 0
                   for r in range(m.m) for c in range(m.n))
    grid = verify(eq, "grid")
    rng = random.Random(0)
    worst, spots = 0.0, True
    for _ in range(25):
        x = {k: cmath.exp(1j * rng.uniform(0, 2 * math.pi)) * rng.uniform(0.5, 2) for k in roots}
        ok, res, _ = check_simple(eq.evaluate(x))
        spots &= ok
        worst = max(worst, res)
    ok = g.verified and sorted(roots.values()) == [3, 5] and field_ok and grid.status == g.status and spots \
        and worst <= 1e-9
    return ok, (f"{g.status} from one instance {roots} in Q(w15); grid says {grid.status}; "
                f"25 spot checks max residual {worst:.1e}")


def c9_hnf():
    eq = spider_law(8)
    a = AffineSubmodule((0, 0, 0), [[1, 0, 1], [0, 1, 1]], [8, 8, 8])
    b = AffineSubmodule((0, 0, 0), [[-1, 1, 0], [0, 1, 1]], [8, 8, 8])
    ra, rb = submodule_to_rule(eq, a), submodule_to_rule(eq, b)
    pa = (ra.lhs.vertices["u"].phase, ra.lhs.vertices["w"].phase, ra.rhs.vertices["s"].phase)
    pb = (rb.lhs.vertices["u"].phase, rb.lhs.vertices["w"].phase, rb.rhs.vertices["s"].phase)
    want_a = (G.var("a"), G.var("b"), G.of(0, a=1, b=1))
    want_b = (G.var("a", -1), G.of(0, a=1, b=1), G.var("b"))
    exhaustive = {p for p in itertools.product(range(8), repeat=3) if a.contains(p)} == \
        {p for p in itertools.product(range(8), repeat=3) if b.contains(p)} == a.points() == b.points()
    ok = pa == want_a and pb == want_b and exhaustive
    return ok, f"phases {[str(p) for p in pa]} and {[str(p) for p in pb]}; point sets equal: {exhaustive}"


def c10_phase_homs():
    n8 = phase_hom_classify_zx(8)
    ok = n8 == [1, 7]
    det = [f"n=8: {n8}"]
    for n in (16, 24):
        js = phase_hom_classify_zx(n)
        ok &= all(j % 8 in (1, 7) for j in js) and js == [j for j in range(1, n) if zx_multiplier_valid(j, n)]
        det.append(f"n={n}: {js}")
    return ok, "; ".join(det)


def c11_synthesis():
    cfg = SynthConfig()
    t = time.perf_counter()
    res = synth_run(cfg)
    dt = time.perf_counter() - t
    unsound = 0
    for th in res.simple:
        eq = Equation.from_json(th["equation"])
        unsound += not matrices_equal(interpret(eq.lhs), interpret(eq.rhs), "scalar").equal
    naive = synth_run(SynthConfig(redex_filter=False, generalise_boundary=False, generalise_interpolation=False))
    prov = res.summary()["by_provenance"]
    ok = (dt < 300 and unsound == 0 and len(res.simple) < len(naive.simple)
          and prov.get("generalised-verified", 0) >= 1 and prov.get("generalised-deduced", 0) >= 1)
    return ok, (f"{dt:.0f} s; {len(res.simple)} simple theorems (naive {len(naive.simple)}), {unsound} unsound; "
                f"{prov.get('generalised-verified', 0)} interpolated, {prov.get('generalised-deduced', 0)} deduced")


def c12_invariants():
    import test_diagram
    import test_interpret
    import test_rewrite
    import test_scalars
    suites = [
        test_scalars.test_field_axioms_random_triples,
        test_scalars.test_cyclo_matches_complex,
        test_scalars.test_laurent_eval_is_ring_hom,
        test_interpret.test_functoriality_random,
        test_interpret.test_snake_equations,
        test_interpret.test_degree_soundness_random,
        test_interpret.test_laurent_eval_commutes_random,
        test_diagram.test_interchange_law,
        test_rewrite.test_match_completeness_against_brute_force,
    ]
    failed = []
    for fn in suites:
        try:
            fn()
        except AssertionError:
            failed.append(fn.__name__)
    return not failed, f"{len(suites) - len(failed)}/{len(suites)} suites pass" + (f" (failed: {failed})" if failed else "")


CRITERIA = [
    (1, "ZQ rule set soundness", c1_zq_soundness),
    (2, "EU' parameters", c2_eu_prime),
    (3, "Euler and canonical-form round trips", c3_round_trips),
    (4, "translation fidelity", c4_translations),
    (5, "grid verification of the spider family", c5_grid_example),
    (6, "finite-fragment fallback", c6_fragment),
    (7, "!-box verification", c7_bbox),
    (8, "Galois single instance", c8_galois),
    (9, "HNF presentation", c9_hnf),
    (10, "phase-hom classification", c10_phase_homs),
    (11, "synthesis desk run", c11_synthesis),
    (12, "core invariant suites", c12_invariants),
]


@pytest.mark.parametrize("k,title,fn", CRITERIA, ids=[f"criterion{k}" for k, _, _ in CRITERIA])
def test_criterion(k, title, fn, capsys):
    ok, detail = fn()
    _report(k, title, ok, detail, capsys)
    assert ok, detail


if __name__ == "__main__":
    results = []
    for k, title, fn in CRITERIA:
        ok, detail = fn()
        _report(k, title, ok, detail)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
