"""Theory synthesis: enumeration, theorem emission, the theorem store and generalisation."""
import json
from fractions import Fraction

import pytest

from calcforge.diagram import Builder, Equation
from calcforge.phase import GroupPhase
from calcforge.rewrite import ReductionOrder
from calcforge.store import TheoremStore
from calcforge.synth import SynthConfig, SynthError, emit_theorem, enumerate_diagrams, generalisation_step, synth_run
from calcforge.verify import check_simple, verify
from calcforge.interpret import interpret, matrices_equal
from calcforge import synth as synth_mod

SMALL = SynthConfig(max_vertices=2)


def test_enumeration_hand_count():
    cfg = SynthConfig(max_vertices=1, phases=(Fraction(0), Fraction(1)), hadamard=False)
    ds = enumerate_diagrams(cfg)
    # 4 wire diagrams (empty, identity, cup, cap); 4 labelled spiders x 6 boundary arities (n_in + n_out <= 2)
    assert len(ds) == 4 + 4 * 6
    assert sum(1 for d in ds if not d.interior()) == 4


def test_zero_vertices_gives_wires_only():
    ds = enumerate_diagrams(SynthConfig(max_vertices=0))
    assert len(ds) == 4 and all(not d.interior() for d in ds)
    assert sorted(d.arity for d in ds) == [(0, 0), (0, 2), (1, 1), (2, 0)]


def test_enumeration_is_irreducible_by_construction():
    for d in enumerate_diagrams(SMALL):
        for (a, _), (b, _) in d.edges:
            ka, kb = d.vertices[a].kind, d.vertices[b].kind
            if not (d.vertices[a].is_boundary or d.vertices[b].is_boundary):
                assert ka != kb, d


def test_config_validation():
    with pytest.raises(SynthError):
        SynthConfig(calculus="zq").validate()
    with pytest.raises(SynthError):
        SynthConfig(phases=(Fraction(1, 3),)).validate()
    with pytest.raises(SynthError):
        SynthConfig.from_json({"bogus": 1})
    cfg = SynthConfig.from_json(json.loads(json.dumps(SMALL.to_json())))
    assert cfg == SMALL and cfg.key() == SMALL.key()


@pytest.fixture(scope="module")
def small_run():
    return synth_run(SMALL)


def test_emitted_theorems_are_sound_and_shrink(small_run):
    order = ReductionOrder()
    assert small_run.simple
    for t in small_run.simple:
        eq = Equation.from_json(t["equation"])
        assert matrices_equal(interpret(eq.lhs), interpret(eq.rhs), "scalar").equal
        assert order.key(eq.lhs) >= order.key(eq.rhs)
        if t["orientable"]:
            assert order.key(eq.lhs) > order.key(eq.rhs)
        if t["exact"] is not None:
            assert check_simple(Equation.from_json(t["exact"]))[0]
    assert sum(t["exact"] is not None for t in small_run.simple) == len(small_run.simple)


def test_generalisations_are_verified(small_run):
    assert small_run.generalised
    for t in small_run.generalised:
        if t["provenance"] == "generalised-verified":
            assert verify(Equation.from_json(t["equation"])).verified
        else:
            assert t["rechecked"]


def test_determinism(small_run):
    again = synth_run(SMALL)
    assert again.summary() == small_run.summary()
    assert [t["equation"] for t in again.emitted] == [t["equation"] for t in small_run.emitted]


def test_store_idempotence(tmp_store, small_run):
    first = synth_run(SMALL, TheoremStore.open(tmp_store, SMALL.key()))
    assert first.summary() == small_run.summary()
    second = synth_run(SMALL, TheoremStore.open(tmp_store, SMALL.key()))
    assert second.emitted == [] and second.generalised == []
    assert second.skipped == second.enumerated
    st = TheoremStore.open(tmp_store, SMALL.key())
    assert len(st.theorems) == len(first.emitted) + len(first.generalised)
    with pytest.raises(ValueError):
        TheoremStore.open(tmp_store, SynthConfig(max_vertices=1).key())


def test_resume_after_interrupt(tmp_store, monkeypatch, small_run):
    real = synth_mod.fingerprint
    calls = {"n": 0}

    def flaky(d, policy="scalar", conductor=8):
        calls["n"] += 1
        if calls["n"] == 100:
            raise KeyboardInterrupt
        return real(d, policy, conductor)
    monkeypatch.setattr(synth_mod, "fingerprint", flaky)
    with pytest.raises(KeyboardInterrupt):
        synth_run(SMALL, TheoremStore.open(tmp_store, SMALL.key()))
    monkeypatch.setattr(synth_mod, "fingerprint", real)
    resumed = synth_run(SMALL, TheoremStore.open(tmp_store, SMALL.key()))
    assert [t["equation"] for t in resumed.emitted] == [t["equation"] for t in small_run.emitted]
    st = TheoremStore.open(tmp_store, SMALL.key())
    assert [t.record["equation"] for t in st.theorems] == \
        [t["equation"] for t in small_run.emitted + small_run.generalised]


def _chain(first, second):
    b = Builder("zx", 8)
    u = b.add(first[0], GroupPhase(Fraction(first[1])))
    v = b.add(second[0], GroupPhase(Fraction(second[1])))
    b.edge(u, v)
    b.input(u, id="i0")
    b.output(v, id="o0")
    return b.build()


def test_pi_commutation_generalises():
    """X(pi) then Z(a) equals Z(-a) then X(pi), up to scalar; two instances interpolate to the family."""
    cfg = SynthConfig(phases=(Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)))
    st = TheoremStore(None)
    ts = [emit_theorem(_chain(("XSpider", 1), ("ZSpider", a)), _chain(("ZSpider", -a), ("XSpider", 1)), cfg, st)
          for a in (Fraction(1, 2), Fraction(1, 4))]
    out = generalisation_step(ts[0], st, SynthConfig(generalise_boundary=False))
    assert len(out) == 1
    g = out[0]
    assert g["provenance"] == "generalised-verified" and g["universal"]
    assert set(g["from"]) == {t["id"] for t in ts}
    rule = Equation.from_json(g["equation"])
    assert rule.vars() == ["a"]
    for k in range(8):
        assert check_simple(rule.evaluate({"a": GroupPhase(Fraction(k, 4))}))[0]
