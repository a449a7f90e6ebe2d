"""Generative conjecture synthesis: enumerate irreducible diagrams, dedupe by interpretation,
emit theorems, and generalise them into parameterised families."""
from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterator

from .canon import canonical_bytes, canonical_form
from .cyclo import CycloNumber
from .diagram import Builder, Diagram, Equation, Vertex, skeleton, tensor
from .interpret import interpret, matrices_equal, normalised_fingerprint
from .paramspace import (AffineSubmodule, ParamSpaceError, generalize_boundary, infer_full_linear,
                         infer_sparse_linear, infer_sum, parameter_space, point_of, submodule_to_rule)
from .phase import GroupPhase, RingPhase
from .rewrite import ReductionOrder, RewriteRule, is_reducible
from .store import TheoremStore, digest
from .verify import verify

SUPPORTED = ("zx", "zh")


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class SynthConfig:
    calculus: str = "zx"
    phases: tuple = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2))   # multiples of pi (zx) or labels (zh)
    max_vertices: int = 3
    max_arity: int = 2                   # inputs + outputs
    max_boundary_per_vertex: int = 2
    hadamard: bool = True
    policy: str = "scalar"               # scalar | exact
    redex_filter: bool = True
    generalise_boundary: bool = True
    generalise_interpolation: bool = True
    fragment: int = 8                    # phase-group order used for parameter spaces (zx)
    jobs: int = 1

    def validate(self) -> None:
        if self.calculus not in SUPPORTED:
            raise SynthError(f"field 'calculus': synthesis supports {SUPPORTED}, got {self.calculus!r}")
        if not self.phases:
            raise SynthError("field 'phases': the phase set must be finite and nonempty")
        for k in ("max_vertices", "max_arity", "max_boundary_per_vertex", "fragment", "jobs"):
            if getattr(self, k) < 0:
                raise SynthError(f"field '{k}': must be >= 0")
        if self.policy not in ("scalar", "exact"):
            raise SynthError(f"field 'policy': expected 'scalar' or 'exact', got {self.policy!r}")
        if self.calculus == "zx":
            for p in self.phases:
                if (Fraction(p) * self.fragment / 2).denominator != 1:
                    raise SynthError(f"field 'phases': {p}pi is not a multiple of 2pi/{self.fragment}")

    def to_json(self) -> dict:
        d = asdict(self)
        d["phases"] = [str(Fraction(p)) for p in self.phases]
        return d

    @classmethod
    def from_json(cls, obj: dict) -> "SynthConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(obj) - known
        if extra:
            raise SynthError(f"unknown config field(s): {sorted(extra)}")
        kw = dict(obj)
        if "phases" in kw:
            try:
                kw["phases"] = tuple(Fraction(str(p)) for p in kw["phases"])
            except (ValueError, ZeroDivisionError) as e:
                raise SynthError(f"field 'phases': {e}") from e
        cfg = cls(**kw)
        cfg.validate()
        return cfg

    def key(self) -> str:
        d = self.to_json()
        d.pop("jobs")
        return digest(json.dumps(d, sort_keys=True))


# -- enumeration -----------------------------------------------------------------------

def _alphabet(cfg: SynthConfig) -> list[tuple[str, object]]:
    if cfg.calculus == "zx":
        out = [(k, GroupPhase(Fraction(p))) for k in ("ZSpider", "XSpider") for p in cfg.phases]
        return out + ([("Hadamard", None)] if cfg.hadamard else [])
    return [("ZhZ", None)] + [("HBox", RingPhase.const(CycloNumber.coerce(Fraction(p)))) for p in cfg.phases]


def _may_touch(calculus: str, a: str, b: str) -> bool:
    """Spider and Hopf irreducibility: no same-type neighbours (H-H cancels too)."""
    if calculus == "zx":
        return a != b
    return not (a == b == "ZhZ")


def _components(m: int, edges: list[tuple[int, int]]) -> list[set[int]]:
    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x
    for a, b in edges:
        parent[find(a)] = find(b)
    comps: dict[int, set[int]] = {}
    for v in range(m):
        comps.setdefault(find(v), set()).add(v)
    return list(comps.values())


def _matchings(items: list[str]) -> Iterator[list[tuple[str, str]]]:
    if not items:
        yield []
        return
    a = items[0]
    for k in range(1, len(items)):
        rest = items[1:k] + items[k + 1:]
        for m in _matchings(rest):
            yield [(a, items[k])] + m


def _wire_diagrams(cfg: SynthConfig) -> Iterator[Diagram]:
    for n_in in range(cfg.max_arity + 1):
        for n_out in range(cfg.max_arity + 1 - n_in):
            if (n_in + n_out) % 2:
                continue
            ins = [f"i{k}" for k in range(n_in)]
            outs = [f"o{k}" for k in range(n_out)]
            for m in _matchings(ins + outs):
                verts = {v: Vertex("BoundaryIn") for v in ins} | {v: Vertex("BoundaryOut") for v in outs}
                yield Diagram(cfg.calculus, verts, [((a, 0), (b, 0)) for a, b in m], ins, outs,
                              fragment=_fragment(cfg))


def _fragment(cfg: SynthConfig) -> int | None:
    return cfg.fragment if cfg.calculus == "zx" else None


def enumerate_diagrams(cfg: SynthConfig) -> list[Diagram]:
    """Irreducible-by-construction diagrams up to canonical duplicates, ordered by
    (vertex count, edge count, canonical bytes)."""
    cfg.validate()
    alpha = _alphabet(cfg)
    found: dict[bytes, Diagram] = {}
    for d in _wire_diagrams(cfg):
        found.setdefault(canonical_bytes(d), d)
    for m in range(1, cfg.max_vertices + 1):
        for labels in itertools.combinations_with_replacement(range(len(alpha)), m):
            kinds = [alpha[i][0] for i in labels]
            pairs = [(a, b) for a in range(m) for b in range(a + 1, m) if _may_touch(cfg.calculus, kinds[a], kinds[b])]
            for mask in range(1 << len(pairs)):
                edges = [p for k, p in enumerate(pairs) if mask >> k & 1]
                comps = _components(m, edges)
                deg = [0] * m
                for a, b in edges:
                    deg[a] += 1
                    deg[b] += 1
                for n_in in range(cfg.max_arity + 1):
                    for n_out in range(cfg.max_arity + 1 - n_in):
                        for assign in itertools.product(range(m), repeat=n_in + n_out):
                            d = _build(cfg, alpha, labels, kinds, edges, comps, deg, n_in, n_out, assign)
                            if d is not None:
                                found.setdefault(canonical_bytes(d), d)
    order = sorted(found.items(), key=lambda kv: (len(kv[1].interior()), len(kv[1].edges), kv[0]))
    return [d for _, d in order]


def _build(cfg, alpha, labels, kinds, edges, comps, deg, n_in, n_out, assign) -> Diagram | None:
    m = len(labels)
    bdeg = [0] * m
    for v in assign:
        bdeg[v] += 1
    if any(b > cfg.max_boundary_per_vertex for b in bdeg):
        return None
    for v in range(m):
        if kinds[v] == "Hadamard" and deg[v] + bdeg[v] != 2:
            return None
    if len(comps) > 1 and any(not any(bdeg[v] for v in c) for c in comps):
        return None         # closed components are scalars: only allowed as the whole diagram
    verts = {f"v{k}": Vertex(*alpha[i]) for k, i in enumerate(labels)}
    es = [((f"v{a}", 0), (f"v{b}", 0)) for a, b in edges]
    ins = [f"i{k}" for k in range(n_in)]
    outs = [f"o{k}" for k in range(n_out)]
    for b, v in zip(ins + outs, assign):
        verts[b] = Vertex("BoundaryIn" if b in ins else "BoundaryOut")
        es.append(((b, 0), (f"v{v}", 0)))
    return Diagram(cfg.calculus, verts, es, ins, outs, fragment=_fragment(cfg))


# -- fingerprints and theorem records --------------------------------------------------------

def fingerprint(d: Diagram, policy: str = "scalar", conductor: int = 8) -> str:
    m = interpret(d, "exact")
    if policy == "scalar":
        return normalised_fingerprint(m, conductor)
    t = m.tensor.lift(math.lcm(conductor, m.tensor.N))
    red = t.reduced()
    g = t.den
    for x in red.flat:
        g = math.gcd(g, int(x))
    return json.dumps([m.m, m.n, t.N, t.den // g, [int(x) // g for x in red.flat]], separators=(",", ":"))


def _fp_task(args):
    d, policy = args
    return fingerprint(d, policy)


ORDER = ReductionOrder()


def _orient_key(d: Diagram) -> tuple:
    return ORDER.key(d), canonical_bytes(skeleton(d).diagram), canonical_bytes(d)


def _scalar_gadget_zx(b: Builder, kind: str, theta: Fraction | None = None) -> None:
    from .calculi.zx import g_pi, sqrt2_pair
    if kind == "pair":
        sqrt2_pair(b)
    else:
        g_pi(b, GroupPhase(theta))


def _closed(calculus: str, fragment, parts: list[tuple[str, object]]) -> Diagram:
    b = Builder(calculus, fragment)
    for kind, arg in parts:
        if calculus == "zx":
            _scalar_gadget_zx(b, kind, arg)
        else:
            b.add("HBox", RingPhase.const(arg))
    return b.build()


def exact_form(eq: Equation, lam) -> Equation | None:
    """Make lhs = lam * rhs exact by tensoring explicit scalar diagrams; None if lam has no such form."""
    if lam is None:
        return None
    lam = CycloNumber.coerce(lam)
    frag = eq.lhs.fragment
    if eq.calculus == "zh":
        extra_l, extra_r = [], [("h", lam)]
    else:
        z = lam.to_complex()
        if abs(z) < 1e-12:
            return None
        k = round(math.log2(abs(z) ** 2))
        m = round(math.atan2(z.imag, z.real) / (math.pi / 4)) % 8
        a, b = (0, k - 1) if k >= 1 else (1 - k, 0)
        extra_l = [("pair", None)] * a
        extra_r = [("g", Fraction(m, 4))] + [("pair", None)] * b
    lhs = tensor(eq.lhs, _closed(eq.calculus, frag, extra_l)) if extra_l else eq.lhs
    rhs = tensor(eq.rhs, _closed(eq.calculus, frag, extra_r))
    out = Equation(lhs, rhs, {}, eq.name)
    if not matrices_equal(interpret(out.lhs), interpret(out.rhs), "exact").equal:
        return None
    return out


def canonical_equation(eq: Equation) -> tuple[Equation, str]:
    """Rename interior vertices by the canonical order of each side's skeleton; returns (equation, skeleton key)."""
    sides, keys = [], []
    for tag, d in (("l", eq.lhs), ("r", eq.rhs)):
        sk = skeleton(d).diagram
        code, order, _ = canonical_form(sk)
        mapping = {v: f"{tag}{k:03d}" for k, v in enumerate(order)}
        r = d.rename(mapping)
        verts = dict(sorted(r.vertices.items()))
        sides.append(r.replace(vertices=verts))
        keys.append(code)
    return Equation(sides[0], sides[1], dict(eq.bbox_pairing), eq.name), digest(keys[0] + b"|" + keys[1])


# -- the synthesis loop ---------------------------------------------------------------------

@dataclass
class SynthResult:
    emitted: list[dict] = field(default_factory=list)          # theorem JSON, in emission order
    enumerated: int = 0
    filtered: int = 0
    skipped: int = 0
    generalised: list[dict] = field(default_factory=list)

    @property
    def simple(self) -> list[dict]:
        return [t for t in self.emitted if t["provenance"] == "simple"]

    def summary(self) -> dict:
        prov = {}
        for t in self.emitted + self.generalised:
            prov[t["provenance"]] = prov.get(t["provenance"], 0) + 1
        return {"enumerated": self.enumerated, "filtered": self.filtered, "already_processed": self.skipped,
                "simple_theorems": len(self.simple), "by_provenance": dict(sorted(prov.items()))}


def _live_rules(store: TheoremStore) -> list[RewriteRule]:
    out = []
    for t in store.theorems:
        if t.provenance == "simple" and t.record.get("orientable"):
            out.append(RewriteRule.from_equation(Equation.from_json(t.record["equation"]), name=t.id))
    return out


def synth_run(cfg: SynthConfig, store: TheoremStore | None = None) -> SynthResult:
    """Enumerate, filter redexes, fingerprint, and emit oriented theorems; then generalise."""
    cfg.validate()
    store = store if store is not None else TheoremStore(None, cfg.key())
    res = SynthResult()
    live = _live_rules(store)
    diagrams = enumerate_diagrams(cfg)
    res.enumerated = len(diagrams)
    keys = [digest(canonical_bytes(d)) for d in diagrams]
    todo = [i for i, k in enumerate(keys) if k not in store.processed]
    res.skipped = len(diagrams) - len(todo)
    pre: dict[int, str] = {}
    if cfg.jobs > 1 and todo:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            fps = ex.map(_fp_task, [(diagrams[i], cfg.policy) for i in todo], chunksize=16)
            pre = dict(zip(todo, fps))
    for i in todo:
        d, key = diagrams[i], keys[i]
        if cfg.redex_filter and live and is_reducible(d, live, ORDER):
            res.filtered += 1
            store.mark_processed(key)
            continue
        fp = pre.get(i) or fingerprint(d, cfg.policy)
        rep = store.representative(fp)
        if rep is None:
            store.set_representative(fp, d, key)
        else:
            t = emit_theorem(d, rep, cfg, store)
            res.emitted.append(t)
            if t["orientable"]:
                live.append(RewriteRule.from_equation(Equation.from_json(t["equation"]), name=t["id"]))
            if _orient_key(d) < _orient_key(rep):
                store.set_representative(fp, d, key)
        store.mark_processed(key)
    store.save()
    if cfg.generalise_boundary or cfg.generalise_interpolation:
        res.generalised = generalise_store(store, cfg)
        store.save()
    return res


def emit_theorem(d: Diagram, rep: Diagram, cfg: SynthConfig, store: TheoremStore) -> dict:
    """Record d = rep (under cfg.policy) oriented larger-to-smaller, with its exact scalar form."""
    big, small = (d, rep) if _orient_key(d) > _orient_key(rep) else (rep, d)
    orientable = ORDER.key(big) != ORDER.key(small)
    c = matrices_equal(interpret(big), interpret(small), cfg.policy)
    if not c.equal:
        raise SynthError("fingerprint collision between unequal diagrams")
    eq = Equation(big, small, {}, "")
    ex = exact_form(eq, c.witness) if cfg.policy == "scalar" else eq
    rec = {"equation": eq.to_json(), "orientable": orientable,
           "scalar": c.witness.to_json() if hasattr(c.witness, "to_json") else None,
           "exact": ex.to_json() if ex is not None else None}
    t = store.add_theorem("simple", rec)
    return t.to_json()


# -- generalisation --------------------------------------------------------------------------

def _verified(eq: Equation, mode: str = "auto") -> tuple[bool, str]:
    v = verify(eq, mode)
    return v.verified, v.method


def _universal(eq: Equation) -> Equation:
    return Equation(eq.lhs.replace(fragment=None), eq.rhs.replace(fragment=None), dict(eq.bbox_pairing), eq.name)


def generalisation_step(theorem: dict, store: TheoremStore, cfg: SynthConfig | None = None) -> list[dict]:
    """Deduced boundary generalisations of one theorem plus interpolation over its same-skeleton siblings."""
    cfg = cfg or SynthConfig()
    out = []
    if theorem.get("exact") is None:
        return out
    exact = Equation.from_json(theorem["exact"])
    if cfg.generalise_boundary:
        for g in generalize_boundary(exact):
            ok, method = _verified(g.equation)
            rec = {"equation": g.equation.to_json(), "from": [theorem["id"]], "note": g.note,
                   "rechecked": ok, "method": method}
            out.append(store.add_theorem("generalised-deduced", rec).to_json())
    if cfg.generalise_interpolation:
        _, key = canonical_equation(exact)
        group = [t.to_json() for t in store.theorems if t.provenance == "simple" and t.record.get("exact")
                 and t.id not in store.subsumed and canonical_equation(Equation.from_json(t.record["exact"]))[1] == key]
        out += _interpolate_group(group, store)
    return out


def _interpolate_group(group: list[dict], store: TheoremStore) -> list[dict]:
    store.attempted.update(t["id"] for t in group)
    if len(group) < 2:
        return []
    eqs = [canonical_equation(Equation.from_json(t["exact"]))[0] for t in group]
    template = eqs[0]
    space = parameter_space(template)
    try:
        pts = [point_of(e, space) for e in eqs]
    except ParamSpaceError:
        return []
    moduli = space.moduli
    cands: list[AffineSubmodule] = []
    for p, q in itertools.combinations(sorted(set(pts)), 2):
        cands.append(infer_full_linear(p, q, moduli))
        s = infer_sparse_linear(p, q, moduli)
        if s is not None:
            cands.append(s)
    verified: list[tuple[AffineSubmodule, Equation, str, frozenset]] = []
    seen: set[frozenset] = set()

    def attempt(sub: AffineSubmodule):
        try:
            pset = frozenset(sub.points())
        except ParamSpaceError:
            return
        if pset in seen:
            return
        seen.add(pset)
        rule = submodule_to_rule(template, sub, space)
        ok, method = _verified(rule)
        if ok:
            verified.append((sub, rule, method, pset))
    for s in cands:
        attempt(s)
    base = list(verified)
    for (a, *_), (b, *_) in itertools.combinations(base, 2):
        s = infer_sum(a, b)
        if s is not None:
            attempt(s)
    maximal = [v for v in verified if not any(v[3] < w[3] for w in verified)]
    out = []
    for sub, rule, method, pset in maximal:
        members = [t["id"] for t, p in zip(group, pts) if p in pset]
        uni, umethod = _verified(_universal(rule))
        rec = {"equation": rule.to_json(), "submodule": sub.to_json(), "from": members, "method": method,
               "universal": uni, "universal_method": umethod, "points": len(pset)}
        out.append(store.add_theorem("generalised-verified", rec).to_json())
        store.subsumed.update(members)
    return out


def generalise_store(store: TheoremStore, cfg: SynthConfig) -> list[dict]:
    """Run the generalisation step over every simple theorem not yet generalised."""
    done = set()
    for t in store.theorems:
        if t.provenance != "simple":
            done.update(t.record.get("from", []) if t.provenance == "generalised-deduced" else [])
    out = []
    groups: dict[str, list[dict]] = {}
    for t in list(store.theorems):
        if t.provenance != "simple" or t.record.get("exact") is None:
            continue
        tj = t.to_json()
        if cfg.generalise_boundary and t.id not in done:
            out += generalisation_step(tj, store, SynthConfig(**{**asdict(cfg), "generalise_interpolation": False}))
        if cfg.generalise_interpolation and t.id not in store.subsumed and t.id not in store.attempted:
            groups.setdefault(canonical_equation(Equation.from_json(tj["exact"]))[1], []).append(tj)
    for key in sorted(groups):
        out += _interpolate_group(groups[key], store)
    return out
