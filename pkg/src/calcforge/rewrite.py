"""Double-pushout rewriting: matching with the no-dangling-wires condition, rule application, normalisation."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .diagram import BBox, Diagram, DiagramFormatError, Equation, Vertex, instantiate_bbox, nesting_order, splice
from .phase import GroupPhase, QuatExpr, QVar, RingPhase, ScalarExpr, SVar

FLOAT_TOL = 1e-12


class RewriteError(ValueError):
    pass


# named side computations so rules survive a JSON round trip
DERIVE_HOOKS: dict[str, Callable[[dict], dict]] = {}
CONDITION_HOOKS: dict[str, Callable[[dict], bool]] = {}


@dataclass
class RewriteRule:
    """lhs => rhs with boundary correspondence lhs boundary id -> rhs boundary id."""

    name: str
    lhs: Diagram
    rhs: Diagram
    boundary_map: dict[str, str] = field(default_factory=dict)
    condition: Callable[[dict], bool] | None = None
    bbox_pairing: dict[str, str] = field(default_factory=dict)
    derive: Callable[[dict], dict] | None = None     # extra rhs parameters computed from a match
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.boundary_map:
            if self.lhs.arity != self.rhs.arity:
                raise RewriteError(f"rule {self.name}: boundary arities differ {self.lhs.arity} vs {self.rhs.arity}")
            self.boundary_map = dict(zip(self.lhs.inputs + self.lhs.outputs, self.rhs.inputs + self.rhs.outputs))
        lb = set(self.lhs.inputs) | set(self.lhs.outputs)
        rb = set(self.rhs.inputs) | set(self.rhs.outputs)
        if set(self.boundary_map) != lb or set(self.boundary_map.values()) != rb:
            raise RewriteError(f"rule {self.name}: boundary_map must biject lhs and rhs boundaries")

    @classmethod
    def from_equation(cls, eq: Equation, reverse: bool = False, name: str | None = None) -> "RewriteRule":
        lhs, rhs = (eq.rhs, eq.lhs) if reverse else (eq.lhs, eq.rhs)
        pairing = {v: k for k, v in eq.bbox_pairing.items()} if reverse else dict(eq.bbox_pairing)
        return cls(name or eq.name, lhs, rhs, bbox_pairing=pairing)

    def reversed(self) -> "RewriteRule":
        inv = {v: k for k, v in self.boundary_map.items()}
        if self.derive is not None:
            raise RewriteError(f"rule {self.name} computes rhs parameters and cannot be reversed")
        return RewriteRule(self.name + "^-1", self.rhs, self.lhs, inv, self.condition,
                           {v: k for k, v in self.bbox_pairing.items()}, meta=dict(self.meta))

    def equation(self) -> Equation:
        """The rule as an equation, with rhs boundaries reordered to follow the lhs."""
        rhs = self.rhs.replace(inputs=[self.boundary_map[b] for b in self.lhs.inputs],
                               outputs=[self.boundary_map[b] for b in self.lhs.outputs])
        return Equation(self.lhs, rhs, dict(self.bbox_pairing), self.name)

    def expansions(self, k_max: int = 3) -> list["RewriteRule"]:
        """Simple rules obtained by instantiating every !-box 0..k_max times."""
        if not self.lhs.bboxes:
            return [self]
        eq = self.equation()
        out = []
        for eqs in _expand_all(eq, k_max):
            out.append(RewriteRule(eqs.name, eqs.lhs, eqs.rhs, condition=self.condition,
                                   derive=self.derive, meta=dict(self.meta)))
        return out

    def to_json(self) -> dict:
        out = {"name": self.name, "lhs": self.lhs.to_json(), "rhs": self.rhs.to_json(),
               "boundary_map": dict(sorted(self.boundary_map.items()))}
        if self.bbox_pairing:
            out["bbox_pairing"] = dict(sorted(self.bbox_pairing.items()))
        hooks = {k: self.meta[k] for k in ("derive", "condition") if k in self.meta}
        if hooks:
            out["hooks"] = hooks
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "RewriteRule":
        for key in ("lhs", "rhs"):
            if key not in obj:
                raise DiagramFormatError(f"missing field '{key}'")
        lhs, rhs = Diagram.from_json(obj["lhs"]), Diagram.from_json(obj["rhs"])
        hooks = dict(obj.get("hooks") or {})
        if hooks:
            from . import calculi  # noqa: F401  (registers the builtin hooks)
        for key, table in (("derive", DERIVE_HOOKS), ("condition", CONDITION_HOOKS)):
            if key in hooks and hooks[key] not in table:
                raise DiagramFormatError(f"field 'hooks.{key}': unknown hook {hooks[key]!r}")
        try:
            return cls(obj.get("name", ""), lhs, rhs, dict(obj.get("boundary_map") or {}),
                       condition=CONDITION_HOOKS.get(hooks.get("condition")),
                       bbox_pairing=dict(obj.get("bbox_pairing") or {}),
                       derive=DERIVE_HOOKS.get(hooks.get("derive")), meta=hooks)
        except RewriteError as e:
            raise DiagramFormatError(f"field 'boundary_map': {e}") from e


def _expand_all(eq: Equation, k_max: int) -> list[Equation]:
    if not eq.lhs.bboxes:
        return [eq]
    box = nesting_order(eq.lhs)[0]
    out = []
    for k in range(k_max + 1):
        sub = eq.instantiate(box, k)
        sub.name = f"{eq.name}[{box}={k}]"
        out.extend(_expand_all(sub, k_max))
    return out


# -- phase unification ------------------------------------------------------

_DEFER = object()


def _group_close(a: GroupPhase, b: GroupPhase) -> bool:
    if a.coeffs != b.coeffs:
        return False
    if a.exact and b.exact:
        return a.const == b.const
    d = (float(a.const) - float(b.const)) % 2.0
    return min(d, 2.0 - d) <= FLOAT_TOL


def _unify_group(pat: GroupPhase, host, asg: dict):
    if not isinstance(host, GroupPhase):
        return None
    rest = pat.evaluate(asg)
    free = [(v, k) for v, k in rest.coeffs if v in pat.vars() and v not in asg]
    if not free:
        return asg if _group_close(rest, host) else None
    if len(free) > 1:
        return _DEFER
    v, k = free[0]
    target = host - GroupPhase(rest.const, tuple(c for c in rest.coeffs if c[0] != v))
    if abs(k) != 1:
        if any(c % k for _, c in target.coeffs):
            return None
        if target.exact:
            val = GroupPhase(target.const / k, tuple((u, c // k) for u, c in target.coeffs))
        else:
            val = GroupPhase(float(target.const) / k, tuple((u, c // k) for u, c in target.coeffs))
    else:
        val = target.scale(k)
    new = dict(asg)
    new[v] = val
    return new


def _unify(pat, host, asg: dict):
    """Extend `asg` so that pat evaluates to host; None on failure, _DEFER if undetermined yet."""
    if pat is None or host is None:
        return asg if pat is None and host is None else None
    if isinstance(pat, GroupPhase):
        return _unify_group(pat, host, asg)
    if isinstance(pat, RingPhase):
        if not isinstance(host, RingPhase):
            return None
        pv = pat.vars() - set(asg)
        if not pv:
            return asg if pat.evaluate(asg) == host else None
        poly = pat.poly
        if len(poly.terms) == 1 and len(pv) == 1:
            (e, c), = poly.terms.items()
            v = next(iter(pv))
            if c == 1 and e[poly.vars.index(v)] == 1 and sum(abs(x) for x in e) == 1:
                new = dict(asg)
                new[v] = host
                return new
        return _DEFER
    if isinstance(pat, QuatExpr):
        if not isinstance(host, QuatExpr):
            return None
        if isinstance(pat, QVar) and pat.name not in asg:
            new = dict(asg)
            new[pat.name] = host
            return new
        if pat.vars() - set(asg):
            return _DEFER
        return asg if _quat_equal(pat.evaluate(asg), host) else None
    if isinstance(pat, ScalarExpr):
        if not isinstance(host, ScalarExpr):
            return None
        if isinstance(pat, SVar) and pat.name not in asg:
            new = dict(asg)
            new[pat.name] = host
            return new
        if pat.vars() - set(asg):
            return _DEFER
        return asg if pat.evaluate(asg) == host else None
    return asg if pat == host else None


def _quat_equal(a: QuatExpr, b: QuatExpr) -> bool:
    if a.is_constant() and b.is_constant():
        x, y = a.value(), b.value()
        if x.exact and y.exact:
            return x == y
        return x.isclose(y, 1e-12)
    return a == b


def _substitute(phase, asg: dict):
    if phase is None or not asg or not hasattr(phase, "evaluate"):
        return phase
    if not (phase.vars() & set(asg)):
        return phase
    return phase.evaluate(asg)


# -- matching ---------------------------------------------------------------

@dataclass
class Match:
    vertex_map: dict[str, str]                   # lhs interior -> host
    assignment: dict[str, object]                # rule variable -> host phase
    boundary_ends: dict[str, tuple[int, int]]    # lhs boundary -> (host edge index, side at the matched vertex)
    edge_map: dict[int, int] = field(default_factory=dict)
    expansion: dict[str, int] = field(default_factory=dict)


def port_class(kind: str, port: int) -> int:
    """RingAdd inputs are interchangeable; every other port is significant."""
    if kind == "RingAdd":
        return 0 if port == 0 else 1
    return port


def _end_side(host: Diagram, idx: int, v: str, pclass: int, used_sides: set) -> int | None:
    kind = host.vertices[v].kind
    for side, end in enumerate(host.edges[idx]):
        if end[0] == v and port_class(kind, end[1]) == pclass and (idx, side) not in used_sides:
            return side
    return None


def find_matches(rule: RewriteRule, host: Diagram, limit: int | None = None) -> list[Match]:
    """All matches of a simple-lhs rule in host (one per lhs-interior vertex map)."""
    if rule.lhs.bboxes:
        out = []
        for r in rule.expansions():
            out.extend(find_matches(r, host, limit))
        return out
    lhs = rule.lhs
    L = [v for v in lhs.interior()]
    if not L:
        return []
    hi = host.interior()
    if len(L) > len(hi):
        return []
    lkinds: dict[str, int] = {}
    for v in L:
        lkinds[lhs.vertices[v].kind] = lkinds.get(lhs.vertices[v].kind, 0) + 1
    hkinds: dict[str, list[str]] = {}
    for v in hi:
        hkinds.setdefault(host.vertices[v].kind, []).append(v)
    if any(len(hkinds.get(k, [])) < n for k, n in lkinds.items()):
        return []
    ladj, hadj = lhs.adjacency(), host.adjacency()
    for b in lhs.inputs + lhs.outputs:
        other = ladj[b][0][2]
        if lhs.vertices[other[0]].is_boundary:
            raise RewriteError(f"rule {rule.name}: bare boundary-to-boundary wires in lhs are not matchable")
    order = _search_order(lhs, L)
    results: list[Match] = []

    def ports(d, adj, v):
        kind = d.vertices[v].kind
        return sorted(port_class(kind, p) for _, p, _ in adj[v])

    def extend(k: int, vmap: dict, asg: dict, deferred: list):
        if limit is not None and len(results) >= limit:
            return
        if k == len(order):
            asg2 = _resolve_deferred(lhs, vmap, host, asg, deferred)
            if asg2 is None:
                return
            if rule.condition is not None and not rule.condition(asg2):
                return
            m = _assign_edges(lhs, host, vmap, asg2)
            if m is not None:
                results.append(m)
            return
        u = order[k]
        ux = lhs.vertices[u]
        for h in hkinds.get(ux.kind, []):
            if h in vmap.values():
                continue
            if len(hadj[h]) != len(ladj[u]) or ports(host, hadj, h) != ports(lhs, ladj, u):
                continue
            # adjacency consistency with already-mapped neighbours
            if not _neighbours_ok(lhs, host, u, h, vmap):
                continue
            r = _unify(ux.phase, host.vertices[h].phase, asg)
            if r is None:
                continue
            vmap[u] = h
            if r is _DEFER:
                extend(k + 1, vmap, asg, deferred + [u])
            else:
                extend(k + 1, vmap, r, deferred)
            del vmap[u]

    extend(0, {}, {}, [])
    return results


def _search_order(lhs: Diagram, L: list[str]) -> list[str]:
    adj = lhs.adjacency()
    order = [max(L, key=lambda v: (len(adj[v]), v))]
    rest = set(L) - set(order)
    while rest:
        conn = [v for v in rest if any(o[0] in order for _, _, o in adj[v])]
        pick = max(conn or rest, key=lambda v: (len(adj[v]), v))
        order.append(pick)
        rest.discard(pick)
    return order


def _neighbours_ok(lhs: Diagram, host: Diagram, u: str, h: str, vmap: dict) -> bool:
    ku = lhs.vertices[u].kind
    need: dict[tuple, int] = {}
    for _, p, o in lhs.adjacency()[u]:
        w = o[0]
        if w == u:
            key = (port_class(ku, p), h, port_class(ku, o[1]))
        elif w in vmap:
            key = (port_class(ku, p), vmap[w], port_class(lhs.vertices[w].kind, o[1]))
        else:
            continue
        need[key] = need.get(key, 0) + 1
    have: dict[tuple, int] = {}
    for _, p, o in host.adjacency()[h]:
        key = (port_class(ku, p), o[0], port_class(host.vertices[o[0]].kind, o[1]))
        if key in need:
            have[key] = have.get(key, 0) + 1
    return all(have.get(k, 0) >= n for k, n in need.items())


def _resolve_deferred(lhs, vmap, host, asg, deferred):
    pending = list(deferred)
    while pending:
        progress = False
        for u in list(pending):
            r = _unify(lhs.vertices[u].phase, host.vertices[vmap[u]].phase, asg)
            if r is None:
                return None
            if r is not _DEFER:
                asg = r
                pending.remove(u)
                progress = True
        if not progress:
            # underdetermined: pin one free group variable to zero and retry
            free = sorted(set().union(*(lhs.vertices[u].phase.vars() for u in pending)) - set(asg))
            if not free:
                return None
            asg = dict(asg)
            asg[free[0]] = GroupPhase(Fraction(0))
    return asg


def _assign_edges(lhs: Diagram, host: Diagram, vmap: dict, asg: dict) -> Match | None:
    used: set[tuple[int, int]] = set()
    edge_map: dict[int, int] = {}
    bmap: dict[str, tuple[int, int]] = {}
    boundaries = set(lhs.inputs) | set(lhs.outputs)
    hadj = host.adjacency()
    # interior edges first
    for i, (a, b) in enumerate(lhs.edges):
        if a[0] in boundaries or b[0] in boundaries:
            continue
        ka, kb = lhs.vertices[a[0]].kind, lhs.vertices[b[0]].kind
        ha, hb = (vmap[a[0]], port_class(ka, a[1])), (vmap[b[0]], port_class(kb, b[1]))
        found = False
        for j, _, _ in hadj[ha[0]]:
            e = host.edges[j]
            ce = [(x[0], port_class(host.vertices[x[0]].kind, x[1])) for x in e]
            for sa, sb in ((0, 1), (1, 0)):
                if ce[sa] == ha and ce[sb] == hb and (j, sa) not in used and (j, sb) not in used:
                    used.add((j, sa))
                    used.add((j, sb))
                    edge_map[i] = j
                    found = True
                    break
            if found:
                break
        if not found:
            return None
    for b in lhs.inputs + lhs.outputs:
        _, _, (u, p) = lhs.adjacency()[b][0]
        hv = vmap[u]
        side = None
        for j, _, _ in hadj[hv]:
            side = _end_side(host, j, hv, port_class(lhs.vertices[u].kind, p), used)
            if side is not None:
                used.add((j, side))
                bmap[b] = (j, side)
                break
        if side is None:
            return None
    # no dangling wires: every host end at a matched vertex is consumed
    for u, hv in vmap.items():
        for j, p, _ in hadj[hv]:
            e = host.edges[j]
            sides = [s for s in (0, 1) if e[s] == (hv, p)]
            if not any((j, s) in used for s in sides):
                return None
    return Match(dict(vmap), asg, bmap, edge_map)


# -- application ------------------------------------------------------------

def apply(rule: RewriteRule, match: Match, host: Diagram) -> Diagram:
    """Excise the matched interior and glue in the rhs along the boundary."""
    if rule.lhs.bboxes:
        raise RewriteError("expand !-boxes before applying (matches refer to an expanded rule)")
    image = set(match.vertex_map.values())
    for v in image:
        if v not in host.vertices or host.vertices[v].is_boundary:
            raise RewriteError(f"invalid match: {v!r} is not an interior host vertex")
    taken = set(host.vertices)
    ren: dict[str, str] = {}
    n = 0
    for v in rule.rhs.vertices:
        while True:
            n += 1
            cand = f"r{n}"
            if cand not in taken:
                break
        ren[v] = cand
        taken.add(cand)
    rhs = rule.rhs.rename(ren)
    asg = rule.derive(match.assignment) if rule.derive is not None else match.assignment
    vertices = {v: x for v, x in host.vertices.items() if v not in image}
    for v, x in rhs.vertices.items():
        vertices[v] = Vertex(x.kind, _substitute(x.phase, asg)) if not x.is_boundary else x
    # host edge ends that were lhs boundaries
    end_owner = {bm: b for b, bm in match.boundary_ends.items()}
    placeholders = {b: f"_p{k}" for k, b in enumerate(sorted(match.boundary_ends))}
    for b, p in placeholders.items():
        while p in vertices:
            p = p + "_"
        placeholders[b] = p
        vertices[p] = Vertex("BoundaryIn")
    edges = []
    for j, e in enumerate(host.edges):
        ends = list(e)
        touched = False
        for s in (0, 1):
            if (j, s) in end_owner:
                ends[s] = (placeholders[end_owner[(j, s)]], 0)
                touched = True
        if not touched and (e[0][0] in image or e[1][0] in image):
            continue
        if touched and any(x[0] in image for x in ends):
            raise RewriteError("invalid match: dangling wire")
        edges.append(tuple(ends))
    edges.extend(rhs.edges)
    pairs = [(placeholders[b], ren[rule.boundary_map[b]]) for b in sorted(match.boundary_ends)]
    vertices, edges = splice(vertices, edges, pairs)
    bboxes = {k: BBox(b.vertices - image, b.parent) for k, b in host.bboxes.items()}
    return Diagram(host.calculus, vertices, edges, host.inputs, host.outputs, bboxes, host.fragment)


# -- normalisation ----------------------------------------------------------

@dataclass(frozen=True)
class ReductionOrder:
    """Lexicographic (vertex count, edge count, phase term size); smaller is simpler."""

    def key(self, d: Diagram) -> tuple[int, int, int]:
        return len(d.interior()), len(d.edges), d.phase_term_size()

    def reduces(self, before: Diagram, after: Diagram) -> bool:
        return self.key(after) < self.key(before)


@dataclass
class NormalizeResult:
    diagram: Diagram
    steps: list[str]
    exhausted: bool


def normalize(host: Diagram, rules: Sequence[RewriteRule], order: ReductionOrder | None = None,
              fuel: int = 1000) -> NormalizeResult:
    """Apply strictly decreasing rewrites until none applies or fuel runs out."""
    order = order or ReductionOrder()
    simple = [r for rule in rules for r in rule.expansions()]
    cur, steps = host, []
    while True:
        if fuel <= 0:
            return NormalizeResult(cur, steps, True)
        nxt = None
        for rule in simple:
            for m in find_matches(rule, cur):
                cand = apply(rule, m, cur)
                if order.reduces(cur, cand):
                    nxt, name = cand, rule.name
                    break
            if nxt is not None:
                break
        if nxt is None:
            return NormalizeResult(cur, steps, False)
        cur = nxt
        steps.append(name)
        fuel -= 1


def is_reducible(host: Diagram, rules: Iterable[RewriteRule], order: ReductionOrder | None = None) -> bool:
    order = order or ReductionOrder()
    for rule in rules:
        for r in rule.expansions():
            for m in find_matches(r, host):
                if order.reduces(host, apply(r, m, host)):
                    return True
    return False


def load_rules(text: str) -> list[RewriteRule]:
    obj = json.loads(text)
    items = obj if isinstance(obj, list) else obj.get("rules", [obj])
    return [RewriteRule.from_json(o) for o in items]
