"""Open-graph diagrams shared by every calculus.

A diagram is a set of typed vertices, a multiset of edges between (vertex, port)
ends, ordered input/output boundary vertices and optional nested !-boxes.  Most
generators are port-free (every end uses port 0); ports matter for RingAdd
(port 0 is the distinguished output), QNode (0 in, 1 out) and ZwCross
(0, 1 in; 2, 3 out).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .phase import phase_from_json, phase_to_json

End = tuple[str, int]
Edge = tuple[End, End]

BOUNDARY_KINDS = frozenset({"BoundaryIn", "BoundaryOut"})
PORTED_KINDS = {"QNode": 2, "ZwCross": 4}
CALCULI = ("zx", "zq", "ring", "zh", "zw")


@dataclass(frozen=True)
class Vertex:
    kind: str
    phase: object = None

    @property
    def is_boundary(self) -> bool:
        return self.kind in BOUNDARY_KINDS


@dataclass(frozen=True)
class BBox:
    vertices: frozenset
    parent: str | None = None


def _norm_edge(a: End, b: End) -> Edge:
    return (a, b) if a <= b else (b, a)


class Diagram:
    """Immutable diagram value; every operation returns a new diagram."""

    __slots__ = ("calculus", "vertices", "edges", "inputs", "outputs", "bboxes", "fragment", "_adj")

    def __init__(self, calculus: str, vertices: Mapping[str, Vertex], edges: Iterable[Edge],
                 inputs: Iterable[str] = (), outputs: Iterable[str] = (),
                 bboxes: Mapping[str, BBox] | None = None, fragment: int | None = None):
        self.calculus = calculus
        self.vertices = dict(vertices)
        self.edges = tuple(sorted(_norm_edge(tuple(a), tuple(b)) for a, b in edges))
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        self.bboxes = dict(bboxes or {})
        self.fragment = fragment
        self._adj = None

    # -- basic queries ------------------------------------------------
    def adjacency(self) -> dict[str, list[tuple[int, int, End]]]:
        """vertex -> [(edge index, own port, other end)]; a self-loop appears twice."""
        if self._adj is None:
            adj: dict[str, list] = {v: [] for v in self.vertices}
            for i, (a, b) in enumerate(self.edges):
                if a[0] in adj:
                    adj[a[0]].append((i, a[1], b))
                if b[0] in adj:
                    adj[b[0]].append((i, b[1], a))
            self._adj = adj
        return self._adj

    def degree(self, v: str) -> int:
        return len(self.adjacency()[v])

    def interior(self) -> list[str]:
        return [v for v, x in self.vertices.items() if not x.is_boundary]

    def vars(self) -> set[str]:
        out: set[str] = set()
        for x in self.vertices.values():
            if x.phase is not None and hasattr(x.phase, "vars"):
                out |= set(x.phase.vars())
        return out

    def is_simple(self) -> bool:
        return not self.bboxes and not self.vars()

    @property
    def arity(self) -> tuple[int, int]:
        return len(self.inputs), len(self.outputs)

    def replace(self, **kw) -> "Diagram":
        args = dict(calculus=self.calculus, vertices=self.vertices, edges=self.edges,
                    inputs=self.inputs, outputs=self.outputs, bboxes=self.bboxes, fragment=self.fragment)
        args.update(kw)
        return Diagram(**args)

    def with_phases(self, phases: Mapping[str, object]) -> "Diagram":
        vs = {v: (Vertex(x.kind, phases[v]) if v in phases else x) for v, x in self.vertices.items()}
        return self.replace(vertices=vs)

    def rename(self, mapping: Mapping[str, str]) -> "Diagram":
        f = lambda v: mapping.get(v, v)
        return Diagram(
            self.calculus,
            {f(v): x for v, x in self.vertices.items()},
            [((f(a[0]), a[1]), (f(b[0]), b[1])) for a, b in self.edges],
            [f(v) for v in self.inputs], [f(v) for v in self.outputs],
            {k: BBox(frozenset(f(v) for v in b.vertices), b.parent) for k, b in self.bboxes.items()},
            self.fragment,
        )

    def phase_term_size(self) -> int:
        return sum(x.phase.term_size() for x in self.vertices.values()
                   if x.phase is not None and hasattr(x.phase, "term_size"))

    def __eq__(self, o):
        if not isinstance(o, Diagram):
            return NotImplemented
        return (self.calculus, self.vertices, self.edges, self.inputs, self.outputs, self.bboxes) == \
               (o.calculus, o.vertices, o.edges, o.inputs, o.outputs, o.bboxes)

    def __hash__(self):
        return hash((self.calculus, self.edges, self.inputs, self.outputs))

    def __repr__(self):
        body = ", ".join(f"{v}:{x.kind}" + (f"({x.phase!r})" if x.phase is not None else "")
                         for v, x in self.vertices.items() if not x.is_boundary)
        return f"Diagram[{self.calculus} {len(self.inputs)}->{len(self.outputs)}: {body}]"

    # -- serialisation -----------------------------------------------
    def to_json(self) -> dict:
        out = {
            "calculus": self.calculus,
            "vertices": [
                {"id": v, "kind": x.kind, **({"phase": phase_to_json(x.phase)} if x.phase is not None else {})}
                for v, x in self.vertices.items()
            ],
            "edges": [[[a[0], a[1]], [b[0], b[1]]] for a, b in self.edges],
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "bboxes": [{"id": k, "vertices": sorted(b.vertices), "parent": b.parent}
                       for k, b in sorted(self.bboxes.items())],
        }
        if self.fragment is not None:
            out["fragment"] = self.fragment
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_json(cls, obj: dict) -> "Diagram":
        for key in ("calculus", "vertices", "edges", "inputs", "outputs"):
            if key not in obj:
                raise DiagramFormatError(f"missing field '{key}'")
        if obj["calculus"] not in CALCULI:
            raise DiagramFormatError(f"field 'calculus': unknown calculus {obj['calculus']!r}")
        vertices = {}
        for i, vx in enumerate(obj["vertices"]):
            try:
                vertices[str(vx["id"])] = Vertex(vx["kind"], phase_from_json(vx.get("phase")))
            except (KeyError, ValueError, TypeError) as e:
                raise DiagramFormatError(f"field 'vertices[{i}]': {e}") from e
        edges = []
        for i, e in enumerate(obj["edges"]):
            try:
                (a, pa), (b, pb) = e
                edges.append(((str(a), int(pa)), (str(b), int(pb))))
            except (ValueError, TypeError) as err:
                raise DiagramFormatError(f"field 'edges[{i}]': expected [[v,port],[v,port]]") from err
        bboxes = {}
        for i, b in enumerate(obj.get("bboxes", [])):
            try:
                bboxes[str(b["id"])] = BBox(frozenset(str(v) for v in b["vertices"]), b.get("parent"))
            except (KeyError, TypeError) as e:
                raise DiagramFormatError(f"field 'bboxes[{i}]': {e}") from e
        return cls(obj["calculus"], vertices, edges, [str(v) for v in obj["inputs"]],
                   [str(v) for v in obj["outputs"]], bboxes, obj.get("fragment"))

    @classmethod
    def loads(cls, text: str) -> "Diagram":
        return cls.from_json(json.loads(text))


class DiagramFormatError(ValueError):
    pass


# -- construction ---------------------------------------------------------

class Builder:
    """Imperative helper for assembling diagrams."""

    def __init__(self, calculus: str, fragment: int | None = None):
        self.calculus = calculus
        self.fragment = fragment
        self.vertices: dict[str, Vertex] = {}
        self.edges: list[Edge] = []
        self.inputs: list[str] = []
        self.outputs: list[str] = []
        self.bboxes: dict[str, BBox] = {}
        self._n = 0

    def _fresh(self, prefix: str) -> str:
        while True:
            self._n += 1
            name = f"{prefix}{self._n}"
            if name not in self.vertices:
                return name

    def add(self, kind: str, phase=None, id: str | None = None) -> str:
        vid = id or self._fresh("v")
        if vid in self.vertices:
            raise ValueError(f"duplicate vertex id {vid}")
        self.vertices[vid] = Vertex(kind, phase)
        return vid

    def edge(self, a, b) -> None:
        a = a if isinstance(a, tuple) else (a, 0)
        b = b if isinstance(b, tuple) else (b, 0)
        self.edges.append((a, b))

    def input(self, to=None, id: str | None = None) -> str:
        vid = self.add("BoundaryIn", id=id or self._fresh("i"))
        self.inputs.append(vid)
        if to is not None:
            self.edge(vid, to)
        return vid

    def output(self, to=None, id: str | None = None) -> str:
        vid = self.add("BoundaryOut", id=id or self._fresh("o"))
        self.outputs.append(vid)
        if to is not None:
            self.edge(vid, to)
        return vid

    def bbox(self, vertices: Iterable[str], id: str | None = None, parent: str | None = None) -> str:
        bid = id or f"b{len(self.bboxes)}"
        self.bboxes[bid] = BBox(frozenset(vertices), parent)
        return bid

    def build(self) -> Diagram:
        return Diagram(self.calculus, self.vertices, self.edges, self.inputs, self.outputs,
                       self.bboxes, self.fragment)


def empty(calculus: str, fragment: int | None = None) -> Diagram:
    return Diagram(calculus, {}, [], fragment=fragment)


def identity(calculus: str, n: int = 1, fragment: int | None = None) -> Diagram:
    b = Builder(calculus, fragment)
    for k in range(n):
        i = b.input(id=f"i{k}")
        b.output(i, id=f"o{k}")
    return b.build()


def swap(calculus: str) -> Diagram:
    b = Builder(calculus)
    i0, i1 = b.input(id="i0"), b.input(id="i1")
    b.output(i1, id="o0")
    b.output(i0, id="o1")
    return b.build()


def cup(calculus: str) -> Diagram:
    """0 -> 2 bent wire."""
    b = Builder(calculus)
    o0 = b.output(id="o0")
    b.output(o0, id="o1")
    return b.build()


def cap(calculus: str) -> Diagram:
    """2 -> 0 bent wire."""
    b = Builder(calculus)
    i0 = b.input(id="i0")
    b.input(i0, id="i1")
    return b.build()


def spider(calculus: str, kind: str, phase, n_in: int, n_out: int, fragment: int | None = None) -> Diagram:
    b = Builder(calculus, fragment)
    v = b.add(kind, phase, id="s")
    for k in range(n_in):
        b.input(v, id=f"i{k}")
    for k in range(n_out):
        b.output(v, id=f"o{k}")
    return b.build()


def _fresh_names(taken: set[str], names: Iterable[str]) -> dict[str, str]:
    out = {}
    used = set(taken)
    for v in names:
        if v in used:
            k = 1
            while f"{v}_{k}" in used:
                k += 1
            out[v] = f"{v}_{k}"
            used.add(out[v])
        else:
            used.add(v)
    return out


def _disjoint(d1: Diagram, d2: Diagram) -> Diagram:
    ids = set(d2.vertices) | set(d2.bboxes)
    mapping = _fresh_names(set(d1.vertices) | set(d1.bboxes), sorted(ids))
    if not mapping:
        return d2
    d = d2.rename(mapping)
    bb = {mapping.get(k, k): BBox(b.vertices, mapping.get(b.parent, b.parent) if b.parent else None)
          for k, b in d.bboxes.items()}
    return d.replace(bboxes=bb)


def splice(vertices: dict, edges: list, pairs: Iterable[tuple[str, str]]) -> tuple[dict, list]:
    """Fuse each pair of degree-1 boundary vertices into a plain wire and delete them."""
    vertices = dict(vertices)
    edges = [tuple(e) for e in edges]
    loops = 0
    for b1, b2 in pairs:
        i1 = next(i for i, e in enumerate(edges) if e[0][0] == b1 or e[1][0] == b1)
        e1 = edges.pop(i1)
        other1 = e1[1] if e1[0][0] == b1 else e1[0]
        if other1[0] == b2:
            loops += 1
        else:
            i2 = next(i for i, e in enumerate(edges) if e[0][0] == b2 or e[1][0] == b2)
            e2 = edges.pop(i2)
            other2 = e2[1] if e2[0][0] == b2 else e2[0]
            edges.append((other1, other2))
        vertices.pop(b1, None)
        vertices.pop(b2, None)
    for k in range(loops):
        name = "loop"
        j = 0
        while name in vertices:
            j += 1
            name = f"loop{j}"
        vertices[name] = Vertex("Wire")
        edges.append(((name, 0), (name, 0)))
    return vertices, edges


def compose(d1: Diagram, d2: Diagram) -> Diagram:
    """d1 then d2 (outputs of d1 wired to inputs of d2)."""
    if len(d1.outputs) != len(d2.inputs):
        raise ValueError(f"arity mismatch: {len(d1.outputs)} outputs vs {len(d2.inputs)} inputs")
    d2 = _disjoint(d1, d2)
    vertices = {**d1.vertices, **d2.vertices}
    pairs = list(zip(d1.outputs, d2.inputs))
    vertices, edges = splice(vertices, list(d1.edges) + list(d2.edges), pairs)
    dead = {v for p in pairs for v in p}
    bboxes = {k: BBox(b.vertices - dead, b.parent) for k, b in {**d1.bboxes, **d2.bboxes}.items()}
    return Diagram(d1.calculus, vertices, edges, d1.inputs, d2.outputs, bboxes, d1.fragment or d2.fragment)


def tensor(d1: Diagram, d2: Diagram) -> Diagram:
    d2 = _disjoint(d1, d2)
    return Diagram(d1.calculus, {**d1.vertices, **d2.vertices}, list(d1.edges) + list(d2.edges),
                   d1.inputs + d2.inputs, d1.outputs + d2.outputs, {**d1.bboxes, **d2.bboxes},
                   d1.fragment or d2.fragment)


def compose_all(*ds: Diagram) -> Diagram:
    out = ds[0]
    for d in ds[1:]:
        out = compose(out, d)
    return out


def tensor_all(*ds: Diagram) -> Diagram:
    out = ds[0]
    for d in ds[1:]:
        out = tensor(out, d)
    return out


def dagger_shape(d: Diagram) -> Diagram:
    """Swap the roles of inputs and outputs (a transpose, phases untouched)."""
    vs = {v: (Vertex("BoundaryOut" if x.kind == "BoundaryIn" else "BoundaryIn", x.phase) if x.is_boundary else x)
          for v, x in d.vertices.items()}
    return d.replace(vertices=vs, inputs=d.outputs, outputs=d.inputs)


# -- !-boxes --------------------------------------------------------------

def descendants(d: Diagram, box: str) -> list[str]:
    out = []
    frontier = [box]
    while frontier:
        cur = frontier.pop()
        kids = sorted(k for k, b in d.bboxes.items() if b.parent == cur)
        out.extend(kids)
        frontier.extend(kids)
    return out


def instantiate_bbox(d: Diagram, box: str, count: int) -> Diagram:
    """Replace an outermost !-box by `count` copies of its contents.

    Copies of vertex v are named "v.k"; boundaries inside the box are expanded in
    place, copy by copy; nested boxes are copied with the same suffix and become
    outermost when their parent was `box`.
    """
    if box not in d.bboxes:
        raise KeyError(f"no !-box {box}")
    b = d.bboxes[box]
    if b.parent is not None:
        raise ValueError(f"!-box {box} is nested in {b.parent}; expand the outer box first")
    content = b.vertices
    vertices: dict[str, Vertex] = {}
    for v, x in d.vertices.items():
        if v in content:
            for k in range(count):
                vertices[f"{v}.{k}"] = x
        else:
            vertices[v] = x
    edges = []
    for a, c in d.edges:
        ia, ic = a[0] in content, c[0] in content
        if not ia and not ic:
            edges.append((a, c))
        elif ia and ic:
            edges.extend(((f"{a[0]}.{k}", a[1]), (f"{c[0]}.{k}", c[1])) for k in range(count))
        elif ia:
            edges.extend(((f"{a[0]}.{k}", a[1]), c) for k in range(count))
        else:
            edges.extend((a, (f"{c[0]}.{k}", c[1])) for k in range(count))

    def expand(bounds: tuple[str, ...]) -> list[str]:
        inside = [v for v in bounds if v in content]
        out, placed = [], False
        for v in bounds:
            if v in content:
                if not placed:
                    out.extend(f"{u}.{k}" for k in range(count) for u in inside)
                    placed = True
            else:
                out.append(v)
        return out

    desc = set(descendants(d, box))
    bboxes = {}
    for k_id, bb in d.bboxes.items():
        if k_id == box:
            continue
        if k_id in desc:
            for k in range(count):
                parent = None if bb.parent == box else f"{bb.parent}.{k}"
                bboxes[f"{k_id}.{k}"] = BBox(frozenset(f"{v}.{k}" for v in bb.vertices), parent)
        else:
            bboxes[k_id] = bb
    return Diagram(d.calculus, vertices, edges, expand(d.inputs), expand(d.outputs), bboxes, d.fragment)


def evaluate_vars(d: Diagram, assignment: Mapping[str, object]) -> Diagram:
    if not assignment:
        return d
    phases = {}
    for v, x in d.vertices.items():
        if x.phase is not None and hasattr(x.phase, "evaluate") and set(x.phase.vars()) & set(assignment):
            phases[v] = x.phase.evaluate(assignment)
    return d.with_phases(phases)


def join(d: Diagram, box: str) -> int:
    content = d.bboxes[box].vertices
    return sum(1 for a, b in d.edges if (a[0] in content) != (b[0] in content))


def nested(d: Diagram, inner: str, outer: str) -> bool:
    cur = d.bboxes[inner].parent
    while cur is not None:
        if cur == outer:
            return True
        cur = d.bboxes[cur].parent
    return False


def is_separated(d: Diagram) -> bool:
    return not separation_violations(d)


def separation_violations(d: Diagram) -> list[tuple[str, str]]:
    out = []
    keys = sorted(d.bboxes)
    for i, b1 in enumerate(keys):
        for b2 in keys[i + 1:]:
            if nested(d, b1, b2) or nested(d, b2, b1):
                continue
            s1, s2 = d.bboxes[b1].vertices, d.bboxes[b2].vertices
            if any((a[0] in s1 and c[0] in s2) or (a[0] in s2 and c[0] in s1) for a, c in d.edges):
                out.append((b1, b2))
    return out


def depth(d: Diagram, box: str) -> int:
    k, cur = 0, d.bboxes[box].parent
    while cur is not None:
        k += 1
        cur = d.bboxes[cur].parent
    return k


def nesting_order(d: Diagram) -> list[str]:
    """Outermost boxes first."""
    return sorted(d.bboxes, key=lambda b: (depth(d, b), b))


@dataclass(frozen=True)
class Skeleton:
    diagram: Diagram
    slots: tuple[str, ...]


def phase_slots(d: Diagram) -> list[str]:
    return [v for v, x in d.vertices.items() if x.phase is not None and not x.is_boundary]


def skeleton(d: Diagram) -> Skeleton:
    slots = phase_slots(d)
    erased = d.with_phases({v: None for v in slots})
    return Skeleton(erased, tuple(slots))


# -- validation -----------------------------------------------------------

def validate(d: Diagram) -> list[str]:
    errs: list[str] = []
    for a, b in d.edges:
        for end in (a, b):
            if end[0] not in d.vertices:
                errs.append(f"dangling edge: endpoint {end[0]!r} does not exist")
    if errs:
        return errs
    adj = d.adjacency()
    listed = set(d.inputs) | set(d.outputs)
    if len(listed) != len(d.inputs) + len(d.outputs):
        errs.append("boundary vertex listed twice")
    for v, x in d.vertices.items():
        if x.is_boundary:
            if v not in listed:
                errs.append(f"boundary vertex {v!r} not listed as input/output")
            if len(adj[v]) != 1:
                errs.append(f"boundary vertex {v!r} has degree {len(adj[v])}, expected 1")
        elif v in listed:
            errs.append(f"vertex {v!r} of kind {x.kind} listed as boundary")
        ports = [p for _, p, _ in adj[v]]
        if x.kind in PORTED_KINDS:
            want = list(range(PORTED_KINDS[x.kind]))
            if sorted(ports) != want:
                errs.append(f"{x.kind} vertex {v!r} needs ports {want}, has {sorted(ports)}")
        elif x.kind == "RingAdd":
            # inputs are symmetric, so copies made by !-box expansion may share a port number
            if ports.count(0) != 1:
                errs.append(f"RingAdd vertex {v!r} needs exactly one distinguished output (port 0)")
            if any(p < 0 for p in ports):
                errs.append(f"RingAdd vertex {v!r} uses a negative port")
        elif x.kind == "Hadamard" and len(ports) != 2:
            errs.append(f"Hadamard vertex {v!r} has degree {len(ports)}, expected 2")
        elif x.kind == "Wire" and len(ports) != 2:
            errs.append(f"Wire vertex {v!r} has degree {len(ports)}, expected 2")
        elif any(p != 0 for p in ports):
            errs.append(f"port-free vertex {v!r} uses a nonzero port")
    for k, b in d.bboxes.items():
        missing = [v for v in b.vertices if v not in d.vertices]
        if missing:
            errs.append(f"!-box {k!r} refers to missing vertices {sorted(missing)}")
        if b.parent is not None:
            if b.parent not in d.bboxes:
                errs.append(f"!-box {k!r} has unknown parent {b.parent!r}")
            elif not b.vertices <= d.bboxes[b.parent].vertices:
                errs.append(f"!-box {k!r} is not contained in its parent {b.parent!r}")
    keys = sorted(d.bboxes)
    for i, b1 in enumerate(keys):
        for b2 in keys[i + 1:]:
            s1, s2 = d.bboxes[b1].vertices, d.bboxes[b2].vertices
            if s1 & s2 and not (nested(d, b1, b2) or nested(d, b2, b1)):
                errs.append(f"!-boxes {b1!r} and {b2!r} overlap without nesting")
    return errs


# -- equations ------------------------------------------------------------

@dataclass
class Equation:
    lhs: Diagram
    rhs: Diagram
    bbox_pairing: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.lhs.arity != self.rhs.arity:
            raise ValueError(f"boundary arities differ: {self.lhs.arity} vs {self.rhs.arity}")

    @property
    def calculus(self) -> str:
        return self.lhs.calculus

    @property
    def fragment(self):
        return self.lhs.fragment or self.rhs.fragment

    def vars(self) -> list[str]:
        return sorted(self.lhs.vars() | self.rhs.vars())

    def is_simple(self) -> bool:
        return self.lhs.is_simple() and self.rhs.is_simple()

    def evaluate(self, assignment) -> "Equation":
        return Equation(evaluate_vars(self.lhs, assignment), evaluate_vars(self.rhs, assignment),
                        dict(self.bbox_pairing), self.name)

    def instantiate(self, lhs_box: str, count: int) -> "Equation":
        rhs_box = self.bbox_pairing.get(lhs_box)
        lhs = instantiate_bbox(self.lhs, lhs_box, count)
        rhs = instantiate_bbox(self.rhs, rhs_box, count) if rhs_box is not None else self.rhs
        pairing = {}
        for lb, rb in self.bbox_pairing.items():
            if lb == lhs_box:
                continue
            if lb in lhs.bboxes:
                pairing[lb] = rb
            else:
                for k in range(count):
                    if f"{lb}.{k}" in lhs.bboxes:
                        pairing[f"{lb}.{k}"] = f"{rb}.{k}"
        return Equation(lhs, rhs, pairing, self.name)

    def to_json(self) -> dict:
        return {"name": self.name, "lhs": self.lhs.to_json(), "rhs": self.rhs.to_json(),
                "bbox_pairing": dict(sorted(self.bbox_pairing.items()))}

    @classmethod
    def from_json(cls, obj) -> "Equation":
        for key in ("lhs", "rhs"):
            if key not in obj:
                raise DiagramFormatError(f"missing field '{key}'")
        try:
            lhs = Diagram.from_json(obj["lhs"])
        except DiagramFormatError as e:
            raise DiagramFormatError(f"lhs: {e}") from e
        try:
            rhs = Diagram.from_json(obj["rhs"])
        except DiagramFormatError as e:
            raise DiagramFormatError(f"rhs: {e}") from e
        pairing = obj.get("bbox_pairing")
        if pairing is None:
            pairing = {k: k for k in lhs.bboxes if k in rhs.bboxes}
        try:
            return cls(lhs, rhs, dict(pairing), obj.get("name", ""))
        except ValueError as e:
            raise DiagramFormatError(str(e)) from e
