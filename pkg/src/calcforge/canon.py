"""Canonical byte strings for small diagrams (individualisation-refinement)."""
from __future__ import annotations

import json

from .diagram import Diagram

EXACT_LIMIT = 10


def _phase_key(x) -> str:
    return json.dumps(x.phase.to_json(), sort_keys=True, ensure_ascii=False) if x.phase is not None else ""


def _refine(d: Diagram, colors: dict[str, tuple]) -> dict[str, int]:
    adj = d.adjacency()
    cur = _compress(colors)
    while True:
        sig = {}
        for v in cur:
            nb = sorted((p, cur[o[0]], o[1]) for _, p, o in adj[v])
            sig[v] = (cur[v], tuple(nb))
        nxt = _compress(sig)
        if len(set(nxt.values())) == len(set(cur.values())):
            return nxt
        cur = nxt


def _compress(sig: dict) -> dict[str, int]:
    keys = sorted(set(sig.values()))
    rank = {k: i for i, k in enumerate(keys)}
    return {v: rank[s] for v, s in sig.items()}


def _encode(d: Diagram, order: list[str]) -> str:
    label = {v: ("v", k) for k, v in enumerate(order)}
    for k, v in enumerate(d.inputs):
        label[v] = ("i", k)
    for k, v in enumerate(d.outputs):
        label[v] = ("o", k)
    verts = [[d.vertices[v].kind, _phase_key(d.vertices[v])] for v in order]
    edges = sorted(sorted([[*label[a[0]], a[1]], [*label[b[0]], b[1]]]) for a, b in d.edges)
    boxes = sorted(sorted(label[v][1] if label[v][0] == "v" else -1 for v in b.vertices) for b in d.bboxes.values())
    return json.dumps({"c": d.calculus, "v": verts, "e": edges, "n": [len(d.inputs), len(d.outputs)], "b": boxes},
                      separators=(",", ":"), ensure_ascii=False)


def canonical_form(d: Diagram) -> tuple[bytes, list[str], bool]:
    """(bytes, canonical interior order, exact?) -- exact for at most EXACT_LIMIT interior vertices."""
    base = {}
    for v, x in d.vertices.items():
        if x.kind == "BoundaryIn":
            base[v] = (0, d.inputs.index(v), "", "", 0)
        elif x.kind == "BoundaryOut":
            base[v] = (1, d.outputs.index(v), "", "", 0)
        else:
            depth = sum(1 for b in d.bboxes.values() if v in b.vertices)
            base[v] = (2, 0, x.kind, _phase_key(x), depth)
    interior = [v for v in d.vertices if not d.vertices[v].is_boundary]
    colors = _refine(d, base)
    if len(interior) > EXACT_LIMIT:
        order = sorted(interior, key=lambda v: (colors[v], v))
        return _encode(d, order).encode(), order, False
    best: list = [None, None]

    def search(cols: dict[str, int]):
        cells: dict[int, list[str]] = {}
        for v in interior:
            cells.setdefault(cols[v], []).append(v)
        target = next((c for c in sorted(cells) if len(cells[c]) > 1), None)
        if target is None:
            order = sorted(interior, key=lambda v: cols[v])
            enc = _encode(d, order)
            if best[0] is None or enc < best[0]:
                best[0], best[1] = enc, order
            return
        for v in sorted(cells[target]):
            sig = {u: (cols[u], 0 if u == v else 1) for u in cols}
            search(_refine(d, sig))

    search(colors)
    return best[0].encode(), best[1], True


def canonical_bytes(d: Diagram) -> bytes:
    return canonical_form(d)[0]
