"""Exact and float tensors plus tensor-network contraction.

Exact tensors live in the group ring Q[Z_N] (coefficient of w_N^k for k < N) with
optional Laurent grade axes, one per phase variable.  Integer numerators share
a common denominator.  Contraction multiplies group-ring coefficients by
cyclic convolution; comparison reduces modulo Phi_N.
"""
from __future__ import annotations

from functools import reduce
from math import gcd, lcm
from typing import Sequence

import numpy as np

from .cyclo import CycloNumber, power_table, totient
from .laurent import LaurentPoly
from . import _backend

_INT_LIMIT = 2 ** 62


def _maxabs(arr: np.ndarray) -> int:
    if arr.size == 0:
        return 0
    if arr.dtype == object:
        return max((abs(int(x)) for x in arr.flat), default=0)
    return int(np.max(np.abs(arr)))


def _gcd_all(arr: np.ndarray, start: int) -> int:
    if arr.dtype == object:
        return reduce(gcd, (int(x) for x in arr.flat if x), start)
    nz = arr[arr != 0]
    if nz.size == 0:
        return start
    return gcd(int(np.gcd.reduce(np.abs(nz))), start)


class GTensor:
    """arr has shape (N, *grade sizes, *legs); value = sum_k w_N^k Y^(low+e) arr[k, e, legs] / den."""

    __slots__ = ("N", "vars", "low", "arr", "den")

    def __init__(self, N: int, vars: tuple[str, ...], low: tuple[int, ...], arr: np.ndarray, den: int = 1):
        self.N = N
        self.vars = vars
        self.low = tuple(low)
        self.arr = arr
        self.den = den

    @property
    def ngrade(self) -> int:
        return 1 + len(self.vars)

    @property
    def legs(self) -> int:
        return self.arr.ndim - self.ngrade

    # -- construction -------------------------------------------------
    @classmethod
    def from_entries(cls, nlegs: int, entries: Sequence[tuple[tuple[int, ...], object]],
                     vars: tuple[str, ...] = (), N: int | None = None) -> "GTensor":
        """Entries map leg indices to CycloNumber / LaurentPoly / rational coefficients."""
        terms = []  # (legs, k-conductor-pair list, exps, num, den)
        conductors = [1]
        lows = [0] * len(vars)
        highs = [0] * len(vars)
        norm_entries = []
        for idx, c in entries:
            poly = c if isinstance(c, LaurentPoly) else LaurentPoly.const(c)
            poly = poly.with_vars(tuple(sorted(set(poly.vars) | set(vars)))) if poly.vars != vars else poly
            if set(poly.vars) - set(vars):
                raise ValueError(f"unexpected variables {set(poly.vars) - set(vars)}")
            poly = poly.with_vars(vars)
            for e, coeff in poly.terms.items():
                conductors.append(coeff.n)
                for j, x in enumerate(e):
                    lows[j] = min(lows[j], x)
                    highs[j] = max(highs[j], x)
            norm_entries.append((idx, poly))
        n = N or lcm(*conductors)
        sizes = [h - l + 1 for l, h in zip(lows, highs)]
        den = 1
        for _, poly in norm_entries:
            for coeff in poly.terms.values():
                den = lcm(den, coeff.d)
        arr = np.zeros((n, *sizes, *([2] * nlegs)), dtype=np.int64)
        big = False
        cells = []
        for idx, poly in norm_entries:
            for e, coeff in poly.terms.items():
                c = coeff.lift(n) if n % coeff.n == 0 else None
                if c is None:
                    raise ValueError("conductor does not divide N")
                f = den // c.d
                grade = tuple(x - l for x, l in zip(e, lows))
                for j, a in enumerate(c.c):
                    if a:
                        v = a * f
                        big |= abs(v) >= _INT_LIMIT
                        cells.append(((j, *grade, *idx), v))
        if big:
            arr = arr.astype(object)
        for pos, v in cells:
            arr[pos] += v
        return cls(n, tuple(vars), tuple(lows), arr, den)

    @classmethod
    def scalar(cls, c=1) -> "GTensor":
        return cls.from_entries(0, [((), c)])

    # -- alignment ----------------------------------------------------
    def lift(self, M: int) -> "GTensor":
        if M == self.N:
            return self
        step = M // self.N
        arr = np.zeros((M, *self.arr.shape[1:]), dtype=self.arr.dtype)
        arr[::step] = self.arr
        return GTensor(M, self.vars, self.low, arr, self.den)

    def align_vars(self, vars: tuple[str, ...], low: tuple[int, ...], sizes: tuple[int, ...]) -> "GTensor":
        """Embed into a (larger) grade window for `vars`."""
        vars, low, sizes = tuple(vars), tuple(low), tuple(sizes)
        if vars == self.vars and low == self.low and sizes == self.arr.shape[1:self.ngrade]:
            return self
        src = self.arr
        own, own_low = list(self.vars), list(self.low)
        for v in list(own):
            if v not in vars:
                j = own.index(v)
                if src.shape[1 + j] != 1 or own_low[j] != 0:
                    raise ValueError(f"cannot drop variable {v} with nonzero degree")
                src = np.take(src, 0, axis=1 + j)
                own.pop(j)
                own_low.pop(j)
        for v in vars:
            if v not in own:
                src = np.expand_dims(src, 1 + len(own))
                own.append(v)
                own_low.append(0)
        perm = [own.index(v) for v in vars]
        nl = src.ndim - 1 - len(own)
        src = np.transpose(src, [0, *(1 + p for p in perm), *range(1 + len(own), 1 + len(own) + nl)])
        lows = [own_low[p] for p in perm]
        arr = np.zeros((self.N, *sizes, *src.shape[1 + len(vars):]), dtype=src.dtype)
        sl = [slice(None)]
        for l0, lt, s, cap in zip(lows, low, src.shape[1:1 + len(vars)], sizes):
            off = l0 - lt
            if off < 0 or off + s > cap:
                raise ValueError("grade window too small")
            sl.append(slice(off, off + s))
        arr[tuple(sl)] = src
        return GTensor(self.N, vars, low, arr, self.den)

    def simplify(self) -> "GTensor":
        g = _gcd_all(self.arr, self.den)
        if g > 1:
            return GTensor(self.N, self.vars, self.low, self.arr // g, self.den // g)
        return self

    def _maybe_object(self, other: "GTensor") -> tuple[np.ndarray, np.ndarray]:
        a, b = self.arr, other.arr
        if a.dtype == object or b.dtype == object:
            return a.astype(object), b.astype(object)
        return a, b

    # -- operations ---------------------------------------------------
    def contract(self, other: "GTensor", ax_a: Sequence[int], ax_b: Sequence[int]) -> "GTensor":
        """Contract leg axes ax_a of self with ax_b of other; result legs = self's free then other's."""
        A, B = self, other
        if A.vars != B.vars:
            vs = tuple(sorted(set(A.vars) | set(B.vars)))
            A = A.align_vars(vs, *_window(A, vs))
            B = B.align_vars(vs, *_window(B, vs))
        if A.N != B.N:
            M = lcm(A.N, B.N)
            A, B = A.lift(M), B.lift(M)
        N = A.N
        ga = A.ngrade
        a_arr, b_arr = A._maybe_object(B)
        k = int(np.prod([a_arr.shape[ga + i] for i in ax_a])) if ax_a else 1
        grade_terms = int(np.prod(a_arr.shape[:ga]))
        bound = _maxabs(a_arr) * _maxabs(b_arr) * max(k, 1) * grade_terms
        if bound >= _INT_LIMIT and a_arr.dtype != object:
            a_arr, b_arr = a_arr.astype(object), b_arr.astype(object)
        ax_a_abs = [ga + i for i in ax_a]
        ax_b_abs = [ga + i for i in ax_b]
        if len(A.vars) == 0:
            out = _backend.cyclic_tensordot(a_arr, b_arr, ax_a_abs, ax_b_abs, N)
            low = ()
        else:
            gsa, gsb = a_arr.shape[1:ga], b_arr.shape[1:ga]
            gs = tuple(x + y - 1 for x, y in zip(gsa, gsb))
            free_a = [s for i, s in enumerate(a_arr.shape[ga:]) if i not in ax_a]
            free_b = [s for i, s in enumerate(b_arr.shape[ga:]) if i not in ax_b]
            out = np.zeros((N, *gs, *free_a, *free_b), dtype=a_arr.dtype)
            # B with its N axis and grade axes kept in front
            for g in np.ndindex(*a_arr.shape[:ga]):
                slab = a_arr[g]
                if not np.any(slab):
                    continue
                t = np.tensordot(slab, b_arr, axes=(list(ax_a), [ga + i for i in ax_b]))
                # t shape: free_a + (N, *gsb) + free_b ; move B grade to front
                nfa = len(free_a)
                t = np.moveaxis(t, list(range(nfa, nfa + ga)), list(range(ga)))
                t = np.roll(t, g[0], axis=0)
                sl = (slice(None),) + tuple(slice(o, o + s) for o, s in zip(g[1:], gsb))
                out[sl] += t
            low = tuple(x + y for x, y in zip(A.low, B.low))
        return GTensor(N, A.vars, low, out, A.den * B.den).simplify()

    def trace(self, i: int, j: int) -> "GTensor":
        g = self.ngrade
        arr = np.trace(self.arr, axis1=g + i, axis2=g + j)
        return GTensor(self.N, self.vars, self.low, arr, self.den)

    def transpose(self, perm: Sequence[int]) -> "GTensor":
        g = self.ngrade
        return GTensor(self.N, self.vars, self.low,
                       np.transpose(self.arr, list(range(g)) + [g + p for p in perm]), self.den)

    def scale_int(self, k: int) -> "GTensor":
        return GTensor(self.N, self.vars, self.low, self.arr * k, self.den)

    def neg(self) -> "GTensor":
        return GTensor(self.N, self.vars, self.low, -self.arr, self.den)

    def sub(self, other: "GTensor") -> "GTensor":
        A, B = _align_pair(self, other)
        a, b = A._maybe_object(B)
        den = lcm(A.den, B.den)
        return GTensor(A.N, A.vars, A.low, a * (den // A.den) - b * (den // B.den), den)

    def reduced(self) -> np.ndarray:
        """Numerators in the power basis mod Phi_N: shape (phi(N), *grade, *legs)."""
        R = np.array(power_table(self.N), dtype=object if self.arr.dtype == object else np.int64)
        arr = self.arr
        if arr.dtype != object and _maxabs(arr) * self.N * max(1, _maxabs(R)) >= _INT_LIMIT:
            arr, R = arr.astype(object), R.astype(object)
        return np.tensordot(R.T, arr, axes=([1], [0]))

    def is_zero(self) -> bool:
        return not np.any(self.reduced())

    def fold_var(self, var: str, n: int) -> "GTensor":
        """Reduce exponents of `var` modulo Y^n - 1."""
        j = self.vars.index(var)
        ax = 1 + j
        shape = list(self.arr.shape)
        shape[ax] = n
        out = np.zeros(shape, dtype=self.arr.dtype)
        for e in range(self.arr.shape[ax]):
            tgt = (self.low[j] + e) % n
            src = np.take(self.arr, e, axis=ax)
            idx = [slice(None)] * len(shape)
            idx[ax] = tgt
            out[tuple(idx)] += src
        low = list(self.low)
        low[j] = 0
        return GTensor(self.N, self.vars, tuple(low), out, self.den)

    # -- entries ------------------------------------------------------
    def entry(self, legs: Sequence[int]):
        """CycloNumber (no variables) or LaurentPoly at the given leg indices."""
        g = self.ngrade
        sub = self.arr[(Ellipsis, *legs)] if legs else self.arr
        assert sub.ndim == g
        if not self.vars:
            return CycloNumber.from_powers(self.N, [int(x) for x in sub], self.den)
        terms = {}
        for e in np.ndindex(*sub.shape[1:]):
            col = sub[(slice(None), *e)]
            if np.any(col):
                c = CycloNumber.from_powers(self.N, [int(x) for x in col], self.den)
                if not c.is_zero():
                    terms[tuple(l + x for l, x in zip(self.low, e))] = c
        return LaurentPoly(self.vars, terms)

    def to_complex(self, assignment: dict | None = None) -> np.ndarray:
        w = np.exp(2j * np.pi * np.arange(self.N) / self.N)
        arr = self.arr.astype(np.float64) if self.arr.dtype != object else np.array(self.arr, dtype=float)
        out = np.tensordot(w, arr, axes=([0], [0]))
        for j, v in enumerate(self.vars):
            y = complex((assignment or {})[v])
            powers = y ** (self.low[j] + np.arange(out.shape[0]))
            out = np.tensordot(powers, out, axes=([0], [0]))
        return out / self.den

    def evaluate(self, assignment: dict) -> "GTensor":
        """Substitute exact values (CycloNumber) for all variables."""
        if not self.vars:
            return self
        g = self.ngrade
        legs = self.arr.shape[g:]
        entries = []
        for idx in np.ndindex(*legs):
            p = self.entry(idx)
            val = p.evaluate(assignment)
            if not val.is_zero():
                entries.append((idx, val))
        return GTensor.from_entries(len(legs), entries)


def _window(t: GTensor, vs: tuple[str, ...]):
    low, sizes = [], []
    for v in vs:
        if v in t.vars:
            j = t.vars.index(v)
            low.append(t.low[j])
            sizes.append(t.arr.shape[1 + j])
        else:
            low.append(0)
            sizes.append(1)
    return tuple(low), tuple(sizes)


def _align_pair(A: GTensor, B: GTensor) -> tuple[GTensor, GTensor]:
    vs = tuple(sorted(set(A.vars) | set(B.vars)))
    if vs:
        la, sa = _window(A, vs)
        lb, sb = _window(B, vs)
        low = tuple(min(x, y) for x, y in zip(la, lb))
        high = tuple(max(x + s, y + t) for x, s, y, t in zip(la, sa, lb, sb))
        sizes = tuple(h - l for h, l in zip(high, low))
        A, B = A.align_vars(vs, low, sizes), B.align_vars(vs, low, sizes)
    if A.N != B.N:
        M = lcm(A.N, B.N)
        A, B = A.lift(M), B.lift(M)
    return A, B


class FTensor:
    """Float tensor with the same contraction interface."""

    __slots__ = ("arr",)

    def __init__(self, arr: np.ndarray):
        self.arr = np.asarray(arr, dtype=complex)

    @property
    def legs(self) -> int:
        return self.arr.ndim

    @classmethod
    def from_entries(cls, nlegs: int, entries) -> "FTensor":
        arr = np.zeros([2] * nlegs, dtype=complex)
        for idx, c in entries:
            arr[tuple(idx)] += complex(c)
        return cls(arr)

    def contract(self, other: "FTensor", ax_a, ax_b) -> "FTensor":
        return FTensor(np.tensordot(self.arr, other.arr, axes=(list(ax_a), list(ax_b))))

    def trace(self, i: int, j: int) -> "FTensor":
        return FTensor(np.trace(self.arr, axis1=i, axis2=j))

    def transpose(self, perm) -> "FTensor":
        return FTensor(np.transpose(self.arr, list(perm)))


def contract_network(nodes: list[tuple[object, list]], open_labels: list, unit) -> object:
    """Contract tensors whose legs carry labels; shared labels are summed.

    `open_labels` fixes the order of the result's legs.  Greedy pairwise order:
    always contract the pair sharing labels whose result has the fewest legs.
    """
    work = []
    for t, labels in nodes:
        t, labels = _self_traces(t, list(labels))
        work.append((t, labels))
    if not work:
        return unit
    while len(work) > 1:
        best = None
        for i in range(len(work)):
            li = set(work[i][1])
            for j in range(i + 1, len(work)):
                shared = li & set(work[j][1])
                if not shared:
                    continue
                size = len(work[i][1]) + len(work[j][1]) - 2 * len(shared)
                key = (size, i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
        if best is None:
            # disconnected: outer product of the two smallest tensors
            order = sorted(range(len(work)), key=lambda k: (len(work[k][1]), k))
            i, j = sorted(order[:2])
        else:
            _, i, j = best
        (a, la), (b, lb) = work[i], work[j]
        shared = [x for x in la if x in lb]
        # a label may appear once per tensor here (self-pairs were traced away)
        ax_a = [la.index(x) for x in shared]
        ax_b = [lb.index(x) for x in shared]
        t = a.contract(b, ax_a, ax_b)
        labels = [x for x in la if x not in shared] + [x for x in lb if x not in shared]
        t, labels = _self_traces(t, labels)
        work = [w for k, w in enumerate(work) if k not in (i, j)] + [(t, labels)]
    t, labels = work[0]
    if sorted(labels) != sorted(open_labels):
        raise ValueError("open labels do not match the network")
    perm = [labels.index(x) for x in open_labels]
    return t.transpose(perm) if perm != list(range(len(perm))) else t


def _self_traces(t, labels: list):
    while True:
        dup = next((x for x in labels if labels.count(x) == 2), None)
        if dup is None:
            return t, labels
        i = labels.index(dup)
        j = labels.index(dup, i + 1)
        t = t.trace(i, j)
        labels = [x for k, x in enumerate(labels) if k not in (i, j)]
