"""Exact arithmetic in cyclotomic fields Q(w_N).

Elements are stored in the power basis 1, w, ..., w^(phi(N)-1) modulo the
N-th cyclotomic polynomial, as integer numerators over one positive common
denominator.  Numbers with different conductors are combined in the field of
the lcm conductor.
"""
from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from numbers import Rational
from typing import Iterable, Sequence

import sympy


@lru_cache(maxsize=None)
def totient(n: int) -> int:
    return int(sympy.totient(n))


@lru_cache(maxsize=None)
def cyclotomic_coeffs(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first."""
    x = sympy.Symbol("x")
    poly = sympy.Poly(sympy.cyclotomic_poly(n, x), x)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


@lru_cache(maxsize=None)
def power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row k holds the power-basis coordinates of w_n^k for k = 0..n-1."""
    phi = totient(n)
    phi_c = cyclotomic_coeffs(n)
    cur = [0] * phi
    cur[0] = 1
    rows = []
    for _ in range(n):
        rows.append(tuple(cur))
        top = cur[-1]
        nxt = [0] + cur[:-1]
        if top:
            for j in range(phi):
                nxt[j] -= top * phi_c[j]
        cur = nxt
    return tuple(rows)


@lru_cache(maxsize=None)
def units(n: int) -> tuple[int, ...]:
    return tuple(k for k in range(1, n + 1) if gcd(k, n) == 1) if n > 1 else (1,)


def _normalise(nums: list[int], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        nums = [-a for a in nums]
        den = -den
    g = den
    for a in nums:
        if a:
            g = gcd(g, a)
            if g == 1:
                break
    if g > 1:
        nums = [a // g for a in nums]
        den //= g
    return tuple(nums), den


class CycloNumber:
    """An element of Q(w_N) with canonical power-basis coordinates."""

    __slots__ = ("n", "c", "d", "_hash")

    def __init__(self, n: int, nums: Sequence[int], den: int = 1):
        if len(nums) != totient(n):
            raise ValueError(f"need {totient(n)} coordinates for conductor {n}")
        self.n = n
        self.c, self.d = _normalise(list(nums), den)
        self._hash = None

    # -- constructors -------------------------------------------------
    @classmethod
    def rational(cls, q, n: int = 1) -> "CycloNumber":
        q = Fraction(q)
        nums = [0] * totient(n)
        nums[0] = q.numerator
        return cls(n, nums, q.denominator)

    @classmethod
    def zero(cls, n: int = 1) -> "CycloNumber":
        return cls(n, [0] * totient(n))

    @classmethod
    def one(cls, n: int = 1) -> "CycloNumber":
        return cls.rational(1, n)

    @classmethod
    def root(cls, n: int, k: int = 1) -> "CycloNumber":
        """w_n^k."""
        return cls(n, power_table(n)[k % n])

    @classmethod
    def exp_i_pi(cls, q) -> "CycloNumber":
        """e^{i pi q} for rational q."""
        q = Fraction(q)
        return cls.root(2 * q.denominator, q.numerator)

    @classmethod
    def from_powers(cls, n: int, coeffs: Iterable, den: int = 1) -> "CycloNumber":
        """sum_k coeffs[k] w_n^k / den (group-ring coordinates, k = 0..n-1)."""
        table = power_table(n)
        phi = totient(n)
        acc = [0] * phi
        for k, a in enumerate(coeffs):
            if a:
                row = table[k % n]
                a = int(a)
                for j in range(phi):
                    if row[j]:
                        acc[j] += a * row[j]
        return cls(n, acc, den)

    @classmethod
    def sqrt2(cls) -> "CycloNumber":
        return cls.from_powers(8, [0, 1, 0, 0, 0, 0, 0, 1])

    @classmethod
    def i(cls) -> "CycloNumber":
        return cls.root(4, 1)

    @staticmethod
    def coerce(x) -> "CycloNumber":
        if isinstance(x, CycloNumber):
            return x
        if isinstance(x, (int, Rational)):
            return CycloNumber.rational(x)
        raise TypeError(f"cannot treat {type(x).__name__} as an exact cyclotomic number")

    # -- structure ----------------------------------------------------
    def lift(self, m: int) -> "CycloNumber":
        """Same value, conductor m (a multiple of n)."""
        if m == self.n:
            return self
        if m % self.n:
            raise ValueError(f"conductor {m} is not a multiple of {self.n}")
        step = m // self.n
        table = power_table(m)
        phi = totient(m)
        acc = [0] * phi
        for j, a in enumerate(self.c):
            if a:
                row = table[j * step]
                for t in range(phi):
                    if row[t]:
                        acc[t] += a * row[t]
        return CycloNumber(m, acc, self.d)

    def _pair(self, other) -> tuple["CycloNumber", "CycloNumber"]:
        other = CycloNumber.coerce(other)
        if other.n == self.n:
            return self, other
        m = lcm(self.n, other.n)
        return self.lift(m), other.lift(m)

    def is_zero(self) -> bool:
        return not any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not rational")
        return Fraction(self.c[0], self.d)

    def galois(self, k: int) -> "CycloNumber":
        """The automorphism w_n -> w_n^k (k coprime to n)."""
        if gcd(k, self.n) != 1:
            raise ValueError(f"{k} is not a unit modulo {self.n}")
        table = power_table(self.n)
        phi = len(self.c)
        acc = [0] * phi
        for j, a in enumerate(self.c):
            if a:
                row = table[(j * k) % self.n]
                for t in range(phi):
                    if row[t]:
                        acc[t] += a * row[t]
        return CycloNumber(self.n, acc, self.d)

    def conj(self) -> "CycloNumber":
        return self.galois(-1 % self.n) if self.n > 2 else self

    def real(self) -> "CycloNumber":
        return (self + self.conj()) * Fraction(1, 2)

    def imag(self) -> "CycloNumber":
        return (self - self.conj()) * CycloNumber.i().conj() * Fraction(1, 2)

    def is_real(self) -> bool:
        return self == self.conj()

    def minimal_conductor(self) -> int:
        n = self.n
        for m in sorted(sympy.divisors(n)):
            if m % 4 == 2:
                continue
            if all(self.galois(k) == self for k in units(n) if k % m == 1 % m and k != 1):
                return m
        return n

    def descend(self, m: int) -> "CycloNumber":
        """Re-express in Q(w_m), m | n; raises if the value is not in that field."""
        if m == self.n:
            return self
        step = self.n // m
        table = power_table(self.n)
        phi_m = totient(m)
        # columns: images of the basis of Q(w_m); solve L b = c exactly
        cols = [table[j * step] for j in range(phi_m)]
        rows = len(self.c)
        mat = [[Fraction(cols[j][r]) for j in range(phi_m)] + [Fraction(self.c[r], self.d)] for r in range(rows)]
        piv_row = 0
        pivots = []
        for col in range(phi_m):
            sel = next((r for r in range(piv_row, rows) if mat[r][col] != 0), None)
            if sel is None:
                continue
            mat[piv_row], mat[sel] = mat[sel], mat[piv_row]
            pv = mat[piv_row][col]
            mat[piv_row] = [v / pv for v in mat[piv_row]]
            for r in range(rows):
                if r != piv_row and mat[r][col] != 0:
                    f = mat[r][col]
                    mat[r] = [a - f * b for a, b in zip(mat[r], mat[piv_row])]
            pivots.append(col)
            piv_row += 1
        for r in range(piv_row, rows):
            if mat[r][-1] != 0:
                raise ValueError(f"value not in Q(w_{m})")
        sol = [Fraction(0)] * phi_m
        for r, col in enumerate(pivots):
            sol[col] = mat[r][-1]
        den = lcm(*(s.denominator for s in sol)) if sol else 1
        return CycloNumber(m, [int(s * den) for s in sol], den)

    def canonical(self) -> "CycloNumber":
        return self.descend(self.minimal_conductor())

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        try:
            a, b = self._pair(other)
        except TypeError:
            return NotImplemented
        den = a.d * b.d // gcd(a.d, b.d)
        fa, fb = den // a.d, den // b.d
        return CycloNumber(a.n, [x * fa + y * fb for x, y in zip(a.c, b.c)], den)

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(self.n, [-x for x in self.c], self.d)

    def __sub__(self, other):
        try:
            return self + (-CycloNumber.coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return CycloNumber.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, CycloNumber):
            q = Fraction(other)
            return CycloNumber(self.n, [x * q.numerator for x in self.c], self.d * q.denominator)
        try:
            a, b = self._pair(other)
        except TypeError:
            return NotImplemented
        n = a.n
        phi = len(a.c)
        prod = [0] * (2 * phi - 1)
        for i, x in enumerate(a.c):
            if x:
                for j, y in enumerate(b.c):
                    if y:
                        prod[i + j] += x * y
        acc = prod[:phi]
        table = power_table(n)
        for k in range(phi, len(prod)):
            v = prod[k]
            if v:
                row = table[k % n]
                for t in range(phi):
                    if row[t]:
                        acc[t] += v * row[t]
        return CycloNumber(n, acc, a.d * b.d)

    __rmul__ = __mul__

    def inverse(self) -> "CycloNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        if self.is_rational():
            q = 1 / Fraction(self.c[0], self.d)
            return CycloNumber.rational(q, self.n)
        b = CycloNumber.one(self.n)
        for k in units(self.n):
            if k != 1 % self.n:
                b = b * self.galois(k)
        norm = (self * b).to_fraction()
        return b * (1 / norm)

    def __truediv__(self, other):
        other = CycloNumber.coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return CycloNumber.coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = CycloNumber.one(self.n)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        try:
            a, b = self._pair(other)
        except TypeError:
            if isinstance(other, complex | float):
                return False
            return NotImplemented
        return a.d == b.d and a.c == b.c

    def __hash__(self):
        if self._hash is None:
            c = self.canonical()
            self._hash = hash((c.n, c.c, c.d))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    # -- conversion ---------------------------------------------------
    def to_complex(self) -> complex:
        w = cmath.exp(2j * cmath.pi / self.n)
        acc = 0j
        p = 1 + 0j
        for a in self.c:
            if a:
                acc += a * p
            p *= w
        return acc / self.d

    def __complex__(self):
        return self.to_complex()

    def to_json(self) -> dict:
        return {"n": self.n, "c": [str(Fraction(a, self.d)) for a in self.c]}

    @classmethod
    def from_json(cls, obj) -> "CycloNumber":
        if isinstance(obj, (int, str)):
            return cls.rational(Fraction(obj))
        fr = [Fraction(s) for s in obj["c"]]
        den = lcm(*(f.denominator for f in fr)) if fr else 1
        return cls(int(obj["n"]), [int(f * den) for f in fr], den)

    def __repr__(self):
        if self.is_rational():
            return f"CycloNumber({Fraction(self.c[0], self.d)})"
        terms = []
        for j, a in enumerate(self.c):
            if a:
                terms.append(f"{Fraction(a, self.d)}*w{self.n}^{j}")
        return "CycloNumber(" + " + ".join(terms) + ")"


def common_conductor(values: Iterable) -> int:
    m = 1
    for v in values:
        if isinstance(v, CycloNumber):
            m = lcm(m, v.n)
    return m
