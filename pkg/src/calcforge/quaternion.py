"""Quaternions as rotations: Hamilton product, SU(2) image, ZXZ Euler angles."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cyclo import CycloNumber

TAU = 2 * math.pi


def _is_exact(v) -> bool:
    return isinstance(v, CycloNumber)


class Quaternion:
    """w + x i + y j + z k with all-exact (real CycloNumber) or all-float parts."""

    __slots__ = ("w", "x", "y", "z")

    def __init__(self, w, x, y, z):
        parts = [w, x, y, z]
        if any(_is_exact(p) for p in parts):
            parts = [CycloNumber.coerce(p) for p in parts]
        else:
            parts = [float(p) for p in parts]
        self.w, self.x, self.y, self.z = parts

    @property
    def exact(self) -> bool:
        return _is_exact(self.w)

    def parts(self) -> tuple:
        return (self.w, self.x, self.y, self.z)

    @classmethod
    def one(cls, exact: bool = True) -> "Quaternion":
        if exact:
            o, z = CycloNumber.one(), CycloNumber.zero()
            return cls(o, z, z, z)
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def hadamard(cls) -> "Quaternion":
        """The rotation by pi about (x+z)/sqrt2."""
        h = CycloNumber.sqrt2() * Fraction(1, 2)
        zero = CycloNumber.zero()
        return cls(zero, h, zero, h)

    def __mul__(self, o: "Quaternion") -> "Quaternion":
        a1, b1, c1, d1 = self.parts()
        a2, b2, c2, d2 = o.parts()
        if self.exact != o.exact:
            raise TypeError("cannot mix exact and float quaternions; call to_float() first")
        return Quaternion(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def tilde(self) -> "Quaternion":
        """Negate the j component; the SU(2) image is transposed."""
        return Quaternion(self.w, self.x, -self.y, self.z)

    def norm2(self):
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def to_float(self) -> "Quaternion":
        if not self.exact:
            return self
        return Quaternion(*(p.to_complex().real for p in self.parts()))

    def as_array(self) -> np.ndarray:
        return np.array([p.to_complex().real if self.exact else p for p in self.parts()])

    def __eq__(self, o):
        if not isinstance(o, Quaternion):
            return NotImplemented
        if self.exact and o.exact:
            return self.parts() == o.parts()
        return bool(np.allclose(self.as_array(), o.as_array(), atol=1e-12))

    def __hash__(self):
        return hash(self.parts()) if self.exact else hash(tuple(np.round(self.as_array(), 9)))

    def isclose(self, o: "Quaternion", tol: float = 1e-9) -> bool:
        return float(np.max(np.abs(self.as_array() - o.as_array()))) <= tol

    def __repr__(self):
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"

    def to_json(self):
        if self.exact:
            return [p.to_json() for p in self.parts()]
        return [float(p) for p in self.parts()]

    @classmethod
    def from_json(cls, obj) -> "Quaternion":
        if isinstance(obj, dict):
            axis = obj["axis"]
            angle = obj["angle"]
            if isinstance(angle, str):
                from .phase import parse_pi_fraction
                frac = parse_pi_fraction(angle)
                if isinstance(axis, str):
                    return from_angle_axis_exact(frac, axis)
                return quat_from_angle_vector(float(frac) * math.pi, axis)
            return quat_from_angle_vector(float(angle), axis)
        if all(isinstance(p, dict) for p in obj):
            return cls(*(CycloNumber.from_json(p) for p in obj))
        return cls(*(float(p) for p in obj))


def quat_mul(q1: Quaternion, q2: Quaternion) -> Quaternion:
    return q1 * q2


def quat_from_angle_vector(alpha: float, v: Sequence[float]) -> Quaternion:
    """cos(a/2) + sin(a/2)(v_x i + v_y j + v_z k) for a unit vector v."""
    v = [float(t) for t in v]
    if abs(math.sqrt(sum(t * t for t in v)) - 1.0) > 1e-12:
        raise ValueError(f"axis {v} is not a unit vector")
    c, s = math.cos(alpha / 2), math.sin(alpha / 2)
    return Quaternion(c, s * v[0], s * v[1], s * v[2])


def cos_pi(q) -> CycloNumber:
    """cos(q*pi) exactly."""
    return CycloNumber.exp_i_pi(q).real()


def sin_pi(q) -> CycloNumber:
    return CycloNumber.exp_i_pi(q).imag()


_AXES = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}


def from_angle_axis_exact(angle_pi, axis) -> Quaternion:
    """Rotation by angle_pi*pi about a coordinate axis ("x", "y", "z") or an exact unit vector."""
    half = Fraction(angle_pi) / 2
    c, s = cos_pi(half), sin_pi(half)
    if isinstance(axis, str):
        if axis == "h":
            r = CycloNumber.sqrt2() * Fraction(1, 2)
            vec = (r, CycloNumber.zero(), r)
        else:
            vec = tuple(CycloNumber.rational(t) for t in _AXES[axis])
    else:
        vec = tuple(CycloNumber.coerce(t) for t in axis)
        if vec[0] * vec[0] + vec[1] * vec[1] + vec[2] * vec[2] != 1:
            raise ValueError("axis is not a unit vector")
    return Quaternion(c, s * vec[0], s * vec[1], s * vec[2])


def quat_to_su2(q: Quaternion):
    """w I - i (x X + y Y + z Z): a group homomorphism onto SU(2).

    Exact quaternions give a 2x2 nested list of CycloNumber; float ones a numpy array.
    """
    if q.exact:
        i = CycloNumber.i()
        return [[q.w - i * q.z, -q.y - i * q.x],
                [q.y - i * q.x, q.w + i * q.z]]
    w, x, y, z = q.parts()
    return np.array([[w - 1j * z, -y - 1j * x], [y - 1j * x, w + 1j * z]], dtype=complex)


def quat_euler_zxz(q: Quaternion) -> tuple[float, float, float]:
    """(alpha, beta, gamma) with q = (alpha,z)(beta,x)(gamma,z).

    alpha in [0, 2pi), beta in [0, pi], gamma in [0, 4pi).  beta = 0 or pi forces gamma
    to 0 (or 2pi when needed to keep the sign of q).
    """
    w, x, y, z = q.to_float().parts()
    cb = math.hypot(w, z)
    sb = math.hypot(x, y)
    beta = 2 * math.atan2(sb, cb)
    eps = 1e-12
    if sb <= eps:
        alpha, gamma = 2 * math.atan2(z, w), 0.0
    elif cb <= eps:
        alpha, gamma = 2 * math.atan2(y, x), 0.0
    else:
        s, d = math.atan2(z, w), math.atan2(y, x)
        alpha, gamma = s + d, s - d
    # alpha mod 2pi; each 2pi shift of alpha flips the sign, compensated on gamma
    k = math.floor(alpha / TAU)
    alpha -= k * TAU
    gamma += k * TAU
    gamma %= 2 * TAU
    if alpha >= TAU - 1e-15:
        alpha = 0.0
        gamma = (gamma + TAU) % (2 * TAU)
    return alpha, beta, gamma


def euler_recompose(alpha: float, beta: float, gamma: float) -> Quaternion:
    z, x = (0.0, 0.0, 1.0), (1.0, 0.0, 0.0)
    return quat_from_angle_vector(alpha, z) * quat_from_angle_vector(beta, x) * quat_from_angle_vector(gamma, z)


def complex_canonical_form(c: complex) -> tuple[int, float, float]:
    """(n, alpha, beta) with c = sqrt2^n e^{i alpha} cos beta and n minimal."""
    c = complex(c)
    r = abs(c)
    if r == 0:
        return 0, 0.0, math.pi / 2
    n = math.ceil(2 * math.log2(r))
    while math.sqrt(2) ** (n - 1) >= r:
        n -= 1
    while math.sqrt(2) ** n < r:
        n += 1
    alpha = math.atan2(c.imag, c.real) % TAU
    ratio = min(1.0, r / math.sqrt(2) ** n)
    return n, alpha, math.acos(ratio)
