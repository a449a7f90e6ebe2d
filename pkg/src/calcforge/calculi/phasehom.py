"""Phase homomorphisms: phase multipliers for ZX fragments and cyclotomic field maps for ring calculi."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from ..cyclo import CycloNumber, units
from ..diagram import Diagram, Equation
from ..phase import GroupPhase, RingPhase


class PhaseHomError(ValueError):
    pass


@dataclass(frozen=True)
class PhaseHom:
    """ZX: phase -> j * phase (on constants).  Ring calculi: omega_N -> omega_N^k on constants."""

    calculus: str
    j: int = 1          # ZX multiplier
    N: int = 1          # ring: conductor of the field map
    k: int = 1          # ring: exponent

    @classmethod
    def identity(cls, calculus: str) -> "PhaseHom":
        return cls(calculus)

    @classmethod
    def conjugation(cls, calculus: str, N: int = 1) -> "PhaseHom":
        if calculus == "zx":
            return cls(calculus, j=-1)
        return cls(calculus, N=N, k=-1)

    def to_json(self) -> dict:
        if self.calculus == "zx":
            return {"calculus": "zx", "j": self.j}
        return {"calculus": self.calculus, "N": self.N, "k": self.k}

    @classmethod
    def from_json(cls, obj) -> "PhaseHom":
        return cls(obj["calculus"], int(obj.get("j", 1)), int(obj.get("N", 1)), int(obj.get("k", 1)))

    # -- actions --
    def group(self, p: GroupPhase) -> GroupPhase:
        c = p.const * self.j if p.exact else float(p.const) * self.j
        return GroupPhase(c, p.coeffs)

    def cyclo(self, c: CycloNumber) -> CycloNumber:
        if self.k == -1:
            return c.conj()
        c = c.canonical()
        if c.n <= 2:
            return c
        if self.N % c.n:
            raise PhaseHomError(f"constant {c} does not lie in Q(omega_{self.N})")
        if gcd(self.k, self.N) != 1:
            raise PhaseHomError(f"k={self.k} is not a unit modulo {self.N}")
        return c.lift(self.N).galois(self.k % self.N)

    def ring(self, p: RingPhase) -> RingPhase:
        if p.exact:
            return p.map_constants(self.cyclo)
        if self.k != -1:
            raise PhaseHomError("only conjugation acts on float ring labels")
        return RingPhase.const(complex(p.value_f).conjugate())


def phase_hom_apply(h: PhaseHom, d: Diagram) -> Diagram:
    """Map every phase constant through h; the structure is unchanged."""
    if d.calculus != h.calculus and not (h.calculus in ("ring", "zh", "zw") and d.calculus in ("ring", "zh", "zw")):
        raise PhaseHomError(f"homomorphism for {h.calculus} applied to a {d.calculus} diagram")
    phases = {}
    for v, x in d.vertices.items():
        if isinstance(x.phase, GroupPhase):
            if d.calculus != "zx":
                raise PhaseHomError("group phases outside ZX")
            phases[v] = h.group(x.phase)
        elif isinstance(x.phase, RingPhase):
            phases[v] = h.ring(x.phase)
        elif x.phase is not None:
            raise PhaseHomError(f"phase homomorphisms do not act on {type(x.phase).__name__}")
    return d.with_phases(phases)


def phase_hom_apply_equation(h: PhaseHom, eq: Equation) -> Equation:
    return Equation(phase_hom_apply(h, eq.lhs), phase_hom_apply(h, eq.rhs), dict(eq.bbox_pairing), eq.name)


def phase_hom_classify_zx(n: int) -> list[int]:
    """Multipliers j in (Z/nZ)* that preserve soundness of every ZX equation over Z_n phases.

    j must lift to a Galois automorphism sigma_k of Q(omega_n) fixing sqrt 2, i.e. k = +-1 mod 8.
    """
    if n <= 0 or n % 8:
        raise PhaseHomError(f"classification needs 8 | n (got n={n})")
    return [j for j in units(n) if j % 8 in (1, 7)]


def zx_multiplier_valid(j: int, n: int) -> bool:
    """Independent check: the automorphism omega_{lcm(n,8)} -> ^j fixes sqrt2 = omega_8 + omega_8^-1."""
    m = n * 8 // gcd(n, 8)
    if gcd(j, m) != 1:
        return False
    r2 = CycloNumber.sqrt2().lift(m)
    return r2.galois(j % m) == r2


