"""Tagged exact/float scalar with explicit one-way promotion."""
from __future__ import annotations

from dataclasses import dataclass

from .cyclo import CycloNumber


@dataclass(frozen=True)
class ScalarValue:
    value: CycloNumber | complex

    @classmethod
    def exact(cls, v) -> "ScalarValue":
        return cls(CycloNumber.coerce(v))

    @classmethod
    def float(cls, v) -> "ScalarValue":
        return cls(complex(v))

    @property
    def is_exact(self) -> bool:
        return isinstance(self.value, CycloNumber)

    def to_float(self) -> "ScalarValue":
        return ScalarValue(self.value.to_complex()) if self.is_exact else self

    def _check(self, other: "ScalarValue"):
        if self.is_exact != other.is_exact:
            raise TypeError("mixing exact and float scalars; promote with to_float() first")

    def __add__(self, other: "ScalarValue") -> "ScalarValue":
        self._check(other)
        return ScalarValue(self.value + other.value)

    def __sub__(self, other: "ScalarValue") -> "ScalarValue":
        self._check(other)
        return ScalarValue(self.value - other.value)

    def __mul__(self, other: "ScalarValue") -> "ScalarValue":
        self._check(other)
        return ScalarValue(self.value * other.value)

    def __truediv__(self, other: "ScalarValue") -> "ScalarValue":
        self._check(other)
        if self.is_exact:
            return ScalarValue(self.value / other.value)
        if other.value == 0:
            raise ZeroDivisionError("float scalar division by zero")
        return ScalarValue(self.value / other.value)

    def __complex__(self):
        return complex(self.value)

    def to_json(self):
        if self.is_exact:
            return {"exact": self.value.to_json()}
        return {"float": [self.value.real, self.value.imag]}

    @classmethod
    def from_json(cls, obj) -> "ScalarValue":
        if "exact" in obj:
            return cls(CycloNumber.from_json(obj["exact"]))
        re, im = obj["float"]
        return cls(complex(re, im))
