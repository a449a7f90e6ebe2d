"""Rule sets: immutable named collections of rewrite rules."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..diagram import Builder, DiagramFormatError
from ..rewrite import RewriteRule


@dataclass(frozen=True)
class RuleSet:
    name: str
    calculus: str
    rules: tuple[RewriteRule, ...]
    fragment: int | str = "universal"     # phase group order n, or "universal"
    status: dict = field(default_factory=dict)   # rule name -> "axiom" | "derived"

    def __post_init__(self):
        names = [r.name for r in self.rules]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate rule names in {self.name}")

    def __getitem__(self, name: str) -> RewriteRule:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(r.name == name for r in self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    def names(self) -> list[str]:
        return [r.name for r in self.rules]

    def with_rules(self, rules) -> "RuleSet":
        return RuleSet(self.name, self.calculus, tuple(rules), self.fragment, dict(self.status))

    def to_json(self) -> dict:
        return {"name": self.name, "calculus": self.calculus, "fragment": self.fragment,
                "rules": [dict(r.to_json(), status=self.status.get(r.name, "axiom")) for r in self.rules]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, ensure_ascii=False)

    @classmethod
    def from_json(cls, obj: dict) -> "RuleSet":
        if "rules" not in obj:
            raise DiagramFormatError("missing field 'rules'")
        rules = []
        for k, r in enumerate(obj["rules"]):
            try:
                rules.append(RewriteRule.from_json(r))
            except DiagramFormatError as e:
                raise DiagramFormatError(f"rules[{k}]: {e}") from e
        calc = obj.get("calculus") or (rules[0].lhs.calculus if rules else "zx")
        status = {r["name"]: r.get("status", "axiom") for r in obj["rules"] if "name" in r}
        return cls(obj.get("name", ""), calc, tuple(rules), obj.get("fragment", "universal"), status)


def chain(b: Builder, start, kinds) -> str:
    """Attach a path of (kind, phase) generators after `start`; returns the last vertex."""
    cur = start
    for kind, phase in kinds:
        v = b.add(kind, phase)
        if kind == "QNode":
            b.edge(cur, (v, 0))
            cur = (v, 1)
        else:
            b.edge(cur, v)
            cur = v
    return cur
