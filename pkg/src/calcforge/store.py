"""Content-addressed theorem store: one JSON file per theorem plus an index; resumable."""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .diagram import Diagram

STORE_ENV = "CALCFORGE_STORE"
INDEX = "index.json"


def default_store_dir() -> Path | None:
    v = os.environ.get(STORE_ENV)
    return Path(v) if v else None


def digest(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode()
    return hashlib.sha256(data).hexdigest()[:24]


def _write_json(path: Path, obj) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False) + "\n")
    os.replace(tmp, path)


@dataclass
class Theorem:
    id: str
    provenance: str                 # simple | generalised-deduced | generalised-verified
    record: dict                    # equation JSON and metadata

    def to_json(self) -> dict:
        return {"id": self.id, "provenance": self.provenance, **self.record}


@dataclass
class TheoremStore:
    """fingerprint -> representative diagram; processed canonical keys; emitted theorems."""

    path: Path | None = None
    config_key: str = ""
    representatives: dict[str, dict] = field(default_factory=dict)
    processed: set[str] = field(default_factory=set)
    theorems: list[Theorem] = field(default_factory=list)
    subsumed: set[str] = field(default_factory=set)
    attempted: set[str] = field(default_factory=set)      # theorems already run through interpolation

    # -- persistence ---------------------------------------------------------
    @classmethod
    def open(cls, path: str | Path | None, config_key: str = "") -> "TheoremStore":
        if path is None:
            return cls(None, config_key)
        p = Path(path)
        (p / "theorems").mkdir(parents=True, exist_ok=True)
        idx = p / INDEX
        if not idx.exists():
            st = cls(p, config_key)
            st.save()
            return st
        obj = json.loads(idx.read_text())
        if config_key and obj.get("config_key") not in ("", config_key):
            raise ValueError(f"store {p} was created with a different configuration")
        st = cls(p, obj.get("config_key", config_key), dict(obj.get("representatives", {})),
                 set(obj.get("processed", [])), [], set(obj.get("subsumed", [])),
                 set(obj.get("attempted", [])))
        for tid in obj.get("theorems", []):
            rec = json.loads((p / "theorems" / f"{tid}.json").read_text())
            st.theorems.append(Theorem(rec.pop("id"), rec.pop("provenance"), rec))
        return st

    def save(self) -> None:
        if self.path is None:
            return
        from . import __version__
        _write_json(self.path / INDEX, {
            "version": __version__, "config_key": self.config_key,
            "representatives": dict(sorted(self.representatives.items())),
            "processed": sorted(self.processed), "subsumed": sorted(self.subsumed),
            "attempted": sorted(self.attempted),
            "theorems": [t.id for t in self.theorems]})

    # -- updates (single writer) ---------------------------------------------------
    def representative(self, fingerprint: str) -> Diagram | None:
        r = self.representatives.get(fingerprint)
        return Diagram.from_json(r["diagram"]) if r else None

    def set_representative(self, fingerprint: str, d: Diagram, key: str) -> None:
        self.representatives[fingerprint] = {"diagram": d.to_json(), "key": key}

    def add_theorem(self, provenance: str, record: dict) -> Theorem:
        t = Theorem(f"T{len(self.theorems):05d}", provenance, record)
        self.theorems.append(t)
        if self.path is not None:
            _write_json(self.path / "theorems" / f"{t.id}.json", t.to_json())
        return t

    def mark_processed(self, key: str) -> None:
        self.processed.add(key)
