"""calcforge: exact interpretation, rewriting, inference and finite verification of graphical-calculus equations."""
from __future__ import annotations

__version__ = "0.1.0"
