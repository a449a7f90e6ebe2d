"""Builtin rule sets, their soundness checks, translations and phase homomorphisms."""
from __future__ import annotations

import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from ..cyclo import CycloNumber
from ..diagram import Equation
from ..phase import GroupPhase, QConst, QuatExpr, SConst
from ..quaternion import from_angle_axis_exact, quat_from_angle_vector
from ..rewrite import RewriteRule
from .base import RuleSet
from .phasehom import PhaseHom, phase_hom_apply, phase_hom_apply_equation, phase_hom_classify_zx
from .ring import ring
from .translate import (TranslationError, translate, translate_ring_zh, translate_ring_zw,
                        translate_zq_to_zx, translate_zx_to_zq)
from .zh import zh
from .zq import zq
from .zx import eu_prime_params, zx_vilmart

BUILTIN = {"zx_vilmart": zx_vilmart, "zq": zq, "ring": ring, "zh": zh}


def builtin_ruleset(name: str) -> RuleSet:
    if name not in BUILTIN:
        raise KeyError(f"unknown rule set {name!r}; choose from {sorted(BUILTIN)}")
    return BUILTIN[name]()


def bundled_ruleset(name: str) -> RuleSet:
    """The JSON bundle shipped with the package (kept identical to the builtin constructors)."""
    from importlib import resources
    path = resources.files("calcforge") / "data" / "rulesets" / f"{name}.json"
    if not path.is_file():
        raise KeyError(f"no bundled rule set {name!r}")
    return RuleSet.from_json(json.loads(path.read_text()))


# -- random instances ------------------------------------------------------------

_R2 = CycloNumber.sqrt2() * Fraction(1, 2)
_R3 = (CycloNumber.root(12, 1) + CycloNumber.root(12, 11)) * Fraction(1, 3)    # 1/sqrt3
_ZERO = CycloNumber.zero()
EXACT_AXES = ["x", "y", "z", "h", (_R2, _R2, _ZERO), (_ZERO, _R2, _R2), (Fraction(1, 2), Fraction(1, 2), _R2),
              (_R3, _R3, _R3)]
ANGLE_DENOMINATORS = (1, 2, 3, 4, 6, 8, 12)


def random_exact_quaternion(rng: random.Random, axis=None):
    den = rng.choice(ANGLE_DENOMINATORS)
    angle = Fraction(rng.randrange(4 * den), den)
    ax = axis or rng.choice(EXACT_AXES)
    if not isinstance(ax, str):
        signs = [rng.choice((1, -1)) for _ in range(3)]
        ax = tuple(CycloNumber.coerce(c) * s for c, s in zip(ax, signs))
    return from_angle_axis_exact(angle, ax)


def random_float_quaternion(rng: random.Random, axis=None):
    v = np.array(axis, dtype=float) if axis is not None else np.array([rng.gauss(0, 1) for _ in range(3)])
    v /= np.linalg.norm(v)
    return quat_from_angle_vector(rng.uniform(0, 4 * math.pi), v)


def random_exact_scalar(rng: random.Random) -> CycloNumber:
    a, b = rng.randint(-3, 3), rng.randint(-3, 3)
    if a == 0 and b == 0:
        a = 1
    c = (CycloNumber.rational(a) + CycloNumber.sqrt2() * b) * Fraction(1, rng.randint(1, 4))
    return c * CycloNumber.exp_i_pi(Fraction(rng.randrange(16), 8))


def _sample(rule: RewriteRule, kinds: dict, rng: random.Random, exact: bool) -> dict:
    z_only = rule.meta.get("condition") == "z_rotation"
    out = {}
    for v, kind in sorted(kinds.items()):
        if kind == "quat":
            if exact:
                q = random_exact_quaternion(rng, "z" if z_only else None)
            else:
                q = random_float_quaternion(rng, (0, 0, 1) if z_only else None)
            out[v] = QConst(q)
        elif kind == "scalar":
            out[v] = SConst(random_exact_scalar(rng) if exact else complex(rng.gauss(0, 1), rng.gauss(0, 1)))
        elif kind == "group":
            out[v] = GroupPhase(Fraction(rng.randrange(48), 24) if exact else rng.uniform(0, 2))
        else:
            out[v] = rng.choice([CycloNumber.rational(rng.randint(-4, 4)), random_exact_scalar(rng)]) if exact \
                else complex(rng.gauss(0, 1), rng.gauss(0, 1))
    return out


def _instance(rule: RewriteRule, rng: random.Random, k_max: int) -> tuple[Equation, dict]:
    """A simple instance: random !-box counts in 0..k_max."""
    eq = rule.equation()
    counts = {}
    while eq.lhs.bboxes:
        from ..diagram import nesting_order
        box = nesting_order(eq.lhs)[0]
        counts[box] = rng.randint(0, k_max)
        eq = eq.instantiate(box, counts[box])
    return eq, counts


def _sampled_check(rule: RewriteRule, n_exact: int, n_float: int, seed: int) -> dict:
    from ..diagram import evaluate_vars
    from ..verify import check_simple, var_kinds
    rng = random.Random(f"{seed}:{rule.name}")
    entry = {"name": rule.name, "method": "sampled", "exact_instances": 0, "float_instances": 0, "max_residual": 0.0}
    for exact, n in ((True, n_exact), (False, n_float)):
        for _ in range(n):
            eq, counts = _instance(rule, rng, 3)
            asg = _sample(rule, var_kinds(eq), rng, exact)
            if rule.derive is not None:
                asg = rule.derive(asg)
            inst = Equation(evaluate_vars(eq.lhs, asg), evaluate_vars(eq.rhs, asg), {}, rule.name)
            policy = "exact" if exact else "tol=1e-9"
            ok, res, _ = check_simple(inst, policy)
            entry["exact_instances" if exact else "float_instances"] += 1
            entry["max_residual"] = max(entry["max_residual"], float(res))
            if not ok:
                entry.update(status="unsound", witness={
                    "assignment": {k: v.to_json() for k, v in sorted(asg.items()) if hasattr(v, "to_json")},
                    "bbox": counts, "equation": inst.to_json()})
                return entry
    entry["status"] = "sound"
    return entry


def _eu_check(rule: RewriteRule, n_float: int, seed: int) -> dict:
    """EU' has computed parameters: pinned points plus random float angles, at 1e-9."""
    from ..diagram import evaluate_vars
    from ..verify import check_simple
    rng = random.Random(f"{seed}:{rule.name}")
    pts = [(0.0, 0.0), (math.pi, math.pi), (math.pi / 2, 0.0), (0.0, math.pi)]
    pts += [(rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)) for _ in range(n_float)]
    entry = {"name": rule.name, "method": "sampled", "exact_instances": 0, "float_instances": 0, "max_residual": 0.0}
    eq = rule.equation()
    for a1, a2 in pts:
        asg = rule.derive({"a1": GroupPhase(a1 / math.pi), "a2": GroupPhase(a2 / math.pi)})
        inst = Equation(evaluate_vars(eq.lhs, asg), evaluate_vars(eq.rhs, asg), {}, rule.name)
        ok, res, _ = check_simple(inst, "tol=1e-9")
        entry["float_instances"] += 1
        entry["max_residual"] = max(entry["max_residual"], float(res))
        if not ok:
            entry.update(status="unsound", witness={"assignment": {"a1": a1, "a2": a2}, "equation": inst.to_json()})
            return entry
    entry["status"] = "sound"
    return entry


def check_rule(rule: RewriteRule, n_exact: int = 50, n_float: int = 200, seed: int = 0) -> dict:
    from ..verify import var_kinds, verify
    if rule.derive is not None:
        return _eu_check(rule, n_float, seed)
    eq = rule.equation()
    kinds = var_kinds(eq)
    if rule.lhs.calculus == "zq" or any(k in ("quat", "scalar") for k in kinds.values()):
        entry = _sampled_check(rule, n_exact, n_float, seed)
        if entry["status"] == "sound" and rule.lhs.bboxes and not kinds:
            v = verify(eq, "grid")
            entry["bbox_bounds"] = v.bbox_bounds
            entry["certificate_size"] = len(v.certificate)
            if not v.verified:
                entry["status"] = "unsound" if v.status == "Refuted" else "inapplicable"
        return entry
    v = verify(eq, "auto")
    entry = {"name": rule.name, "method": v.method, "checks": len(v.certificate),
             "max_residual": max((float(c.get("residual", 0.0)) for c in v.certificate), default=0.0),
             "status": {"Verified": "sound", "Refuted": "unsound"}.get(v.status, "inapplicable")}
    if v.grid_sizes:
        entry["grid_sizes"] = v.grid_sizes
    if v.bbox_bounds:
        entry["bbox_bounds"] = v.bbox_bounds
    if v.reason:
        entry["reason"] = v.reason
    if v.witness is not None:
        entry["witness"] = {"assignment": v.witness_assignment, "equation": v.witness.to_json()}
    return entry


def _check_star(args):
    return check_rule(*args)


def check_soundness(rs: RuleSet, n_exact: int = 50, n_float: int = 200, seed: int = 0, jobs: int = 1) -> dict:
    """Per-rule soundness report; deterministic for a fixed seed."""
    tasks = [(r, n_exact, n_float, seed) for r in rs.rules]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            entries = list(ex.map(_check_star, tasks))
    else:
        entries = [check_rule(*t) for t in tasks]
    for e in entries:
        e["kind"] = rs.status.get(e["name"], "axiom")
    return {"ruleset": rs.name, "calculus": rs.calculus, "seed": seed,
            "all_sound": all(e["status"] == "sound" for e in entries), "rules": entries}


__all__ = ["RuleSet", "builtin_ruleset", "bundled_ruleset", "check_soundness", "check_rule", "eu_prime_params",
           "translate", "translate_zx_to_zq", "translate_zq_to_zx", "translate_ring_zh", "translate_ring_zw",
           "TranslationError", "PhaseHom", "phase_hom_apply", "phase_hom_apply_equation", "phase_hom_classify_zx",
           "random_exact_quaternion", "random_float_quaternion", "QuatExpr"]
