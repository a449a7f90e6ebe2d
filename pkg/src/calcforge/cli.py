"""Command-line interface: interp, check-eq, verify, infer, translate, rules, synth, phasehom.

Exit codes: 0 success or Verified; 1 Refuted or unsound (a witness file is written);
2 usage errors, malformed input, or Inapplicable."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__

EXIT_OK, EXIT_REFUTED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- I/O helpers -------------------------------------------------------------------------

def _dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False, default=str) + "\n"


def _load_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from e


def _parse(path: str, fn):
    obj = _load_json(path)
    try:
        return fn(obj)
    except (KeyError, TypeError, ValueError) as e:
        msg = e.args[0] if e.args else str(e)
        raise UsageError(f"{path}: {msg}") from e


def _diagram(path: str):
    from .diagram import Diagram, validate
    d = _parse(path, Diagram.from_json)
    errs = validate(d)
    if errs:
        raise UsageError(f"{path}: {errs[0]}")
    return d


def _equation(path: str):
    from .diagram import Equation, validate
    eq = _parse(path, Equation.from_json)
    for side, d in (("lhs", eq.lhs), ("rhs", eq.rhs)):
        errs = validate(d)
        if errs:
            raise UsageError(f"{path}: {side}: {errs[0]}")
    return eq


def _emit(args, report: dict, summary: str) -> None:
    report = {"version": __version__, "command": args.command, **report}
    if args.report:
        Path(args.report).write_text(_dumps(report))
        print(summary)
    else:
        sys.stdout.write(_dumps(report))


def _witness_path(args, default_stem: str) -> Path:
    if getattr(args, "witness", None):
        return Path(args.witness)
    if args.report:
        return Path(args.report).with_suffix(".witness.json")
    return Path(f"{default_stem}.witness.json")


def _write_witness(args, eq_json: dict, stem: str) -> str:
    p = _witness_path(args, stem)
    p.write_text(_dumps(eq_json))
    print(f"witness written to {p}", file=sys.stderr)
    return str(p)


# -- commands ------------------------------------------------------------------------------------

def cmd_interp(args) -> int:
    from .interpret import interpret
    d = _diagram(args.diagram)
    m = interpret(d, args.mode)
    _emit(args, {"input": args.diagram, "mode": args.mode, "matrix": m.to_json()},
          m.to_text() if m.kind != "laurent" else "laurent matrix written")
    return EXIT_OK


def cmd_check_eq(args) -> int:
    from .verify import check_simple
    eq = _equation(args.equation)
    if not eq.is_simple():
        raise UsageError(f"{args.equation}: equation has variables or !-boxes; use 'calcforge verify'")
    ok, res, lam = check_simple(eq, args.policy)
    rep = {"input": args.equation, "policy": args.policy, "equal": bool(ok), "residual": float(res),
           "scalar": lam.to_json() if hasattr(lam, "to_json") else (None if lam is None else [lam.real, lam.imag])}
    _emit(args, rep, "equal" if ok else "not equal")
    return EXIT_OK if ok else EXIT_REFUTED


def cmd_verify(args) -> int:
    from .verify import verify
    eq = _equation(args.equation)
    v = verify(eq, args.mode, jobs=args.jobs)
    rep = {"input": args.equation, "mode": args.mode, "verdict": v.to_json()}
    if v.status == "Refuted":
        rep["witness_file"] = _write_witness(args, v.witness.to_json(), Path(args.equation).stem)
    _emit(args, rep, f"{v.status} ({v.method}, {len(v.certificate)} checks)")
    return {"Verified": EXIT_OK, "Refuted": EXIT_REFUTED}.get(v.status, EXIT_USAGE)


def _point(x):
    if isinstance(x, int):
        return x
    if isinstance(x, (str, float)):
        return Fraction(str(x))
    raise ValueError(f"bad coordinate {x!r}")


def cmd_infer(args) -> int:
    from .diagram import Equation
    from .paramspace import (AffineSubmodule, infer_full_linear, infer_sparse_linear, infer_sum,
                             parameter_space, submodule_to_rule)
    from .verify import verify
    obj = _load_json(args.input)
    try:
        eq = Equation.from_json(obj["equation"])
        space = parameter_space(eq)
        subs = []
        if "submodule" in obj:
            subs.append(("given", [], AffineSubmodule.from_json(obj["submodule"])))
        pts = [tuple(_point(x) for x in p) for p in obj.get("points", [])]
        for p in pts:
            if len(p) != len(space):
                raise ValueError(f"field 'points': point {list(p)} has {len(p)} coordinates, space has {len(space)}")
        if not subs and len(pts) < 2:
            raise ValueError("field 'points': need at least two points (or a 'submodule')")
    except KeyError as e:
        raise UsageError(f"{args.input}: missing field {e.args[0]!r}") from e
    except (TypeError, ValueError) as e:
        raise UsageError(f"{args.input}: {e}") from e
    pts = [space.reduce(p) for p in pts]
    want = {"full", "sparse", "sum"} if args.heuristic == "all" else {args.heuristic}
    fulls = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            p, q = pts[i], pts[j]
            if p == q:
                continue
            f = infer_full_linear(p, q, space.moduli)
            fulls.append(f)
            if "full" in want:
                subs.append(("full", [i, j], f))
            if "sparse" in want:
                s = infer_sparse_linear(p, q, space.moduli)
                if s is not None:
                    subs.append(("sparse", [i, j], s))
    if "sum" in want:
        for i in range(len(fulls)):
            for j in range(i + 1, len(fulls)):
                s = infer_sum(fulls[i], fulls[j])
                if s is not None:
                    subs.append(("sum", [i, j], s))
    out, refuted = [], False
    for how, src, sub in subs:
        rule = submodule_to_rule(eq, sub, space)
        item = {"heuristic": how, "from_points": src, "submodule": sub.to_json(), "rule": rule.to_json()}
        if args.verify:
            v = verify(rule, "auto", jobs=args.jobs)
            item["verdict"] = {"status": v.status, "method": v.method, "checks": len(v.certificate)}
            refuted |= v.status == "Refuted"
        out.append(item)
    _emit(args, {"input": args.input, "space": space.describe(), "moduli": space.moduli, "conjectures": out},
          f"{len(out)} conjecture(s)")
    return EXIT_OK


def cmd_translate(args) -> int:
    from .calculi import TranslationError, translate
    from .interpret import interpret, matrices_equal
    from .verify import has_float_constants
    d = _diagram(args.diagram)
    try:
        t = translate(d, args.to)
    except TranslationError as e:
        raise UsageError(f"{args.diagram}: {e}") from e
    rep = {"input": args.diagram, "target": args.to, "diagram": t.to_json()}
    code = EXIT_OK
    if args.check:
        floaty = has_float_constants(d) or has_float_constants(t)
        mode = "float" if floaty else "exact"
        c = matrices_equal(interpret(d, mode), interpret(t, mode), "tol=1e-9" if floaty else "exact")
        rep["check"] = {"equal": bool(c.equal), "mode": mode, "residual": float(c.residual)}
        code = EXIT_OK if c.equal else EXIT_REFUTED
    if args.output:
        Path(args.output).write_text(_dumps(t.to_json()))
    _emit(args, rep, f"translated {d.calculus} -> {args.to}")
    return code


def _ruleset(name: str):
    from .calculi import builtin_ruleset
    from .calculi.base import RuleSet
    if name.endswith(".json") or Path(name).exists():
        return _parse(name, RuleSet.from_json)
    try:
        return builtin_ruleset(name)
    except KeyError as e:
        raise UsageError(e.args[0]) from e


def cmd_rules(args) -> int:
    from .calculi import BUILTIN, check_soundness
    if args.action == "list":
        rows = [{"name": n, "rules": len(BUILTIN[n]()), "calculus": BUILTIN[n]().calculus} for n in sorted(BUILTIN)]
        _emit(args, {"rulesets": rows}, "\n".join(f"{r['name']}: {r['rules']} rules" for r in rows))
        return EXIT_OK
    if not args.name:
        raise UsageError(f"rules {args.action}: a rule set name or path is required")
    rs = _ruleset(args.name)
    if args.action == "show":
        _emit(args, {"ruleset": rs.to_json()}, f"{rs.name}: {', '.join(rs.names())}")
        return EXIT_OK
    if args.action == "check":
        rep = check_soundness(rs, seed=args.seed, jobs=args.jobs)
        bad = [e for e in rep["rules"] if e["status"] == "unsound"]
        code = EXIT_OK if rep["all_sound"] else (EXIT_REFUTED if bad else EXIT_USAGE)
        if bad and "witness" in bad[0]:
            rep["witness_file"] = _write_witness(args, bad[0]["witness"]["equation"], f"{rs.name}-{bad[0]['name']}")
        _emit(args, rep, f"{rs.name}: {sum(e['status'] == 'sound' for e in rep['rules'])}/{len(rep['rules'])} sound")
        return code
    if args.action == "normalize":
        from .rewrite import normalize
        if not args.diagram:
            raise UsageError("rules normalize: a diagram file is required")
        d = _diagram(args.diagram)
        r = normalize(d, list(rs.rules), fuel=args.fuel)
        _emit(args, {"input": args.diagram, "ruleset": rs.name, "steps": r.steps, "exhausted": r.exhausted,
                     "diagram": r.diagram.to_json()}, f"{len(r.steps)} step(s)" + (" (fuel exhausted)" if r.exhausted else ""))
        return EXIT_OK
    raise UsageError(f"unknown rules action {args.action!r}")


def cmd_synth(args) -> int:
    from .store import TheoremStore, default_store_dir
    from .synth import SynthConfig, SynthError, synth_run
    obj = _load_json(args.config) if args.config else {}
    try:
        cfg = SynthConfig.from_json({**obj, **({"jobs": args.jobs} if args.jobs > 1 else {})})
    except (SynthError, TypeError) as e:
        raise UsageError(f"{args.config}: {e}") from e
    where = args.store or default_store_dir()
    try:
        store = TheoremStore.open(where, cfg.key())
    except ValueError as e:
        raise UsageError(str(e)) from e
    res = synth_run(cfg, store)
    rep = {"config": cfg.to_json(), "store": str(where) if where else None, "summary": res.summary(),
           "emitted": [t["id"] for t in res.emitted], "generalised": [t["id"] for t in res.generalised]}
    _emit(args, rep, json.dumps(res.summary(), sort_keys=True))
    return EXIT_OK


def cmd_phasehom(args) -> int:
    from .calculi.phasehom import (PhaseHom, PhaseHomError, phase_hom_apply_equation, phase_hom_classify_zx,
                                   zx_multiplier_valid)
    if args.action == "classify":
        try:
            js = phase_hom_classify_zx(args.n)
        except PhaseHomError as e:
            raise UsageError(str(e)) from e
        oracle = [j for j in range(1, args.n) if zx_multiplier_valid(j, args.n)]
        _emit(args, {"n": args.n, "multipliers": js, "galois_oracle": oracle, "agree": js == oracle},
              f"n={args.n}: {js}")
        return EXIT_OK
    if not args.equation:
        raise UsageError("phasehom apply: an equation file is required")
    from .verify import check_simple
    eq = _equation(args.equation)
    h = PhaseHom(eq.calculus, j=args.j, N=args.N, k=args.k)
    try:
        img = phase_hom_apply_equation(h, eq)
    except PhaseHomError as e:
        raise UsageError(f"{args.equation}: {e}") from e
    rep = {"input": args.equation, "hom": h.to_json(), "image": img.to_json()}
    if eq.is_simple():
        rep["source_sound"] = bool(check_simple(eq, args.policy)[0])
        rep["image_sound"] = bool(check_simple(img, args.policy)[0])
    _emit(args, rep, "image written")
    return EXIT_OK


# -- parser -----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness (default 0)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--report", metavar="PATH", help="write the JSON report here instead of stdout")
    common.add_argument("--policy", default="exact", help="exact | scalar | tol=EPS")
    common.add_argument("--fuel", type=int, default=1000, help="rewrite step budget")

    p = argparse.ArgumentParser(prog="calcforge", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"calcforge {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("interp", parents=[common], help="interpret a diagram as a matrix")
    s.add_argument("diagram")
    s.add_argument("--mode", choices=["exact", "float"], default="exact")
    s.set_defaults(fn=cmd_interp)

    s = sub.add_parser("check-eq", parents=[common], help="compare the two sides of a simple equation")
    s.add_argument("equation")
    s.set_defaults(fn=cmd_check_eq)

    s = sub.add_parser("verify", parents=[common], help="verify a parameterised or !-boxed equation family")
    s.add_argument("equation")
    s.add_argument("--mode", choices=["grid", "galois", "auto"], default="auto")
    s.add_argument("--witness", metavar="PATH", help="where to write a refuting instance")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("infer", parents=[common], help="conjecture linear families from sound points")
    s.add_argument("input", help='JSON {"equation": ..., "points": [[...], ...]} or with "submodule"')
    s.add_argument("--heuristic", choices=["full", "sparse", "sum", "all"], default="all")
    s.add_argument("--verify", action="store_true", help="verify each conjecture")
    s.set_defaults(fn=cmd_infer)

    s = sub.add_parser("translate", parents=[common], help="translate a diagram between calculi")
    s.add_argument("diagram")
    s.add_argument("--to", required=True, choices=["zx", "zq", "ring", "zh", "zw"])
    s.add_argument("--check", action="store_true", help="compare interpretations")
    s.add_argument("-o", "--output", metavar="PATH", help="write the translated diagram here")
    s.set_defaults(fn=cmd_translate)

    s = sub.add_parser("rules", parents=[common], help="list, show, check or apply rule sets")
    s.add_argument("action", choices=["list", "show", "check", "normalize"])
    s.add_argument("name", nargs="?", help="builtin name or rule-set JSON path")
    s.add_argument("diagram", nargs="?", help="diagram for 'normalize'")
    s.add_argument("--witness", metavar="PATH")
    s.set_defaults(fn=cmd_rules)

    s = sub.add_parser("synth", parents=[common], help="run conjecture synthesis")
    s.add_argument("--config", metavar="PATH", help="SynthConfig JSON (defaults: Clifford ZX, 3 vertices)")
    s.add_argument("--store", metavar="DIR", help="theorem store directory (default $CALCFORGE_STORE)")
    s.set_defaults(fn=cmd_synth)

    s = sub.add_parser("phasehom", parents=[common], help="classify or apply phase homomorphisms")
    s.add_argument("action", choices=["classify", "apply"])
    s.add_argument("equation", nargs="?")
    s.add_argument("--n", type=int, default=8, help="fragment order for 'classify'")
    s.add_argument("--j", type=int, default=1, help="group multiplier")
    s.add_argument("--N", type=int, default=1, help="cyclotomic level for ring maps")
    s.add_argument("--k", type=int, default=1, help="ring map exponent (w_N -> w_N^k); -1 conjugates")
    s.set_defaults(fn=cmd_phasehom)
    return p


def _check_flags(args) -> None:
    from .interpret import parse_policy
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    if args.fuel < 0:
        raise UsageError("--fuel must be >= 0")
    try:
        parse_policy(args.policy)
    except ValueError as e:
        raise UsageError(f"--policy: {e}") from e


def main(argv: list[str] | None = None) -> int:
    from .diagram import DiagramFormatError
    args = build_parser().parse_args(argv)
    try:
        _check_flags(args)
        return args.fn(args)
    except UsageError as e:
        print(f"calcforge {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DiagramFormatError as e:
        print(f"calcforge {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
