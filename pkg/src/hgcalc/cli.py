"""Command-line interface: ``hgcalc <subcommand> ...``.

Exit codes: 0 success, 1 mathematical or validation failure, 2 malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .coeffring import format_rational, parse_rational
from .dgca import ModelError, build_builtin, load_json, model_from_dict, validate
from .hairygraph import GraphError, HairyGraph
from .hgcomplex import (GraphComplex, GraphVector, LinfTable, ce_cohomology, default_threads,
                        enumerate_basis, extract_linf, homology, twist as make_twist)
from .mcgauge import (classify_system, degree_zero_tree_basis, gauge_path, gauge_path_check,
                      mc_candidate, mc_obstruction_system, utt_h0, verify_mc)
from .hgcomplex import curvature

DEFAULTS = {"deg": "-2:4", "kmax": 4, "format": "json", "emax": None, "threads": None,
            "output": None, "algebra": None, "n": None}


class InputError(Exception):
    """Malformed input (exit code 2)."""


class MathFailure(Exception):
    """A mathematical check failed (exit code 1); carries the report."""

    def __init__(self, message: str, report: Optional[dict] = None):
        super().__init__(message)
        self.report = report


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algebra", help="builtin:SPEC or a model JSON file")
    common.add_argument("-n", type=int, help="ambient dimension n")
    common.add_argument("--deg", help="degree interval a:b (default -2:4)")
    common.add_argument("--emax", type=int, help="override the edge bound")
    common.add_argument("--kmax", type=int, help="largest bracket arity (default 4)")
    common.add_argument("--format", choices=["text", "json", "csv"], help="report format (default json)")
    common.add_argument("--threads", type=int, help="worker count (default HGCALC_THREADS or all cores)")
    common.add_argument("--output", help="write the report to this file")
    common.add_argument("--config", help="JSON file presetting any of the flags above")

    p = argparse.ArgumentParser(prog="hgcalc", description="Decorated hairy graph complexes over Q.")
    sub = p.add_subparsers(dest="command", required=True)

    alg = sub.add_parser("algebra", help="algebra models")
    alg_sub = alg.add_subparsers(dest="action", required=True)
    val = alg_sub.add_parser("validate", parents=[common], help="check the axioms of a model")
    val.add_argument("path", nargs="?", help="model JSON file (or use --algebra)")

    sub.add_parser("basis", parents=[common], help="enumerate the graph basis of a window")
    hom = sub.add_parser("homology", parents=[common], help="homology ranks and representatives")
    hom.add_argument("--twist", help="JSON file with a Maurer-Cartan element to twist by")
    hom.add_argument("--allow-uncertified", action="store_true", help="report uncertified degrees")

    mc = sub.add_parser("mc", help="Maurer-Cartan elements")
    mc_sub = mc.add_subparsers(dest="action", required=True)
    mc_sub.add_parser("classify", parents=[common], help="obstruction system on the degree-0 tree basis")
    ver = mc_sub.add_parser("verify", parents=[common], help="check that an element is Maurer-Cartan")
    ver.add_argument("--element", required=True, help="JSON file with the element")
    gc = mc_sub.add_parser("gauge-check", parents=[common], help="check a path over Q[t, dt]")
    gc.add_argument("--path", required=True, help="JSON file with the path")

    utt = sub.add_parser("utt", help="unitrivalent trees modulo IHX")
    utt_sub = utt.add_subparsers(dest="action", required=True)
    utt_sub.add_parser("h0", parents=[common], help="rank of H_0 of the UTT complex")

    ce = sub.add_parser("ce", parents=[common], help="Chevalley-Eilenberg cohomology ranks")
    ce.add_argument("--table", help="L-infinity table JSON (otherwise extracted from the window)")
    ce.add_argument("--positive", action="store_true", help="positive truncation (ker ell_1 in degree 1)")
    ce.add_argument("--ce-bound", type=int, default=4, help="largest CE degree reported (default 4)")
    ce.add_argument("--twist", help="JSON file with a Maurer-Cartan element to twist by")
    return p


def resolve_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags from --config, then from the defaults (flags win)."""
    preset = {}
    if getattr(args, "config", None):
        data = read_json(args.config)
        if not isinstance(data, dict):
            raise InputError("config file must contain a JSON object")
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise InputError(f"unknown config keys {sorted(unknown)}")
        preset = data
    for key, default in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, preset.get(key, default))
    if args.threads is None:
        args.threads = default_threads()
    return args


def read_json(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def load_algebra(source: Optional[str]):
    if not source:
        raise InputError("an algebra source is required (--algebra builtin:SPEC or a file)")
    if source.startswith("builtin:"):
        try:
            return build_builtin(source)
        except (ModelError, ValueError) as exc:
            raise InputError(str(exc)) from exc
    try:
        return load_json(source)
    except ModelError as exc:
        raise InputError(str(exc)) from exc


def parse_window(text: str):
    try:
        a, b = text.split(":")
        a, b = int(a), int(b)
    except ValueError as exc:
        raise InputError(f"degree interval must look like a:b, got {text!r}") from exc
    if a > b:
        raise InputError(f"empty degree interval {text!r}")
    return a, b


def need_n(args) -> int:
    if args.n is None:
        raise InputError("-n is required")
    if args.n < 4:
        print(f"warning: n = {args.n} < 4; no edge bound is available", file=sys.stderr)
    return int(args.n)


def parse_graph(obj) -> HairyGraph:
    try:
        if isinstance(obj, str):
            return HairyGraph.from_text(obj)
        return HairyGraph.from_json(obj)
    except (GraphError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"bad graph {obj!r}: {exc}") from exc


def load_vector(cx: GraphComplex, path: str, ring=None, coefficient=None) -> GraphVector:
    data = read_json(path)
    if isinstance(data, dict) and "terms" in data:
        data = data["terms"]
    if not isinstance(data, list):
        raise InputError("an element file holds a list of {graph, coeff} terms")
    terms = {}
    for t in data:
        if not isinstance(t, dict) or "graph" not in t or "coeff" not in t:
            raise InputError("terms need 'graph' and 'coeff'")
        g = parse_graph(t["graph"])
        try:
            c = coefficient(t["coeff"]) if coefficient else parse_rational(t["coeff"])
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad coefficient {t['coeff']!r}") from exc
        if g in terms:
            raise InputError(f"graph {t['graph']!r} listed twice")
        terms[g] = c
    try:
        if ring is not None:
            return cx.vector(terms, ring)
        return cx.vector(terms)
    except GraphError as exc:
        raise InputError(str(exc)) from exc


def vector_json(v: GraphVector) -> List[dict]:
    out = []
    for k, c in v.sorted_items():
        text = str(c)
        out.append({"graph": k, "coeff": text})
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> dict:
    source = args.path or args.algebra
    if not source:
        raise InputError("give a model file or --algebra")
    if source.startswith("builtin:"):
        model = load_algebra(source)
    else:
        data = read_json(source)
        try:
            model = model_from_dict(data)
        except ModelError as exc:
            raise InputError(str(exc)) from exc
    problems = validate(model)
    report = {"model": model.name, "valid": not problems, "violations": problems}
    if problems:
        raise MathFailure(f"model {model.name} violates {problems[0]['axiom']}", report)
    return report


def _window(args, extra: int = 0, low: Optional[int] = None):
    model = load_algebra(args.algebra)
    n = need_n(args)
    a, b = parse_window(args.deg)
    lo = a - extra if low is None else low
    try:
        w = enumerate_basis(model, n, (lo, max(b + extra, lo)), max_edges=args.emax, threads=args.threads)
    except ValueError as exc:
        raise MathFailure(str(exc))
    return model, n, a, b, w


def _window_head(model, n, w) -> dict:
    return {"n": n, "model": model.name, "maxEdges": w.max_edges}


def cmd_basis(args) -> dict:
    model, n, a, b, w = _window(args)
    report = _window_head(model, n, w)
    report["degrees"] = {str(d): {"dim": w.dim(d), "certified": w.certified[d], "graphs": w.basis[d]}
                         for d in range(a, b + 1)}
    return report


def cmd_homology(args) -> dict:
    model, n, a, b, w = _window(args, extra=1)
    tw = None
    if args.twist:
        m = load_vector(w.complex, args.twist)
        try:
            tw = make_twist(m, k_max=args.kmax)
        except ValueError as exc:
            raise MathFailure(str(exc))
    try:
        res = homology(w, twist=tw, degrees=range(a, b + 1), allow_uncertified=args.allow_uncertified)
    except ValueError as exc:
        raise MathFailure(str(exc))
    report = _window_head(model, n, w)
    report["twisted"] = tw is not None
    report["degrees"] = {str(d): {"dim": r["dim"], "certified": r["certified"], "homologyRank": r["homologyRank"],
                                  "representatives": [vector_json(v) for v in r["representatives"]]}
                         for d, r in res.items()}
    return report


def cmd_mc_classify(args) -> dict:
    model = load_algebra(args.algebra)
    n = need_n(args)
    try:
        cx = GraphComplex(model, n)
        basis = degree_zero_tree_basis(model, n, cx, threads=args.threads)
        c, ring, names = mc_candidate(cx, basis)
        system = mc_obstruction_system(c)
    except ValueError as exc:
        raise MathFailure(str(exc))
    solutions = classify_system(system)
    return {"model": model.name, "n": n,
            "basis": [{"graph": k, "parameter": nm} for k, nm in zip(basis, names)],
            "obstructions": system.to_json(), "solutions": solutions, "gaugeChecks": []}


def cmd_mc_verify(args) -> dict:
    model = load_algebra(args.algebra)
    n = need_n(args)
    cx = GraphComplex(model, n)
    m = load_vector(cx, args.element)
    try:
        ok = verify_mc(m)
        U = curvature(m, k_max=max(args.kmax, 1)) if not ok else None
    except ValueError as exc:
        raise MathFailure(str(exc))
    report = {"model": model.name, "n": n, "basis": vector_json(m),
              "obstructions": [] if ok else [{"graph": k, "poly": str(p)} for k, p in U.sorted_items()],
              "solutions": None, "gaugeChecks": [], "isMC": ok}
    if not ok:
        raise MathFailure("element is not Maurer-Cartan", report)
    return report


def cmd_mc_gauge(args) -> dict:
    from .coeffring import interval_ring
    from .mcgauge import parse_interval_coefficient
    model = load_algebra(args.algebra)
    n = need_n(args)
    cx = GraphComplex(model, n)
    ring = interval_ring()
    p = load_vector(cx, args.path, ring=ring, coefficient=lambda s: parse_interval_coefficient(ring, str(s)))
    if any(d != 0 for d in p.degrees()):
        raise MathFailure("a gauge path must have total degree 0")
    ok, m0, m1 = gauge_path_check(p)
    check = {"path": vector_json(p), "verified": ok, "start": vector_json(m0), "end": vector_json(m1)}
    report = {"model": model.name, "n": n, "basis": [], "obstructions": [], "solutions": None,
              "gaugeChecks": [check]}
    if not ok:
        raise MathFailure("path is not Maurer-Cartan over Q[t, dt]", report)
    return report


def cmd_utt_h0(args) -> dict:
    model = load_algebra(args.algebra)
    n = need_n(args)
    try:
        res = utt_h0(model, n)
    except ValueError as exc:
        raise MathFailure(str(exc))
    return {"model": model.name, "n": n, **res}


def cmd_ce(args) -> dict:
    if args.table:
        try:
            table = LinfTable.from_json(read_json(args.table))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad table: {exc}") from exc
    else:
        # degree 0 is needed as the target of ell_1 in the positive truncation
        model, n, a, b, w = _window(args, low=0)
        tw = None
        if args.twist:
            m = load_vector(w.complex, args.twist)
            try:
                tw = make_twist(m, k_max=args.kmax)
            except ValueError as exc:
                raise MathFailure(str(exc))
        try:
            table = extract_linf(w, twist=tw, k_max=args.kmax)
        except ValueError as exc:
            raise MathFailure(str(exc))
    try:
        res = ce_cohomology(table, positive_truncation=args.positive, degree_bound=args.ce_bound)
    except (ValueError, ArithmeticError) as exc:
        raise MathFailure(str(exc))
    return {"ranks": {str(k): v for k, v in res["ranks"].items()}, "generators": res["generators"],
            "degreeBound": res["degreeBound"], "positiveTruncation": res["positiveTruncation"],
            "truncationApproximate": res["truncationApproximate"], "meta": table.meta}


COMMANDS = {
    ("algebra", "validate"): cmd_validate,
    ("basis", None): cmd_basis,
    ("homology", None): cmd_homology,
    ("mc", "classify"): cmd_mc_classify,
    ("mc", "verify"): cmd_mc_verify,
    ("mc", "gauge-check"): cmd_mc_gauge,
    ("utt", "h0"): cmd_utt_h0,
    ("ce", None): cmd_ce,
}


# ---------------------------------------------------------------------------
# report formatting


def _rows(key, report: dict) -> List[List]:
    cmd = key[0]
    if cmd == "algebra":
        return [["axiom", "tuple", "detail"]] + [[v["axiom"], " ".join(map(str, v["tuple"])), v["detail"]]
                                                   for v in report["violations"]]
    if cmd == "basis":
        return [["degree", "certified", "graph"]] + [[d, info["certified"], g] for d, info in report["degrees"].items()
                                                      for g in info["graphs"]]
    if cmd == "homology":
        return [["degree", "dim", "certified", "homologyRank"]] + [
            [d, r["dim"], r["certified"], r["homologyRank"]] for d, r in report["degrees"].items()]
    if cmd == "mc":
        if report["gaugeChecks"]:
            return [["verified"]] + [[g["verified"]] for g in report["gaugeChecks"]]
        return [["graph", "poly"]] + [[o["graph"], o["poly"]] for o in report["obstructions"]]
    if cmd == "utt":
        return [["rank"], [report["rank"]]] + [["basis"]] + [[g] for g in report["basis"]]
    if cmd == "ce":
        return [["degree", "rank"]] + [[d, r] for d, r in report["ranks"].items()]
    return []


def _text(key, report: dict) -> str:
    cmd = key[0]
    lines = []
    if cmd == "algebra":
        lines.append(f"model {report['model']}: {'valid' if report['valid'] else 'INVALID'}")
        for v in report["violations"]:
            lines.append(f"  {v['axiom']}: {' '.join(map(str, v['tuple']))} ({v['detail']})")
    elif cmd in ("basis", "homology"):
        lines.append(f"model {report['model']}, n = {report['n']}, max edges {report['maxEdges']}")
        for d, info in report["degrees"].items():
            flag = "" if info["certified"] else " (uncertified)"
            if cmd == "basis":
                lines.append(f"degree {d}: dim {info['dim']}{flag}")
                lines.extend(f"  {g}" for g in info["graphs"])
            else:
                lines.append(f"degree {d}: dim {info['dim']}, homology rank {info['homologyRank']}{flag}")
                for rep in info["representatives"]:
                    lines.append("  " + " + ".join(f"({t['coeff']}) {t['graph']}" for t in rep))
    elif cmd == "mc":
        if report["gaugeChecks"]:
            g = report["gaugeChecks"][0]
            lines.append(f"gauge path verified: {g['verified']}")
            lines.append("  start: " + (" + ".join(f"({t['coeff']}) {t['graph']}" for t in g["start"]) or "0"))
            lines.append("  end:   " + (" + ".join(f"({t['coeff']}) {t['graph']}" for t in g["end"]) or "0"))
        else:
            if "isMC" in report:
                lines.append(f"Maurer-Cartan: {report['isMC']}")
            else:
                lines.append("degree-0 basis:")
                lines.extend(f"  {b['parameter']}: {b['graph']}" for b in report["basis"])
            lines.append(f"obstructions: {len(report['obstructions'])}")
            lines.extend(f"  {o['graph']}: {o['poly']}" for o in report["obstructions"])
            if report.get("solutions"):
                lines.append(f"solutions: {report['solutions']['description']}")
    elif cmd == "utt":
        lines.append(f"H0(UTT) rank {report['rank']}")
        lines.extend(f"  {g}" for g in report["basis"])
    elif cmd == "ce":
        flag = " (truncation-approximate)" if report["truncationApproximate"] else ""
        lines.append(f"CE ranks{flag}: " + ", ".join(f"{d}:{r}" for d, r in report["ranks"].items()))
    return "\n".join(lines) + "\n"


def render(key, report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in _rows(key, report):
            writer.writerow(row)
        return buf.getvalue()
    return _text(key, report)


def emit(text: str, output: Optional[str]):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    key = (args.command, getattr(args, "action", None))
    try:
        args = resolve_config(args)
        report = COMMANDS[key](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MathFailure as exc:
        print(f"failure: {exc}", file=sys.stderr)
        if exc.report is not None:
            emit(render(key, exc.report, args.format), args.output)
        return 1
    emit(render(key, report, args.format), args.output)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
