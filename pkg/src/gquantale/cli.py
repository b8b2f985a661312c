"""Build, check and invert groupoid quantales of finite groupoids.

Exit codes: 0 every check passed, 1 a check failed, 2 the input could not be
read, 3 a size or search budget ran out.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Callable

from .errors import BudgetExceeded, GQError, ParseError, UnknownPoint, ValidationError
from .fixtures import FIXTURE_NAMES, load_fixture, resolve_name
from .gq import DEFAULT_BUDGET, build_gq, canonical_base_from_action, check_selection_base, validate_selection_base
from .io import detect_kind, digest, load_json, parse_base, parse_groupoid, parse_quantale, parse_space, render
from .groupoid import check_groupoid_laws, enumerate_bisection_images, is_SP
from .incidence import roundtrip_quantale
from .pipeline import (
    golden_drift,
    golden_view,
    gq_summary,
    quantale_summary,
    reconstruct_summary,
    run_fixture,
    run_roundtrips,
    space_summary,
    theorem_checks,
)
from .quantale import check_SGF

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class Outcome(Exception):
    def __init__(self, code: int, report: dict):
        self.code = code
        self.report = report


def _base_from_input(data, args):
    groupoid, action, family = parse_base(data)
    if family == "canonical":
        if action is None:
            raise ParseError("a canonical base needs a group action")
        family = canonical_base_from_action(action, groupoid)
    return groupoid, family


def cmd_check(args) -> tuple[int, dict]:
    data = load_json(args.file)
    kind = args.kind or detect_kind(data)
    report: dict = {"kind": kind, "input_digest": digest(data)}
    if kind == "space":
        report["summary"] = space_summary(parse_space(data), args.verify_oracles)
        ok = report["summary"].get("oracle_locally_closed", True)
    elif kind == "groupoid":
        g, _ = parse_groupoid(data)
        laws = check_groupoid_laws(g)
        images = enumerate_bisection_images(g)
        report["summary"] = {
            "units": len(g.space.points),
            "arrows": g.m,
            "laws": laws,
            "bisection_images": len(images),
            "SP": is_SP(g, images),
        }
        ok = all(laws.values())
    elif kind == "quantale":
        summary, ok = quantale_summary(parse_quantale(data), args.verify_oracles)
        report["summary"] = summary
        ok = ok and all(v for k, v in summary.items() if k.startswith("oracle_"))
    elif kind == "base":
        g, family = _base_from_input(data, args)
        verdicts = check_selection_base(g, family, verify=args.verify_oracles)
        report["summary"] = {"members": len(set(family)), "axioms": verdicts}
        ok = all(verdicts.values())
    else:
        raise ParseError(f"unknown kind {kind!r}")
    return (EXIT_OK if ok else EXIT_FAIL), report


def cmd_build_gq(args) -> tuple[int, dict]:
    data = load_json(args.file)
    g, family = _base_from_input(data, args)
    base = validate_selection_base(g, family, verify=args.verify_oracles)
    gq = build_gq(base, args.size_budget)
    summary = gq_summary(gq, args.verify_oracles)
    checks = theorem_checks(gq)
    report = {"input_digest": digest(data), "summary": summary, "theorem_checks": checks}
    ok = all(checks.values()) and all(v for k, v in summary.items() if k.startswith("oracle_"))
    return (EXIT_OK if ok else EXIT_FAIL), report


def _quantale_from_input(data, args):
    if detect_kind(data) == "quantale":
        q = parse_quantale(data)
        summary, valid = quantale_summary(q)
        if not valid:
            raise Outcome(EXIT_FAIL, {"input_digest": digest(data), "summary": summary})
        return q, None
    g, family = _base_from_input(data, args)
    gq = build_gq(validate_selection_base(g, family), args.size_budget)
    return gq.quantale, gq


def _require_sgf(q, data):
    sgf = check_SGF(q)
    if not sgf:
        raise Outcome(
            EXIT_FAIL,
            {"input_digest": digest(data), "SGF": {"sgf1": sgf.sgf1, "sgf2": sgf.sgf2, "sgf3": sgf.sgf3, "witnesses": sgf.witnesses}},
        )


def cmd_reconstruct(args) -> tuple[int, dict]:
    data = load_json(args.file)
    q, _ = _quantale_from_input(data, args)
    _require_sgf(q, data)
    summary = reconstruct_summary(q)
    ok = summary["alpha_embedding"] and all(v.ok is not False for v in summary["incidence_laws"].values())
    return (EXIT_OK if ok else EXIT_FAIL), {"input_digest": digest(data), "summary": summary}


def cmd_roundtrip(args) -> tuple[int, dict]:
    data = load_json(args.file)
    q, gq = _quantale_from_input(data, args)
    _require_sgf(q, data)
    if gq is not None:
        result = run_roundtrips(gq)
        ok = result["quantale_iso"] and result["groupoid_iso"]
    else:
        try:
            rt = roundtrip_quantale(q, args.size_budget)
            result = {"quantale_iso": True, "quantale_certificate": list(rt["iso"].mapping)}
        except BudgetExceeded:
            raise
        except GQError as exc:
            result = {"quantale_iso": False, "quantale_error": str(exc)}
        ok = result["quantale_iso"]
    return (EXIT_OK if ok else EXIT_FAIL), {"input_digest": digest(data), "roundtrip": result}


def cmd_fixtures(args) -> tuple[int, dict]:
    names = FIXTURE_NAMES if args.name == "all" else (resolve_name(args.name),)
    report = {}
    ok = True
    for name in names:
        fx = load_fixture(name)
        facts = run_fixture(fx, args.verify_oracles)
        drift = golden_drift(fx, facts)
        oracles = {k: v for k, v in facts["gq"].items() if k.startswith("oracle_")}
        if args.verify_oracles:
            oracles["locally_closed"] = facts["space"]["oracle_locally_closed"]
        entry = {"title": fx.title, "facts": golden_view(facts, fx), "drift": drift}
        if oracles:
            entry["oracles"] = oracles
        report[name] = entry
        ok = ok and not drift and all(oracles.values())
    return (EXIT_OK if ok else EXIT_FAIL), report


def cmd_search(args) -> tuple[int, dict]:
    from .search import search

    result = search(args.max_size, args.budget, args.threads)
    sg_not_sgf3 = result.smallest(lambda m: m.profile["SG"] and not m.profile["SGF3"])
    not_sg = result.smallest(lambda m: not m.profile["SG"])
    report = {
        "max_size": args.max_size,
        "complete": result.complete,
        "examined": result.examined,
        "models_by_size": {str(k): v for k, v in result.by_size.items()},
        "classification": result.table(),
        "minimal_models": result.minimal_models(),
        "smallest_SG_not_SGF3": sg_not_sgf3.to_json() if sg_not_sgf3 else None,
        "smallest_not_SG": not_sg.to_json() if not_sg else None,
        "sg_checks_on_SG_models": all(all(m.sg_checks.values()) for m in result.models if m.profile["SG"]),
    }
    if not result.complete:
        return EXIT_BUDGET, report
    return (EXIT_OK if report["sg_checks_on_SG_models"] else EXIT_FAIL), report


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", choices=("json", "text"), default=argparse.SUPPRESS)
    common.add_argument("--verify-oracles", action="store_true", default=argparse.SUPPRESS,
                        help="cross-check fast paths against brute-force oracles")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("--timings", action="store_true", default=argparse.SUPPRESS,
                        help="include wall-clock timings (reports are then not reproducible)")

    parser = argparse.ArgumentParser(prog="gquantale", description=__doc__.splitlines()[0])
    parser.add_argument("--report", choices=("json", "text"), default="json")
    parser.add_argument("--verify-oracles", action="store_true")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--timings", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="validate a space, groupoid, quantale or base")
    p.add_argument("file")
    p.add_argument("--kind", choices=("space", "groupoid", "quantale", "base"))
    p.set_defaults(func=cmd_check)

    for name, func, text in (
        ("build-gq", cmd_build_gq, "build the groupoid quantale of a selection base"),
        ("reconstruct", cmd_reconstruct, "reconstruct the groupoid of an SGF-quantale"),
        ("roundtrip", cmd_roundtrip, "run the round trips and report certificates"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("file")
        p.add_argument("--size-budget", type=int, default=DEFAULT_BUDGET)
        p.set_defaults(func=func)

    p = sub.add_parser("fixtures", parents=[common], help="re-derive the bundled examples")
    p.add_argument("name", nargs="?", default="all", help="etale, non_etale, 8.1, 8.2 or all")
    p.set_defaults(func=cmd_fixtures)

    p = sub.add_parser("search", parents=[common], help="enumerate small quantales")
    p.add_argument("--max-size", type=int, default=5)
    p.add_argument("--budget", type=int, default=10_000_000)
    p.set_defaults(func=cmd_search)
    return parser


def main(argv: list[str] | None = None, out: Callable[[str], None] = print) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        code, report = args.func(args)
    except Outcome as exc:
        code, report = exc.code, exc.report
    except (ParseError, UnknownPoint, KeyError) as exc:
        code, report = EXIT_INPUT, {"error": "ParseError", "message": str(exc)}
    except BudgetExceeded as exc:
        code, report = EXIT_BUDGET, {"error": type(exc).__name__, "message": str(exc)}
    except ValidationError as exc:
        code, report = EXIT_FAIL, {"error": type(exc).__name__, "message": str(exc), "violations": exc.violations}
    except GQError as exc:
        code, report = EXIT_FAIL, {"error": type(exc).__name__, "message": str(exc)}
    full = {"command": args.command, "exit_code": code, **report}
    if args.timings:
        full["timings"] = {"total_seconds": round(time.perf_counter() - start, 6)}
    out(render(full, args.report))
    return code


if __name__ == "__main__":
    sys.exit(main())
