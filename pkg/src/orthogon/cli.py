"""Command-line front end.

The CLI is a thin client of the HTTP service: it builds the same request
models and either dispatches to the handlers in-process (the default) or
posts them to a running server given with ``--server``.

Exit codes: 0 pass, 1 a decided-negative verdict or failed suite, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ValidationError

from .errors import OrthogonError
from .service import models


class Dispatcher:
    """Routes a request model to the in-process handler or a remote server."""

    def __init__(self, server: Optional[str] = None):
        self.server = server.rstrip("/") if server else None

    def call(self, path: str, request: Optional[BaseModel]) -> dict:
        if self.server is not None:
            import httpx

            if request is None:
                resp = httpx.get(f"{self.server}{path}", timeout=600.0)
            else:
                resp = httpx.post(
                    f"{self.server}{path}",
                    json=request.model_dump(by_alias=True, mode="json"),
                    timeout=600.0,
                )
            if resp.status_code == 422:
                body = resp.json()
                raise OrthogonError(body.get("message", resp.text))
            resp.raise_for_status()
            return resp.json()
        from .service.app import (
            get_catalog,
            post_enumerate,
            post_lift,
            post_member,
            post_orbit,
            post_parse,
            post_render,
            post_verify,
        )

        handler = {
            "/parse": post_parse,
            "/lift": post_lift,
            "/member": post_member,
            "/enumerate": post_enumerate,
            "/orbit": post_orbit,
            "/verify": post_verify,
            "/render": post_render,
            "/catalog": lambda r: get_catalog(),
        }[path]
        result = handler(request)
        return result.model_dump(by_alias=True, mode="json", exclude_none=True)


def _map_input(arg: str) -> models.MapInput:
    """Notation text, or @file.json with the map payload."""
    if arg.startswith("@"):
        payload = json.loads(Path(arg[1:]).read_text())
        return models.MapInput(json=models.MapPayload(**payload))
    return models.MapInput(notation=arg)


def _expr_input(arg: str, bound: Optional[int]) -> models.ClassExprInput:
    if arg.startswith("@"):
        payload = json.loads(Path(arg[1:]).read_text())
        payload.setdefault("bound", bound)
        return models.ClassExprInput(**payload)
    return models.ClassExprInput(notation=arg, bound=bound)


def _emit(data: dict, as_json: bool, human_lines) -> None:
    if as_json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        for line in human_lines(data):
            print(line)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orthogon",
        description="Finite spaces, lifting properties, bounded orthogonals.",
    )
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--seed", type=int, default=None, help="seed for randomized sampling")
    parser.add_argument("--threads", type=int, default=1, help="worker count for suites")
    parser.add_argument("--server", default=None, help="base URL of a running service")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse notation and echo the elaborated value")
    p.add_argument("text")

    p = sub.add_parser("lift", help="decide the lifting property left ⧄ right")
    p.add_argument("--left", required=True, help="map notation or @file.json")
    p.add_argument("--right", required=True, help="map notation or @file.json")
    p.add_argument("--witness", action="store_true", help="report per-square filler counts")

    p = sub.add_parser("member", help="bounded class membership")
    p.add_argument("--class", dest="class_expr", required=True, help="class expression or @file.json")
    p.add_argument("--map", dest="map_arg", required=True, help="map notation or @file.json")
    p.add_argument("--bound", type=int, default=None)

    p = sub.add_parser("orbit", help="explore iterated orthogonals")
    p.add_argument("--gen", action="append", required=True, help="generator map (repeatable)")
    p.add_argument("--bound", type=int, default=5)
    p.add_argument("--max-word", type=int, default=7)

    p = sub.add_parser("enumerate", help="enumerate finite spaces")
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--upto-iso", action="store_true")

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=["S1", "S2", "S3", "S4", "S5", "S6"])
    p.add_argument("--bound", type=int, default=3)

    p = sub.add_parser("render", help="print canonical notation or DOT")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--space", action="store_true")
    group.add_argument("--map", dest="as_map", action="store_true")
    p.add_argument("text")
    p.add_argument("--dot", action="store_true")

    p = sub.add_parser("catalog", help="list the named catalog maps")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    dispatcher = Dispatcher(args.server)
    try:
        return _run(args, dispatcher)
    except (OrthogonError, ValidationError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _run(args, dispatcher: Dispatcher) -> int:
    if args.command == "parse":
        data = dispatcher.call("/parse", models.ParseRequest(text=args.text))
        _emit(data, args.json, lambda d: [f"{d['kind']}: {d['notation']}"])
        return 0

    if args.command == "lift":
        req = models.LiftRequest(
            left=_map_input(args.left), right=_map_input(args.right), witness=args.witness
        )
        data = dispatcher.call("/lift", req)

        def lines(d):
            out = [f"lifts({d['left_notation']}, {d['right_notation']}) = {d['holds']}"]
            if d.get("counterexample"):
                sq = d["counterexample"]
                out.append("unfillable square:")
                out.append(f"  top:    {sq['top']['assign']}")
                out.append(f"  bottom: {sq['bottom']['assign']}")
            if d.get("filler_counts"):
                out.append(f"filler counts per square: {d['filler_counts']}")
            return out

        _emit(data, args.json, lines)
        return 0 if data["holds"] else 1

    if args.command == "member":
        req = models.MemberRequest(
            class_expr=_expr_input(args.class_expr, args.bound),
            map=_map_input(args.map_arg),
        )
        data = dispatcher.call("/member", req)

        def lines(d):
            out = [f"{d['status']} (at bound {d['bound']})"]
            if d.get("witness_notation"):
                out.append(f"fails against: {d['witness_notation']}")
            return out

        _emit(data, args.json, lines)
        return 0 if data["status"] == "MemberAtBound" else 1

    if args.command == "orbit":
        req = models.OrbitRequest(
            generators=[_map_input(g) for g in args.gen],
            bound=args.bound,
            max_word_len=args.max_word,
        )
        data = dispatcher.call("/orbit", req)

        def lines(d):
            out = [
                f"orbit at bound {d['bound']}, words up to length {d['max_word_len']}: "
                f"{len(d['nodes'])} classes"
            ]
            for n in d["nodes"]:
                out.append(
                    f"  {n['id']} members={n['member_count']} words={','.join(n['words'][:4])}"
                )
            out.append(f"edges: {len(d['edges'])}, witnesses: {len(d['witnesses'])}")
            return out

        _emit(data, args.json, lines)
        return 0

    if args.command == "enumerate":
        req = models.EnumerateRequest(points=args.points, upto_iso=args.upto_iso)
        data = dispatcher.call("/enumerate", req)
        _emit(
            data,
            args.json,
            lambda d: [f"count: {d['count']}"] + [f"  {t}" for t in d["notations"]],
        )
        return 0

    if args.command == "verify":
        req = models.VerifyRequest(
            suite=args.suite, bound=args.bound, seed=args.seed, threads=args.threads
        )
        data = dispatcher.call("/verify", req)

        def lines(d):
            out = [
                f"suite {d['suite']} at bound {d['bound']}: "
                f"{'PASS' if d['passed'] else 'FAIL'} "
                f"({d['cases_run']} checks, {len(d['failures'])} failures, "
                f"{d['wall_time_s']}s)"
            ]
            for f in d["failures"]:
                out.append(f"  FAIL {f['case']}: {f['detail']}")
                if f["counterexample"]["notation"]:
                    out.append(f"    counterexample: {f['counterexample']['notation']}")
            for note in d.get("notes", []):
                out.append(f"  note: {note}")
            return out

        _emit(data, args.json, lines)
        return 0 if data["passed"] else 1

    if args.command == "render":
        req = models.RenderRequest(
            kind="space" if args.space else "map", text=args.text, dot=args.dot
        )
        data = dispatcher.call("/render", req)
        _emit(data, args.json, lambda d: [d["output"].rstrip("\n")])
        return 0

    if args.command == "catalog":
        data = dispatcher.call("/catalog", None)
        _emit(
            data,
            args.json,
            lambda d: [f"{e['name']:24s} {e['notation']}" for e in d["entries"]],
        )
        return 0

    if args.command == "serve":
        import uvicorn

        from .service import fastapi_app

        uvicorn.run(fastapi_app, host=args.host, port=args.port)
        return 0

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
