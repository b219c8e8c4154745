"""FastAPI wrapper around the core package.

Every endpoint is a pure function of its request, so the service is stateless
and safe behind any number of workers.  The CLI calls the same handlers
in-process by default.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..catalog import catalog
from ..errors import OrthogonError
from ..lifting import lifts
from ..negation import member, orbit
from ..notation import MapAst, SpaceAst, elaborate, parse, print_map, print_space, render_dot
from ..spaces import enumerate_spaces
from ..suites import run_suite
from . import models

app = FastAPI(title="orthogon", version=__version__)


@app.exception_handler(OrthogonError)
async def _domain_error(request: Request, exc: OrthogonError):
    payload = models.ErrorResponse(
        error=type(exc).__name__,
        message=str(exc),
        position=getattr(exc, "position", None),
    )
    return JSONResponse(status_code=422, content=payload.model_dump())


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/catalog", response_model=models.CatalogResponse)
def get_catalog() -> models.CatalogResponse:
    return models.CatalogResponse(
        entries=[
            models.CatalogEntryPayload(
                name=e.name,
                notation=print_map(e.map),
                source=e.source,
                map=models.map_to_payload(e.map),
            )
            for e in catalog()
        ]
    )


@app.post("/parse", response_model=models.ParseResponse)
def post_parse(req: models.ParseRequest) -> models.ParseResponse:
    return models.parse_response(req.text)


@app.post("/lift", response_model=models.LiftResponse, response_model_exclude_none=True)
def post_lift(req: models.LiftRequest) -> models.LiftResponse:
    f = req.left.to_map()
    g = req.right.to_map()
    verdict = lifts(f, g, want_counts=req.witness)
    counter = None
    if verdict.counterexample is not None:
        sq = verdict.counterexample
        counter = models.SquarePayload(
            f=models.map_to_payload(sq.f),
            g=models.map_to_payload(sq.g),
            top=models.map_to_payload(sq.top),
            bottom=models.map_to_payload(sq.bottom),
        )
    return models.LiftResponse(
        holds=verdict.holds,
        left_notation=print_map(f),
        right_notation=print_map(g),
        counterexample=counter,
        filler_counts=list(verdict.filler_counts) if verdict.filler_counts else None,
    )


@app.post("/member", response_model=models.MemberResponse, response_model_exclude_none=True)
def post_member(req: models.MemberRequest) -> models.MemberResponse:
    expr = req.class_expr.to_expr()
    candidate = req.map.to_map()
    verdict = member(expr, candidate)
    witness_map = witness_notation = witness_square = None
    if verdict.witness_map is not None:
        witness_map = models.map_to_payload(verdict.witness_map)
        witness_notation = print_map(verdict.witness_map)
    if verdict.witness_square is not None:
        sq = verdict.witness_square
        witness_square = models.SquarePayload(
            f=models.map_to_payload(sq.f),
            g=models.map_to_payload(sq.g),
            top=models.map_to_payload(sq.top),
            bottom=models.map_to_payload(sq.bottom),
        )
    return models.MemberResponse(
        status=verdict.status,
        bound=expr.bound,
        witness_map=witness_map,
        witness_notation=witness_notation,
        witness_square=witness_square,
    )


@app.post("/enumerate", response_model=models.EnumerateResponse)
def post_enumerate(req: models.EnumerateRequest) -> models.EnumerateResponse:
    mode = "upto_iso" if req.upto_iso else "labelled"
    spaces = list(enumerate_spaces(req.points, mode))
    return models.EnumerateResponse(
        count=len(spaces),
        spaces=[models.space_to_payload(s) for s in spaces],
        notations=[print_space(s) for s in spaces],
    )


@app.post("/orbit", response_model=models.OrbitResponse, response_model_by_alias=True)
def post_orbit(req: models.OrbitRequest) -> models.OrbitResponse:
    generators = [g.to_map() for g in req.generators]
    graph = orbit(generators, bound=req.bound, max_word_len=req.max_word_len)
    return models.OrbitResponse(
        bound=graph.bound,
        max_word_len=graph.max_word_len,
        nodes=[
            models.OrbitNodePayload(
                id=n.node_id,
                fingerprint=n.fingerprint,
                member_count=n.member_count,
                words=list(n.words),
            )
            for n in graph.nodes
        ],
        edges=[
            models.OrbitEdgePayload(source=a, letter=letter, target=b)
            for a, letter, b in graph.edges
        ],
        witnesses=[
            models.OrbitWitnessPayload(
                node_a=w.node_a,
                node_b=w.node_b,
                map=models.map_to_payload(w.map),
                notation=print_map(w.map),
                in_a=w.in_a,
                verified=w.verified,
            )
            for w in graph.witnesses
        ],
    )


@app.post("/verify", response_model=models.VerifyResponse, response_model_by_alias=True)
def post_verify(req: models.VerifyRequest) -> models.VerifyResponse:
    report = run_suite(req.suite, bound=req.bound, seed=req.seed, threads=req.threads)
    return models.VerifyResponse(
        suite=report.suite,
        bound=report.bound,
        cases_run=report.cases_run,
        failures=[
            models.FailurePayload(
                case=f.case,
                detail=f.detail,
                counterexample_notation=f.counterexample_notation,
                counterexample_json=f.counterexample_json,
            )
            for f in report.failures
        ],
        wall_time_s=round(report.wall_time_s, 3),
        seed=report.seed,
        notes=list(report.notes),
        data=dict(report.data),
        passed=report.passed,
    )


@app.post("/render", response_model=models.RenderResponse)
def post_render(req: models.RenderRequest) -> models.RenderResponse:
    ast = parse(req.text)
    if req.kind == "space" and not isinstance(ast, SpaceAst):
        raise OrthogonError("expected space notation")
    if req.kind == "map" and not isinstance(ast, MapAst):
        raise OrthogonError("expected map notation")
    value = elaborate(ast)
    if req.dot:
        return models.RenderResponse(output=render_dot(value))
    text = print_space(value) if isinstance(ast, SpaceAst) else print_map(value)
    return models.RenderResponse(output=text)
