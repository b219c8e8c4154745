"""Pydantic request/response models; the wire mirror of the core types."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from ..errors import OrthogonError
from ..maps import SpaceMap, make_map
from ..negation import DEFAULT_BOUND, DEFAULT_MAX_WORD_LEN, ClassExpr
from ..notation import (
    ClassExprAst,
    MapAst,
    SpaceAst,
    ast_to_json,
    elaborate,
    parse,
    print_map,
    print_space,
)
from ..spaces import FinSpace, space_from_json, space_to_json


class SpacePayload(BaseModel):
    points: list[str] = Field(default_factory=list)
    arrows: list[tuple[str, str]] = Field(default_factory=list)


class MapPayload(BaseModel):
    domain: SpacePayload
    codomain: SpacePayload
    assign: dict[str, str]


def space_to_payload(space: FinSpace) -> SpacePayload:
    data = space_to_json(space)
    return SpacePayload(points=data["points"], arrows=[tuple(a) for a in data["arrows"]])


def payload_to_space(payload: SpacePayload) -> FinSpace:
    return space_from_json({"points": payload.points, "arrows": payload.arrows})


def map_to_payload(m: SpaceMap) -> MapPayload:
    return MapPayload(
        domain=space_to_payload(m.dom),
        codomain=space_to_payload(m.cod),
        assign={m.dom.label_of(i): m.cod.label_of(v) for i, v in enumerate(m.assign)},
    )


def payload_to_map(payload: MapPayload) -> SpaceMap:
    dom = payload_to_space(payload.domain)
    cod = payload_to_space(payload.codomain)
    return make_map(dom, cod, dict(payload.assign))


class MapInput(BaseModel):
    """A map, either as notation text or as an explicit JSON payload."""

    notation: Optional[str] = None
    json_map: Optional[MapPayload] = Field(default=None, alias="json")

    model_config = {"populate_by_name": True}

    @model_validator(mode="after")
    def _one_of(self):
        if (self.notation is None) == (self.json_map is None):
            raise ValueError("provide exactly one of 'notation' or 'json'")
        return self

    def to_map(self) -> SpaceMap:
        if self.notation is not None:
            ast = parse(self.notation)
            if not isinstance(ast, MapAst):
                raise OrthogonError("expected a map, got a different notation kind")
            value = elaborate(ast)
        else:
            value = payload_to_map(self.json_map)
        return value


class ClassExprInput(BaseModel):
    """A class expression: notation text, or generators plus word and bound."""

    notation: Optional[str] = None
    generators: Optional[list[MapInput]] = None
    word: Optional[str] = None
    bound: Optional[int] = None

    def to_expr(self) -> ClassExpr:
        if self.notation is not None:
            ast = parse(self.notation)
            if not isinstance(ast, ClassExprAst):
                raise OrthogonError("expected a class expression")
            expr = elaborate(ast)
            if self.bound is not None:
                expr = ClassExpr(expr.generators, expr.word, self.bound)
            return expr
        if not self.generators:
            raise OrthogonError("a class expression needs generators")
        return ClassExpr(
            generators=tuple(g.to_map() for g in self.generators),
            word=self.word or "",
            bound=self.bound if self.bound is not None else DEFAULT_BOUND,
        )


class ParseRequest(BaseModel):
    text: str


class ParseResponse(BaseModel):
    kind: Literal["Space", "Map", "ClassExpr"]
    ast: dict
    notation: str
    space: Optional[SpacePayload] = None
    map: Optional[MapPayload] = None
    word: Optional[str] = None
    bound: Optional[int] = None
    generators: Optional[list[MapPayload]] = None


def parse_response(text: str) -> ParseResponse:
    from ..notation import print_classexpr

    ast = parse(text)
    value = elaborate(ast)
    if isinstance(ast, SpaceAst):
        return ParseResponse(
            kind="Space",
            ast=ast_to_json(ast),
            notation=print_space(value),
            space=space_to_payload(value),
        )
    if isinstance(ast, MapAst):
        return ParseResponse(
            kind="Map",
            ast=ast_to_json(ast),
            notation=print_map(value),
            map=map_to_payload(value),
        )
    return ParseResponse(
        kind="ClassExpr",
        ast=ast_to_json(ast),
        notation=print_classexpr(value),
        word=value.word,
        bound=value.bound,
        generators=[map_to_payload(g) for g in value.generators],
    )


class SquarePayload(BaseModel):
    f: MapPayload
    g: MapPayload
    top: MapPayload
    bottom: MapPayload


class LiftRequest(BaseModel):
    left: MapInput
    right: MapInput
    witness: bool = False


class LiftResponse(BaseModel):
    holds: bool
    left_notation: str
    right_notation: str
    counterexample: Optional[SquarePayload] = None
    filler_counts: Optional[list[int]] = None


class MemberRequest(BaseModel):
    class_expr: ClassExprInput
    map: MapInput


class MemberResponse(BaseModel):
    status: Literal["MemberAtBound", "NotMember"]
    bound: int
    witness_map: Optional[MapPayload] = None
    witness_notation: Optional[str] = None
    witness_square: Optional[SquarePayload] = None


class EnumerateRequest(BaseModel):
    points: int = Field(ge=0)
    upto_iso: bool = False


class EnumerateResponse(BaseModel):
    count: int
    spaces: list[SpacePayload]
    notations: list[str]


class OrbitRequest(BaseModel):
    generators: list[MapInput]
    bound: int = DEFAULT_BOUND
    max_word_len: int = DEFAULT_MAX_WORD_LEN


class OrbitNodePayload(BaseModel):
    id: str
    fingerprint: str
    member_count: int
    words: list[str]


class OrbitEdgePayload(BaseModel):
    source: str
    letter: Literal["l", "r"]
    target: str


class OrbitWitnessPayload(BaseModel):
    node_a: str
    node_b: str
    map: MapPayload
    notation: str
    in_a: bool
    verified: bool


class OrbitResponse(BaseModel):
    schema_id: str = Field(default="orthogon/1", alias="schema")
    bound: int
    max_word_len: int
    nodes: list[OrbitNodePayload]
    edges: list[OrbitEdgePayload]
    witnesses: list[OrbitWitnessPayload]

    model_config = {"populate_by_name": True}


class VerifyRequest(BaseModel):
    suite: str
    bound: int = 3
    seed: Optional[int] = None
    threads: int = 1


class FailurePayload(BaseModel):
    case: str
    detail: str
    counterexample_notation: Optional[str] = None
    counterexample_json: Optional[dict] = None


class VerifyResponse(BaseModel):
    schema_id: str = Field(default="orthogon/1", alias="schema")
    suite: str
    bound: int
    cases_run: int
    failures: list[FailurePayload]
    wall_time_s: float
    seed: Optional[int] = None
    notes: list[str] = Field(default_factory=list)
    data: dict = Field(default_factory=dict)
    passed: bool

    model_config = {"populate_by_name": True}


class RenderRequest(BaseModel):
    kind: Literal["space", "map"]
    text: str
    dot: bool = False


class RenderResponse(BaseModel):
    output: str


class CatalogEntryPayload(BaseModel):
    name: str
    notation: str
    source: str
    map: MapPayload


class CatalogResponse(BaseModel):
    entries: list[CatalogEntryPayload]


class ErrorResponse(BaseModel):
    error: str
    message: str
    position: Optional[int] = None
