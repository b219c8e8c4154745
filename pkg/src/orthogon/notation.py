"""ASCII notation for finite spaces, maps, and class expressions.

Grammar::

    space     = "{" [chain ("," chain)*] "}"
    chain     = label (rel label)*
    rel       = "->" | "<-" | "<->" | "="
    map       = space "-->" space
    classexpr = "[" map ("," map)* "]" ["_<" int] "^" ("l"|"r")+

``a->b`` puts b in the closure of a; ``=`` merges labels into one point.  In a
map, ``=`` in the domain merges domain points, while ``=`` in the codomain
glues points under the map.  Whitespace is insignificant outside labels;
labels match ``[A-Za-z0-9_]+``.  Endomorphisms are unrepresentable on purpose;
build them through the JSON interface instead.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .errors import (
    MissingLabelError,
    NonMonotoneError,
    NonMonotoneNotationError,
    NotationSyntaxError,
    SplitPointError,
)
from .maps import SpaceMap
from .negation import DEFAULT_BOUND, ClassExpr
from .spaces import FinSpace, _bits, make_space

_LABEL_RE = re.compile(r"[A-Za-z0-9_]+")
_ARROWS = ("-->", "<->", "->", "<-")


# -- tokens and AST ---------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # one of: punct, label
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "{},[]^=":
            tokens.append(_Token("punct", ch, i))
            i += 1
            continue
        matched = False
        for arrow in _ARROWS:
            if text.startswith(arrow, i):
                tokens.append(_Token("punct", arrow, i))
                i += len(arrow)
                matched = True
                break
        if matched:
            continue
        if ch == "_" and text.startswith("_<", i) and i + 2 < n and text[i + 2].isdigit():
            tokens.append(_Token("punct", "_<", i))
            i += 2
            continue
        m = _LABEL_RE.match(text, i)
        if m:
            tokens.append(_Token("label", m.group(), i))
            i = m.end()
            continue
        raise NotationSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("punct", "<end>", n))
    return tokens


Chain = tuple[tuple[str, ...], tuple[str, ...]]  # (labels, ops between them)


@dataclass(frozen=True)
class SpaceAst:
    kind = "Space"
    chains: tuple[Chain, ...]


@dataclass(frozen=True)
class MapAst:
    kind = "Map"
    dom: SpaceAst
    cod: SpaceAst


@dataclass(frozen=True)
class ClassExprAst:
    kind = "ClassExpr"
    maps: tuple[MapAst, ...]
    bound: Optional[int]  # exclusive bound as written: "_<5" stores 5
    word: str


NotationAst = Union[SpaceAst, MapAst, ClassExprAst]


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self, text: Optional[str] = None) -> _Token:
        tok = self.tokens[self.i]
        if text is not None and tok.text != text:
            raise NotationSyntaxError(f"expected {text!r}, found {tok.text!r}", tok.pos)
        self.i += 1
        return tok

    def parse_space(self) -> SpaceAst:
        self.take("{")
        chains = []
        if self.peek().text != "}":
            chains.append(self.parse_chain())
            while self.peek().text == ",":
                self.take(",")
                chains.append(self.parse_chain())
        self.take("}")
        return SpaceAst(chains=tuple(chains))

    def parse_chain(self) -> Chain:
        tok = self.peek()
        if tok.kind != "label":
            raise NotationSyntaxError(f"expected a label, found {tok.text!r}", tok.pos)
        labels = [self.take().text]
        ops = []
        while self.peek().text in ("->", "<-", "<->", "="):
            ops.append(self.take().text)
            tok = self.peek()
            if tok.kind != "label":
                raise NotationSyntaxError(
                    f"expected a label, found {tok.text!r}", tok.pos
                )
            labels.append(self.take().text)
        return (tuple(labels), tuple(ops))

    def parse_map(self) -> MapAst:
        dom = self.parse_space()
        self.take("-->")
        cod = self.parse_space()
        return MapAst(dom=dom, cod=cod)

    def parse_classexpr(self) -> ClassExprAst:
        self.take("[")
        maps = [self.parse_map()]
        while self.peek().text == ",":
            self.take(",")
            maps.append(self.parse_map())
        self.take("]")
        bound = None
        if self.peek().text == "_<":
            self.take("_<")
            tok = self.take()
            if tok.kind != "label" or not tok.text.isdigit():
                raise NotationSyntaxError("expected an integer bound", tok.pos)
            bound = int(tok.text)
        self.take("^")
        tok = self.take()
        if tok.kind != "label" or not tok.text or any(c not in "lr" for c in tok.text):
            raise NotationSyntaxError("expected a word over l and r", tok.pos)
        return ClassExprAst(maps=tuple(maps), bound=bound, word=tok.text)


def parse(text: str) -> NotationAst:
    tokens = _tokenize(text)
    parser = _Parser(tokens)
    first = parser.peek().text
    if first == "[":
        ast = parser.parse_classexpr()
    elif first == "{":
        probe = _Parser(tokens)
        probe.parse_space()
        ast = (
            parser.parse_map() if probe.peek().text == "-->" else parser.parse_space()
        )
    else:
        raise NotationSyntaxError(
            f"expected '{{' or '[', found {first!r}", parser.peek().pos
        )
    trailing = parser.peek()
    if trailing.text != "<end>":
        raise NotationSyntaxError(f"trailing input {trailing.text!r}", trailing.pos)
    return ast


# -- elaboration -------------------------------------------------------------


class _Classes:
    """Union-find over labels with first-occurrence ordering."""

    def __init__(self):
        self.parent: dict[str, str] = {}
        self.order: list[str] = []

    def add(self, label: str):
        if label not in self.parent:
            self.parent[label] = label
            self.order.append(label)

    def find(self, label: str) -> str:
        while self.parent[label] != label:
            self.parent[label] = self.parent[self.parent[label]]
            label = self.parent[label]
        return label

    def union(self, a: str, b: str):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # Keep the earlier-seen label as representative.
            if self.order.index(ra) > self.order.index(rb):
                ra, rb = rb, ra
            self.parent[rb] = ra

    def groups(self) -> list[list[str]]:
        out: dict[str, list[str]] = {}
        for label in self.order:
            out.setdefault(self.find(label), []).append(label)
        return [out[self.find(label)] for label in self.order if self.find(label) == label]


def _elaborate_space_classes(ast: SpaceAst) -> tuple[FinSpace, list[list[str]]]:
    classes = _Classes()
    for labels, ops in ast.chains:
        for label in labels:
            classes.add(label)
        for k, op in enumerate(ops):
            if op == "=":
                classes.union(labels[k], labels[k + 1])
    groups = classes.groups()
    index = {}
    for gi, group in enumerate(groups):
        for label in group:
            index[label] = gi
    arrows = set()
    for labels, ops in ast.chains:
        for k, op in enumerate(ops):
            a, b = index[labels[k]], index[labels[k + 1]]
            if op == "->":
                arrows.add((a, b))
            elif op == "<-":
                arrows.add((b, a))
            elif op == "<->":
                arrows.add((a, b))
                arrows.add((b, a))
    point_labels = ["=".join(group) for group in groups]
    space = make_space(
        len(groups),
        {(point_labels[a], point_labels[b]) for a, b in arrows},
        labels=tuple(point_labels) if groups else None,
    )
    return space, groups


def elaborate_space(ast: SpaceAst) -> FinSpace:
    return _elaborate_space_classes(ast)[0]


def elaborate_map(ast: MapAst) -> SpaceMap:
    dom, dom_groups = _elaborate_space_classes(ast.dom)
    cod, cod_groups = _elaborate_space_classes(ast.cod)
    cod_of_label = {}
    for ci, group in enumerate(cod_groups):
        for label in group:
            cod_of_label[label] = ci
    assign = []
    for group in dom_groups:
        targets = set()
        for label in group:
            if label not in cod_of_label:
                raise MissingLabelError(
                    f"domain label {label!r} does not occur in the codomain"
                )
            targets.add(cod_of_label[label])
        if len(targets) > 1:
            raise SplitPointError(
                f"domain point {'='.join(group)!r} lands in distinct codomain points"
            )
        assign.append(targets.pop())
    try:
        return SpaceMap(dom, cod, assign)
    except NonMonotoneError as exc:
        raise NonMonotoneNotationError(str(exc)) from exc


def elaborate_classexpr(ast: ClassExprAst) -> ClassExpr:
    maps = tuple(elaborate_map(m) for m in ast.maps)
    bound = DEFAULT_BOUND if ast.bound is None else ast.bound - 1
    return ClassExpr(generators=maps, word=ast.word, bound=bound)


def elaborate(ast: NotationAst):
    if isinstance(ast, SpaceAst):
        return elaborate_space(ast)
    if isinstance(ast, MapAst):
        return elaborate_map(ast)
    return elaborate_classexpr(ast)


def parse_value(text: str):
    return elaborate(parse(text))


# -- printing ----------------------------------------------------------------


def _hasse_edges(space: FinSpace) -> list[tuple[int, int]]:
    """Strict reduct between indistinguishability classes, by representative."""
    classes = space.indistinguishability_classes()
    rep = {}
    for cls in classes:
        members = list(_bits(cls))
        for m in members:
            rep[m] = members[0]
    edges = set()
    for i in range(space.n):
        for j in _bits(space.rel[i]):
            if rep[i] != rep[j]:
                edges.add((rep[i], rep[j]))
    reduced = set(edges)
    for (a, b) in edges:
        for (c, d) in edges:
            if b == c and (a, d) in reduced and a != d:
                reduced.discard((a, d))
    return sorted(reduced)


def _space_tokens(space: FinSpace, label_of) -> list[str]:
    classes = space.indistinguishability_classes()
    parts = []
    mentioned = set()
    for cls in sorted(classes, key=lambda c: min(_bits(c))):
        members = sorted(_bits(cls), key=label_of)
        if len(members) > 1:
            parts.append("<->".join(label_of(m) for m in members))
            mentioned.update(members)
    edge_parts = []
    for a, b in _hasse_edges(space):
        edge_parts.append(f"{label_of(a)}->{label_of(b)}")
        mentioned.update((a, b))
    parts.extend(edge_parts)
    lone = sorted(label_of(i) for i in range(space.n) if i not in mentioned)
    return sorted(parts) + lone


def print_space(space: FinSpace) -> str:
    return "{" + ",".join(_space_tokens(space, space.label_of)) + "}"


def print_map(f: SpaceMap) -> str:
    dom_text = print_space(f.dom)
    used = set(f.dom.all_labels())
    cod_labels = []
    for y in range(f.cod.n):
        preimage = sorted(
            f.dom.label_of(i) for i in range(f.dom.n) if f.assign[i] == y
        )
        if preimage:
            cod_labels.append("=".join(preimage))
        else:
            label = f.cod.label_of(y)
            while label in used:
                label += "_"
            cod_labels.append(label)
        used.add(cod_labels[-1])
    cod = f.cod.relabel(tuple(cod_labels))
    return dom_text + "-->" + print_space(cod)


def print_classexpr(expr: ClassExpr) -> str:
    inner = ",".join(print_map(m) for m in expr.generators)
    suffix = f"_<{expr.bound + 1}"
    word = f"^{expr.word}" if expr.word else ""
    return f"[{inner}]{suffix}{word}"


def print_value(value) -> str:
    if isinstance(value, FinSpace):
        return print_space(value)
    if isinstance(value, SpaceMap):
        return print_map(value)
    if isinstance(value, ClassExpr):
        return print_classexpr(value)
    raise TypeError(f"cannot print {type(value).__name__}")


# -- DOT rendering -------------------------------------------------------------


def _dot_space_lines(space: FinSpace, prefix: str, indent: str) -> list[str]:
    lines = []
    for i in range(space.n):
        lines.append(f'{indent}{prefix}{i} [label="{space.label_of(i)}"];')
    classes = space.indistinguishability_classes()
    for cls in sorted(classes, key=lambda c: min(_bits(c))):
        members = sorted(_bits(cls))
        for a, b in zip(members, members[1:]):
            lines.append(f"{indent}{prefix}{a} -> {prefix}{b} [dir=both];")
    for a, b in _hasse_edges(space):
        lines.append(f"{indent}{prefix}{a} -> {prefix}{b};")
    return lines


def render_dot(value) -> str:
    if isinstance(value, FinSpace):
        lines = ["digraph space {"]
        lines.extend(_dot_space_lines(value, "p", "  "))
        lines.append("}")
        return "\n".join(lines) + "\n"
    if isinstance(value, SpaceMap):
        lines = ["digraph map {"]
        lines.append("  subgraph cluster_dom {")
        lines.append('    label="domain";')
        lines.extend(_dot_space_lines(value.dom, "d", "    "))
        lines.append("  }")
        lines.append("  subgraph cluster_cod {")
        lines.append('    label="codomain";')
        lines.extend(_dot_space_lines(value.cod, "c", "    "))
        lines.append("  }")
        for i, v in enumerate(value.assign):
            lines.append(f"  d{i} -> c{v} [style=dashed,constraint=false];")
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise TypeError(f"cannot render {type(value).__name__}")


# -- AST JSON mirror -----------------------------------------------------------


def ast_to_json(ast: NotationAst) -> dict:
    if isinstance(ast, SpaceAst):
        return {
            "kind": "Space",
            "chains": [
                {"labels": list(labels), "ops": list(ops)} for labels, ops in ast.chains
            ],
        }
    if isinstance(ast, MapAst):
        return {
            "kind": "Map",
            "domain": ast_to_json(ast.dom),
            "codomain": ast_to_json(ast.cod),
        }
    return {
        "kind": "ClassExpr",
        "maps": [ast_to_json(m) for m in ast.maps],
        "bound": ast.bound,
        "word": ast.word,
    }
