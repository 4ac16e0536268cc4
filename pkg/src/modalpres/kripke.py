"""Finite pointed Kripke models, tree certification and canonical tree keys."""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
RESERVED = {"true", "false"}

_MODEL_KEYS = {"signature", "worlds", "edges", "valuation", "point"}


class ModelError(ValueError):
    """Base class for problems with model documents and model values."""


class ModelFormatError(ModelError):
    """Malformed JSON or a document that violates the model schema."""


class ModelSemanticError(ModelError):
    """Well-formed document describing an inconsistent model."""


class NotATreeError(ModelError):
    pass


class SignatureMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    props: tuple[str, ...] = ()

    def __post_init__(self):
        props = tuple(self.props)
        object.__setattr__(self, "props", props)
        for p in props:
            if not isinstance(p, str) or not IDENT.match(p) or p in RESERVED:
                raise ModelSemanticError(f"invalid proposition name {p!r}")
        if len(set(props)) != len(props):
            raise ModelSemanticError("duplicate proposition names in signature")

    def __iter__(self) -> Iterator[str]:
        return iter(self.props)

    def __len__(self) -> int:
        return len(self.props)

    def __contains__(self, name) -> bool:
        return name in self.props

    def index(self, name: str) -> int:
        return self.props.index(name)


def _as_signature(sig) -> Signature:
    return sig if isinstance(sig, Signature) else Signature(tuple(sig))


@dataclass(frozen=True, eq=False)
class PointedModel:
    """A finite Kripke model ``(W, R, V)`` with a distinguished world.

    ``valuation`` maps every proposition of the signature to the set of
    worlds where it holds; propositions missing from the mapping hold
    nowhere. Instances are immutable and compare by value.
    """

    signature: Signature
    worlds: frozenset
    edges: frozenset
    valuation: Mapping[str, frozenset]
    point: str

    def __post_init__(self):
        sig = _as_signature(self.signature)
        object.__setattr__(self, "signature", sig)
        worlds = frozenset(self.worlds)
        object.__setattr__(self, "worlds", worlds)
        edges = frozenset((u, v) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        if not worlds:
            raise ModelSemanticError("a model needs at least one world")
        for w in worlds:
            if not isinstance(w, str) or not w:
                raise ModelSemanticError(f"world ids must be non-empty strings, got {w!r}")
        if self.point not in worlds:
            raise ModelSemanticError(f"point {self.point!r} is not a world")
        for u, v in edges:
            if u not in worlds or v not in worlds:
                missing = u if u not in worlds else v
                raise ModelSemanticError(f"edge ({u!r}, {v!r}) uses unknown world {missing!r}")
        val = {}
        for p, ws in dict(self.valuation).items():
            if p not in sig:
                raise ModelSemanticError(f"valuation names unknown proposition {p!r}")
            ws = frozenset(ws)
            unknown = ws - worlds
            if unknown:
                raise ModelSemanticError(
                    f"valuation of {p!r} uses unknown world {sorted(unknown)[0]!r}"
                )
            val[p] = ws
        object.__setattr__(self, "valuation", {p: val.get(p, frozenset()) for p in sig})

    def __eq__(self, other):
        if not isinstance(other, PointedModel):
            return NotImplemented
        return (
            self.signature == other.signature
            and self.worlds == other.worlds
            and self.edges == other.edges
            and self.valuation == other.valuation
            and self.point == other.point
        )

    def __hash__(self):
        return hash((self.signature, self.worlds, self.edges, self.point))

    @cached_property
    def successors(self) -> dict[str, tuple[str, ...]]:
        succ: dict[str, list[str]] = {w: [] for w in self.worlds}
        for u, v in self.edges:
            succ[u].append(v)
        return {w: tuple(sorted(vs)) for w, vs in succ.items()}

    @cached_property
    def predecessors(self) -> dict[str, tuple[str, ...]]:
        pred: dict[str, list[str]] = {w: [] for w in self.worlds}
        for u, v in self.edges:
            pred[v].append(u)
        return {w: tuple(sorted(vs)) for w, vs in pred.items()}

    @cached_property
    def labels(self) -> dict[str, frozenset]:
        """World-major view of the valuation."""
        out: dict[str, set] = {w: set() for w in self.worlds}
        for p, ws in self.valuation.items():
            for w in ws:
                out[w].add(p)
        return {w: frozenset(ps) for w, ps in out.items()}

    @cached_property
    def label_bits(self) -> dict[str, str]:
        return {
            w: "".join("1" if w in self.valuation[p] else "0" for p in self.signature)
            for w in self.worlds
        }

    def sorted_worlds(self) -> list[str]:
        return sorted(self.worlds)

    def with_point(self, point: str) -> PointedModel:
        return PointedModel(self.signature, self.worlds, self.edges, self.valuation, point)

    def distances(self) -> dict[str, int]:
        """Shortest directed distance from the point; unreachable worlds are absent."""
        dist = {self.point: 0}
        queue = deque([self.point])
        while queue:
            u = queue.popleft()
            for v in self.successors[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    def generated(self) -> PointedModel:
        """Submodel generated by the point (worlds reachable from it)."""
        keep = set(self.distances())
        if len(keep) == len(self.worlds):
            return self
        return self.restrict(keep)

    def restrict(self, keep: Iterable[str]) -> PointedModel:
        keep = frozenset(keep)
        return PointedModel(
            self.signature,
            keep,
            frozenset((u, v) for u, v in self.edges if u in keep and v in keep),
            {p: ws & keep for p, ws in self.valuation.items()},
            self.point,
        )

    def __repr__(self):
        return (
            f"PointedModel(point={self.point!r}, worlds={sorted(self.worlds)}, "
            f"edges={sorted(self.edges)}, labels={ {w: sorted(self.labels[w]) for w in sorted(self.worlds)} })"
        )


def make_model(signature, worlds, edges, valuation, point) -> PointedModel:
    return PointedModel(_as_signature(signature), frozenset(worlds), frozenset(map(tuple, edges)),
                        {p: frozenset(ws) for p, ws in valuation.items()}, point)


@dataclass(frozen=True, eq=False)
class TreeModel:
    """A pointed model certified tree-shaped with root ``base.point``."""

    base: PointedModel
    parent: Mapping[str, str]
    height: int
    depth: Mapping[str, int] = field(repr=False)

    @property
    def root(self) -> str:
        return self.base.point

    @property
    def signature(self) -> Signature:
        return self.base.signature

    @property
    def worlds(self) -> frozenset:
        return self.base.worlds

    @property
    def children(self) -> dict[str, tuple[str, ...]]:
        return self.base.successors

    def __eq__(self, other):
        if not isinstance(other, TreeModel):
            return NotImplemented
        return self.base == other.base

    def __hash__(self):
        return hash(self.base)

    @cached_property
    def subtree_height(self) -> dict[str, int]:
        h: dict[str, int] = {}
        for w in sorted(self.worlds, key=lambda x: -self.depth[x]):
            kids = self.children[w]
            h[w] = 1 + max(h[c] for c in kids) if kids else 0
        return h

    @cached_property
    def codes(self) -> dict[str, str]:
        """AHU code of the subtree rooted at every world."""
        bits = self.base.label_bits
        code: dict[str, str] = {}
        for w in sorted(self.worlds, key=lambda x: -self.depth[x]):
            code[w] = "(" + bits[w] + "".join(sorted(code[c] for c in self.children[w])) + ")"
        return code

    def subtree(self, node: str) -> TreeModel:
        keep = [node]
        stack = [node]
        while stack:
            for c in self.children[stack.pop()]:
                keep.append(c)
                stack.append(c)
        return as_tree(self.base.restrict(keep).with_point(node))

    def __repr__(self):
        return f"TreeModel(height={self.height}, key={canonical_key(self)})"


def as_tree(m: PointedModel) -> TreeModel:
    """Certify that ``m`` is tree-shaped with root ``m.point``.

    Raises NotATreeError on cycles, multiple parents, unreachable worlds, or
    when the point has a predecessor.
    """
    if isinstance(m, TreeModel):
        return m
    pred = m.predecessors
    if pred[m.point]:
        raise NotATreeError(f"root {m.point!r} has a predecessor {pred[m.point][0]!r}")
    parent = {}
    for w in m.worlds:
        if w == m.point:
            continue
        if len(pred[w]) != 1:
            raise NotATreeError(f"world {w!r} has {len(pred[w])} predecessors")
        parent[w] = pred[w][0]
    depth = m.distances()
    if len(depth) != len(m.worlds):
        missing = sorted(m.worlds - set(depth))[0]
        raise NotATreeError(f"world {missing!r} is unreachable from the root")
    return TreeModel(m, parent, max(depth.values()), depth)


def is_tree(m: PointedModel) -> bool:
    try:
        as_tree(m)
    except NotATreeError:
        return False
    return True


def canonical_key(t) -> str:
    """Isomorphism-complete string key of a tree (AHU encoding).

    Each node is written as ``(bits children...)`` where ``bits`` is the
    node's valuation over the signature order and the children codes are
    sorted. Two trees over the same signature get the same key iff they are
    isomorphic as pointed models.
    """
    t = as_tree(t)
    return t.codes[t.root]


# -- serialization ---------------------------------------------------------


def model_to_dict(m: PointedModel) -> dict:
    if isinstance(m, TreeModel):
        m = m.base
    return {
        "signature": list(m.signature),
        "worlds": sorted(m.worlds),
        "edges": [list(e) for e in sorted(m.edges)],
        "valuation": {p: sorted(m.valuation[p]) for p in m.signature},
        "point": m.point,
    }


def dump_model(m: PointedModel) -> str:
    return json.dumps(model_to_dict(m), sort_keys=True)


def _require_str_list(doc, key):
    value = doc[key]
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise ModelFormatError(f"{key!r} must be a list of strings")
    return value


def model_from_dict(doc) -> PointedModel:
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    unknown = set(doc) - _MODEL_KEYS
    if unknown:
        raise ModelFormatError(f"unknown key {sorted(unknown)[0]!r}")
    missing = _MODEL_KEYS - set(doc)
    if missing:
        raise ModelFormatError(f"missing key {sorted(missing)[0]!r}")
    signature = _require_str_list(doc, "signature")
    worlds = _require_str_list(doc, "worlds")
    if len(set(worlds)) != len(worlds):
        raise ModelSemanticError("duplicate world ids")
    for w in worlds:
        if "/" in w:
            # reserved for unravelling path ids
            raise ModelSemanticError(f"world id {w!r} contains '/'")
    edges = doc["edges"]
    if not isinstance(edges, list) or not all(
        isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e) for e in edges
    ):
        raise ModelFormatError("'edges' must be a list of [source, target] string pairs")
    valuation = doc["valuation"]
    if not isinstance(valuation, dict) or not all(
        isinstance(ws, list) and all(isinstance(x, str) for x in ws) for ws in valuation.values()
    ):
        raise ModelFormatError("'valuation' must map propositions to lists of worlds")
    point = doc["point"]
    if not isinstance(point, str):
        raise ModelFormatError("'point' must be a string")
    return make_model(signature, worlds, edges, valuation, point)


def load_model(text: str) -> PointedModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"invalid JSON: {exc}") from exc
    return model_from_dict(doc)
