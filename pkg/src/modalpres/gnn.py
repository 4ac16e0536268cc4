"""Aggregate-combine GNNs over exact rationals and the formula compiler.

A layer maps each node's vector x(v) to
``act(b + x(v) A + agg{x(w) : w neighbour of v} C)`` where ``act`` is ReLU
or the truncated ReLU ``min(1, max(0, .))``. Scalars are ints when
integral and Fractions otherwise, so every computation is exact.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from .formula import (
    And, Bottom, Diamond, Formula, Or, Prop, Top, classify, parse_formula, props_of,
    subformulas,
)
from .kripke import PointedModel, Signature, TreeModel, make_model
from .morphisms import MorphismKind, saturating_matching, verify_witness

AGGREGATORS = ("SUM", "MAX", "MAXKSUM", "MEAN")
ACTIVATIONS = ("relu", "clip")


class GnnError(ValueError):
    pass


class GnnFormatError(GnnError):
    pass


class DimensionMismatchError(GnnError):
    pass


class GraphError(ValueError):
    pass


class AsymmetricRelationError(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class FragmentError(ValueError):
    pass


def _num(x):
    """Normalize to int when integral, else Fraction."""
    if isinstance(x, bool):
        raise GnnFormatError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        try:
            q = Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise GnnFormatError(f"not a rational: {x!r}") from exc
        return _num(q)
    raise GnnFormatError(f"not a rational: {x!r} (use an integer or a 'p/q' string)")


def format_rational(x) -> str:
    return str(Fraction(x))


# -- graphs ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FeatureGraph:
    dim: int
    nodes: tuple
    edges: frozenset
    features: Mapping[str, tuple]

    def __post_init__(self):
        nodes = tuple(sorted(self.nodes))
        object.__setattr__(self, "nodes", nodes)
        if len(set(nodes)) != len(nodes):
            raise GraphError("duplicate node ids")
        node_set = set(nodes)
        edges = set()
        for e in self.edges:
            u, v = tuple(e) if len(tuple(e)) == 2 else (None, None)
            if u is None:
                raise GraphError(f"edge {e!r} is not a pair of distinct nodes")
            if u not in node_set or v not in node_set:
                raise GraphError(f"edge {sorted(e)!r} uses an unknown node")
            edges.add(frozenset((u, v)))
        object.__setattr__(self, "edges", frozenset(edges))
        feats = {}
        for v in nodes:
            if v not in self.features:
                raise GraphError(f"node {v!r} has no feature vector")
            vec = tuple(self.features[v])
            if len(vec) != self.dim or any(x not in (0, 1) or isinstance(x, bool) for x in vec):
                raise GraphError(f"feature of {v!r} must be a 0/1 vector of length {self.dim}")
            feats[v] = vec
        if set(self.features) - node_set:
            raise GraphError("features given for unknown nodes")
        object.__setattr__(self, "features", feats)

    @cached_property
    def neighbours(self) -> dict[str, tuple]:
        nb: dict[str, list] = {v: [] for v in self.nodes}
        for e in self.edges:
            u, v = sorted(e)
            nb[u].append(v)
            nb[v].append(u)
        return {v: tuple(sorted(ws)) for v, ws in nb.items()}

    def __eq__(self, other):
        if not isinstance(other, FeatureGraph):
            return NotImplemented
        return (self.dim, self.nodes, self.edges, self.features) == (
            other.dim, other.nodes, other.edges, other.features)

    def __hash__(self):
        return hash((self.dim, self.nodes, self.edges))


def graph_from_dict(doc) -> FeatureGraph:
    if not isinstance(doc, dict):
        raise GraphError("graph document must be a JSON object")
    keys = {"dim", "nodes", "edges", "features"}
    if set(doc) != keys:
        extra = sorted(set(doc) - keys) or sorted(keys - set(doc))
        raise GraphError(f"graph document has wrong keys (problem with {extra[0]!r})")
    if not isinstance(doc["dim"], int) or doc["dim"] < 0:
        raise GraphError("'dim' must be a natural number")
    if not isinstance(doc["nodes"], list) or not all(isinstance(v, str) for v in doc["nodes"]):
        raise GraphError("'nodes' must be a list of strings")
    edges = doc["edges"]
    if not isinstance(edges, list) or not all(isinstance(e, list) and len(e) == 2 for e in edges):
        raise GraphError("'edges' must be a list of node pairs")
    for u, v in edges:
        if u == v:
            raise SelfLoopError(f"self-loop at {u!r}")
    if not isinstance(doc["features"], dict):
        raise GraphError("'features' must map nodes to vectors")
    return FeatureGraph(doc["dim"], tuple(doc["nodes"]), frozenset(frozenset(e) for e in edges),
                        doc["features"])


def graph_to_dict(g: FeatureGraph) -> dict:
    return {
        "dim": g.dim,
        "nodes": list(g.nodes),
        "edges": sorted(sorted(e) for e in g.edges),
        "features": {v: list(g.features[v]) for v in g.nodes},
    }


def load_graph(text: str) -> FeatureGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"invalid JSON: {exc}") from exc
    return graph_from_dict(doc)


def default_signature(dim: int) -> Signature:
    return Signature(tuple(f"p{i + 1}" for i in range(dim)))


def graph_to_kripke(g: FeatureGraph, node: str, signature=None) -> PointedModel:
    """Both directions of every edge; proposition i holds where feature bit i is 1."""
    if node not in g.features:
        raise GraphError(f"unknown node {node!r}")
    sig = signature if signature is not None else default_signature(g.dim)
    sig = sig if isinstance(sig, Signature) else Signature(tuple(sig))
    if len(sig) != g.dim:
        raise DimensionMismatchError(f"signature has {len(sig)} propositions, graph dim is {g.dim}")
    edges = [(u, v) for e in g.edges for u, v in itertools.permutations(sorted(e))]
    valuation = {p: [v for v in g.nodes if g.features[v][i]] for i, p in enumerate(sig)}
    return make_model(sig, g.nodes, edges, valuation, node)


def kripke_to_graph(m: PointedModel) -> tuple[FeatureGraph, str]:
    if isinstance(m, TreeModel):
        m = m.base
    for u, v in sorted(m.edges):
        if u == v:
            raise SelfLoopError(f"self-loop at {u!r}")
    for u, v in sorted(m.edges):
        if (v, u) not in m.edges:
            raise AsymmetricRelationError(f"edge ({u!r}, {v!r}) has no reverse")
    features = {w: tuple(1 if w in m.valuation[p] else 0 for p in m.signature) for w in m.worlds}
    edges = frozenset(frozenset(e) for e in m.edges)
    return FeatureGraph(len(m.signature), tuple(m.worlds), edges, features), m.point


# -- networks --------------------------------------------------------------


def _matrix(rows, n_in, n_out, name):
    if not isinstance(rows, (list, tuple)) or len(rows) != n_in:
        raise DimensionMismatchError(f"{name} must have {n_in} rows")
    out = []
    for row in rows:
        if not isinstance(row, (list, tuple)) or len(row) != n_out:
            raise DimensionMismatchError(f"every row of {name} must have {n_out} entries")
        out.append(tuple(_num(x) for x in row))
    return tuple(out)


@dataclass(frozen=True)
class GnnLayer:
    agg: str
    A: tuple
    C: tuple
    b: tuple
    k: int | None = None
    activation: str = "relu"

    def __post_init__(self):
        if self.agg not in AGGREGATORS:
            raise GnnFormatError(f"unknown aggregation {self.agg!r}")
        if self.agg == "MAXKSUM":
            if not isinstance(self.k, int) or self.k < 1:
                raise GnnFormatError("MAXKSUM needs an integer k >= 1")
        elif self.k is not None:
            raise GnnFormatError("only MAXKSUM takes k")
        if self.activation not in ACTIVATIONS:
            raise GnnFormatError(f"unknown activation {self.activation!r}")
        b = tuple(_num(x) for x in self.b)
        object.__setattr__(self, "b", b)
        n_in = len(self.A)
        object.__setattr__(self, "A", _matrix(self.A, n_in, len(b), "A"))
        object.__setattr__(self, "C", _matrix(self.C, n_in, len(b), "C"))

    @property
    def in_dim(self) -> int:
        return len(self.A)

    @property
    def out_dim(self) -> int:
        return len(self.b)

    @cached_property
    def _columns(self):
        cols = []
        for j in range(self.out_dim):
            a = tuple((i, self.A[i][j]) for i in range(self.in_dim) if self.A[i][j])
            c = tuple((i, self.C[i][j]) for i in range(self.in_dim) if self.C[i][j])
            cols.append((self.b[j], a, c))
        return tuple(cols)

    def aggregate(self, vectors: Sequence[tuple]) -> tuple:
        return aggregate(self.agg, vectors, self.in_dim, self.k)

    def apply(self, x: tuple, agg: tuple) -> tuple:
        out = []
        clip = self.activation == "clip"
        for bias, a, c in self._columns:
            s = bias
            for i, w in a:
                s += x[i] * w
            for i, w in c:
                s += agg[i] * w
            if s < 0:
                s = 0
            elif clip and s > 1:
                s = 1
            out.append(_num(s) if isinstance(s, Fraction) else s)
        return tuple(out)


def aggregate(name: str, vectors: Sequence[tuple], dim: int, k: int | None = None) -> tuple:
    """Aggregate a multiset of vectors; the empty multiset gives the zero vector."""
    if not vectors:
        return (0,) * dim
    if name == "SUM":
        return tuple(sum(col) for col in zip(*vectors))
    if name == "MAX":
        return tuple(max(col) for col in zip(*vectors))
    if name == "MAXKSUM":
        return tuple(sum(sorted(col, reverse=True)[:k]) for col in zip(*vectors))
    if name == "MEAN":
        n = len(vectors)
        return tuple(_num(Fraction(sum(col), n)) for col in zip(*vectors))
    raise GnnFormatError(f"unknown aggregation {name!r}")


@dataclass(frozen=True)
class GnnModel:
    input_dim: int
    layers: tuple
    threshold: object = 0
    strict: bool = False

    def __post_init__(self):
        layers = tuple(self.layers)
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "threshold", _num(self.threshold))
        dim = self.input_dim
        for idx, layer in enumerate(layers):
            if layer.in_dim != dim:
                raise DimensionMismatchError(
                    f"layer {idx} expects input dimension {layer.in_dim}, got {dim}")
            dim = layer.out_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1].out_dim if self.layers else self.input_dim

    def classify(self, vec: tuple) -> bool:
        if self.strict:
            return all(x > self.threshold for x in vec)
        return all(x >= self.threshold for x in vec)


def gnn_from_dict(doc) -> GnnModel:
    if not isinstance(doc, dict) or set(doc) != {"input_dim", "layers", "classifier"}:
        raise GnnFormatError("network document needs exactly input_dim, layers, classifier")
    if not isinstance(doc["input_dim"], int) or isinstance(doc["input_dim"], bool) or doc["input_dim"] < 0:
        raise GnnFormatError("'input_dim' must be a natural number")
    if not isinstance(doc["layers"], list):
        raise GnnFormatError("'layers' must be a list")
    layers = []
    for ld in doc["layers"]:
        if not isinstance(ld, dict):
            raise GnnFormatError("each layer must be an object")
        extra = set(ld) - {"agg", "A", "C", "b", "k", "activation"}
        if extra or not {"agg", "A", "C", "b"} <= set(ld):
            raise GnnFormatError("layer needs agg, A, C, b (optional k, activation)")
        agg, k = ld["agg"], ld.get("k")
        if isinstance(agg, str) and agg.startswith("MAXKSUM(") and agg.endswith(")"):
            try:
                k = int(agg[len("MAXKSUM("):-1])
            except ValueError as exc:
                raise GnnFormatError(f"bad aggregation {agg!r}") from exc
            agg = "MAXKSUM"
        if not isinstance(ld["b"], list):
            raise GnnFormatError("'b' must be a list")
        layers.append(GnnLayer(agg, ld["A"], ld["C"], ld["b"], k, ld.get("activation", "relu")))
    cls = doc["classifier"]
    if not isinstance(cls, dict) or set(cls) - {"threshold", "strict"} or "threshold" not in cls:
        raise GnnFormatError("classifier needs threshold and optional strict")
    strict = cls.get("strict", False)
    if not isinstance(strict, bool):
        raise GnnFormatError("'strict' must be a boolean")
    return GnnModel(doc["input_dim"], tuple(layers), cls["threshold"], strict)


def gnn_to_dict(n: GnnModel) -> dict:
    layers = []
    for layer in n.layers:
        d = {
            "agg": layer.agg,
            "A": [[format_rational(x) for x in row] for row in layer.A],
            "C": [[format_rational(x) for x in row] for row in layer.C],
            "b": [format_rational(x) for x in layer.b],
        }
        if layer.k is not None:
            d["k"] = layer.k
        if layer.activation != "relu":
            d["activation"] = layer.activation
        layers.append(d)
    return {
        "input_dim": n.input_dim,
        "layers": layers,
        "classifier": {"threshold": format_rational(n.threshold), "strict": n.strict},
    }


def load_gnn(text: str) -> GnnModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GnnFormatError(f"invalid JSON: {exc}") from exc
    return gnn_from_dict(doc)


def dump_gnn(n: GnnModel) -> str:
    return json.dumps(gnn_to_dict(n), sort_keys=True)


# -- evaluation ------------------------------------------------------------


def run_gnn(n: GnnModel, g: FeatureGraph) -> list[dict[str, tuple]]:
    """Layer trace for every node; entry 0 holds the input features."""
    if g.dim != n.input_dim:
        raise DimensionMismatchError(f"graph dim {g.dim} != network input_dim {n.input_dim}")
    current = {v: tuple(g.features[v]) for v in g.nodes}
    trace = [current]
    nb = g.neighbours
    for layer in n.layers:
        current = {
            v: layer.apply(current[v], layer.aggregate([current[w] for w in nb[v]]))
            for v in g.nodes
        }
        trace.append(current)
    return trace


def evaluate_gnn(n: GnnModel, g: FeatureGraph, node: str) -> tuple[bool, list[tuple]]:
    """Verdict at ``node`` and its per-layer vectors (input features first)."""
    if node not in g.features:
        raise GraphError(f"unknown node {node!r}")
    trace = run_gnn(n, g)
    return n.classify(trace[-1][node]), [t[node] for t in trace]


# -- monotonicity ----------------------------------------------------------


def multiset_leq(M: Sequence[Sequence], N: Sequence[Sequence]) -> bool:
    """Is there an injection f: M -> N with x <= f(x) coordinatewise?"""
    dims = {len(x) for x in M} | {len(y) for y in N}
    if len(dims) > 1:
        raise DimensionMismatchError("vectors of different dimensions")
    if len(M) > len(N):
        return False
    M = [tuple(_num(v) for v in x) for x in M]
    N = [tuple(_num(v) for v in y) for y in N]
    adj = [[j for j, y in enumerate(N) if all(a <= b for a, b in zip(x, y))] for x in M]
    return saturating_matching(len(M), adj) is not None


MEAN_EVIDENCE = {"smaller": [[1]], "larger": [[1], [0]], "values": ["1", "1/2"]}


@dataclass(frozen=True)
class CertificateReport:
    certified: bool
    reasons: tuple = ()
    evidence: dict | None = None


def certificate_report(n: GnnModel) -> CertificateReport:
    """Syntactic monotonicity certificate with the reasons it fails, if any.

    A MEAN layer comes with the standard violating pair: {1} <= {1, 0} as
    multisets, yet their means are 1 and 1/2.
    """
    reasons = []
    evidence = None
    for idx, layer in enumerate(n.layers):
        if layer.agg == "MEAN":
            reasons.append(f"layer {idx} uses MEAN aggregation")
            ev_small = aggregate("MEAN", [(1,)], 1)
            ev_large = aggregate("MEAN", [(1,), (0,)], 1)
            evidence = dict(MEAN_EVIDENCE, values=[format_rational(ev_small[0]),
                                                   format_rational(ev_large[0])])
        for name in ("A", "C"):
            mat = getattr(layer, name)
            for i, row in enumerate(mat):
                for j, x in enumerate(row):
                    if x < 0:
                        reasons.append(f"layer {idx} has negative {name}[{i}][{j}] = {format_rational(x)}")
    return CertificateReport(not reasons, tuple(reasons), evidence)


def positive_weight_certificate(n: GnnModel) -> bool:
    """Non-negative A and C in every layer and no MEAN aggregation."""
    return certificate_report(n).certified


def trace_dominated(n: GnnModel, g: FeatureGraph, h: FeatureGraph, mapping: Mapping[str, str]):
    """First (layer, node, coordinate) where trace_g[l][v] > trace_h[l][mapping[v]], or None."""
    tg, th = run_gnn(n, g), run_gnn(n, h)
    for ell, (lg, lh) in enumerate(zip(tg, th)):
        for v in g.nodes:
            for i, (x, y) in enumerate(zip(lg[v], lh[mapping[v]])):
                if x > y:
                    return ell, v, i
    return None


@dataclass(frozen=True)
class MonotonicityViolation:
    source: FeatureGraph
    target: FeatureGraph
    mapping: dict
    layer: int
    node: str
    coordinate: int


def all_graphs(dim: int, max_nodes: int):
    """Every labelled graph on nodes n0 .. n(k-1) for k <= max_nodes (not deduplicated)."""
    for k in range(1, max_nodes + 1):
        nodes = tuple(f"n{i}" for i in range(k))
        pairs = list(itertools.combinations(nodes, 2))
        feats = list(itertools.product((0, 1), repeat=dim))
        for mask in range(1 << len(pairs)):
            edges = frozenset(frozenset(pairs[i]) for i in range(len(pairs)) if mask >> i & 1)
            for labels in itertools.product(feats, repeat=k):
                yield FeatureGraph(dim, nodes, edges, dict(zip(nodes, labels)))


def find_monotonicity_violation(n: GnnModel, max_nodes: int = 3,
                                kind: MorphismKind = MorphismKind.INJECTIVE_HOM):
    """Search small graph pairs related by ``kind`` for a pointwise trace decrease."""
    graphs = list(all_graphs(n.input_dim, max_nodes))
    for g in graphs:
        for h in graphs:
            if kind.injective and len(g.nodes) > len(h.nodes):
                continue
            for mapping in _graph_morphisms(g, h, kind):
                hit = trace_dominated(n, g, h, mapping)
                if hit is not None:
                    return MonotonicityViolation(g, h, mapping, *hit)
    return None


def _graph_morphisms(g: FeatureGraph, h: FeatureGraph, kind: MorphismKind):
    for image in itertools.product(h.nodes, repeat=len(g.nodes)):
        if kind.injective and len(set(image)) != len(image):
            continue
        mapping = dict(zip(g.nodes, image))
        if is_graph_morphism(g, h, mapping, kind):
            yield mapping


def is_graph_morphism(g: FeatureGraph, h: FeatureGraph, mapping, kind: MorphismKind) -> bool:
    """Kind check on the underlying Kripke models, with every node as its own point."""
    if not g.nodes:
        return True
    v = g.nodes[0]
    return verify_witness(kind, graph_to_kripke(g, v), graph_to_kripke(h, mapping[v]), mapping)


# -- random instances ------------------------------------------------------


def random_rational(rng: random.Random, lo: int, hi: int, max_den: int = 4):
    den = rng.randint(1, max_den)
    return _num(Fraction(rng.randint(lo * den, hi * den), den))


def random_positive_network(rng: random.Random, input_dim: int, max_layers: int = 2,
                            max_dim: int = 3, aggs=("SUM", "MAX", "MAXKSUM")) -> GnnModel:
    """Random network passing the certificate: weights in [0, 3], biases in [-2, 2]."""
    layers = []
    dim = input_dim
    for _ in range(rng.randint(1, max_layers)):
        out = rng.randint(1, max_dim)
        agg = rng.choice(aggs)
        k = rng.randint(1, 3) if agg == "MAXKSUM" else None
        A = [[random_rational(rng, 0, 3) for _ in range(out)] for _ in range(dim)]
        C = [[random_rational(rng, 0, 3) for _ in range(out)] for _ in range(dim)]
        b = [random_rational(rng, -2, 2) for _ in range(out)]
        layers.append(GnnLayer(agg, A, C, b, k))
        dim = out
    return GnnModel(input_dim, tuple(layers), random_rational(rng, 0, 3), rng.random() < 0.5)


def random_graph(rng: random.Random, n_nodes: int, dim: int, p_edge: float = 0.5,
                 prefix: str = "n") -> FeatureGraph:
    nodes = tuple(f"{prefix}{i}" for i in range(n_nodes))
    edges = frozenset(frozenset(e) for e in itertools.combinations(nodes, 2) if rng.random() < p_edge)
    feats = {v: tuple(rng.randint(0, 1) for _ in range(dim)) for v in nodes}
    return FeatureGraph(dim, nodes, edges, feats)


def random_morphism_pair(rng: random.Random, dim: int, max_nodes: int, injective: bool):
    """Random (source, target, mapping) where mapping is a verified (injective) hom.

    The target is random; the source is built over a random map into the
    target, keeping a random subset of the edges that the map allows and
    labels contained in the image labels.
    """
    target = random_graph(rng, rng.randint(1, max_nodes), dim, prefix="t")
    size = rng.randint(1, len(target.nodes) if injective else max_nodes)
    if injective:
        image = rng.sample(target.nodes, size)
    else:
        image = [rng.choice(target.nodes) for _ in range(size)]
    nodes = tuple(f"s{i}" for i in range(size))
    mapping = dict(zip(nodes, image))
    edges = frozenset(
        frozenset((u, v)) for u, v in itertools.combinations(nodes, 2)
        if frozenset((mapping[u], mapping[v])) in target.edges and rng.random() < 0.8
    )
    feats = {
        v: tuple(x if rng.random() < 0.8 else 0 for x in target.features[mapping[v]]) for v in nodes
    }
    source = FeatureGraph(dim, nodes, edges, feats)
    kind = MorphismKind.INJECTIVE_HOM if injective else MorphismKind.HOM
    assert is_graph_morphism(source, target, mapping, kind)
    return source, target, mapping


# -- compiler --------------------------------------------------------------


def _level(f: Formula, memo: dict) -> int:
    if f in memo:
        return memo[f]
    if isinstance(f, (Prop, Top, Bottom)):
        out = 1
    elif isinstance(f, Diamond):
        out = 1 + _level(f.child, memo)
    elif isinstance(f, (And, Or)):
        out = 1 + max(_level(f.left, memo), _level(f.right, memo))
    else:
        raise FragmentError("negation is not allowed in the compiled fragment")
    memo[f] = out
    return out


@dataclass(frozen=True)
class CompiledNetwork:
    network: GnnModel
    signature: Signature
    coordinates: tuple = field(default=())


def compile_formula_to_gnn(f, signature=None, use_max: bool = False) -> GnnModel:
    return compile_formula(f, signature, use_max).network


def compile_formula(f, signature=None, use_max: bool = False) -> CompiledNetwork:
    """Positive-weight network accepting exactly the nodes where ``f`` holds.

    Hidden coordinates track the distinct subformulas with values in {0, 1}
    using truncated ReLU units: a conjunction is ``x + y - 1``, a
    disjunction ``x + y``, ``<k>g`` is ``SUM of g over neighbours - (k-1)``.
    The network has one layer per level of ``f`` (atoms have level 1,
    each connective adds 1); the last layer keeps only the coordinate of
    ``f`` and the classifier is ``>= 1``. With ``use_max`` every layer
    aggregates by MAX and ``f`` must be free of grades above 1.
    """
    if isinstance(f, str):
        f = parse_formula(f)
    report = classify(f)
    if not report.in_exists_pos_GML:
        raise FragmentError("only negation-free (∃⁺GML) formulas can be compiled")
    if use_max and not report.in_exists_pos_ML:
        raise FragmentError("MAX compilation needs every diamond grade to be 1")
    if signature is None:
        signature = tuple(sorted(props_of(f))) or ("p1",)
    sig = signature if isinstance(signature, Signature) else Signature(tuple(signature))
    missing = props_of(f) - set(sig)
    if missing:
        raise FragmentError(f"proposition {sorted(missing)[0]!r} is not in the signature")
    subs = subformulas(f)
    index = {g: i for i, g in enumerate(subs)}
    levels: dict = {}
    depth = _level(f, levels)
    d, s = len(sig), len(subs)
    agg = "MAX" if use_max else "SUM"
    layers = []
    for layer_no in range(1, depth + 1):
        last = layer_no == depth
        outs = [f] if last else subs
        n_in = d if layer_no == 1 else s
        A = [[0] * len(outs) for _ in range(n_in)]
        C = [[0] * len(outs) for _ in range(n_in)]
        b = [0] * len(outs)
        for j, g in enumerate(outs):
            if isinstance(g, Prop):
                A[sig.index(g.name) if layer_no == 1 else index[g]][j] = 1
            elif isinstance(g, Top):
                b[j] = 1
            elif isinstance(g, Bottom):
                pass
            elif layer_no == 1:
                pass  # compound coordinates start at 0 and are filled in later layers
            elif isinstance(g, (And, Or)):
                A[index[g.left]][j] += 1
                A[index[g.right]][j] += 1
                b[j] = -1 if isinstance(g, And) else 0
            else:
                C[index[g.child]][j] = 1
                b[j] = -(g.grade - 1)
        layers.append(GnnLayer(agg, A, C, b, activation="clip"))
    return CompiledNetwork(GnnModel(d, tuple(layers), 1, False), sig, tuple(subs))
