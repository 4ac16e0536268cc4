"""Isomorphism, embedding and (injective) homomorphism search.

General pointed models go through a backtracking search; trees have a
polynomial decision procedure based on bipartite matching of children.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Mapping

from .kripke import PointedModel, SignatureMismatchError, TreeModel, as_tree


class MorphismKind(enum.Enum):
    ISO = "iso"
    EMBEDDING = "embed"
    INJECTIVE_HOM = "injhom"
    HOM = "hom"

    @property
    def injective(self) -> bool:
        return self is not MorphismKind.HOM

    @classmethod
    def parse(cls, name: str) -> MorphismKind:
        aliases = {"embedding": "embed", "injective": "injhom", "homomorphism": "hom"}
        name = aliases.get(name.lower(), name.lower())
        for kind in cls:
            if kind.value == name:
                return kind
        raise ValueError(f"unknown morphism kind {name!r}")


@dataclass(frozen=True)
class Witness:
    kind: MorphismKind
    mapping: Mapping[str, str]

    def to_json(self) -> dict:
        return {k: self.mapping[k] for k in sorted(self.mapping)}


def _base(m) -> PointedModel:
    return m.base if isinstance(m, TreeModel) else m


def _same_signature(a, b):
    if a.signature != b.signature:
        raise SignatureMismatchError(
            f"signatures differ: {list(a.signature)} vs {list(b.signature)}"
        )


def _label_ok(kind, la: str, lb: str) -> bool:
    if kind in (MorphismKind.ISO, MorphismKind.EMBEDDING):
        return la == lb
    return all(y == "1" for x, y in zip(la, lb) if x == "1")


def verify_witness(kind: MorphismKind, src, dst, mapping: Mapping[str, str]) -> bool:
    """Check ``mapping`` against the definition of ``kind`` directly."""
    src, dst = _base(src), _base(dst)
    if set(mapping) != set(src.worlds) or not set(mapping.values()) <= dst.worlds:
        return False
    if mapping[src.point] != dst.point:
        return False
    if kind.injective and len(set(mapping.values())) != len(mapping):
        return False
    if kind is MorphismKind.ISO and len(dst.worlds) != len(src.worlds):
        return False
    for w in src.worlds:
        if not _label_ok(kind, src.label_bits[w], dst.label_bits[mapping[w]]):
            return False
    for u, v in src.edges:
        if (mapping[u], mapping[v]) not in dst.edges:
            return False
    if kind in (MorphismKind.ISO, MorphismKind.EMBEDDING):
        inverse = {y: x for x, y in mapping.items()}
        for x, y in dst.edges:
            if x in inverse and y in inverse and (inverse[x], inverse[y]) not in src.edges:
                return False
    return True


def _search_order(m: PointedModel) -> list[str]:
    # point first, then BFS over undirected adjacency, restarting for leftovers
    seen: set[str] = set()
    order: list[str] = []
    for start in [m.point] + sorted(m.worlds):
        if start in seen:
            continue
        seen.add(start)
        queue = deque([start])
        while queue:
            u = queue.popleft()
            order.append(u)
            for v in sorted(set(m.successors[u]) | set(m.predecessors[u])):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
    return order


def find_morphism(kind: MorphismKind, src, dst) -> Witness | None:
    """Complete backtracking search for a morphism of ``kind`` from ``src`` to ``dst``."""
    src, dst = _base(src), _base(dst)
    _same_signature(src, dst)
    if kind.injective and len(src.worlds) > len(dst.worlds):
        return None
    if kind is MorphismKind.ISO and (
        len(src.worlds) != len(dst.worlds) or len(src.edges) != len(dst.edges)
    ):
        return None
    strict = kind in (MorphismKind.ISO, MorphismKind.EMBEDDING)
    s_out = {w: len(v) for w, v in src.successors.items()}
    s_in = {w: len(v) for w, v in src.predecessors.items()}
    d_out = {w: len(v) for w, v in dst.successors.items()}
    d_in = {w: len(v) for w, v in dst.predecessors.items()}
    d_sorted = sorted(dst.worlds)

    candidates = {}
    for w in src.worlds:
        cands = []
        for x in d_sorted:
            if not _label_ok(kind, src.label_bits[w], dst.label_bits[x]):
                continue
            if ((w, w) in src.edges) and (x, x) not in dst.edges:
                continue
            if strict and ((w, w) in src.edges) != ((x, x) in dst.edges):
                continue
            if kind.injective and (d_out[x] < s_out[w] or d_in[x] < s_in[w]):
                continue
            if kind is MorphismKind.ISO and (d_out[x] != s_out[w] or d_in[x] != s_in[w]):
                continue
            cands.append(x)
        candidates[w] = cands
    if dst.point not in candidates[src.point]:
        return None
    candidates[src.point] = [dst.point]

    order = _search_order(src)
    mapping: dict[str, str] = {}
    used: set[str] = set()

    def consistent(w, x):
        for v in src.successors[w]:
            if v in mapping and (x, mapping[v]) not in dst.edges:
                return False
        for v in src.predecessors[w]:
            if v in mapping and (mapping[v], x) not in dst.edges:
                return False
        if strict:
            for v, y in mapping.items():
                if v == w:
                    continue
                if (x, y) in dst.edges and (w, v) not in src.edges:
                    return False
                if (y, x) in dst.edges and (v, w) not in src.edges:
                    return False
        return True

    def extend(i):
        if i == len(order):
            return True
        w = order[i]
        for x in candidates[w]:
            if kind.injective and x in used:
                continue
            if not consistent(w, x):
                continue
            mapping[w] = x
            used.add(x)
            if extend(i + 1):
                return True
            del mapping[w]
            used.discard(x)
        return False

    if not extend(0):
        return None
    witness = Witness(kind, dict(mapping))
    assert verify_witness(kind, src, dst, witness.mapping)
    return witness


# -- bipartite matching ----------------------------------------------------


def saturating_matching(n_left: int, adj) -> dict[int, int] | None:
    """Matching covering every left vertex, found by augmenting paths (Kuhn).

    ``adj[i]`` lists the right vertices acceptable for left vertex ``i``.
    Returns the matching as left -> right, or None when none saturates.
    """
    owner: dict[int, int] = {}
    for i in range(n_left):
        if not adj[i]:
            return None

    def augment(i, seen):
        for j in adj[i]:
            if j in seen:
                continue
            seen.add(j)
            if j not in owner or augment(owner[j], seen):
                owner[j] = i
                return True
        return False

    for i in range(n_left):
        if not augment(i, set()):
            return None
    return {i: j for j, i in owner.items()}


# -- trees -----------------------------------------------------------------


def tree_preorder(kind: MorphismKind, a, b, memo: dict | None = None) -> bool:
    """Decide ``a ⪯ b`` for tree-shaped pointed models.

    Roots must be label compatible (equal labels for embeddings, inclusion
    for the homomorphism kinds). Children of the source root are then matched
    injectively into children of the target root for the injective kinds, or
    each mapped independently for Hom. ``memo`` is keyed by subtree codes and
    may be reused across calls with the same kind.
    """
    a, b = as_tree(a), as_tree(b)
    _same_signature(a, b)
    if kind is MorphismKind.ISO:
        return a.codes[a.root] == b.codes[b.root]
    return tree_node_leq(kind, a, a.root, b, b.root, {} if memo is None else memo)


def tree_node_leq(kind, a: TreeModel, x: str, b: TreeModel, y: str, memo: dict) -> bool:
    key = (kind, a.codes[x], b.codes[y])
    hit = memo.get(key)
    if hit is not None:
        return hit
    ans = _node_leq(kind, a, x, b, y, memo)
    memo[key] = ans
    return ans


def _node_leq(kind, a, x, b, y, memo):
    if not _label_ok(kind, a.base.label_bits[x], b.base.label_bits[y]):
        return False
    if a.subtree_height[x] > b.subtree_height[y]:
        return False
    xs, ys = a.children[x], b.children[y]
    if kind is MorphismKind.HOM:
        return all(any(tree_node_leq(kind, a, c, b, d, memo) for d in ys) for c in xs)
    if len(xs) > len(ys):
        return False
    if a.codes[x] == b.codes[y]:
        return True
    adj = [[j for j, d in enumerate(ys) if tree_node_leq(kind, a, c, b, d, memo)] for c in xs]
    return saturating_matching(len(xs), adj) is not None


def tree_witness(kind: MorphismKind, a, b) -> Witness | None:
    """Explicit morphism between trees, built from the matching decisions."""
    a, b = as_tree(a), as_tree(b)
    _same_signature(a, b)
    if kind is MorphismKind.ISO:
        return find_morphism(kind, a, b)
    memo: dict = {}
    if not tree_node_leq(kind, a, a.root, b, b.root, memo):
        return None
    mapping = {}

    def build(x, y):
        mapping[x] = y
        xs, ys = a.children[x], b.children[y]
        if kind is MorphismKind.HOM:
            for c in xs:
                d = next(d for d in ys if tree_node_leq(kind, a, c, b, d, memo))
                build(c, d)
            return
        adj = [[j for j, d in enumerate(ys) if tree_node_leq(kind, a, c, b, d, memo)] for c in xs]
        match = saturating_matching(len(xs), adj)
        for i, c in enumerate(xs):
            build(c, ys[match[i]])

    build(a.root, b.root)
    witness = Witness(kind, mapping)
    assert verify_witness(kind, a, b, mapping)
    return witness
