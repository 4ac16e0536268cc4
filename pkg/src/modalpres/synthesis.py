"""Minimal models, formula synthesis, antichain families and preservation search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .charform import char_exists_gml, char_exists_pos_gml, char_exists_pos_ml, prune
from .formula import FALSE, FORMULA_TYPES, Formula, check, disjunction, parse_formula, props_of
from .kripke import PointedModel, Signature, TreeModel, as_tree, canonical_key, make_model
from .morphisms import MorphismKind, find_morphism, tree_node_leq, tree_preorder
from .unravelling import unravel

# -- enumeration -----------------------------------------------------------


def enumerate_models(
    signature,
    max_worlds: int | None = None,
    tree_only: bool = False,
    max_height: int | None = None,
    max_branching: int | None = None,
    generated_only: bool = False,
    graph_only: bool = False,
) -> Iterator[PointedModel]:
    """One pointed model per isomorphism class, in a deterministic order.

    General mode ranges over all models with 1..max_worlds worlds named
    ``w0 ..`` with point ``w0`` (cost grows like 2**(n*n); 3 worlds is
    instant, 4 takes minutes). ``generated_only`` keeps models where every
    world is reachable from the point; ``graph_only`` keeps symmetric
    irreflexive relations. Tree mode builds trees from multisets of child
    trees, bounded by height, branching and optionally world count, ordered
    by (size, canonical key).
    """
    sig = signature if isinstance(signature, Signature) else Signature(tuple(signature))
    if tree_only:
        if max_height is None:
            raise ValueError("tree enumeration needs max_height")
        yield from _enumerate_trees(sig, max_height, max_branching, max_worlds)
        return
    if max_worlds is None:
        raise ValueError("general enumeration needs max_worlds")
    for n in range(1, max_worlds + 1):
        yield from _enumerate_general(sig, n, generated_only, graph_only, max_branching)


def _enumerate_general(sig, n, generated_only, graph_only, max_branching):
    ids = [f"w{i}" for i in range(n)]
    k = len(sig)
    if graph_only:
        slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
    else:
        slots = [(i, j) for i in range(n) for j in range(n)]
    perms = [(0,) + p for p in itertools.permutations(range(1, n))]
    labellings = list(itertools.product(range(1 << k), repeat=n))
    for mask in range(1 << len(slots)):
        chosen = [slots[s] for s in range(len(slots)) if mask >> s & 1]
        if graph_only:
            edges = chosen + [(j, i) for i, j in chosen]
        else:
            edges = chosen
        out = [0] * n
        for i, _ in edges:
            out[i] += 1
        if max_branching is not None and max(out) > max_branching:
            continue
        if generated_only and not _all_reachable(n, edges):
            continue
        edge_set = frozenset(edges)
        images = [tuple(sorted((p[i], p[j]) for i, j in edge_set)) for p in perms]
        own_edges = images[0]
        if min(images) != own_edges:
            continue
        stabilizer = [p for p, img in zip(perms, images) if img == own_edges]
        for labels in labellings:
            if any(_permute_labels(labels, p) < labels for p in stabilizer):
                continue
            valuation = {
                prop: [ids[i] for i in range(n) if labels[i] >> (k - 1 - b) & 1]
                for b, prop in enumerate(sig)
            }
            yield make_model(sig, ids, [(ids[i], ids[j]) for i, j in sorted(edge_set)],
                             valuation, ids[0])


def _permute_labels(labels, p):
    out = [0] * len(labels)
    for i, x in enumerate(labels):
        out[p[i]] = x
    return tuple(out)


def _all_reachable(n, edges):
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for i, j in edges:
            if i == u and j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == n


def _enumerate_trees(sig, max_height, max_branching, max_worlds):
    k = len(sig)
    cap = max_branching if max_branching is not None else max_worlds
    if cap is None and max_height > 0:
        raise ValueError("tree enumeration needs max_branching or max_worlds")
    limit = max_worlds if max_worlds is not None else float("inf")
    # shapes[h] = all (labels, children) terms of height <= h, as (size, term)
    level = [(1, (lab, ())) for lab in range(1 << k)]
    for _ in range(max_height):
        nxt = []
        for lab in range(1 << k):
            for r in range(cap + 1):
                for combo in itertools.combinations_with_replacement(range(len(level)), r):
                    size = 1 + sum(level[i][0] for i in combo)
                    if size <= limit:
                        nxt.append((size, (lab, tuple(level[i][1] for i in combo))))
        level = nxt
    models = [_term_to_model(sig, term) for size, term in level if size <= limit]
    models.sort(key=lambda t: (len(t.worlds), canonical_key(t)))
    yield from models


def _term_to_model(sig, term) -> TreeModel:
    k = len(sig)
    ids, edges, valuation = [], [], {p: [] for p in sig}

    def build(t):
        lab, kids = t
        me = f"w{len(ids)}"
        ids.append(me)
        for b, p in enumerate(sig):
            if lab >> (k - 1 - b) & 1:
                valuation[p].append(me)
        for c in kids:
            edges.append((me, build(c)))
        return me

    build(term)
    return as_tree(make_model(sig, ids, edges, valuation, "w0"))


# -- minimal models --------------------------------------------------------


def _dedupe(trees) -> list[TreeModel]:
    seen: dict[str, TreeModel] = {}
    for t in trees:
        t = as_tree(t)
        key = canonical_key(t)
        if key not in seen:
            seen[key] = t
    return [seen[k] for k in sorted(seen)]


def hom_core(t) -> TreeModel:
    """Smallest subtree of ``t`` that is homomorphically equivalent to it.

    Bottom-up, a child is dropped when its (already reduced) subtree maps
    homomorphically into a sibling's; among equivalent siblings the one with
    least key survives.
    """
    t = as_tree(t)
    memo: dict = {}
    kids = {}
    for w in sorted(t.worlds, key=lambda x: -t.depth[x]):
        cs = sorted(t.children[w], key=lambda c: (t.codes[c], c))
        keep = []
        for i, c in enumerate(cs):
            dominated = False
            for j, d in enumerate(cs):
                if i == j:
                    continue
                if tree_node_leq(MorphismKind.HOM, t, c, t, d, memo):
                    back = tree_node_leq(MorphismKind.HOM, t, d, t, c, memo)
                    # strictly below a sibling, or equivalent to an earlier one
                    if not back or j < i:
                        dominated = True
                        break
            if not dominated:
                keep.append(c)
        kids[w] = keep
    alive = {t.root}
    stack = [t.root]
    while stack:
        for c in kids[stack.pop()]:
            alive.add(c)
            stack.append(c)
    return as_tree(t.base.restrict(alive))


def minimal_models(trees: Iterable, kind: MorphismKind) -> list[TreeModel]:
    """⪯-minimal trees, one per ⪯-equivalence class, sorted by canonical key.

    For the injective kinds equivalent trees are isomorphic. For Hom the
    representative of a class is its member with least canonical key.
    """
    if kind is MorphismKind.ISO:
        raise ValueError("minimal_models needs a preorder other than iso")
    unique = _dedupe(trees)
    memo: dict = {}
    if kind is not MorphismKind.HOM:
        minimal: list[TreeModel] = []
        for t in sorted(unique, key=lambda t: (len(t.worlds), canonical_key(t))):
            if not any(tree_preorder(kind, m, t, memo) for m in minimal):
                minimal.append(t)
        return sorted(minimal, key=canonical_key)
    classes: dict[str, list[TreeModel]] = {}
    cores: dict[str, TreeModel] = {}
    for t in unique:
        core = hom_core(t)
        ck = canonical_key(core)
        classes.setdefault(ck, []).append(t)
        cores[ck] = core
    keys = sorted(classes)
    out = []
    for ck in keys:
        below = any(
            other != ck and tree_preorder(kind, cores[other], cores[ck], memo) for other in keys
        )
        if not below:
            out.append(min(classes[ck], key=canonical_key))
    return sorted(out, key=canonical_key)


# -- synthesis -------------------------------------------------------------

_CHAR = {
    MorphismKind.EMBEDDING: char_exists_gml,
    MorphismKind.INJECTIVE_HOM: char_exists_pos_gml,
    MorphismKind.HOM: char_exists_pos_ml,
}


@dataclass(frozen=True)
class GeneratorSet:
    generators: tuple
    kind: MorphismKind
    L: int

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if self.kind not in _CHAR:
            raise ValueError(f"synthesis is not defined for {self.kind.value}")
        if self.L < 0:
            raise ValueError("L must be non-negative")
        sigs = {g.signature for g in gens}
        if len(sigs) > 1:
            raise ValueError("generators must share one signature")


@dataclass(frozen=True)
class Synthesis:
    formula: Formula
    minimal: tuple
    sources: tuple


def synthesize_with_trees(g: GeneratorSet, ml: bool = False) -> Synthesis:
    """Synthesize and also return the minimal trees and the formula sources.

    Hom classes use the hom-core of each minimal tree as formula source, so
    the output depends only on the homomorphic equivalence class. ``ml``
    prunes the sources first, which collapses every grade to 1.
    """
    if not g.generators:
        return Synthesis(FALSE, (), ())
    trees = [unravel(m, g.L) for m in g.generators]
    tmin = minimal_models(trees, g.kind)
    sources = [hom_core(t) for t in tmin] if g.kind is MorphismKind.HOM else list(tmin)
    if ml:
        sources = [prune(t) for t in sources]
    sources = _dedupe(sources)
    build = _CHAR[g.kind]
    formula = disjunction(build(t, g.L) for t in sources)
    return Synthesis(formula, tuple(tmin), tuple(sources))


def synthesize(g: GeneratorSet, ml: bool = False) -> Formula:
    return synthesize_with_trees(g, ml).formula


# -- antichains ------------------------------------------------------------


def antichain_family(kind: MorphismKind, n: int) -> TreeModel:
    """The model M_n: a path v1 .. v(n+2) with extra leaves u under v1 and w under v(n+1)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    vs = [f"v{i}" for i in range(1, n + 3)]
    edges = list(zip(vs, vs[1:])) + [("v1", "u"), (f"v{n + 1}", "w")]
    worlds = vs + ["u", "w"]
    if kind is MorphismKind.INJECTIVE_HOM:
        return as_tree(make_model((), worlds, edges, {}, "v1"))
    if kind is MorphismKind.HOM:
        valuation = {
            "p1": [v for i, v in enumerate(vs, 1) if i % 2 == 0],
            "p2": [v for i, v in enumerate(vs, 1) if i % 2 == 1],
            "p3": ["u"],
            "p4": ["w"],
        }
        return as_tree(make_model(("p1", "p2", "p3", "p4"), worlds, edges, valuation, "v1"))
    raise ValueError("antichain families exist for injhom and hom")


# -- preservation search ---------------------------------------------------


@dataclass(frozen=True)
class Counterexample:
    source: PointedModel
    target: PointedModel
    witness: dict


def _class_member(cls, signature: Signature | None):
    """Membership test and enumeration settings for a formula or a network."""
    from .gnn import GnnModel, evaluate_gnn, kripke_to_graph

    if isinstance(cls, str):
        cls = parse_formula(cls)
    if isinstance(cls, GnnModel):
        sig = Signature(tuple(f"p{i + 1}" for i in range(cls.input_dim)))

        def member(m):
            graph, node = kripke_to_graph(m)
            return evaluate_gnn(cls, graph, node)[0]

        return member, sig, True
    if not isinstance(cls, FORMULA_TYPES):
        raise TypeError(f"unsupported class object {type(cls).__name__}")
    sig = signature or Signature(tuple(sorted(props_of(cls))) or ("p",))
    return (lambda m: check(cls, m)), sig, False


def check_preservation(cls, kind: MorphismKind, bound: int,
                       signature: Sequence[str] | None = None) -> Counterexample | None:
    """Search for M in the class, M ⪯ N by ``kind``, N outside the class.

    Models range over point-generated models with at most ``bound`` worlds
    up to isomorphism; networks range over graph-shaped models. Pairs are
    tried in order of total size, so the smallest counterexample is found
    first. Practical limit: bound <= 3 for general models, 4 for graphs.
    """
    sig = Signature(tuple(signature)) if signature is not None else None
    member, sig, graphs = _class_member(cls, sig)
    models = list(enumerate_models(sig, bound, generated_only=True, graph_only=graphs))
    verdict = [member(m) for m in models]
    inside = [m for m, v in zip(models, verdict) if v]
    outside = [m for m, v in zip(models, verdict) if not v]
    for total in range(2, 2 * bound + 1):
        for a in inside:
            if len(a.worlds) >= total:
                continue
            for b in outside:
                if len(a.worlds) + len(b.worlds) != total:
                    continue
                if kind.injective and len(a.worlds) > len(b.worlds):
                    continue
                w = find_morphism(kind, a, b)
                if w is not None:
                    return Counterexample(a, b, w.to_json())
    return None
