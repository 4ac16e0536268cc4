"""Characteristic formulas for bounded unravellings, and tree pruning."""

from __future__ import annotations

from .formula import Diamond, Formula, Not, Prop, conjunction
from .kripke import PointedModel, TreeModel, as_tree
from .unravelling import world_codes


def _characteristic(m, ell: int, negative: bool, graded: bool) -> Formula:
    if isinstance(m, TreeModel):
        m = m.base
    if ell < 0:
        raise ValueError("depth must be non-negative")
    codes = {d: world_codes(m, d) for d in range(ell + 1)}
    succ = m.successors
    cache: dict[tuple[str, int], Formula] = {}

    def build(w: str, d: int) -> Formula:
        key = (codes[d][w], d)
        if key in cache:
            return cache[key]
        labels = m.labels[w]
        lits = [Prop(p) for p in m.signature if p in labels]
        if negative:
            lits += [Not(Prop(p)) for p in m.signature if p not in labels]
        parts = [conjunction(lits)] if lits else []
        if d > 0:
            classes: dict[str, list[str]] = {}
            for v in succ[w]:
                classes.setdefault(codes[d - 1][v], []).append(v)
            for ckey in sorted(classes):
                members = classes[ckey]
                rep = min(members)
                grade = len(members) if graded else 1
                parts.append(Diamond(grade, build(rep, d - 1)))
        result = conjunction(parts)
        cache[key] = result
        return result

    return build(m.point, ell)


def char_exists_gml(m: PointedModel, ell: int) -> Formula:
    """Characteristic ∃GML formula of depth ``ell``.

    Literals for the point's valuation come first (positive ones in
    signature order, then negated ones), followed by one graded diamond per
    class of successors with equal depth ``ell - 1`` type. Classes are
    ordered by the canonical key of their unravelling.
    """
    return _characteristic(m, ell, negative=True, graded=True)


def char_exists_pos_gml(m: PointedModel, ell: int) -> Formula:
    return _characteristic(m, ell, negative=False, graded=True)


def char_exists_pos_ml(m: PointedModel, ell: int) -> Formula:
    return _characteristic(m, ell, negative=False, graded=False)


def prune(t, reverse: bool = False) -> TreeModel:
    """Staged deletion of modally equivalent sibling subtrees.

    At stage ``k`` (for ``k = 0 .. height``) sibling subtrees of height ``k``
    with the same depth-``k`` ML type are reduced to the one least in the
    fixed order: canonical key of the original subtree, then world id.
    ``reverse`` flips that order.
    """
    t = as_tree(t)
    bits = t.base.label_bits
    height = t.subtree_height
    rank = {w: (t.codes[w], w) for w in t.worlds}
    kids = {w: list(t.children[w]) for w in t.worlds}
    bottom_up = sorted(t.worlds, key=lambda w: -t.depth[w])

    for k in range(t.height + 1):
        alive = _reachable(t.root, kids)
        # a subtree of height k has the same ML_k type as its full set-collapsed code
        ml: dict[str, str] = {}
        for w in bottom_up:
            if w in alive:
                ml[w] = "(" + bits[w] + "".join(sorted({ml[c] for c in kids[w]})) + ")"
        for w in sorted(alive):
            groups: dict[str, list[str]] = {}
            for c in kids[w]:
                if height[c] == k:
                    groups.setdefault(ml[c], []).append(c)
            drop = set()
            for members in groups.values():
                keep = max(members, key=rank.get) if reverse else min(members, key=rank.get)
                drop.update(c for c in members if c != keep)
            if drop:
                kids[w] = [c for c in kids[w] if c not in drop]

    alive = _reachable(t.root, kids)
    return as_tree(t.base.restrict(alive))


def _reachable(root, kids) -> set:
    seen = {root}
    stack = [root]
    while stack:
        for c in kids[stack.pop()]:
            seen.add(c)
            stack.append(c)
    return seen
