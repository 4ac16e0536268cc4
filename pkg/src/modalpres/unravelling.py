"""L-unravellings of pointed models and depth utilities."""

from __future__ import annotations

from .kripke import PointedModel, TreeModel, as_tree


def _escape(w: str) -> str:
    return w.replace("\\", "\\\\").replace("/", "\\/")


def unravel(m: PointedModel, L: int) -> TreeModel:
    """Tree of all R-paths of length <= L from the point.

    A path ``w0 w1 ... wk`` becomes the world ``"w0/w1/.../wk"`` and carries
    the valuation of ``wk``. Components are escaped so that ids containing
    ``/`` or ``\\`` never collide.
    """
    if isinstance(m, TreeModel):
        m = m.base
    if L < 0:
        raise ValueError("unravelling depth must be non-negative")
    succ = m.successors
    root = _escape(m.point)
    worlds = [root]
    edges = []
    last = {root: m.point}
    frontier = [root]
    for _ in range(L):
        nxt = []
        for path in frontier:
            for v in succ[last[path]]:
                child = path + "/" + _escape(v)
                worlds.append(child)
                edges.append((path, child))
                last[child] = v
                nxt.append(child)
        frontier = nxt
        if not frontier:
            break
    valuation = {
        p: frozenset(x for x in worlds if last[x] in m.valuation[p]) for p in m.signature
    }
    return as_tree(PointedModel(m.signature, frozenset(worlds), frozenset(edges), valuation, root))


def unravel_key(m: PointedModel, L: int, memo: dict | None = None) -> str:
    """``canonical_key(unravel(m, L))`` without building the tree.

    ``memo`` may be shared between calls on the same model.
    """
    if isinstance(m, TreeModel):
        m = m.base
    return world_codes(m, L, memo)[m.point]


def world_codes(m: PointedModel, L: int, memo: dict | None = None) -> dict[str, str]:
    """Canonical key of the L-unravelling at every world of ``m``."""
    if memo is None:
        memo = {}
    bits = m.label_bits
    succ = m.successors
    level = memo.get(0)
    if level is None:
        level = memo[0] = {w: "(" + bits[w] + ")" for w in m.worlds}
    for d in range(1, L + 1):
        if d in memo:
            level = memo[d]
            continue
        prev = level
        level = memo[d] = {
            w: "(" + bits[w] + "".join(sorted(prev[v] for v in succ[w])) + ")" for w in m.worlds
        }
    return memo[L] if L in memo else level


def world_count_at_depth(t: TreeModel, d: int) -> int:
    t = as_tree(t)
    if d < 0 or d > t.height:
        raise ValueError(f"depth {d} is outside 0..{t.height}")
    return sum(1 for w in t.worlds if t.depth[w] == d)
