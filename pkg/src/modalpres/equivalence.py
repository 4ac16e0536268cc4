"""Depth-bounded modal equivalence and bounded bisimulation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .kripke import PointedModel, SignatureMismatchError, TreeModel
from .unravelling import world_codes

GML = "GML"
ML = "ML"


def _base(m) -> PointedModel:
    return m.base if isinstance(m, TreeModel) else m


@dataclass(frozen=True)
class TypePartition:
    """Worlds grouped by the formulas of ``logic`` they satisfy up to ``depth``.

    Type ids are canonical strings: a world's id is its valuation bits
    followed by the sorted successor ids of the previous depth (as a
    multiset for GML, as a set for ML). Ids are comparable across models
    over the same signature.
    """

    depth: int
    logic: str
    assignment: Mapping[str, str]

    def classes(self) -> list[list[str]]:
        groups: dict[str, list[str]] = {}
        for w in sorted(self.assignment):
            groups.setdefault(self.assignment[w], []).append(w)
        return [groups[k] for k in sorted(groups)]


def refine_types(m: PointedModel, depth: int, logic: str = GML) -> TypePartition:
    m = _base(m)
    if logic == GML:
        return TypePartition(depth, GML, world_codes(m, depth))
    if logic != ML:
        raise ValueError(f"unknown logic {logic!r}")
    bits = m.label_bits
    succ = m.successors
    level = {w: "(" + bits[w] + ")" for w in m.worlds}
    for _ in range(depth):
        prev = level
        level = {w: "(" + bits[w] + "".join(sorted({prev[v] for v in succ[w]})) + ")" for w in m.worlds}
    return TypePartition(depth, ML, level)


@dataclass(frozen=True)
class Bisimulation:
    """Stratified witness: ``levels[k]`` holds pairs that still owe ``k`` rounds.

    ``levels[L]`` contains the pair of points. For every pair in
    ``levels[k]`` with ``k > 0`` each move on either side is answered by a
    pair in ``levels[k - 1]``.
    """

    L: int
    levels: tuple

    @property
    def relation(self) -> frozenset:
        return frozenset().union(*self.levels)

    def to_json(self) -> list:
        return [sorted([u, v] for u, v in level) for level in self.levels]


def _within(m: PointedModel, steps: int) -> set:
    seen = {m.point}
    frontier = [m.point]
    for _ in range(steps):
        frontier = [v for u in frontier for v in m.successors[u] if v not in seen]
        seen.update(frontier)
    return seen


def l_bisimilar(a, b, L: int) -> Bisimulation | None:
    """Bounded bisimulation of depth ``L`` between two pointed models.

    The relation is computed as the stratified greatest fixpoint: pairs at
    level 0 agree on labels, pairs at level ``k + 1`` additionally satisfy
    forth and back into level ``k``. Returns None when the points are not
    related at level ``L``.
    """
    a, b = _base(a), _base(b)
    if a.signature != b.signature:
        raise SignatureMismatchError("signatures differ")
    la, lb = a.label_bits, b.label_bits
    sa, sb = a.successors, b.successors
    base = {(u, v) for u in a.worlds for v in b.worlds if la[u] == lb[v]}
    strata = [base]
    for _ in range(L):
        prev = strata[-1]
        nxt = {
            (u, v)
            for u, v in base
            if all(any((z, y) in prev for y in sb[v]) for z in sa[u])
            and all(any((z, y) in prev for z in sa[u]) for y in sb[v])
        }
        strata.append(nxt)
    if (a.point, b.point) not in strata[L]:
        return None
    levels = []
    for k in range(L + 1):
        ra, rb = _within(a, L - k), _within(b, L - k)
        levels.append(frozenset((u, v) for u, v in strata[k] if u in ra and v in rb))
    return Bisimulation(L, tuple(levels))


def verify_bisimulation(a, b, z: Bisimulation) -> bool:
    a, b = _base(a), _base(b)
    if (a.point, b.point) not in z.levels[z.L]:
        return False
    for k, level in enumerate(z.levels):
        for u, v in level:
            if a.label_bits[u] != b.label_bits[v]:
                return False
            if k == 0:
                continue
            below = z.levels[k - 1]
            for x in a.successors[u]:
                if not any((x, y) in below for y in b.successors[v]):
                    return False
            for y in b.successors[v]:
                if not any((x, y) in below for x in a.successors[u]):
                    return False
    return True
