"""Concrete models used as reference objects by the tests and the CLI."""

from __future__ import annotations

from .kripke import PointedModel, TreeModel, as_tree, make_model


def fig1_model() -> PointedModel:
    return make_model(
        ["p1", "p2"],
        ["w", "v2", "v3", "v4"],
        [("w", "v2"), ("w", "v3"), ("v3", "w"), ("w", "v4")],
        {"p1": ["v2", "v4"], "p2": ["v3"]},
        "w",
    )


def fig4_tree() -> TreeModel:
    return as_tree(make_model(
        ["p", "q"],
        ["v1", "v2", "v3", "v4", "v2'", "v4'", "u", "w2", "w3", "w4"],
        [("v1", "v2"), ("v1", "v3"), ("v1", "v4"), ("v2", "v2'"), ("v4", "v4'"),
         ("v3", "u"), ("u", "w2"), ("u", "w3"), ("u", "w4")],
        {"p": ["v2", "v4", "w2", "w4"], "q": ["v3", "w3"]},
        "v1",
    ))


def fig4_pruned() -> TreeModel:
    return as_tree(make_model(
        ["p", "q"],
        ["v1", "v3", "v4", "v4'", "u", "w3", "w4"],
        [("v1", "v3"), ("v1", "v4"), ("v4", "v4'"), ("v3", "u"), ("u", "w3"), ("u", "w4")],
        {"p": ["v4", "w4"], "q": ["v3", "w3"]},
        "v1",
    ))


def self_loop(signature=("p",)) -> PointedModel:
    """One world with a self-loop where no proposition holds."""
    return make_model(signature, ["v"], [("v", "v")], {}, "v")


def branch_tree(L: int, signature=("p",)) -> TreeModel:
    """Path ``v1 .. v(L+1)`` plus a ``p``-child ``u`` of ``v1``.

    The L-unravelling of the self-loop embeds into it, but it is not itself
    the L-unravelling of any model whose point carries a self-loop.
    """
    path = [f"v{i}" for i in range(1, L + 2)]
    edges = list(zip(path, path[1:])) + [("v1", "u")]
    return as_tree(make_model(signature, path + ["u"], edges, {"p": ["u"]}, "v1"))


def star_graph_doc() -> dict:
    return {"dim": 1, "nodes": ["v", "u", "w"], "edges": [["v", "u"], ["v", "w"]],
            "features": {"v": [1], "u": [1], "w": [1]}}


def edge_graph_doc() -> dict:
    return {"dim": 1, "nodes": ["v'", "u'"], "edges": [["v'", "u'"]],
            "features": {"v'": [1], "u'": [1]}}


def sum_network_doc() -> dict:
    return {"input_dim": 1,
            "layers": [{"agg": "SUM", "A": [["1"]], "C": [["1"]], "b": ["0"]}],
            "classifier": {"threshold": "3", "strict": False}}
