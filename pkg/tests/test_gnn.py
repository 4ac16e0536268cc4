import itertools
import random
from fractions import Fraction

import pytest

from modalpres.fixtures import edge_graph_doc, fig1_model, self_loop, star_graph_doc, sum_network_doc
from modalpres.formula import check, parse_formula
from modalpres.gnn import (
    AsymmetricRelationError, DimensionMismatchError, FragmentError, GnnFormatError, GnnLayer,
    GnnModel, SelfLoopError, aggregate, all_graphs, certificate_report, compile_formula,
    compile_formula_to_gnn, evaluate_gnn, find_monotonicity_violation, gnn_from_dict, gnn_to_dict,
    graph_from_dict, graph_to_dict, graph_to_kripke, kripke_to_graph, multiset_leq,
    positive_weight_certificate, random_morphism_pair, random_positive_network, run_gnn,
    trace_dominated,
)
from modalpres.kripke import make_model
from modalpres.morphisms import MorphismKind as K, find_morphism


def test_graph_to_kripke_examples():
    g = graph_from_dict({"dim": 2, "nodes": ["a"], "edges": [], "features": {"a": [1, 0]}})
    m = graph_to_kripke(g, "a")
    assert m.labels["a"] == {"p1"} and len(m.worlds) == 1
    m = graph_to_kripke(graph_from_dict(edge_graph_doc()), "v'")
    assert m.edges == {("v'", "u'"), ("u'", "v'")}


def test_kripke_to_graph_errors():
    with pytest.raises(AsymmetricRelationError):
        kripke_to_graph(fig1_model())
    with pytest.raises(SelfLoopError):
        kripke_to_graph(self_loop())
    sym = make_model(["p1"], ["a", "b"], [("a", "b"), ("b", "a")], {}, "a")
    g, node = kripke_to_graph(sym)
    assert node == "a" and len(g.edges) == 1


def test_round_trip_small_graphs():
    for g in all_graphs(1, 4):
        m = graph_to_kripke(g, g.nodes[0])
        back, node = kripke_to_graph(m)
        assert find_morphism(K.ISO, graph_to_kripke(back, node), m) is not None
        assert graph_from_dict(graph_to_dict(g)) == g


def test_sum_proof_instance():
    n = gnn_from_dict(sum_network_doc())
    ok, trace = evaluate_gnn(n, graph_from_dict(star_graph_doc()), "v")
    assert ok and trace[-1] == (3,)
    ok, trace = evaluate_gnn(n, graph_from_dict(edge_graph_doc()), "v'")
    assert not ok and trace[-1] == (2,)
    assert positive_weight_certificate(n)


def test_zero_network_accepts_everything():
    layer = GnnLayer("SUM", [[0]], [[0]], [0])
    n = GnnModel(1, (layer,), 0, False)
    for g in itertools.islice(all_graphs(1, 3), 30):
        assert all(evaluate_gnn(n, g, v)[0] for v in g.nodes)
    assert not evaluate_gnn(GnnModel(1, (layer,), 0, True), g, g.nodes[0])[0]


def test_aggregators():
    vs = [(1, 5), (3, 0), (2, 2)]
    assert aggregate("SUM", vs, 2) == (6, 7)
    assert aggregate("MAX", vs, 2) == (3, 5)
    assert aggregate("MAXKSUM", vs, 2, k=2) == (5, 7)
    assert aggregate("MEAN", vs, 2) == (2, Fraction(7, 3))
    for name in ("SUM", "MAX", "MEAN"):
        assert aggregate(name, [], 2) == (0, 0)


def test_multiset_examples():
    assert multiset_leq([[-1, 2], [0, 1]], [[-1, 2], [0, 3], [-1, -1]])
    assert multiset_leq([[1], [2]], [[1], [2]])
    assert not multiset_leq([[1], [1]], [[1], [0]])
    with pytest.raises(DimensionMismatchError):
        multiset_leq([[1]], [[1, 2]])


def _brute_leq(M, N):
    return any(all(all(a <= b for a, b in zip(x, N[j])) for x, j in zip(M, image))
               for image in itertools.permutations(range(len(N)), len(M)))


def test_multiset_matches_brute_force_and_is_preorder():
    rng = random.Random(7)
    bags = [[tuple(rng.randint(0, 2) for _ in range(2)) for _ in range(rng.randint(0, 3))]
            for _ in range(40)]
    for M, N in itertools.product(bags[:25], repeat=2):
        assert multiset_leq(M, N) == _brute_leq(M, N)
    for A, B, C in itertools.product(bags[:12], repeat=3):
        if multiset_leq(A, B) and multiset_leq(B, C):
            assert multiset_leq(A, C)


def test_mean_certificate_evidence(fixtures_dir):
    n = gnn_from_dict(__import__("json").loads((fixtures_dir / "mean.json").read_text()))
    rep = certificate_report(n)
    assert not rep.certified
    assert rep.evidence["values"] == ["1", "1/2"]


def test_negative_weight_has_violation():
    n = GnnModel(1, (GnnLayer("SUM", [[1]], [[-1]], [1]),), 1, False)
    assert not positive_weight_certificate(n)
    assert find_monotonicity_violation(n, max_nodes=3) is not None


def test_random_certified_networks_are_monotone():
    rng = random.Random(11)
    for _ in range(60):
        n = random_positive_network(rng, 1)
        assert positive_weight_certificate(n)
        g, h, mapping = random_morphism_pair(rng, 1, 4, injective=True)
        assert trace_dominated(n, g, h, mapping) is None


def test_format_errors():
    doc = sum_network_doc()
    with pytest.raises(GnnFormatError):
        gnn_from_dict({**doc, "bogus": 1})
    with pytest.raises(DimensionMismatchError):
        run_gnn(gnn_from_dict(doc), graph_from_dict({"dim": 2, "nodes": ["a"], "edges": [], "features": {"a": [0, 0]}}))
    assert gnn_from_dict(gnn_to_dict(gnn_from_dict(doc))) == gnn_from_dict(doc)


@pytest.mark.parametrize("text, use_max", [("p", False), ("<>p", True), ("<2>p", False),
                                           ("p & <>(p | <2>true)", False), ("<><>p", True)])
def test_compiler_agrees_with_check(text, use_max):
    f = parse_formula(text)
    c = compile_formula(f, ["p"], use_max=use_max)
    assert positive_weight_certificate(c.network)
    for g in all_graphs(1, 4):
        verdicts = run_gnn(c.network, g)[-1]
        for v in g.nodes:
            assert c.network.classify(verdicts[v]) == check(f, graph_to_kripke(g, v, ["p"])), (g, v)


def test_compiler_traces_are_zero_one():
    c = compile_formula(parse_formula("<2>(p | <>p)"), ["p"])
    for g in itertools.islice(all_graphs(1, 4), 0, None, 13):
        for layer in run_gnn(c.network, g)[1:]:
            assert all(x in (0, 1) for vec in layer.values() for x in vec)


def test_compiler_rejects_outside_fragment():
    with pytest.raises(FragmentError):
        compile_formula_to_gnn("~p")
    with pytest.raises(FragmentError):
        compile_formula_to_gnn("<2>p", use_max=True)
