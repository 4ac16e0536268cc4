"""Command-line interface; every command prints one JSON object."""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import gnn as G
from .charform import char_exists_gml, char_exists_pos_gml, char_exists_pos_ml, prune
from .formula import FormulaSyntaxError, UnknownPropositionError, classify, extension, format_formula, parse_formula
from .kripke import ModelError, SignatureMismatchError, as_tree, canonical_key, load_model, model_to_dict
from .morphisms import MorphismKind, find_morphism
from .synthesis import (
    GeneratorSet, antichain_family, check_preservation, enumerate_models, minimal_models,
    synthesize_with_trees,
)
from .unravelling import unravel

EXIT_USAGE = 2
EXIT_INPUT = 3

_FRAGMENTS = {"egml": char_exists_gml, "epgml": char_exists_pos_gml, "epml": char_exists_pos_ml}
_INPUT_ERRORS = (ModelError, FormulaSyntaxError, UnknownPropositionError, SignatureMismatchError,
                 G.GnnError, G.GraphError, G.FragmentError, OSError, ValueError)


class InputError(Exception):
    pass


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _model(path):
    return load_model(_read(path))


def _kind(name, allowed=None):
    kind = MorphismKind.parse(name)
    if allowed is not None and kind not in allowed:
        raise InputError(f"kind {name!r} is not allowed here")
    return kind


def _fragment_json(f):
    r = classify(f)
    return {"depth": r.depth, "in_ML": r.in_ML, "in_exists_GML": r.in_exists_GML,
            "in_exists_pos_GML": r.in_exists_pos_GML, "in_exists_ML": r.in_exists_ML,
            "in_exists_pos_ML": r.in_exists_pos_ML}


def _vec(v):
    return [G.format_rational(x) for x in v]


def cmd_check(a):
    f = parse_formula(a.formula)
    m = _model(a.model)
    ext = extension(f, m)
    return m.point in ext, {"point": m.point, "extension": sorted(ext)}


def cmd_unravel(a):
    t = unravel(_model(a.model), a.L)
    return model_to_dict(t), {"height": t.height, "worlds": len(t.worlds), "key": canonical_key(t)}


def cmd_charform(a):
    f = _FRAGMENTS[a.fragment](_model(a.model), a.L)
    return format_formula(f), _fragment_json(f)


def cmd_prune(a):
    t = as_tree(_model(a.model))
    p = prune(t, reverse=a.reverse)
    return model_to_dict(p), {"removed": sorted(t.worlds - p.worlds), "worlds": len(p.worlds)}


def cmd_relate(a):
    w = find_morphism(_kind(a.kind), _model(a.a), _model(a.b))
    return w is not None, (w.to_json() if w else None)


def _tree_sources(kind_name, paths):
    kind = _kind(kind_name, {MorphismKind.EMBEDDING, MorphismKind.INJECTIVE_HOM, MorphismKind.HOM})
    return kind, [(p, as_tree(_model(p))) for p in paths]


def cmd_minimal(a):
    kind, trees = _tree_sources(a.kind, a.models)
    mins = minimal_models([t for _, t in trees], kind)
    keys = [canonical_key(t) for t in mins]
    chosen = []
    for key in keys:
        chosen.append(next(p for p, t in trees if canonical_key(t) == key))
    return chosen, {"keys": keys}


def cmd_synth(a):
    kind = _kind(a.kind, {MorphismKind.EMBEDDING, MorphismKind.INJECTIVE_HOM, MorphismKind.HOM})
    gens = [_model(p) for p in a.generators]
    s = synthesize_with_trees(GeneratorSet(gens, kind, a.L), ml=a.ml)
    return format_formula(s.formula), {
        "fragment": _fragment_json(s.formula),
        "minimal": [canonical_key(t) for t in s.minimal],
        "sources": [canonical_key(t) for t in s.sources],
    }


def cmd_antichain(a):
    kind = _kind(a.kind, {MorphismKind.INJECTIVE_HOM, MorphismKind.HOM})
    t = antichain_family(kind, a.n)
    return model_to_dict(t), {"height": t.height, "worlds": len(t.worlds)}


def cmd_gnn_eval(a):
    net = G.load_gnn(_read(a.gnn))
    graph = G.load_graph(_read(a.graph))
    verdict, trace = G.evaluate_gnn(net, graph, a.node)
    return verdict, {"trace": [_vec(v) for v in trace]}


def cmd_gnn_compile(a):
    sig = a.signature.split(",") if a.signature else None
    c = G.compile_formula(parse_formula(a.formula), sig, use_max=a.max)
    return G.gnn_to_dict(c.network), {
        "signature": list(c.signature),
        "coordinates": [format_formula(g) for g in c.coordinates],
        "certified": G.positive_weight_certificate(c.network),
    }


def cmd_gnn_cert(a):
    rep = G.certificate_report(G.load_gnn(_read(a.gnn)))
    return rep.certified, {"reasons": list(rep.reasons), "evidence": rep.evidence}


def cmd_testpres(a):
    kind = _kind(a.kind)
    if a.formula is not None:
        cls = parse_formula(a.formula)
    else:
        cls = G.load_gnn(_read(a.gnn))
    sig = a.signature.split(",") if a.signature else None
    ce = check_preservation(cls, kind, a.bound, sig)
    if ce is None:
        return True, None
    return False, {"source": model_to_dict(ce.source), "target": model_to_dict(ce.target),
                   "mapping": ce.witness}


def cmd_enumerate(a):
    models = list(enumerate_models(
        a.props.split(",") if a.props else [], a.max_worlds, tree_only=a.trees,
        max_height=a.max_height, max_branching=a.max_branching,
        generated_only=a.generated, graph_only=a.graphs,
    ))
    if a.sample is not None and a.sample < len(models):
        rng = random.Random(a.seed)
        picked = sorted(rng.sample(range(len(models)), a.sample))
        models = [models[i] for i in picked]
    return [model_to_dict(m) for m in models], {"count": len(models)}


def cmd_gnn_trials(a):
    """Seeded monotonicity trials: counts pointwise trace violations."""
    rng = random.Random(a.seed)
    violations = 0
    first = None
    for _ in range(a.trials):
        if a.theorem == "injective":
            net = G.random_positive_network(rng, 1)
            src, dst, mp = G.random_morphism_pair(rng, 1, 5, injective=True)
        elif a.theorem == "max":
            net = G.random_positive_network(rng, 1, aggs=("MAX",))
            src, dst, mp = G.random_morphism_pair(rng, 1, 5, injective=False)
        else:
            net = G.random_positive_network(rng, 1, aggs=("SUM",))
            src, dst, mp = G.random_morphism_pair(rng, 1, 5, injective=False)
        hit = G.trace_dominated(net, src, dst, mp)
        if hit is not None:
            violations += 1
            if first is None:
                first = {"network": G.gnn_to_dict(net), "source": G.graph_to_dict(src),
                         "target": G.graph_to_dict(dst), "mapping": mp,
                         "layer": hit[0], "node": hit[1], "coordinate": hit[2]}
    return violations, first


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="modalpres", description=__doc__)
    p.add_argument("--seed", type=int, default=0, help="seed for randomized commands")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", help="evaluate a formula at the point of a model")
    s.add_argument("formula")
    s.add_argument("model")
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("unravel", help="L-unravelling of a model")
    s.add_argument("-L", type=int, required=True)
    s.add_argument("model")
    s.set_defaults(fn=cmd_unravel)

    s = sub.add_parser("charform", help="characteristic formula")
    s.add_argument("--fragment", choices=sorted(_FRAGMENTS), required=True)
    s.add_argument("-L", type=int, required=True)
    s.add_argument("model")
    s.set_defaults(fn=cmd_charform)

    s = sub.add_parser("prune", help="prune a tree-shaped model")
    s.add_argument("--reverse", action="store_true", help="use the reversed tie order")
    s.add_argument("model")
    s.set_defaults(fn=cmd_prune)

    kinds = ["iso", "embed", "injhom", "hom"]
    s = sub.add_parser("relate", help="search for a morphism a -> b")
    s.add_argument("--kind", choices=kinds, required=True)
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(fn=cmd_relate)

    s = sub.add_parser("minimal", help="minimal trees under a preorder")
    s.add_argument("--kind", choices=kinds[1:], required=True)
    s.add_argument("models", nargs="+")
    s.set_defaults(fn=cmd_minimal)

    s = sub.add_parser("synth", help="synthesize a defining formula from generators")
    s.add_argument("--kind", choices=kinds[1:], required=True)
    s.add_argument("-L", type=int, required=True)
    s.add_argument("--ml", action="store_true", help="prune before building formulas")
    s.add_argument("generators", nargs="*")
    s.set_defaults(fn=cmd_synth)

    s = sub.add_parser("antichain", help="member n of an infinite antichain")
    s.add_argument("--kind", choices=["injhom", "hom"], required=True)
    s.add_argument("-n", type=int, required=True)
    s.set_defaults(fn=cmd_antichain)

    s = sub.add_parser("gnn-eval", help="run a network on a graph node")
    s.add_argument("gnn")
    s.add_argument("graph")
    s.add_argument("node")
    s.set_defaults(fn=cmd_gnn_eval)

    s = sub.add_parser("gnn-compile", help="compile a negation-free formula to a network")
    s.add_argument("--max", action="store_true", help="MAX aggregation (grades must be 1)")
    s.add_argument("--signature", help="comma-separated propositions, feature order")
    s.add_argument("formula")
    s.set_defaults(fn=cmd_gnn_compile)

    s = sub.add_parser("gnn-cert", help="positive-weight monotonicity certificate")
    s.add_argument("gnn")
    s.set_defaults(fn=cmd_gnn_cert)

    s = sub.add_parser("testpres", help="bounded search for a preservation counterexample")
    s.add_argument("--kind", choices=kinds, required=True)
    s.add_argument("--bound", type=int, required=True)
    s.add_argument("--signature", help="comma-separated propositions (formulas only)")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--formula")
    g.add_argument("--gnn")
    s.set_defaults(fn=cmd_testpres)

    s = sub.add_parser("enumerate", help="models up to isomorphism")
    s.add_argument("--props", default="p", help="comma-separated propositions")
    s.add_argument("--max-worlds", type=int)
    s.add_argument("--trees", action="store_true")
    s.add_argument("--max-height", type=int)
    s.add_argument("--max-branching", type=int)
    s.add_argument("--generated", action="store_true", help="point-generated models only")
    s.add_argument("--graphs", action="store_true", help="symmetric irreflexive relations only")
    s.add_argument("--sample", type=int, help="seeded random sample of this size")
    s.set_defaults(fn=cmd_enumerate)

    s = sub.add_parser("gnn-trials", help="seeded random monotonicity trials")
    s.add_argument("--theorem", choices=["injective", "max", "sum-hom"], required=True)
    s.add_argument("--trials", type=int, default=500)
    s.set_defaults(fn=cmd_gnn_trials)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "L", 0) is not None and getattr(args, "L", 0) < 0:
        print("error: -L must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    try:
        result, witness = args.fn(args)
    except (InputError, *_INPUT_ERRORS) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(json.dumps({"result": result, "witness": witness}, sort_keys=True) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
