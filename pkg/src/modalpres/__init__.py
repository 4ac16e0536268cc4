"""Preservation machinery for modal logics over finite Kripke models.

Unravelling, bounded bisimulation, characteristic formulas, pruning,
minimal models and formula synthesis, together with exact aggregate-combine
GNNs and a compiler from negation-free graded modal formulas to networks.
"""

from .charform import char_exists_gml, char_exists_pos_gml, char_exists_pos_ml, prune
from .equivalence import GML, ML, TypePartition, l_bisimilar, refine_types
from .formula import (
    And, Bottom, Diamond, FormulaSyntaxError, FragmentReport, Not, Or, Prop, Top,
    UnknownPropositionError, check, classify, depth, format_formula, parse_formula,
)
from .gnn import (
    FeatureGraph, GnnLayer, GnnModel, compile_formula_to_gnn, evaluate_gnn, graph_to_kripke,
    kripke_to_graph, multiset_leq, positive_weight_certificate,
)
from .kripke import (
    ModelError, NotATreeError, PointedModel, Signature, TreeModel, as_tree, canonical_key,
    dump_model, load_model, make_model,
)
from .morphisms import MorphismKind, Witness, find_morphism, tree_preorder, verify_witness
from .synthesis import (
    GeneratorSet, antichain_family, check_preservation, enumerate_models, minimal_models,
    synthesize,
)
from .unravelling import unravel, world_count_at_depth

__version__ = "0.1.0"

__all__ = [
    "char_exists_gml",
    "char_exists_pos_gml",
    "char_exists_pos_ml",
    "prune",
    "GML",
    "ML",
    "TypePartition",
    "l_bisimilar",
    "refine_types",
    "And",
    "Bottom",
    "Diamond",
    "FormulaSyntaxError",
    "FragmentReport",
    "Not",
    "Or",
    "Prop",
    "Top",
    "UnknownPropositionError",
    "check",
    "classify",
    "depth",
    "format_formula",
    "parse_formula",
    "FeatureGraph",
    "GnnLayer",
    "GnnModel",
    "compile_formula_to_gnn",
    "evaluate_gnn",
    "graph_to_kripke",
    "kripke_to_graph",
    "multiset_leq",
    "positive_weight_certificate",
    "ModelError",
    "NotATreeError",
    "PointedModel",
    "Signature",
    "TreeModel",
    "as_tree",
    "canonical_key",
    "dump_model",
    "load_model",
    "make_model",
    "MorphismKind",
    "Witness",
    "find_morphism",
    "tree_preorder",
    "verify_witness",
    "GeneratorSet",
    "antichain_family",
    "check_preservation",
    "enumerate_models",
    "minimal_models",
    "synthesize",
    "unravel",
    "world_count_at_depth",
]
