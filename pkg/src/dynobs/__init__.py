"""Explicit-state model checker for temporal-epistemic logic with
dynamic observation change (mono- and multi-agent, synchronous perfect
recall)."""

from .model import Model, ModelError, Violation, parse_model, serialize_model
from .formulas import (
    Formula,
    FormulaError,
    parse_formula,
    format_formula,
    knowledge_depth,
    substitute,
    innermost_epistemic,
    delta_pairs,
    strip_deltas,
)
from .recall import Verdict, eval_bounded, equiv_histories, info_set_enum, ktree_enum, obslist, lastobs
from .ktree import KTree, InfoState, EmptyUpdateError, ut, ud, utk, udk, initial_ktree, initial_infostate
from .augment import AugmentedModel, BudgetExceeded, build_augmented, tower_bound, to_dot
from .checker import CheckRun, CheckError, check, check_static
from .reduction import ReducedInstance, ReductionError, reduce_model, translate, check_via_reduction

__version__ = "0.1.0"

__all__ = [
    "Model",
    "ModelError",
    "Violation",
    "parse_model",
    "serialize_model",
    "Formula",
    "FormulaError",
    "parse_formula",
    "format_formula",
    "knowledge_depth",
    "substitute",
    "innermost_epistemic",
    "delta_pairs",
    "strip_deltas",
    "Verdict",
    "eval_bounded",
    "equiv_histories",
    "info_set_enum",
    "ktree_enum",
    "obslist",
    "lastobs",
    "KTree",
    "InfoState",
    "EmptyUpdateError",
    "ut",
    "ud",
    "utk",
    "udk",
    "initial_ktree",
    "initial_infostate",
    "AugmentedModel",
    "BudgetExceeded",
    "build_augmented",
    "tower_bound",
    "to_dot",
    "CheckRun",
    "CheckError",
    "check",
    "check_static",
    "ReducedInstance",
    "ReductionError",
    "reduce_model",
    "translate",
    "check_via_reduction",
    "__version__",
]
