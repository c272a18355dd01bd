"""peercf: peer-subgroup causal what-if analysis.

Find a unit's nearest peers, fit a localized linear SCM on them, simulate
interventions whose effects reach only causal descendants, explain the
outcome prediction with exact Shapley values and LIME surrogates, and serve
it all over an HTTP JSON API with a command-line front door.
"""

from .causal import (
    CausalGraph,
    CounterfactualResult,
    FittedSCM,
    Recommendation,
    descendants,
    fit_scm,
    intervene,
    load_graph,
    outcome_model,
    predict_outcome,
    recommend_interventions,
    validate_graph,
)
from .dataset import (
    Dataset,
    Schema,
    Stats,
    Unit,
    destandardize,
    load_dataset,
    load_schema,
    outcome_extent,
    standardize,
)
from .explain import (
    GlobalShap,
    LimeConfig,
    LimeExplanation,
    ShapExplanation,
    lime_bar_data,
    lime_explain,
    shap_exact,
    shap_global,
    waterfall_data,
)
from .subgroup import (
    LshIndex,
    LshParams,
    Subgroup,
    build_index,
    lsh_candidates,
    nearest_neighbors,
    subgroup_ranges,
)

__version__ = "0.1.0"

__all__ = [
    "CausalGraph",
    "CounterfactualResult",
    "Dataset",
    "FittedSCM",
    "GlobalShap",
    "LimeConfig",
    "LimeExplanation",
    "LshIndex",
    "LshParams",
    "Recommendation",
    "Schema",
    "ShapExplanation",
    "Stats",
    "Subgroup",
    "Unit",
    "build_index",
    "descendants",
    "destandardize",
    "fit_scm",
    "intervene",
    "lime_bar_data",
    "lime_explain",
    "load_dataset",
    "load_graph",
    "load_schema",
    "lsh_candidates",
    "nearest_neighbors",
    "outcome_extent",
    "outcome_model",
    "predict_outcome",
    "recommend_interventions",
    "shap_exact",
    "shap_global",
    "standardize",
    "subgroup_ranges",
    "validate_graph",
    "waterfall_data",
]
