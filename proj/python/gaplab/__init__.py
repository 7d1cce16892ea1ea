"""Exact generalization-error identities on finite model and data spaces."""

from ._core import (
    DatasetSpace,
    FiniteMeasure,
    GaplabError,
    Kernel,
    LossTable,
    NotAbsolutelyContinuousError,
    Scenario,
    SpaceMismatchError,
    bayes_invert,
    convex_combination,
    demo_scenario,
    evaluate_catalog,
    evaluate_identity,
    gap_algorithm_direct,
    gap_data_direct,
    gap_from_gibbs,
    gap_from_wcdg,
    gen_error_direct,
    generate_scenario,
    gibbs_posterior,
    lautum_information,
    log_sum_exp,
    marginalize,
    mutual_information,
    product_measure,
    relative_entropy,
    scenario_from_json,
    wcdg_measure,
)

__all__ = [
    "DatasetSpace",
    "FiniteMeasure",
    "GaplabError",
    "Kernel",
    "LossTable",
    "NotAbsolutelyContinuousError",
    "Scenario",
    "SpaceMismatchError",
    "bayes_invert",
    "convex_combination",
    "demo_scenario",
    "evaluate_catalog",
    "evaluate_identity",
    "gap_algorithm_direct",
    "gap_data_direct",
    "gap_from_gibbs",
    "gap_from_wcdg",
    "gen_error_direct",
    "generate_scenario",
    "gibbs_posterior",
    "lautum_information",
    "log_sum_exp",
    "marginalize",
    "mutual_information",
    "product_measure",
    "relative_entropy",
    "scenario_from_json",
    "wcdg_measure",
]
