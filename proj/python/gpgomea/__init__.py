"""GP-GOMEA symbolic regression with coefficient mutation."""

from ._gpgomea import (
    Expression,
    es_mutate,
    ground_truth_match,
    linear_scale,
    linkage_tree,
    nmi_matrix,
    run,
    template_size,
    temp_mutate,
)

__all__ = [
    "Expression",
    "es_mutate",
    "ground_truth_match",
    "linear_scale",
    "linkage_tree",
    "nmi_matrix",
    "run",
    "template_size",
    "temp_mutate",
]
