"""Reference-free ranking of language models by triplet peer evaluation.

Thin wrapper over the compiled extension; see the function docstrings there.
"""

from trirank._core import (
    ReferenceSet,
    ResponseTable,
    accuracy_ladder,
    exact_match,
    ftr,
    ftr_from_tensor_csv,
    generate,
    gtr,
    lemma1_holds,
    load_dataset,
    load_references,
    map_at_k,
    mca_choice,
    mca_generative,
    measure_overlap_m,
    rbo,
    rouge2_f,
    tensor_csv,
    thm1_holds,
    true_ranking,
    worst_of_triplet,
)

__all__ = [
    "ReferenceSet",
    "ResponseTable",
    "accuracy_ladder",
    "exact_match",
    "ftr",
    "ftr_from_tensor_csv",
    "generate",
    "gtr",
    "lemma1_holds",
    "load_dataset",
    "load_references",
    "map_at_k",
    "mca_choice",
    "mca_generative",
    "measure_overlap_m",
    "rbo",
    "rouge2_f",
    "tensor_csv",
    "thm1_holds",
    "true_ranking",
    "worst_of_triplet",
]

__version__ = "0.1.0"
