"""Column subset selection by exact volume sampling and a conditional-expectation greedy."""

from .greedy import bound_report, conditional_expectation, greedy_path, greedy_select
from .hardness import (
    HardInstanceSpec,
    make_block_instance,
    make_M,
    predicted_block_ratio,
    predicted_single_block_residual,
)
from .linalg import (
    gram,
    project_out,
    psd_sqrt,
    rank_k_error,
    residual_trace,
    spectrum,
    squared_distance_det,
    sym_eigen,
)
from .oracle import best_subset, exact_distribution, exact_expected_trace
from .report import SelectionReport
from .sampler import VolumeSampler, build_table, first_column_marginal, volume_sample
from .symfunc import elem_sym, elem_sym_matrix, lemma31_bound, majorizes, sym_ratio

__version__ = "0.1.0"

__all__ = [
    "HardInstanceSpec",
    "SelectionReport",
    "VolumeSampler",
    "best_subset",
    "bound_report",
    "build_table",
    "conditional_expectation",
    "elem_sym",
    "elem_sym_matrix",
    "exact_distribution",
    "exact_expected_trace",
    "first_column_marginal",
    "gram",
    "greedy_path",
    "greedy_select",
    "lemma31_bound",
    "majorizes",
    "make_M",
    "make_block_instance",
    "predicted_block_ratio",
    "predicted_single_block_residual",
    "project_out",
    "psd_sqrt",
    "rank_k_error",
    "residual_trace",
    "spectrum",
    "squared_distance_det",
    "sym_eigen",
    "sym_ratio",
    "volume_sample",
]
