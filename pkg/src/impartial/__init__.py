"""Impartial selection mechanisms and tools to measure them."""

from .analysis import (
    AlphaEstimate,
    ImpartialityReport,
    InvariantViolation,
    Mechanism,
    balanced_fraction,
    chernoff_empirical,
    exact_alpha,
    exact_expected_winner_degree_permutation,
    exact_expected_winner_degree_two_partition,
    hypergeometric_tail,
    impartiality_coupling_test,
    is_balanced_permutation,
    monte_carlo_alpha,
    slice_width_check,
    well_estimated,
)
from .graph import (
    Digraph,
    build_digraph,
    circulant_regular,
    complete_digraph,
    emit_edge_list,
    greedy_witness_set,
    max_in_degree,
    parse_edge_list,
    planted_star,
    single_arc,
    tight_example,
    two_star,
    uniform_digraph,
)
from .mechanisms import (
    Selection,
    SliceAssignment,
    max_indegree_baseline,
    permutation_mechanism,
    sample_phase,
    slice_assign,
    slicing_mechanism,
    slicing_multiwinner,
    two_partition_mechanism,
)
from .tape import RandomTape

__version__ = "0.1.0"
