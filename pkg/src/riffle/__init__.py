"""Exact and Monte-Carlo mixing analysis for randomized riffle shuffles.

A deck of n cards is cut into a random number of packs of multinomial sizes
and riffled back together; the pack count is drawn from a distribution p.
This package computes the exact post-shuffle distributions on rising-sequence
classes, exact total-variation distances to uniform, physical-process
Monte-Carlo cross-checks, and the cutoff-time and window formulas in both
discrete and continuous time.
"""

from .combinatorics import (
    EulerianCache,
    EulerianRow,
    binomial_big,
    eulerian_row,
    factorial,
    rising_sequences,
    validate_arrangement,
)
from .continuous_time import (
    ContinuousCutoffReport,
    PoissonizedLaw,
    UnitTimePackLaw,
    continuous_cutoff_report,
    poissonized_law,
    unit_time_pack_law,
)
from .cutoff import (
    CutoffReport,
    TruncationReport,
    cutoff_report,
    cutoff_shape,
    exact_log_scaled_class_prob,
    gaussian_row_deviation,
    hyp_check,
    lindeberg_value,
    log_moments,
    log_scaled_class_prob_expansion,
    nearest_step,
    second_eigenvalue,
    step_gap,
    truncation_report,
    tv_normal_approximation,
    uniform_crossing_asymptotic,
    uniform_crossing_exact,
)
from .laws import (
    PackDistribution,
    ProductLaw,
    RisingSeqLaw,
    SizeGuardError,
    inverse_square_pack,
    law_after_k,
    law_from_json,
    law_to_json,
    m_shuffle_law,
    product_power,
    tail_set_gap,
    tv_to_uniform,
    window_set_gap,
)
from .oracles import oracle_convolution, oracle_digit_law, oracle_shuffle_sequence
from .sampling import (
    EmpiricalHistogram,
    chi_square_against_law,
    empirical_tv,
    make_generator,
    rising_counts,
    sample_chain,
    sample_chains,
    sample_m_shuffle,
    sample_m_shuffles,
    write_sample_csv,
)

__version__ = "0.1.0"
