"""Sufficient-component-cause analysis for binary outcomes and binary causes."""

__version__ = "0.1.0"

from .core import (
    COUNT,
    PROBABILITY,
    Literal,
    LiteralSet,
    Member,
    Monotonicity,
    OutcomeTable,
    Population,
    count_monotone_tables,
    is_determinative,
    is_minimal_sufficient_cause,
    is_sufficient_cause,
    monotone_positive,
    monotone_profile,
    parse_truth_table,
    read_truth_table,
    write_truth_table,
)
from .empirical import (
    ContrastResult,
    Design,
    StratifiedCounts,
    ThetaCoefficients,
    beta_from_cohort,
    cell_means,
    irreducibility_contrast,
    linear_constraint_eval,
    msc_contrast,
    parametric_bootstrap,
    parse_counts,
    read_counts,
    singularity_contrast,
    theta_from_case_control,
    theta_from_cohort,
)
from .engine import (
    Representation,
    avoidance_representation,
    canonical_representation,
    essential_prime_implicants,
    prime_implicants,
    verify_representation,
)
from .interaction import (
    CausePartition,
    Finding,
    Witness,
    condition_value_irred,
    condition_value_monotone,
    condition_value_singular,
    extend_cause_set,
    is_irreducible,
    is_singular,
    msc_under_monotonicity,
    pns,
    pns_lower_bound,
)
from .trees import (
    CoefficientVector,
    LiteralTree,
    degree,
    edge_bijection,
    enumerate_trees,
    m_irred,
    m_sing,
    prufer_decode,
    prufer_encode,
)
