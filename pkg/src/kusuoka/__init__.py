"""Cylinder measures of repeatedly measured, unitarily evolving quantum systems:
exact evaluation, ergodicity and reversibility criteria, and Monte Carlo checks."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .tolerances import DEFAULT, Tolerances
from .numerics import (
    Subspace,
    SpectralDecomposition,
    contains_vector,
    hermitian_eig,
    image,
    intersect_dim,
    orth_complement,
    orthonormalize,
    psd_sqrt,
    unitary_eig,
)
from .quantum import (
    DensityMatrix,
    Povm,
    PovmKind,
    PovmTag,
    Unitary,
    classify_povm,
    haar_random_unitary,
    maximally_mixed,
    pvm_from_basis,
    rank_one_povm,
    validate_povm,
)
from .pifs import (
    Pifs,
    cylinder_table,
    evolve,
    format_outcomes,
    kusuoka_cylinder_prob,
    outcome_prob,
    parse_outcomes,
    string_prob,
)
from .markov import TransitionMatrix, is_irreducible, markov_cylinder_prob, transition_matrix
from .ergodicity import (
    Criterion,
    ErgodicityVerdict,
    Status,
    adjoint_family_equiv_check,
    algebra_irreducible,
    ergodicity_verdict,
    lemma_trace_limit,
    nonergodic_tail_mass,
    pvm2_eigenvector_in_theta,
    rank1_subset_search,
    scaled_projection_criterion,
    verify_witness,
)
from .trajectories import (
    EmpiricalStats,
    Trajectory,
    birkhoff_average,
    empirical_cylinder_freq,
    sample_trajectory,
)
from .reversibility import fact_identities_check, reversibility_scan
from .general_kusuoka import (
    KusuokaSystem,
    OperatorFamily,
    kusuoka_prob,
    kusuoka_system,
    stationary_density,
)
from .model import load_model
