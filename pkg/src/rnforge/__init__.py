"""Exact-arithmetic toolkit for measure decompositions, finite-space
Radon-Nikodym derivatives, and a computable sequence model of hyperreal
calculus."""

from .density import (
    AbsoluteContinuityError,
    AlgebraMeasurabilityError,
    ApproximationReport,
    DerivationResult,
    FiniteAlgebra,
    LevelReport,
    RefinementChain,
    SimpleDensity,
    SpaceTooLargeError,
    approximation_report,
    atom_density,
    dyadic_approximation,
    hahn_level_correspondence,
    integrate,
    level_band,
    level_set,
    rn_derive,
    verify_density,
)
from .hyper import (
    HyperReal,
    Kind,
    PartitionSequence,
    Status,
    Verdict,
    arith,
    check_limit,
    check_uniform_continuity,
    classify,
    infinitely_close,
    partition_agreement,
    rs_integral,
    standard_part,
)
from .measure import (
    AtomSpace,
    Measure,
    MeasurableSet,
    PreconditionError,
    SetSequenceSpec,
    SignedMeasure,
    SpaceMismatchError,
    affine_combine,
    construct_positive_subset,
    hahn_decomposition,
    is_absolutely_continuous,
    jordan_decomposition,
    limsup_sets,
    measure_of,
)

__version__ = "0.1.0"
