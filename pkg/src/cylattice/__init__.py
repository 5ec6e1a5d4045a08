"""Chung-Yao interpolation lattices.

Construct lattices from hyperplane families in general position, expand
their Lagrange interpolants, evaluate divided-difference remainder formulas,
and measure convergence of interpolants of shrinking lattices toward Taylor
polynomials.
"""

from .errors import (
    ConfigError,
    ConsistencyError,
    CyLatticeError,
    DegenerateSubsetError,
    DerivativeOrderError,
    DomainError,
    GeneralPositionError,
)
from .geometry import (
    ChungYaoLattice,
    GeneralPositionReport,
    Hyperplane,
    HyperplaneFamily,
    LineSubset,
    build_lattice,
    check_general_position,
    deboor_identity_residual,
    direction_vector,
    random_family,
    solve_vertex,
)
from .poly import (
    MultiPoly,
    SymmetricForm,
    basis_vector,
    derivative_form,
    homogeneous_indices,
    multi_indices,
    polarize,
    substitute,
    taylor,
    vandermonde,
)
from .functions import (
    CosAffine,
    ExpAffine,
    LinearCombination,
    PolynomialFunction,
    Product,
    RestrictedOrder,
    SinAffine,
    SmoothFunction,
    function_from_spec,
)
from .divdiff import (
    PointTuple,
    StandardSimplex,
    divided_difference,
    divided_difference_continuity_probe,
    grundmann_moller_rule,
    monomial_simplex_integral,
    simplex_integral,
    simplex_integral_poly,
)
from .chungyao import (
    Interpolant,
    NewtonDecomposition,
    NewtonStage,
    RemainderDecomposition,
    TaylorDecomposition,
    TechObservationReport,
    cardinal_polynomial,
    deboor_remainder,
    homogeneous_representation,
    interpolate,
    newton_identity,
    newton_stage_data,
    pk_polynomial,
    remainder_sign_flip_deviation,
    taylor_error_decomposition,
    techobserv_check,
)
from .convergence import (
    AffineCriterionReport,
    BoundReport,
    ConditionReport,
    LatticeSequence,
    RateReport,
    affine_criterion,
    affine_sequence,
    affine_triangle_sequence,
    ball_grid,
    bound_evaluator,
    c1_c3_equivalence_probe,
    check_conditions,
    convergence_experiment,
    degenerate_sequence,
    degenerate_triangle_points,
    derivative_norm_estimate,
    fit_loglog_slope,
    observed_delta,
    transform_family,
    triangle_family_from_points,
    unit_triangle_family,
)
from .config import ExperimentConfig, compile_expression, load_config, parse_config

__version__ = "0.1.0"
