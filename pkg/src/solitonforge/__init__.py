"""Metric Lie algebras: curvature, Ricci soliton certificates, Einstein extensions."""

__version__ = "0.1.0"

from .algebra import (
    InvalidAlgebraError,
    LinearMap,
    MetricLieAlgebra,
    Subspace,
    ValidationReport,
    ad,
    bracket,
    derivation_space,
    derived_series,
    from_brackets,
    is_ideal,
    is_nilpotent,
    is_solvable,
    lower_central_series,
    orthonormalize,
    validate,
)
from .curvature import (
    Connection,
    CurvatureReport,
    covariant_ricci_along,
    divergence,
    levi_civita,
    ricci,
    riemann,
    shape_operator,
)
from .soliton import (
    SolitonCertificate,
    find_algebraic_soliton,
    find_semi_algebraic_soliton,
    normality_defect,
    soliton_identities,
    split,
)
from .extension import (
    ExtensionResult,
    NonNormalDerivationError,
    NotADerivationError,
    abelian_flat_extension,
    closed_form_extension_ricci,
    einstein_ambient_pipeline,
    einstein_extension,
    one_dim_extension,
    wpe_extension,
)
from .verify import (
    SolvDecomposition,
    einstein_residual,
    l_from_scal,
    mu_value,
    radial_ricci_check,
    solvmanifold_conditions,
    structure_recovery,
    wpe_residual,
)
from .reports import Check, VerificationReport
from .catalog import catalog, catalog_algebra, catalog_names

__all__ = [name for name in dir() if not name.startswith("_")]
