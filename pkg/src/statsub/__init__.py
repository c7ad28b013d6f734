"""Numerical verification of statistical-manifold and statistical-submersion identities."""

from .expr import DomainError, ExprError, ScalarExpr, eval_jet2, fd_jet2, parse
from .fields import ComplexStructureField, ConnectionField, MetricField, VectorFieldSpec, coordinate_field
from .geometry import (
    codazzi_residual,
    covariant_derivative,
    curvature,
    curvature_duality_residual,
    dual_connection,
    is_statistical,
    levi_civita,
    s_tensor,
    torsion_residual,
)
from .manifest import Manifest, ManifestError, fixture, load_manifest
from .residuals import PreconditionError, ResidualReport, Sampler
from .submersion import SubmersionSetup

__version__ = "0.1.0"
