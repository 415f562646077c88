"""Stabilised higher-order space-time continuous Galerkin methods for the 1D wave equation."""

from .assembly import (
    QuadraturePlan,
    SpatialMatrices,
    TemporalMatrices,
    assemble_load,
    assemble_spatial,
    assemble_temporal,
)
from .errors import ErrorPair, eoc, error_norms
from .exceptions import (
    AccuracyWarning,
    EvaluationError,
    InvalidParameterError,
    MemoryCeilingError,
    SolverError,
    StructureError,
)
from .harness import StudyConfig, StudyReport, run_cfl_demo, run_study
from .linsystem import KroneckerSystem, apply, flatten, solve
from .mesh import Mesh1D, mesh_stats, refine_uniform, starting_spatial_mesh, starting_temporal_mesh
from .polybasis import LagrangeBasis, QuadratureRule, gauss_legendre, shifted_legendre
from .projection import ProjectionCoeffs, local_perturbed_mass, project_element
from .solutions import ExactSolution, make_u1, make_u2, verify_derivatives

__version__ = "0.1.0"
