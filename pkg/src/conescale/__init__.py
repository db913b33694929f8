"""Cone scalarization, induced metrics and a gauge-controlled Jungck solver."""

from .cones import SolidCone, contains, interior_contains, leq, lorentz, orthant, polyhedral
from .errors import (
    ConescaleError,
    DimensionError,
    DomainError,
    NonConvergence,
    NotInteriorError,
    NumericalError,
)
from .scalarization import ScalarizationResult, equivalence_constants, norm_e, xi
from .cone_metric import ConeMetricSpace, induced_metric, order_check, validate_cone_metric
from .gauges import ConeGauge, GaugeFunction, compute_r0, gauge_from_cone_map, linear, saturating
from .fixed_point import JungckProblem, SolveReport, jungck_solve, tvs_jungck_solve

__all__ = [
    "SolidCone", "orthant", "lorentz", "polyhedral", "contains", "interior_contains", "leq",
    "ConescaleError", "DimensionError", "DomainError", "NonConvergence", "NotInteriorError",
    "NumericalError",
    "ScalarizationResult", "xi", "norm_e", "equivalence_constants",
    "ConeMetricSpace", "induced_metric", "order_check", "validate_cone_metric",
    "GaugeFunction", "ConeGauge", "linear", "saturating", "compute_r0", "gauge_from_cone_map",
    "JungckProblem", "SolveReport", "jungck_solve", "tvs_jungck_solve",
]
