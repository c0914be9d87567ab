"""Surfaces of CP^{N-1} sigma-model solutions immersed in su(N)."""

from .errors import ConvergenceError, InputError, SigmaSurfError, SingularityError
from .jets import BiJet, RationalFunction, jet_from_rational
from .model import (
    HolomorphicVectorSpec,
    charge_and_action,
    projector_full,
    projector_rank1,
    tower,
    veronese_vector,
)
from .immersion import (
    SuNBasis,
    immersion_closed_form,
    immersion_line_integral,
    immersion_tower_formula,
    sun_coordinates,
)
from .geometry import GeometryReport, geometry_report, mean_curvature
from .meron import MeronSpec, meron_radius, quad_diff_report, trace_trajectory

__all__ = [
    "BiJet",
    "ConvergenceError",
    "GeometryReport",
    "HolomorphicVectorSpec",
    "InputError",
    "MeronSpec",
    "RationalFunction",
    "SigmaSurfError",
    "SingularityError",
    "SuNBasis",
    "charge_and_action",
    "geometry_report",
    "immersion_closed_form",
    "immersion_line_integral",
    "immersion_tower_formula",
    "jet_from_rational",
    "mean_curvature",
    "meron_radius",
    "projector_full",
    "projector_rank1",
    "quad_diff_report",
    "sun_coordinates",
    "tower",
    "trace_trajectory",
    "veronese_vector",
]
