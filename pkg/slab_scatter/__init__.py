"""Band structure, scattering and pulse simulation for 1-D periodic potentials."""

from .base import Profile
from .config import Config, config
from .exceptions import (
    AccuracyError,
    AmbiguousClassificationError,
    ClassificationError,
    ConfigurationError,
    DomainError,
    DomainSizeError,
    EdgeSingularityError,
    InvalidSpecError,
    NearEdgeError,
    NumericDegeneracyError,
    NumericError,
    RefinementError,
    ScaleExceededError,
    SingularityError,
    SlabScatterError,
    StabilityError,
    UnderResolutionWarning,
)
from .potentials import (
    DeltaTerm,
    PotentialSpec,
    SmoothPiece,
    Truncation,
    TruncatedPotential,
    load_spec,
    make_alternating_delta_comb,
    make_constant_pieces,
    make_scaled_smooth,
    make_single_delta_comb,
    spec_from_dict,
    spec_to_dict,
)
from .transfer import Mat2, monodromy, monodromy_power, propagator, transfer_over_slab
from .spectrum import (
    Band,
    DispersionSample,
    EdgeClassification,
    EdgeKind,
    Regime,
    bloch_k,
    classify_edge,
    degenerate_edge_velocity,
    discriminant,
    dispersion,
    find_bands,
    group_velocity,
    weyl_functions,
)
from .scattering import (
    ScatterResult,
    SemiInfiniteResult,
    TransparencyPoint,
    gap_decay_fit,
    reflection_formula,
    scatter_direct,
    scatter_semi_infinite,
    transmittance_formula,
    transparency_points,
)
from .timedomain import EnergyReport, PulseConfig, freq_domain_oracle, run

__all__ = [
    "Profile",
    "Config",
    "config",
    "SlabScatterError",
    "InvalidSpecError",
    "ConfigurationError",
    "NumericError",
    "DomainError",
    "SingularityError",
    "AccuracyError",
    "ScaleExceededError",
    "NumericDegeneracyError",
    "EdgeSingularityError",
    "NearEdgeError",
    "RefinementError",
    "StabilityError",
    "DomainSizeError",
    "ClassificationError",
    "AmbiguousClassificationError",
    "UnderResolutionWarning",
    "DeltaTerm",
    "SmoothPiece",
    "PotentialSpec",
    "Truncation",
    "TruncatedPotential",
    "make_single_delta_comb",
    "make_alternating_delta_comb",
    "make_scaled_smooth",
    "make_constant_pieces",
    "spec_from_dict",
    "spec_to_dict",
    "load_spec",
    "Mat2",
    "propagator",
    "monodromy",
    "monodromy_power",
    "transfer_over_slab",
    "Regime",
    "EdgeKind",
    "DispersionSample",
    "Band",
    "EdgeClassification",
    "discriminant",
    "bloch_k",
    "dispersion",
    "find_bands",
    "classify_edge",
    "group_velocity",
    "degenerate_edge_velocity",
    "weyl_functions",
    "ScatterResult",
    "SemiInfiniteResult",
    "TransparencyPoint",
    "scatter_direct",
    "reflection_formula",
    "transmittance_formula",
    "scatter_semi_infinite",
    "transparency_points",
    "gap_decay_fit",
    "PulseConfig",
    "EnergyReport",
    "run",
    "freq_domain_oracle",
]
