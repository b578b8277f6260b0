"""Fourier amalgam-family norms, KdV-Burgers Picard iterates, and the
vanishing-data / bounded-iterate witness sweep built on top of them."""

from .amalgam_norms import (
    AmalgamParams,
    BumpProfile,
    SmoothWindowFamily,
    amalgam_norm,
    box_lp_norm,
    build_partition,
    fourier_lebesgue_norm,
    japanese_bracket,
    modulation_norm,
    sobolev_norm,
)
from .exceptions import (
    ConfigError,
    DomainError,
    InvalidProfileError,
    SupportOverflowError,
    UnsupportedInputError,
    UnsupportedParameterError,
)
from .kdvb import (
    ExponentGaps,
    PicardConfig,
    SERIES_THRESHOLD,
    duhamel_rhs,
    exponent_gaps,
    g_ratio,
    picard_iterate,
    second_iterate_closed_form,
    second_iterate_oracle,
    semigroup_apply,
    semigroup_multiplier,
)
from .spectral_core import (
    DEFAULT_QUAD_DENSITY,
    FrequencyGrid,
    IntervalSet,
    PiecewiseConstSpectrum,
    QuadratureRule,
    SampledSpectrum,
    evaluate,
    integrate_on,
    intersect,
    sample_on_grid,
)
from .witness import (
    ExponentBounds,
    ScalingScan,
    WitnessConfig,
    WitnessReport,
    a2_norm_lower,
    contributing_boxes,
    discontinuity_report,
    exponent_bounds_check,
    lower_bound_integral,
    make_phi_N,
    min_N_for,
    resonant_set,
    scaling_scan,
)

__version__ = "0.1.0"

__all__ = [
    "AmalgamParams",
    "BumpProfile",
    "ConfigError",
    "DEFAULT_QUAD_DENSITY",
    "DomainError",
    "ExponentBounds",
    "ExponentGaps",
    "FrequencyGrid",
    "IntervalSet",
    "InvalidProfileError",
    "PicardConfig",
    "PiecewiseConstSpectrum",
    "QuadratureRule",
    "SERIES_THRESHOLD",
    "SampledSpectrum",
    "ScalingScan",
    "SmoothWindowFamily",
    "SupportOverflowError",
    "UnsupportedInputError",
    "UnsupportedParameterError",
    "WitnessConfig",
    "WitnessReport",
    "a2_norm_lower",
    "amalgam_norm",
    "box_lp_norm",
    "build_partition",
    "contributing_boxes",
    "discontinuity_report",
    "duhamel_rhs",
    "evaluate",
    "exponent_bounds_check",
    "exponent_gaps",
    "fourier_lebesgue_norm",
    "g_ratio",
    "integrate_on",
    "intersect",
    "japanese_bracket",
    "lower_bound_integral",
    "make_phi_N",
    "min_N_for",
    "modulation_norm",
    "picard_iterate",
    "resonant_set",
    "sample_on_grid",
    "scaling_scan",
    "second_iterate_closed_form",
    "second_iterate_oracle",
    "semigroup_apply",
    "semigroup_multiplier",
    "sobolev_norm",
]
