"""Desk-scale simulator of write-write Raman scattering in a vapor cell.

The package evaluates the closed-form Stokes intensity of a second write
pulse reading out the spin-wave correlation prepared by a first one, for
co- and counter-propagating beam geometries, and cross-checks it against a
direct covariance-propagation run of the same discretized model.
"""

from .errors import (
    ConfigError,
    GridError,
    NumericalError,
    OrderingError,
    VerificationError,
)
from .intensity import (
    IntensityTrace,
    QuadConfig,
    enhancement_ratio,
    ers_total,
    ers_trace,
    urs_intensity,
    urs_trace,
)
from .params import (
    ChannelHistory,
    ModelParams,
    PulseEnvelope,
    PulseKind,
    build_params,
    fig4_params,
    load_config,
)
from .spinwave import (
    Geometry,
    Ordering,
    SpinCorrelation,
    flipped_density,
    map_geometry,
    split_vacuum,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelHistory",
    "ConfigError",
    "Geometry",
    "GridError",
    "IntensityTrace",
    "ModelParams",
    "NumericalError",
    "Ordering",
    "OrderingError",
    "PulseEnvelope",
    "PulseKind",
    "QuadConfig",
    "SpinCorrelation",
    "VerificationError",
    "build_params",
    "enhancement_ratio",
    "ers_total",
    "ers_trace",
    "fig4_params",
    "flipped_density",
    "load_config",
    "map_geometry",
    "split_vacuum",
    "urs_intensity",
    "urs_trace",
    "__version__",
]
