"""
hypchroma
Upper bounds, cliques and exact colorings for distance graphs of the
hyperbolic plane and of regular trees.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    ConstructionError,
    DomainError,
    HypChromaError,
    ParameterError,
    SizeLimitError,
)
from .hypgeom import HPoint, Isometry, hyp_distance, point_at_angle, point_at_distance  # noqa: E402

__all__ = [
    "__version__",
    "ConfigError",
    "ConstructionError",
    "DomainError",
    "HPoint",
    "HypChromaError",
    "Isometry",
    "ParameterError",
    "SizeLimitError",
    "hyp_distance",
    "point_at_angle",
    "point_at_distance",
]
