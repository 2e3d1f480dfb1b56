"""Python access to the polydg wave solvers."""

from ._polydg import (
    ConfigError,
    ErrorReport,
    Mesh,
    assemble,
    convergence_rates,
    ricker,
    run_config,
    run_manufactured,
    verification_mesh,
    voronoi_mesh,
)

__all__ = [
    "ConfigError",
    "ErrorReport",
    "Mesh",
    "assemble",
    "convergence_rates",
    "ricker",
    "run_config",
    "run_manufactured",
    "verification_mesh",
    "voronoi_mesh",
]
