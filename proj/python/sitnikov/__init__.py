"""Symmetric periodic satellite orbits of generalized Sitnikov problems."""

from ._core import (
    ConservativeSystem,
    HomotopyField,
    PrimaryEnsemble,
    SitnikovError,
    __version__,
    circular_polygon,
    continue_branch,
    field_bounds,
    kepler_pair,
    load_trajectory,
    run,
    shoot,
    solve_kepler,
    solve_seed,
    sturm_eigenvalues,
    sturm_eigenvalues_weight,
    verify_orbit,
)

__all__ = [
    "ConservativeSystem",
    "HomotopyField",
    "PrimaryEnsemble",
    "SitnikovError",
    "__version__",
    "circular_polygon",
    "continue_branch",
    "field_bounds",
    "kepler_pair",
    "load_trajectory",
    "run",
    "shoot",
    "solve_kepler",
    "solve_seed",
    "sturm_eigenvalues",
    "sturm_eigenvalues_weight",
    "verify_orbit",
]
