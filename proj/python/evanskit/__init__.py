"""Evans-function toolkit for viscous shock profiles."""

from ._core import (
    EvansEngine,
    EvansError,
    Frequency,
    check_h1,
    check_h2,
    check_rh,
    defaults_json,
    fit_low_frequency,
    get_system,
    lopatinski_det,
    profile_residual,
    run_config,
    solve_profile,
    system_names,
)

__all__ = [
    "EvansEngine",
    "EvansError",
    "Frequency",
    "check_h1",
    "check_h2",
    "check_rh",
    "defaults_json",
    "fit_low_frequency",
    "get_system",
    "lopatinski_det",
    "profile_residual",
    "run_config",
    "solve_profile",
    "system_names",
]
