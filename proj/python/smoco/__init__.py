"""Two-layer sliding-mode cascade observer toolkit."""

from ._core import (
    AugmentedModel,
    GainSet,
    PlantModel,
    RunConfig,
    build_augmented,
    certify_closed_loop,
    certify_theorem1,
    compare,
    config_hash,
    load_config,
    place_cascade_gain,
    place_observer_gain,
    place_state_feedback,
    resolve_gains,
    simulate,
    solve_lyapunov,
    sym_eig_max,
    validate_plant,
)

__all__ = [
    "AugmentedModel",
    "GainSet",
    "PlantModel",
    "RunConfig",
    "build_augmented",
    "certify_closed_loop",
    "certify_theorem1",
    "compare",
    "config_hash",
    "load_config",
    "place_cascade_gain",
    "place_observer_gain",
    "place_state_feedback",
    "resolve_gains",
    "simulate",
    "solve_lyapunov",
    "sym_eig_max",
    "validate_plant",
]
