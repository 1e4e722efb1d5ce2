"""Turning-boundaries-tree adaptive piecewise-linear channel equalizer."""

from ._core import (
    ChannelConfig,
    EqualizerKind,
    StepOutput,
    TbtState,
    alpha,
    dfe_extend,
    enumerate_models,
    init_state,
    nearest_common_ancestor,
    noise_variance_from_snr,
    propagate,
    rho,
    rho_oracle,
    run_trial,
    soft_separator,
    step,
    theta,
    training_sequence,
)

__all__ = [
    "ChannelConfig",
    "EqualizerKind",
    "StepOutput",
    "TbtState",
    "alpha",
    "dfe_extend",
    "enumerate_models",
    "init_state",
    "nearest_common_ancestor",
    "noise_variance_from_snr",
    "propagate",
    "rho",
    "rho_oracle",
    "run_trial",
    "soft_separator",
    "step",
    "theta",
    "training_sequence",
]
