"""Quantum Otto engine: work and heat statistics under TPM and DBN measurement."""

from ._core import (
    ConfigError,
    ConvergenceError,
    OttoError,
    default_config,
    dephase,
    eig_hermitian,
    figure,
    figure_names,
    gad_channel,
    kl_divergence,
    rel_entropy_coherence,
    simulate,
    spin_operators,
    sweep,
    trace_distance,
    validate,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "OttoError",
    "default_config",
    "dephase",
    "eig_hermitian",
    "figure",
    "figure_names",
    "gad_channel",
    "kl_divergence",
    "rel_entropy_coherence",
    "simulate",
    "spin_operators",
    "sweep",
    "trace_distance",
    "validate",
]
