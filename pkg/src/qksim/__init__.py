"""Quantum kernel simulation under depolarization noise and finite shots.

Subpackages follow the estimation pipeline: ``qsim`` encodes features into
statevectors, ``kernels`` builds ideal / noisy / shot-sampled Gram
matrices, ``calibrate`` repairs indefinite estimates, ``learner`` trains
kernel ridge classifiers, ``datasets`` supplies and relabels data,
``bounds`` evaluates generalization-bound diagnostics, and ``cli`` wires
everything into a sweep harness.
"""
from . import bounds, calibrate, datasets, kernels, learner, linalg, qsim, rng

__all__ = [
    "bounds",
    "calibrate",
    "datasets",
    "kernels",
    "learner",
    "linalg",
    "qsim",
    "rng",
]

__version__ = "0.1.0"
