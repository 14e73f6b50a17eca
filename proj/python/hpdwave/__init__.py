# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The hpdwave Authors
"""Intrinsic wavelet regression and spectral estimation for curves of HPD matrices.

Curves are complex arrays of shape (n, d, d); time series are real arrays of
shape (d, T).
"""

from ._core import (
    HpdwaveError,
    WaveletDecomposition,
    bias_constant,
    cpress_denoise,
    dist,
    dpss_tapers,
    estimate_spectrum,
    forward,
    geodesic,
    inverse,
    isre,
    karcher_mean,
    multitaper_periodogram,
    nn_regression,
    noise_variance,
    simulate_timeseries,
    test_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "HpdwaveError",
    "WaveletDecomposition",
    "bias_constant",
    "cpress_denoise",
    "dist",
    "dpss_tapers",
    "estimate_spectrum",
    "forward",
    "geodesic",
    "inverse",
    "isre",
    "karcher_mean",
    "multitaper_periodogram",
    "nn_regression",
    "noise_variance",
    "simulate_timeseries",
    "test_spectrum",
]
