"""Noise generation, error metrics, and spectral diagnostics.

The noise generator is a counter mode pseudo random source: output
element i depends only on (seed, i), so fields of any shape are
reproducible across platforms and immune to numpy RNG version drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, SizeMismatchError
from .spectrum import eigen_grid_for, sort_spectrum, spectral_analysis

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_TWO53 = float(2**53)


@dataclass(frozen=True)
class NoiseSpec:
    """White noise level as a fraction rho of the data norm, plus a seed."""

    rho: float
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.rho) and self.rho >= 0):
            raise InvalidParameterError(f"rho must be finite and >= 0, got {self.rho}")
        if not isinstance(self.seed, int):
            raise InvalidParameterError("seed must be an int")


def _mix64(x):
    z = x.copy()
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z


def _uniform_stream(seed, count):
    base = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    idx = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = _mix64(base + idx * _GAMMA)
    return (z >> np.uint64(11)).astype(float) / _TWO53


def standard_normal_field(seed, shape):
    """Deterministic standard normal samples of the given shape.

    Draws pairs of uniforms from a splitmix-style counter stream and
    maps them through the Box-Muller transform, so the field depends
    only on the seed and the element count.

    Parameters
    ----------
    seed : int
        Any integer; reduced modulo 2**64.
    shape : tuple of int
        Shape of the returned array.

    Returns
    -------
    ndarray
        Standard normal samples, C-ordered by counter index.
    """
    size = int(np.prod(shape, dtype=np.int64)) if shape else 1
    if size <= 0:
        raise InvalidParameterError(f"field shape {shape} has no elements")
    npairs = (size + 1) // 2
    u = _uniform_stream(seed, 2 * npairs)
    u1 = u[0::2] + 1.0 / _TWO53
    u2 = u[1::2]
    r = np.sqrt(-2.0 * np.log(u1))
    out = np.empty(2 * npairs)
    out[0::2] = r * np.cos(2.0 * np.pi * u2)
    out[1::2] = r * np.sin(2.0 * np.pi * u2)
    return out[:size].reshape(shape)


def snr_from_rho(rho):
    """Signal to noise ratio in dB for a relative noise level rho."""
    if rho == 0:
        return math.inf
    return 20.0 * math.log10(1.0 / rho)


def add_noise(g, spec):
    """Add white noise scaled to a fraction of the data norm.

    The perturbation is rho * ||g|| / ||nu|| * nu for a standard normal
    field nu, so the relative noise level is exactly rho.

    Parameters
    ----------
    g : ndarray
        Clean data of any shape.
    spec : NoiseSpec
        Noise level and seed.

    Returns
    -------
    noisy : ndarray
        Perturbed copy of g.
    snr_db : float
        20*log10(1/rho), infinite when rho is zero.
    """
    g = np.asarray(g, dtype=float)
    if spec.rho == 0:
        return g.copy(), math.inf
    nu = standard_normal_field(spec.seed, g.shape)
    scale = spec.rho * np.linalg.norm(g.ravel()) / np.linalg.norm(nu.ravel())
    return g + scale * nu, snr_from_rho(spec.rho)


def rre(estimate, reference):
    """Relative restoration error ||estimate - reference|| / ||reference||."""
    estimate = np.asarray(estimate, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if estimate.shape != reference.shape:
        raise SizeMismatchError(
            f"shape mismatch: {estimate.shape} vs {reference.shape}"
        )
    denom = np.linalg.norm(reference.ravel())
    if denom == 0:
        raise InvalidParameterError("reference image has zero norm")
    return float(np.linalg.norm((estimate - reference).ravel()) / denom)


def picard_data(g, op):
    """Eigenvalue and coefficient magnitudes for a discrete Picard plot.

    Transforms the data into the operator eigenbasis and pairs the
    absolute eigenvalues with the absolute coefficients, ordered by
    non-increasing eigenvalue magnitude. Coefficients that decay with
    the eigenvalues indicate recoverable data; a plateau near the noise
    floor marks the indices a filter should drop.

    Parameters
    ----------
    g : ndarray
        Observed image, either (n1, n2) or (3, n1, n2); for color
        images the coefficient magnitude is the norm over channels.
    op : BlurOperator
        Operator whose eigenbasis is used.

    Returns
    -------
    magnitudes : ndarray
        |eigenvalue| in sorted order.
    coefficients : ndarray
        Matching |coefficient| values.
    """
    g = np.asarray(g, dtype=float)
    if g.shape[-2:] != op.shape:
        raise SizeMismatchError(f"data {g.shape} does not match operator {op.shape}")
    grid = eigen_grid_for(op)
    order = sort_spectrum(grid)
    ghat = spectral_analysis(g, op.bc)
    if g.ndim == 3:
        coef = np.sqrt((ghat**2).sum(axis=0)).ravel()
    else:
        coef = np.abs(ghat).ravel()
    return np.abs(grid.values).ravel()[order], coef[order]


def save_picard_csv(path, magnitudes, coefficients):
    """Write Picard plot data as CSV with columns abs_value,abs_coef."""
    magnitudes = np.asarray(magnitudes, dtype=float)
    coefficients = np.asarray(coefficients, dtype=float)
    if magnitudes.shape != coefficients.shape or magnitudes.ndim != 1:
        raise SizeMismatchError("magnitudes and coefficients must be equal-length 1-D")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("abs_value,abs_coef\n")
        for m, c in zip(magnitudes, coefficients):
            fh.write(f"{m:.17g},{c:.17g}\n")
