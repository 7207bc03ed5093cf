"""Eigenvalue grids of the spectrally decomposable blur operators.

A strongly symmetric mask has a trigonometric symbol f(x1, x2), and the
blur operators are diagonalized by sampling it:

* reflective: f on the grid ((s1)pi/n1, (s2)pi/n2), s zero-based, with
  the cosine transform columns as eigenvectors;
* the inner sine algebra: f on (r1 pi/(m1+1), r2 pi/(m2+1)), r one-based;
* anti-reflective: corners exactly 1 (the ramp-pair eigenvalue, counted
  four times), edges carrying the sine eigenvalues of the condensed 1-D
  masks (each counted twice), and the interior equal to the sine grid of
  size (n1-2, n2-2).

Grids are stored in image layout: values[s1, s2] pairs with the
eigenvector that is the outer product of column s1 of the first-axis
transform and column s2 of the second-axis transform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, SizeGuardError, UnsupportedAlgebraError
from .operators import BlurOperator, BoundaryCondition, apply_blur, _check_ar_support
from .psf import generating_function, generating_function_1d, require_strong_symmetry
from .transforms import TransformKind, two_level_apply

_ORACLE_LIMIT = 20000


@dataclass(frozen=True)
class EigenGrid:
    """Eigenvalues of a blur operator arranged on the image grid.

    Attributes
    ----------
    values : ndarray
        Shape (n1, n2); entry (s1, s2) belongs to the outer-product
        eigenvector with per-axis column indices s1 and s2.
    algebra : str
        One of "dct3", "tau", "ar"; names the transform family whose
        columns are the eigenvectors.
    """

    values: np.ndarray
    algebra: str

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2:
            raise InvalidParameterError("eigenvalue grid must be 2-D")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def shape(self):
        return self.values.shape


def eigen_grid_reflective(mask, shape):
    """Eigenvalues of the reflective blur operator of the given shape."""
    n1, n2 = _check_shape(shape)
    x1 = np.arange(n1) * np.pi / n1
    x2 = np.arange(n2) * np.pi / n2
    return EigenGrid(values=generating_function(mask, x1, x2), algebra="dct3")


def tau_eigenvalues(weights, m):
    """Eigenvalues of the 1-D sine-algebra matrix of a symmetric mask.

    Parameters
    ----------
    weights : array_like
        One-dimensional symmetric mask of odd length.
    m : int
        Matrix size; samples the symbol at r*pi/(m+1), r = 1..m.
    """
    if m < 1:
        raise InvalidParameterError("matrix size must be positive")
    x = np.arange(1, m + 1) * np.pi / (m + 1)
    return generating_function_1d(weights, x)


def eigen_grid_tau(mask, shape):
    """Two-level sine-algebra eigenvalues of a strongly symmetric mask."""
    n1, n2 = _check_shape(shape)
    x1 = np.arange(1, n1 + 1) * np.pi / (n1 + 1)
    x2 = np.arange(1, n2 + 1) * np.pi / (n2 + 1)
    return EigenGrid(values=generating_function(mask, x1, x2), algebra="tau")


def eigen_grid_ar(mask, shape):
    """Eigenvalues of the anti-reflective blur operator.

    The node vector per axis is [0, j*pi/(m-1) for j = 1..m-2, 0]; the
    duplicated zero nodes produce the four exact unit eigenvalues at the
    corners and pair each edge with the condensed 1-D mask spectrum.
    """
    n1, n2 = _check_shape(shape)
    if n1 < 3 or n2 < 3:
        raise InvalidParameterError("anti-reflective grid needs n >= 3 per axis")
    require_strong_symmetry(mask)
    _check_ar_support(mask, (n1, n2))
    g1 = np.zeros(n1)
    g1[1 : n1 - 1] = np.arange(1, n1 - 1) * np.pi / (n1 - 1)
    g2 = np.zeros(n2)
    g2[1 : n2 - 1] = np.arange(1, n2 - 1) * np.pi / (n2 - 1)
    values = generating_function(mask, g1, g2)
    values[0, 0] = values[0, -1] = values[-1, 0] = values[-1, -1] = 1.0
    return EigenGrid(values=values, algebra="ar")


def eigen_grid_for(op):
    """Eigenvalue grid of a spectrally decomposable operator."""
    if op.bc is BoundaryCondition.REFLECTIVE:
        return eigen_grid_reflective(op.mask, op.shape)
    if op.bc is BoundaryCondition.ANTIREFLECTIVE:
        return eigen_grid_ar(op.mask, op.shape)
    raise UnsupportedAlgebraError(
        f"no spectral decomposition for boundary rule {op.bc.value}"
    )


def eigen_from_first_column(op):
    """Recover reflective eigenvalues from one operator application.

    Transforms the blurred first basis image and divides it by the
    transformed basis image; the denominators are never zero. This is a
    cross-check route independent of the symbol sampling, kept behind
    the oracle size guard.
    """
    if op.bc is not BoundaryCondition.REFLECTIVE:
        raise UnsupportedAlgebraError(
            "first-column eigenvalue recovery requires the reflective rule"
        )
    if op.size > _ORACLE_LIMIT:
        raise SizeGuardError(
            f"first-column recovery limited to {_ORACLE_LIMIT} pixels"
        )
    basis = np.zeros(op.shape)
    basis[0, 0] = 1.0
    numer = two_level_apply(apply_blur(op, basis), TransformKind.DCT3, transposed=True)
    denom = two_level_apply(basis, TransformKind.DCT3, transposed=True)
    return EigenGrid(values=numer / denom, algebra="dct3")


def spectral_analysis(x, bc):
    """Map data to spectral coefficients of the boundary rule's algebra.

    For the reflective rule this is the transposed cosine transform on
    the last two axes; for the anti-reflective rule it is the explicit
    inverse of the ramp-bordered transform.
    """
    if bc is BoundaryCondition.REFLECTIVE:
        return two_level_apply(x, TransformKind.DCT3, transposed=True)
    if bc is BoundaryCondition.ANTIREFLECTIVE:
        return two_level_apply(x, TransformKind.AR_INVERSE)
    raise UnsupportedAlgebraError(
        f"no spectral decomposition for boundary rule {bc.value}"
    )


def spectral_synthesis(x, bc):
    """Map spectral coefficients back to an image; inverse of analysis."""
    if bc is BoundaryCondition.REFLECTIVE:
        return two_level_apply(x, TransformKind.DCT3)
    if bc is BoundaryCondition.ANTIREFLECTIVE:
        return two_level_apply(x, TransformKind.AR)
    raise UnsupportedAlgebraError(
        f"no spectral decomposition for boundary rule {bc.value}"
    )


def synthesis_kind(bc):
    """TransformKind whose columns are the synthesis basis for bc."""
    if bc is BoundaryCondition.REFLECTIVE:
        return TransformKind.DCT3
    if bc is BoundaryCondition.ANTIREFLECTIVE:
        return TransformKind.AR
    raise UnsupportedAlgebraError(
        f"no spectral decomposition for boundary rule {bc.value}"
    )


def sort_spectrum(grid):
    """Flat indices ordered by non-increasing magnitude.

    Ties keep row-major order (stable sort), so the ordering is fully
    deterministic and truncating after k indices always selects the
    same set as thresholding at the magnitude of the k-th entry.
    """
    magnitudes = np.abs(np.asarray(grid.values)).ravel()
    return np.argsort(-magnitudes, kind="stable")


def save_eigen_csv(grid, path):
    """Write grid values row-major, one full-precision value per line."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("value\n")
        for v in np.asarray(grid.values).ravel():
            fh.write(format(v, ".17g") + "\n")


def _check_shape(shape):
    n1, n2 = int(shape[0]), int(shape[1])
    if n1 < 1 or n2 < 1:
        raise InvalidParameterError("grid shape must be positive")
    return n1, n2
