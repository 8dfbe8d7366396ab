"""Haar unitaries and model matrices ``A = U sqrt(G)``.

The Haar draw is the QR factorisation of a complex Gaussian matrix with
the phases of ``diag(R)`` pushed into ``Q`` so that ``R`` has a positive
real diagonal.  Without that correction the columns of ``Q`` inherit the
arbitrary sign/phase convention of the QR routine and the result is
*not* Haar distributed.
"""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

from .rng import RngStream, box_muller
from .spectrum import SingularSpectrum

__all__ = ["SingularDrawError", "gaussian_matrix", "haar_unitary", "haar_from_gaussian", "model_matrix"]

# |R_jj| below this (relative to the column norm scale) counts as singular
_SINGULAR_TOL = 1e-300


class SingularDrawError(ArithmeticError):
    pass


def _gaussian_from(gen: np.random.Generator, n: int) -> np.ndarray:
    return box_muller(gen.random(2 * n * n)).reshape(n, n)


def gaussian_matrix(n: int, rng: RngStream) -> np.ndarray:
    """``n x n`` complex Gaussian matrix (row-major) from the start of ``rng``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _gaussian_from(rng.generator(), n)


def haar_from_gaussian(z: np.ndarray) -> np.ndarray:
    """Phase-corrected Q factor of ``z``."""
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    mag = np.abs(d)
    if np.any(mag <= _SINGULAR_TOL):
        raise SingularDrawError("Gaussian draw is numerically singular")
    return q * (d / mag)


def haar_unitary(n: int, rng: RngStream) -> np.ndarray:
    """Haar-distributed ``n x n`` unitary.

    A singular Gaussian draw (probability zero) is replaced once by the
    next draw of the same stream; a second failure raises.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = rng.generator()
    try:
        return haar_from_gaussian(_gaussian_from(gen, n))
    except SingularDrawError:
        return haar_from_gaussian(_gaussian_from(gen, n))


def model_matrix(spec: Union[SingularSpectrum, Sequence[float]], rng: RngStream) -> np.ndarray:
    """``U sqrt(G)``: the Haar unitary with column ``j`` scaled by ``sqrt(g_j)``."""
    g = spec.g if isinstance(spec, SingularSpectrum) else SingularSpectrum(spec).g
    u = haar_unitary(len(g), rng)
    return u * np.sqrt(np.asarray(g, dtype=float))
