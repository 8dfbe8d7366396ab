"""Pick the compiled kernels when they import, the pure-Python path otherwise.

Set ``SVDENSITY_PURE_PYTHON=1`` to force the fallback.  Both backends
implement ``sample_moduli(u, sqrt_g) -> (moduli, iterations, converged)``
and ``eigvals(a) -> (values, iterations, converged)`` with the same
algorithms; results agree to rounding.
"""

from __future__ import annotations

import os

import numpy as np

from . import eigen
from .rng import box_muller
from .sampling import SingularDrawError, haar_from_gaussian

try:
    if os.environ.get("SVDENSITY_PURE_PYTHON") == "1":
        raise ImportError("pure-Python backend forced by SVDENSITY_PURE_PYTHON")
    from . import _kernels
except ImportError:
    _kernels = None

DEFAULT = "compiled" if _kernels is not None else "python"


def _py_eigvals(a, eps=eigen.DEFLATION_EPS, max_iter=None):
    res = eigen.eigenvalues(a, eps, max_iter)
    return res.values, res.iterations, res.converged


def _py_sample_moduli(u, sqrt_g, eps=eigen.DEFLATION_EPS, max_iter=None):
    n = len(sqrt_g)
    nn = n * n
    u = np.asarray(u, dtype=float)
    try:
        q = haar_from_gaussian(box_muller(u[: 2 * nn]).reshape(n, n))
    except SingularDrawError:
        if len(u) < 4 * nn:
            raise
        q = haar_from_gaussian(box_muller(u[2 * nn: 4 * nn]).reshape(n, n))
    values, iterations, converged = _py_eigvals(q * np.asarray(sqrt_g), eps, max_iter)
    return np.abs(values), iterations, converged


_PYTHON = {"eigvals": _py_eigvals, "sample_moduli": _py_sample_moduli}


def available() -> list[str]:
    return ["compiled", "python"] if _kernels is not None else ["python"]


def get(name: str | None = None) -> dict:
    """Function table for backend ``name`` (default: the best available)."""
    name = name or DEFAULT
    if name == "python":
        return _PYTHON
    if name == "compiled":
        if _kernels is None:
            raise RuntimeError("compiled kernels are not built; reinstall with Cython available")
        return {"eigvals": _kernels.eigvals, "sample_moduli": _kernels.sample_moduli}
    raise ValueError(f"unknown backend {name!r}")
