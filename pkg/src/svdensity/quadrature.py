"""Adaptive Gauss-Kronrod integration split at known kinks.

Thin layer over :func:`scipy.integrate.quad` (QUADPACK ``qags``): the
interval is cut at every breakpoint first, each piece is integrated
separately and the pieces are added with ``math.fsum``.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable, Iterable

from scipy import integrate

__all__ = ["QuadratureError", "integrate_pieces"]

ABS_TOL = 1e-10
REL_TOL = 1e-10
MAX_SUBDIVISIONS = 10_000


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, error_estimate: float):
        super().__init__(f"{message} (error estimate {error_estimate:.3g})")
        self.error_estimate = error_estimate


def _quad(f, a, b, epsabs, epsrel, limit):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, err = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit)
        except integrate.IntegrationWarning as exc:
            # rerun quietly to recover the achieved error estimate
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            _, err = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit)
            raise QuadratureError(f"quadrature on [{a}, {b}] failed: {exc}", err) from None
    tol = max(epsabs, epsrel * abs(value))
    if not math.isfinite(value) or err > 10 * tol:
        raise QuadratureError(f"quadrature on [{a}, {b}] did not converge", err)
    return value, err


def integrate_pieces(
    f: Callable[[float], float],
    a: float,
    b: float,
    breakpoints: Iterable[float] = (),
    epsabs: float = ABS_TOL,
    epsrel: float = REL_TOL,
    limit: int = MAX_SUBDIVISIONS,
) -> tuple[float, float]:
    """Integrate ``f`` over ``[a, b]`` with forced splits at ``breakpoints``.

    Returns ``(value, error_estimate)``. Raises :class:`QuadratureError`
    when any piece fails to converge.
    """
    if b < a:
        value, err = integrate_pieces(f, b, a, breakpoints, epsabs, epsrel, limit)
        return -value, err
    cuts = sorted({a, b, *(p for p in breakpoints if a < p < b)})
    values, errors = [], []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi <= lo:
            continue
        v, e = _quad(f, lo, hi, epsabs, epsrel, limit)
        values.append(v)
        errors.append(e)
    return math.fsum(values), math.fsum(errors)
