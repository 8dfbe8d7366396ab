"""Closed-form densities for two special spectra.

Both are shapes known up to a constant; the constant is fixed so that the
continuous part has unit mass on its support.
"""

from __future__ import annotations

import functools
import math

from .quadrature import integrate_pieces

__all__ = [
    "rank_one_raw",
    "rank_one_constant",
    "psi_rank_one",
    "truncated_raw",
    "truncated_constant",
    "psi_truncated",
]


def _check_rank_one(g1: float, g: float, n: int) -> None:
    if n < 2:
        raise ValueError("rank-one deviation needs N >= 2")
    if not (0.0 <= g1 < g):
        raise ValueError(f"need 0 <= g1 < g, got g1={g1!r}, g={g!r}")


def rank_one_raw(g1: float, g: float, n: int, s: float) -> float:
    """The rank-one formula for ``G = diag(g1, g, ..., g)`` exactly as printed.

    Its integral over ``[g1, g]`` is ``N`` rather than one (``N - 1`` when
    ``g1 = 0``).  Values of order ``1/g1`` near ``s = g1`` overflow for
    subnormal ``g1``.
    """
    _check_rank_one(g1, g, n)
    if s < g1 or s > g or s <= 0.0:
        return 0.0
    if n > 2 and s == g1:
        return 0.0
    # every term is nonnegative, so sum them from logarithms: no overflow or underflow
    log_pre = -(n - 1) * math.log(g - g1) - n * math.log(s)
    if n > 2:
        log_pre += (n - 2) * math.log(s - g1)
    logs = [math.log(n - 1) + n * math.log(s)]
    if g1 > 0:
        logs.append(math.log(n - 1) + (n - 1) * math.log(g) + math.log(g1))
    for k in range(n - 1):
        c = (n - 2 - k) * g + k * g1
        if c > 0:
            logs.append(math.log(c) + k * math.log(g) + (n - 1 - k) * math.log(s))
    return math.fsum(math.exp(log_pre + x) for x in logs)


@functools.lru_cache(maxsize=128)
def rank_one_constant(g1: float, g: float, n: int) -> float:
    _check_rank_one(g1, g, n)
    # for small g1 the g1 g^(N-1) / s^N term is a spike of width ~g1 at s = g1;
    # geometric breakpoints keep the quadrature from stepping over it
    cuts = []
    if g1 > 0:
        x = 2.0 * g1
        while x < g:
            cuts.append(x)
            x *= 4.0
    value, _ = integrate_pieces(
        lambda s: rank_one_raw(g1, g, n, s), g1, g, cuts, epsabs=1e-14, epsrel=1e-13
    )
    return value


def psi_rank_one(g1: float, g: float, n: int, s: float) -> float:
    """Rank-one density normalised to unit mass on ``[g1, g]``."""
    g1, g, s = float(g1), float(g), float(s)
    if s <= 0.0:
        raise ValueError("s must be > 0")
    return rank_one_raw(g1, g, n, s) / rank_one_constant(g1, g, n)


def _check_truncated(m: int, n: int) -> None:
    if not (isinstance(m, int) and isinstance(n, int)):
        raise TypeError("M and N must be integers")
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= M < N, got M={m}, N={n}")


def truncated_raw(m: int, n: int, s: float) -> float:
    """``(1 - s)^(M-1) (d/ds)^M (1 + s + ... + s^(N-1))`` on ``0 < s <= 1``, 0 above."""
    _check_truncated(m, n)
    if s > 1.0:
        return 0.0
    deriv = math.fsum(
        math.perm(k, m) * s ** (k - m) for k in range(m, n)
    )
    return (1.0 - s) ** (m - 1) * deriv


def truncated_constant(m: int, n: int) -> float:
    """Integral of :func:`truncated_raw` over (0, 1).

    Term by term: ``k!/(k-M)! * B(k-M+1, M) = (M-1)!``, summed over
    ``k = M..N-1``.
    """
    _check_truncated(m, n)
    return float((n - m) * math.factorial(m - 1))


def psi_truncated(m: int, n: int, s: float) -> float:
    """Density of ``s = |z|^2`` for the ``(N-M) x (N-M)`` truncation of a
    Haar unitary, normalised to unit mass on (0, 1].  At ``s = 1`` the
    limit from below is returned."""
    s = float(s)
    if s <= 0.0:
        raise ValueError("s must be > 0")
    return truncated_raw(m, n, s) / truncated_constant(m, n)
