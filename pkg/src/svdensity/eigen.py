"""Eigenvalues of a general complex matrix by shifted QR iteration.

Pure-Python reference implementation: balance, reduce to Hessenberg form
with Householder reflections, then run single-shift complex QR steps
(Wilkinson shift, Givens rotations) with deflation on small subdiagonal
entries.  ``svdensity._kernels`` implements the same steps in Cython.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEFLATION_EPS",
    "EigenResult",
    "balance",
    "hessenberg",
    "hessenberg_eigenvalues",
    "eigenvalues",
    "annulus_check",
]

DEFLATION_EPS = 1e-14
MAX_ITER_PER_DIM = 100
_MAX_BALANCE_SWEEPS = 100


@dataclass
class EigenResult:
    values: np.ndarray
    iterations: int
    converged: bool


def _as_square(a) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def _cabs1(x):
    return np.abs(np.real(x)) + np.abs(np.imag(x))


def balance(a) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal similarity ``D^-1 A D`` with ``D`` made of powers of two.

    For each index the off-diagonal column and row norms ``c`` and ``r``
    (sums of ``|re| + |im|``)
    are brought within a factor 2 of each other by scaling with
    ``2**round(log2(r/c) / 2)``, as long as that lowers ``c + r`` by 5%.
    Sweeps repeat until nothing changes.  Returns the balanced matrix and
    the diagonal of ``D``.
    """
    b = _as_square(a)
    n = b.shape[0]
    scale = np.ones(n)
    for _ in range(_MAX_BALANCE_SWEEPS):
        changed = False
        for i in range(n):
            c = _cabs1(b[:, i]).sum() - _cabs1(b[i, i])
            r = _cabs1(b[i, :]).sum() - _cabs1(b[i, i])
            if c == 0.0 or r == 0.0:
                continue
            e = round(0.5 * math.log2(r / c))
            if e == 0:
                continue
            f = math.ldexp(1.0, e)
            if c * f + r / f < 0.95 * (c + r):
                scale[i] *= f
                b[:, i] *= f
                b[i, :] /= f
                changed = True
        if not changed:
            break
    return b, scale


def hessenberg(a) -> np.ndarray:
    """Unitary similarity to upper Hessenberg form by Householder reflections."""
    h = _as_square(a)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        tail = np.linalg.norm(x[1:])
        if tail == 0.0:
            continue
        norm_x = math.hypot(abs(x[0]), tail)
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        alpha = -phase * norm_x
        v = x
        v[0] -= alpha
        v /= np.linalg.norm(v)
        h[k + 1:, :] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
        h[k + 1, k] = alpha
        h[k + 2:, k] = 0.0
    return h


def _givens(x: complex, y: complex) -> tuple[float, complex]:
    """``(c, s)`` with ``[[c, s], [-conj(s), c]] @ [x, y] = [r, 0]``."""
    if y == 0:
        return 1.0, 0j
    if x == 0:
        return 0.0, y.conjugate() / abs(y)
    ax = abs(x)
    nrm = math.hypot(ax, abs(y))
    return ax / nrm, (x / ax) * y.conjugate() / nrm


def _wilkinson(a: complex, b: complex, c: complex, d: complex) -> complex:
    """Eigenvalue of ``[[a, b], [c, d]]`` closer to ``d``."""
    p = 0.5 * (a - d)
    bc = b * c
    disc = (p * p + bc) ** 0.5
    den = p + disc if abs(p + disc) >= abs(p - disc) else p - disc
    if den == 0:
        return d
    return d - bc / den


def hessenberg_eigenvalues(h: np.ndarray, eps: float = DEFLATION_EPS,
                           max_iter: int | None = None) -> EigenResult:
    """QR iteration on an upper Hessenberg matrix (modified in place)."""
    n = h.shape[0]
    if max_iter is None:
        max_iter = MAX_ITER_PER_DIM * n
    values = np.zeros(n, dtype=complex)
    hi = n - 1
    its = 0
    total = 0
    norm_scale = float(_cabs1(h).sum()) or 1.0
    while hi >= 0:
        lo = hi
        while lo > 0:
            sub = _cabs1(h[lo, lo - 1])
            ref = _cabs1(h[lo - 1, lo - 1]) + _cabs1(h[lo, lo])
            if ref == 0.0:
                ref = norm_scale
            if sub <= eps * ref:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            values[hi] = h[hi, hi]
            hi -= 1
            its = 0
            continue
        if total >= max_iter:
            values[: hi + 1] = np.diagonal(h)[: hi + 1]
            return EigenResult(values, total, False)
        if its in (10, 20):
            # exceptional shift breaks rare cycles
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1].real)
        else:
            mu = _wilkinson(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        _qr_step(h, lo, hi, mu)
        its += 1
        total += 1
    return EigenResult(values, total, True)


def _qr_step(h: np.ndarray, lo: int, hi: int, mu: complex) -> None:
    """One shifted QR step ``H - mu = QR, H <- RQ + mu`` on ``h[lo:hi+1, lo:hi+1]``."""
    idx = range(lo, hi + 1)
    for k in idx:
        h[k, k] -= mu
    rots = []
    for k in range(lo, hi):
        c, s = _givens(h[k, k], h[k + 1, k])
        rk = h[k, k:hi + 1].copy()
        rk1 = h[k + 1, k:hi + 1]
        h[k, k:hi + 1] = c * rk + s * rk1
        h[k + 1, k:hi + 1] = -s.conjugate() * rk + c * rk1
        h[k + 1, k] = 0.0
        rots.append((c, s))
    for k, (c, s) in zip(range(lo, hi), rots):
        top = min(k + 2, hi)
        ck = h[lo:top + 1, k].copy()
        ck1 = h[lo:top + 1, k + 1]
        h[lo:top + 1, k] = c * ck + s.conjugate() * ck1
        h[lo:top + 1, k + 1] = -s * ck + c * ck1
    for k in idx:
        h[k, k] += mu


def eigenvalues(a, eps: float = DEFLATION_EPS, max_iter: int | None = None) -> EigenResult:
    """All eigenvalues of the square complex matrix ``a``.

    ``converged`` is False when the iteration cap (``100 N`` QR steps by
    default) runs out; the returned values are then the current diagonal.
    """
    b, _ = balance(a)
    h = hessenberg(b)
    return hessenberg_eigenvalues(h, eps, max_iter)


def annulus_check(values, g, tol: float = 1e-8) -> bool:
    """All moduli lie within ``[sqrt(min g) - tol, sqrt(max g) + tol]``."""
    g = getattr(g, "g", g)
    r = np.abs(np.asarray(values))
    lo = math.sqrt(min(g)) - tol
    hi = math.sqrt(max(g)) + tol
    return bool(np.all((r >= lo) & (r <= hi)))
