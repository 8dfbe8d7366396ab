# cython: language_level=3
"""Compiled versions of the per-sample Monte Carlo work.

Same algorithms as ``sampling.py`` / ``eigen.py``: Box-Muller, Householder
QR with phase correction, column scaling, balancing, Householder
Hessenberg reduction and single-shift complex QR.  Workspaces are
allocated per call; nothing is shared between calls.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log1p, cos, sin, fabs, hypot, ldexp, log2, round, copysign, M_PI
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef double complex cplx


cdef inline double hypot_(double x, double y) noexcept nogil:
    # plain sqrt(x^2 + y^2) when squaring cannot over/underflow; libm hypot otherwise
    cdef double ax = fabs(x), ay = fabs(y)
    cdef double big = ax if ax > ay else ay
    if big < 1e150 and (big > 1e-150 or big == 0.0):
        return sqrt(ax * ax + ay * ay)
    return hypot(x, y)


cdef inline double cabs_(cplx z) noexcept nogil:
    return hypot_(z.real, z.imag)


cdef inline double cabs1(cplx z) noexcept nogil:
    return fabs(z.real) + fabs(z.imag)


cdef inline cplx conj_(cplx z) noexcept nogil:
    return z.real - 1j * z.imag


cdef inline cplx csqrt_(cplx z) noexcept nogil:
    cdef double r = cabs_(z)
    cdef double t
    if r == 0.0:
        return 0.0
    t = sqrt(0.5 * (r + fabs(z.real)))
    if z.real >= 0.0:
        return t + 1j * (z.imag / (2.0 * t))
    return fabs(z.imag) / (2.0 * t) + 1j * copysign(t, z.imag)


cdef void _balance(cplx* b, int n) noexcept nogil:
    cdef int sweep, i, j, e
    cdef double c, r, f
    cdef bint changed
    for sweep in range(100):
        changed = False
        for i in range(n):
            c = 0.0
            r = 0.0
            for j in range(n):
                if j != i:
                    c += cabs1(b[j * n + i])
                    r += cabs1(b[i * n + j])
            if c == 0.0 or r == 0.0:
                continue
            e = <int> round(0.5 * log2(r / c))
            if e == 0:
                continue
            f = ldexp(1.0, e)
            if c * f + r / f < 0.95 * (c + r):
                for j in range(n):
                    b[j * n + i] = b[j * n + i] * f
                    b[i * n + j] = b[i * n + j] / f
                changed = True
        if not changed:
            break


cdef void _hessenberg(cplx* h, int n, cplx* v) noexcept nogil:
    cdef int k, i, j, m
    cdef double tail, norm_x, vn, ax0
    cdef cplx phase, alpha, acc
    for k in range(n - 2):
        m = n - k - 1
        tail = 0.0
        for i in range(1, m):
            tail = hypot_(tail, cabs_(h[(k + 1 + i) * n + k]))
        if tail == 0.0:
            continue
        ax0 = cabs_(h[(k + 1) * n + k])
        norm_x = hypot_(ax0, tail)
        if ax0 != 0.0:
            phase = h[(k + 1) * n + k] / ax0
        else:
            phase = 1.0
        alpha = -phase * norm_x
        for i in range(m):
            v[i] = h[(k + 1 + i) * n + k]
        v[0] = v[0] - alpha
        vn = 0.0
        for i in range(m):
            vn = hypot_(vn, cabs_(v[i]))
        for i in range(m):
            v[i] = v[i] / vn
        # rows k+1.. : H <- (I - 2 v v^H) H
        for j in range(n):
            acc = 0.0
            for i in range(m):
                acc = acc + conj_(v[i]) * h[(k + 1 + i) * n + j]
            for i in range(m):
                h[(k + 1 + i) * n + j] = h[(k + 1 + i) * n + j] - 2.0 * v[i] * acc
        # columns k+1.. : H <- H (I - 2 v v^H)
        for j in range(n):
            acc = 0.0
            for i in range(m):
                acc = acc + h[j * n + k + 1 + i] * v[i]
            for i in range(m):
                h[j * n + k + 1 + i] = h[j * n + k + 1 + i] - 2.0 * acc * conj_(v[i])
        h[(k + 1) * n + k] = alpha
        for i in range(k + 2, n):
            h[i * n + k] = 0.0


cdef inline void _givens(cplx x, cplx y, double* c, cplx* s) noexcept nogil:
    cdef double ax, nrm
    if y == 0:
        c[0] = 1.0
        s[0] = 0.0
        return
    if x == 0:
        c[0] = 0.0
        s[0] = conj_(y) / cabs_(y)
        return
    ax = cabs_(x)
    nrm = hypot_(ax, cabs_(y))
    c[0] = ax / nrm
    s[0] = (x / ax) * conj_(y) / nrm


cdef inline cplx _wilkinson(cplx a, cplx b, cplx c, cplx d) noexcept nogil:
    cdef cplx p = 0.5 * (a - d)
    cdef cplx bc = b * c
    cdef cplx disc = csqrt_(p * p + bc)
    cdef cplx den
    if cabs_(p + disc) >= cabs_(p - disc):
        den = p + disc
    else:
        den = p - disc
    if den == 0:
        return d
    return d - bc / den


cdef void _qr_step(cplx* h, int n, int lo, int hi, cplx mu,
                   double* cs, cplx* ss) noexcept nogil:
    cdef int k, j, i, top
    cdef double c
    cdef cplx s, x, y
    for k in range(lo, hi + 1):
        h[k * n + k] = h[k * n + k] - mu
    for k in range(lo, hi):
        _givens(h[k * n + k], h[(k + 1) * n + k], &c, &s)
        cs[k] = c
        ss[k] = s
        for j in range(k, hi + 1):
            x = h[k * n + j]
            y = h[(k + 1) * n + j]
            h[k * n + j] = c * x + s * y
            h[(k + 1) * n + j] = -conj_(s) * x + c * y
        h[(k + 1) * n + k] = 0.0
    for k in range(lo, hi):
        c = cs[k]
        s = ss[k]
        top = k + 2
        if top > hi:
            top = hi
        for i in range(lo, top + 1):
            x = h[i * n + k]
            y = h[i * n + k + 1]
            h[i * n + k] = c * x + conj_(s) * y
            h[i * n + k + 1] = -s * x + c * y
    for k in range(lo, hi + 1):
        h[k * n + k] = h[k * n + k] + mu


cdef int _hess_eig(cplx* h, int n, double eps, int max_iter, cplx* out,
                   double* cs, cplx* ss, int* iterations) noexcept nogil:
    """Returns 1 on convergence, 0 when the cap is hit."""
    cdef int hi = n - 1
    cdef int lo, its = 0, total = 0, i
    cdef double sub, ref, norm_scale = 0.0
    cdef cplx mu
    for i in range(n * n):
        norm_scale += cabs1(h[i])
    if norm_scale == 0.0:
        norm_scale = 1.0
    while hi >= 0:
        lo = hi
        while lo > 0:
            sub = cabs1(h[lo * n + lo - 1])
            ref = cabs1(h[(lo - 1) * n + lo - 1]) + cabs1(h[lo * n + lo])
            if ref == 0.0:
                ref = norm_scale
            if sub <= eps * ref:
                h[lo * n + lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            out[hi] = h[hi * n + hi]
            hi -= 1
            its = 0
            continue
        if total >= max_iter:
            for i in range(hi + 1):
                out[i] = h[i * n + i]
            iterations[0] = total
            return 0
        if its == 10 or its == 20:
            mu = h[hi * n + hi] + 0.75 * fabs(h[hi * n + hi - 1].real)
        else:
            mu = _wilkinson(h[(hi - 1) * n + hi - 1], h[(hi - 1) * n + hi],
                            h[hi * n + hi - 1], h[hi * n + hi])
        _qr_step(h, n, lo, hi, mu, cs, ss)
        its += 1
        total += 1
    iterations[0] = total
    return 1


cdef int _eig_inplace(cplx* a, int n, double eps, int max_iter, cplx* out,
                      int* iterations) noexcept nogil:
    cdef cplx* v = <cplx*> malloc(n * sizeof(cplx))
    cdef double* cs = <double*> malloc(n * sizeof(double))
    cdef cplx* ss = <cplx*> malloc(n * sizeof(cplx))
    cdef int ok
    _balance(a, n)
    _hessenberg(a, n, v)
    ok = _hess_eig(a, n, eps, max_iter, out, cs, ss, iterations)
    free(v)
    free(cs)
    free(ss)
    return ok


def eigvals(a, double eps=1e-14, max_iter=None):
    """Eigenvalues of a square complex matrix: ``(values, iterations, converged)``."""
    cdef cnp.ndarray[cplx, ndim=2, mode="c"] work = np.array(a, dtype=np.complex128, order="C", copy=True)
    cdef int n = work.shape[0]
    if work.shape[1] != n:
        raise ValueError("expected a square matrix")
    cdef int cap = 100 * n if max_iter is None else max_iter
    cdef cnp.ndarray[cplx, ndim=1] out = np.zeros(n, dtype=np.complex128)
    cdef int iterations = 0
    cdef int ok
    with nogil:
        ok = _eig_inplace(&work[0, 0], n, eps, cap, &out[0], &iterations)
    return out, iterations, bool(ok)


cdef int _haar_inplace(cplx* z, int n, cplx* q, cplx* vbuf) noexcept nogil:
    """Householder QR of z (destroyed); phase-corrected Q written to q."""
    cdef int k, i, j, m
    cdef double norm_x, ax0, vn
    cdef cplx phase, alpha, acc
    cdef cplx* d = vbuf + n * n
    for k in range(n):
        m = n - k
        norm_x = 0.0
        for i in range(m):
            norm_x = hypot_(norm_x, cabs_(z[(k + i) * n + k]))
        if norm_x <= 1e-300:
            return 0
        ax0 = cabs_(z[k * n + k])
        phase = z[k * n + k] / ax0 if ax0 != 0.0 else 1.0
        alpha = -phase * norm_x
        d[k] = alpha
        for i in range(m):
            vbuf[k * n + i] = z[(k + i) * n + k]
        vbuf[k * n] = vbuf[k * n] - alpha
        vn = 0.0
        for i in range(m):
            vn = hypot_(vn, cabs_(vbuf[k * n + i]))
        if vn == 0.0:
            for i in range(m):
                vbuf[k * n + i] = 0.0
            continue
        for i in range(m):
            vbuf[k * n + i] = vbuf[k * n + i] / vn
        for j in range(k, n):
            acc = 0.0
            for i in range(m):
                acc = acc + conj_(vbuf[k * n + i]) * z[(k + i) * n + j]
            for i in range(m):
                z[(k + i) * n + j] = z[(k + i) * n + j] - 2.0 * vbuf[k * n + i] * acc
    # Q = H_0 H_1 ... H_{n-1} applied to the identity, last reflector first
    for i in range(n * n):
        q[i] = 0.0
    for i in range(n):
        q[i * n + i] = 1.0
    for k in range(n - 1, -1, -1):
        m = n - k
        for j in range(n):
            acc = 0.0
            for i in range(m):
                acc = acc + conj_(vbuf[k * n + i]) * q[(k + i) * n + j]
            for i in range(m):
                q[(k + i) * n + j] = q[(k + i) * n + j] - 2.0 * vbuf[k * n + i] * acc
    # push the phases of diag(R) into the columns of Q
    for j in range(n):
        phase = d[j] / cabs_(d[j])
        for i in range(n):
            q[i * n + j] = q[i * n + j] * phase
    return 1


cdef void _box_muller(const double* u, cplx* z, int count) noexcept nogil:
    cdef int k
    cdef double radius, angle
    for k in range(count):
        radius = sqrt(-2.0 * log1p(-u[2 * k]))
        angle = 2.0 * M_PI * u[2 * k + 1]
        z[k] = radius * cos(angle) + 1j * (radius * sin(angle))


def haar_from_uniforms(double[::1] u, int n):
    """Phase-corrected Haar unitary from ``2 n^2`` uniforms (Box-Muller pairs)."""
    if u.shape[0] < 2 * n * n:
        raise ValueError("need 2 n^2 uniforms")
    cdef cnp.ndarray[cplx, ndim=2, mode="c"] q = np.empty((n, n), dtype=np.complex128)
    cdef cplx* z = <cplx*> malloc(n * n * sizeof(cplx))
    cdef cplx* vbuf = <cplx*> malloc((n * n + n) * sizeof(cplx))
    cdef int ok
    with nogil:
        _box_muller(&u[0], z, n * n)
        ok = _haar_inplace(z, n, &q[0, 0], vbuf)
    free(z)
    free(vbuf)
    if not ok:
        raise ArithmeticError("Gaussian draw is numerically singular")
    return q


def sample_moduli(double[::1] u, double[::1] sqrt_g, double eps=1e-14, max_iter=None):
    """One Monte Carlo sample: ``(|eigenvalues of U sqrt(G)|, iterations, converged)``.

    ``u`` holds ``2 n^2`` uniforms for the Gaussian draw, optionally followed
    by another ``2 n^2`` used only if the first draw is singular.
    """
    cdef int n = sqrt_g.shape[0]
    cdef int nn = n * n
    if u.shape[0] < 2 * nn:
        raise ValueError("need at least 2 n^2 uniforms")
    cdef int cap = 100 * n if max_iter is None else max_iter
    cdef cnp.ndarray[double, ndim=1] moduli = np.empty(n, dtype=np.float64)
    cdef cplx* z = <cplx*> malloc(nn * sizeof(cplx))
    cdef cplx* q = <cplx*> malloc(nn * sizeof(cplx))
    cdef cplx* vbuf = <cplx*> malloc((nn + n) * sizeof(cplx))
    cdef cplx* vals = <cplx*> malloc(n * sizeof(cplx))
    cdef int ok, i, j, iterations = 0, drawn = 0
    with nogil:
        _box_muller(&u[0], z, nn)
        ok = _haar_inplace(z, n, q, vbuf)
        if not ok and u.shape[0] >= 4 * nn:
            _box_muller(&u[2 * nn], z, nn)
            ok = _haar_inplace(z, n, q, vbuf)
        if ok:
            drawn = 1
            for i in range(n):
                for j in range(n):
                    q[i * n + j] = q[i * n + j] * sqrt_g[j]
            ok = _eig_inplace(q, n, eps, cap, vals, &iterations)
            for i in range(n):
                moduli[i] = cabs_(vals[i])
    free(z)
    free(q)
    free(vbuf)
    free(vals)
    if not drawn:
        raise ArithmeticError("Gaussian draw is numerically singular")
    return moduli, iterations, bool(ok)
