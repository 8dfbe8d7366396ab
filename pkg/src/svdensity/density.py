"""Mean density of complex eigenvalues of ``A = U sqrt(G)``.

``psi(spec, s)`` returns the density in the variable ``s = |z|^2``,
normalised so that the continuous part integrates to ``1 - M/N`` over
``s`` when ``M`` of the ``g`` are zero (those produce ``M`` eigenvalues
at the origin).  On ``g_k < s < g_{k+1}`` only the terms of the values
above ``s`` contribute; each value is a singleton block (closed form with
symmetric polynomials) or a multiplicity block (jet derivatives).

Indices are 0-based throughout.
"""

from __future__ import annotations

import bisect
import functools
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .jets import Jet, jet_const, jet_powi, jet_var
from .quadrature import integrate_pieces
from .spectrum import SingularSpectrum, as_spectrum
from .symfuncs import binomial, elem_sym_excluding

__all__ = [
    "DegenerateSpectrumError",
    "DensityValue",
    "f_minus",
    "f_delta_sum",
    "f_delta_quad",
    "f_kn",
    "f_delta_block",
    "psi",
    "psi_value",
    "psi_sum_form",
    "psi_radial",
    "normalization",
]

SpecLike = Union[SingularSpectrum, Sequence[float]]


class DegenerateSpectrumError(ValueError):
    """A distinct-value formula was called on a spectrum with repeated values."""


@dataclass(frozen=True)
class DensityValue:
    continuous: float
    atom_at_origin: float


def _require_distinct(spec: SingularSpectrum) -> None:
    if not spec.is_distinct:
        raise DegenerateSpectrumError(
            f"{spec!r} has repeated values; use the block formulas (psi / f_delta_block)"
        )


def _check_s(s: float) -> float:
    s = float(s)
    if not (math.isfinite(s) and s > 0.0):
        raise ValueError(f"s = |z|^2 must be finite and > 0, got {s!r}")
    return s


@dataclass(frozen=True)
class _Singleton:
    value: float
    coef: tuple[float, ...]  # e_l of the other values / binom(N-1, l)
    log_den: float  # log |prod_{j != i} (g_i - g_j)|
    den_sign: float


@dataclass(frozen=True)
class _Block:
    start: int
    extra: int  # multiplicity - 1
    value: float
    outside: tuple[float, ...]
    coef: tuple[tuple[float, ...], ...]  # per n: e_{l-n}(excluding start..start+n) / binom(N-1, l)


@functools.lru_cache(maxsize=256)
def _prepare(spec: SingularSpectrum) -> tuple:
    n = spec.n
    canon = spec.canonical
    binoms = [binomial(n - 1, l) for l in range(n)]
    parts = []
    for (start, mult), value in zip(spec.blocks, spec.block_values):
        if mult == 1:
            others = [v for j, v in enumerate(canon) if j != start]
            esp = elem_sym_excluding(canon, [start]).esp
            coef = tuple(esp[l] / binoms[l] for l in range(n))
            log_den, sign = 0.0, 1.0
            for v in others:
                d = value - v
                log_den += math.log(abs(d))
                if d < 0:
                    sign = -sign
            parts.append(_Singleton(value, coef, log_den, sign))
        else:
            extra = mult - 1
            outside = tuple(v for j, v in enumerate(canon) if not start <= j < start + mult)
            coef = []
            for k in range(extra + 1):
                esp = elem_sym_excluding(canon, range(start, start + k + 1)).esp
                coef.append(
                    tuple(esp[l - k] / binoms[l] if l >= k else 0.0 for l in range(n))
                )
            parts.append(_Block(start, extra, value, outside, tuple(coef)))
    return tuple(parts)


def _linear_sum(coef: Sequence[float], n: int, s: float) -> tuple[float, float]:
    """Split ``sum_l coef[l] s^-(l+1) [l g + (N-1-l) s]`` into ``a + b * g``."""
    a_terms, b_terms = [], []
    p = 1.0 / s
    for l in range(n):
        c = coef[l] * p
        if c != 0.0:
            a_terms.append(c * (n - 1 - l) * s)
            b_terms.append(c * l)
        p /= s
    return math.fsum(a_terms), math.fsum(b_terms)


def _singleton_delta(part: _Singleton, n: int, s: float) -> float:
    if n == 1:
        return 0.0
    gi = part.value
    a, b = _linear_sum(part.coef, n, s)
    total = a + b * gi
    diff = gi - s
    if n > 2:
        if diff == 0.0:
            return 0.0
        log_mag = (n - 2) * math.log(abs(diff)) - part.log_den
        sign = part.den_sign * (-1.0 if (diff < 0 and (n - 2) % 2) else 1.0)
    else:
        log_mag = -part.log_den
        sign = part.den_sign
    return sign * math.exp(log_mag) * total


def _f_n_jet(part: _Block, n: int, k: int, g: Jet, s: float) -> Jet:
    """Jet of f_k(g) for block ``part``; ``k`` counts removed block members."""
    a, b = _linear_sum(part.coef[k], n, s)
    order = g.order
    bracket = g * b + a
    numer = jet_powi(g - s, n - 2) if n >= 2 else jet_const(1.0, order)
    denom = jet_const(1.0, order)
    for v in part.outside:
        denom = denom * (g - v)
    return numer * bracket / denom


def _block_delta(part: _Block, n: int, s: float) -> float:
    return _block_delta_scaled(part, n, s)[0]


def _f_n_majorant(part: _Block, n: int, k: int, order: int, s: float) -> Jet:
    # same product as _f_n_jet built from coefficient magnitudes: bounds what cancels inside
    a, b = _linear_sum(part.coef[k], n, s)
    g0 = part.value
    acc = Jet([abs(a + b * g0), abs(b)] + [0.0] * (order - 1)) if order else jet_const(abs(a + b * g0), 0)
    if n > 2:
        acc = acc * jet_powi(Jet([abs(g0 - s), 1.0] + [0.0] * (order - 1)) if order
                             else jet_const(abs(g0 - s), 0), n - 2)
    for v in part.outside:
        d = abs(g0 - v)
        acc = acc * Jet([d ** -(j + 1) for j in range(order + 1)])
    return acc


def _block_delta_scaled(part: _Block, n: int, s: float) -> tuple[float, float]:
    i = part.extra
    terms, mags = [], []
    for k in range(i + 1):
        jet = _f_n_jet(part, n, k, jet_var(part.value, i - k), s)
        # (-1)^k / (i-k)! * d^{i-k} f_k  ==  (-1)^k * coeffs[i-k]
        terms.append((-1.0) ** k * jet.coeffs[i - k])
        mags.append(_f_n_majorant(part, n, k, i - k, s).coeffs[i - k])
    return math.fsum(terms), math.fsum(mags)


def _contribution(part, n: int, s: float) -> float:
    if isinstance(part, _Singleton):
        return _singleton_delta(part, n, s)
    return _block_delta(part, n, s)


def _contribution_scaled(part, n: int, s: float) -> tuple[float, float]:
    """Block term and a bound on the magnitudes that cancel while computing it."""
    if isinstance(part, _Singleton):
        # every term of the l-sum has the same sign: no cancellation inside
        value = _singleton_delta(part, n, s)
        return value, abs(value)
    return _block_delta_scaled(part, n, s)


# ---------------------------------------------------------------------------
# distinct-spectrum formulas


def f_minus(spec: SpecLike, i: int, s: float) -> float:
    """The antisymmetric term F_- at ``g_i`` (distinct spectra only)."""
    spec = as_spectrum(spec)
    _require_distinct(spec)
    s = _check_s(s)
    n = spec.n
    if n == 1:
        return 0.0
    part = _prepare(spec)[i]
    terms = [part.coef[l] * l * s ** (-(l + 1)) for l in range(1, n)]
    log_mag = math.log(n) - part.log_den
    gi = part.value
    if gi == 0.0:
        return 0.0
    log_mag += (n - 1) * math.log(gi)
    return -part.den_sign * math.exp(log_mag) * math.fsum(terms)


def f_delta_sum(spec: SpecLike, i: int, s: float) -> float:
    """F_Delta at ``g_i`` from the finite sum over deflated symmetric polynomials."""
    spec = as_spectrum(spec)
    _require_distinct(spec)
    s = _check_s(s)
    return _singleton_delta(_prepare(spec)[i], spec.n, s)


def f_delta_quad(spec: SpecLike, i: int, s: float) -> float:
    """F_Delta at ``g_i`` from its integral representation.

    After ``t = u / (1 - u)`` the integrand over ``u`` in [0, 1] is
    ``N prod_{j != i}(1 - u + u g_j / s) [N(1 - u) - u + (g_i / s)((N + 1) u - 1)]``.
    Independent of the symmetric-polynomial route: the determinant is a
    plain product.
    """
    spec = as_spectrum(spec)
    _require_distinct(spec)
    s = _check_s(s)
    n = spec.n
    g = spec.canonical
    gi = g[i]
    others = [v / s for j, v in enumerate(g) if j != i]
    ri = gi / s

    def integrand(u: float) -> float:
        w = 1.0 - u
        prod = 1.0
        for r in others:
            prod *= w + u * r
        return n * prod * (n * w - u + ri * ((n + 1) * u - 1.0))

    if n == 1:
        return 0.0
    value, _ = integrate_pieces(integrand, 0.0, 1.0)
    den = 1.0
    for j, v in enumerate(g):
        if j != i:
            den *= gi - v
    return (gi - s) ** (n - 2) / den * value


# ---------------------------------------------------------------------------
# degenerate blocks


def f_kn(spec: SpecLike, k: int, i: int, n: int, g: Jet, s: float) -> Jet:
    """Jet of ``f_n^{[k,i]}(g)`` for the block occupying indices ``k..k+i``.

    The block members ``k..k+n`` are removed from the symmetric polynomials;
    the remaining members keep the block value.  ``g`` must have order
    ``>= i - n`` for the derivative the block formula needs.
    """
    spec = as_spectrum(spec)
    s = _check_s(s)
    nn = spec.n
    if not (0 <= k and 0 <= i and k + i < nn):
        raise IndexError(f"block [{k}, {k + i}] outside 0..{nn - 1}")
    if not 0 <= n <= i:
        raise ValueError(f"n = {n} outside 0..{i}")
    if g.order < i - n:
        raise ValueError(f"jet order {g.order} too small; need >= {i - n}")
    canon = spec.canonical
    outside = tuple(v for j, v in enumerate(canon) if not k <= j <= k + i)
    esp = elem_sym_excluding(canon, range(k, k + n + 1)).esp
    coef = tuple(esp[l - n] / binomial(nn - 1, l) if l >= n else 0.0 for l in range(nn))
    part = _Block(k, i, canon[k], outside, (coef,))
    return _f_n_jet(part, nn, 0, g, s)


def f_delta_block(spec: SpecLike, block: tuple[int, int], s: float) -> float:
    """Block term ``sum_n (-1)^n / (i-n)! d^{i-n}/dg^{i-n} f_n``.

    ``block`` is ``(start, extra)`` with ``extra = multiplicity - 1``; for
    ``extra = 0`` this is the ordinary F_Delta.
    """
    spec = as_spectrum(spec)
    s = _check_s(s)
    start, extra = block
    canon = spec.canonical
    if not (0 <= start and 0 <= extra and start + extra < spec.n):
        raise IndexError(f"block {block} outside the spectrum")
    value = canon[start]
    if any(canon[j] != value for j in range(start, start + extra + 1)):
        raise ValueError(f"indices {start}..{start + extra} do not share one value")
    terms = []
    for n in range(extra + 1):
        jet = f_kn(spec, start, extra, n, jet_var(value, extra - n), s)
        terms.append((-1.0) ** n * jet.coeffs[extra - n])
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# the density


def _sum_from(spec: SingularSpectrum, s: float, first: int) -> float:
    """``(1/N)`` times the sum of the block terms of blocks ``first, first+1, ...``.

    The terms of all blocks add up to zero identically in ``s``, so the same
    number is minus the sum over the blocks below ``first``.  Whichever side
    has the smaller total magnitude (counting what cancels inside a block
    term) is summed: near the bottom of the support the terms above ``s``
    are huge and cancel almost completely, while the few terms below are
    small.
    """
    n = spec.n
    terms, scales = zip(*(_contribution_scaled(part, n, s) for part in _prepare(spec)))
    if math.fsum(scales[:first]) < math.fsum(scales[first:]):
        return -math.fsum(terms[:first]) / n
    return math.fsum(terms[first:]) / n


def _first_above(spec: SingularSpectrum, s: float) -> int:
    return bisect.bisect_right(spec.block_values, s)


def _boundary_block(spec: SingularSpectrum, s: float) -> Optional[int]:
    for b, value in enumerate(spec.block_values):
        if value > 0.0 and abs(s - value) <= spec.tol * max(1.0, value):
            return b
    return None


def psi_value(spec: SpecLike, s: float, side: Optional[str] = None) -> float:
    """Continuous part of the density at ``s = |z|^2`` (a plain float).

    At ``s`` equal to one of the ``g`` (within the cluster tolerance) the
    one-sided limit from ``side`` ('lo' or 'hi') is returned; without a side
    the two limits are averaged.
    """
    spec = as_spectrum(spec)
    s = _check_s(s)
    if side not in (None, "lo", "hi"):
        raise ValueError(f"side must be 'lo', 'hi' or None, got {side!r}")
    if spec.is_scalar:
        return 0.0
    b = _boundary_block(spec, s)
    if b is None:
        if s < spec.block_values[0] or s > spec.block_values[-1]:
            return 0.0
        return _sum_from(spec, s, _first_above(spec, s))
    # evaluate both one-sided limits exactly at the block value
    at = spec.block_values[b]
    if b == 0:
        lo = 0.0
    else:
        lo = _sum_from(spec, at, b)
    hi = _sum_from(spec, at, b + 1) if b < len(spec.blocks) - 1 else 0.0
    if side == "lo":
        return lo
    if side == "hi":
        return hi
    return 0.5 * (lo + hi)


def psi(spec: SpecLike, s: float, side: Optional[str] = None) -> DensityValue:
    """Density at ``s = |z|^2`` with the origin atom from zero singular values."""
    spec = as_spectrum(spec)
    return DensityValue(psi_value(spec, s, side), spec.atom_at_origin)


def psi_sum_form(spec: SpecLike, s: float) -> float:
    """``(1/N) sum_i F_sigma(g_i)`` with F_+ above ``g_i`` and F_- below.

    Kept as a diagnostic: taken literally it equals the negative of
    :func:`psi_value` (e.g. -1/3 for g = (1, 4), s = 2).
    """
    spec = as_spectrum(spec)
    _require_distinct(spec)
    s = _check_s(s)
    g = spec.g
    if s < g[0] or s > g[-1]:
        return 0.0
    terms = []
    for i, gi in enumerate(g):
        terms.append(f_minus(spec, i, s))
        if s > gi:
            terms.append(f_delta_sum(spec, i, s))
    return math.fsum(terms) / spec.n


def psi_radial(spec: SpecLike, r: float, side: Optional[str] = None) -> float:
    """Density of the modulus ``r = |z|``: ``2 r psi(r^2)``."""
    r = float(r)
    if not (math.isfinite(r) and r > 0):
        raise ValueError(f"r must be finite and > 0, got {r!r}")
    return 2.0 * r * psi_value(spec, r * r, side)


def kink_points(spec: SpecLike) -> list[float]:
    """Distinct nonzero block values, where the density has derivative kinks."""
    spec = as_spectrum(spec)
    return [v for v in spec.block_values if v > 0.0]


def normalization(spec: SpecLike) -> float:
    """Mass of the continuous part, by quadrature split at every ``g``.

    Together with ``atom_at_origin`` this should add up to one (except for a
    scalar spectrum, whose eigenvalues all sit on one circle).
    """
    spec = as_spectrum(spec)
    if spec.is_scalar:
        return 0.0
    lo, hi = spec.block_values[0], spec.block_values[-1]
    value, _ = integrate_pieces(lambda s: psi_value(spec, s), lo, hi, kink_points(spec))
    return value
