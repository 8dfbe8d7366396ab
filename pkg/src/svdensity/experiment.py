"""Monte Carlo runs of ``A = U sqrt(G)`` and comparison with the analytic density.

Every sample ``k`` draws from its own stream ``RngStream(seed, k)``, so a
run gives the same histogram whatever the number of workers.  Workers
own contiguous index ranges and their histograms are summed in worker
order.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import _backend
from .density import kink_points, psi_radial
from .quadrature import integrate_pieces
from .rng import RngStream
from .spectrum import SingularSpectrum, as_spectrum

__all__ = [
    "RadialHistogram",
    "ComparisonReport",
    "histogram_edges",
    "run_mc",
    "expected_histogram",
    "compare",
    "CHI_SQUARE_MIN_EXPECTED",
]

log = logging.getLogger(__name__)

CHI_SQUARE_MIN_EXPECTED = 5.0

SpecLike = Union[SingularSpectrum, Sequence[float]]


@dataclass
class RadialHistogram:
    """Counts of eigenvalue moduli in uniform bins starting at 0.

    ``counts.sum() + out_of_range == (n_samples - discarded) * n_matrix``.
    """

    edges: np.ndarray
    counts: np.ndarray
    n_samples: int
    n_matrix: int
    discarded: int = 0
    out_of_range: int = 0
    r_min: float = math.inf
    r_max: float = -math.inf

    @property
    def bin_width(self) -> float:
        return float(self.edges[1] - self.edges[0])

    def density(self) -> np.ndarray:
        """Counts scaled so the bars integrate to one: an estimate of the modulus density."""
        total = (self.n_samples - self.discarded) * self.n_matrix
        if total == 0:
            return np.zeros(len(self.counts))
        return self.counts / (total * self.bin_width)


@dataclass
class ComparisonReport:
    observed: np.ndarray
    expected: np.ndarray
    zscores: np.ndarray
    chi_square: float
    dof: int
    tv_distance: float
    max_abs_z: float
    discarded: int = 0
    active: np.ndarray = field(default=None, repr=False)

    def fraction_within(self, bound: float = 4.0) -> float:
        """Share of active bins (observed or expected nonzero) with ``|z| <= bound``."""
        z = self.zscores[self.active]
        if len(z) == 0:
            return 1.0
        return float(np.count_nonzero(np.abs(z) <= bound)) / len(z)


def histogram_edges(g_max: float, bin_width: float) -> np.ndarray:
    """Edges ``0, w, 2w, ...`` covering ``[0, sqrt(g_max) + 2w]``."""
    if not (bin_width > 0 and math.isfinite(bin_width)):
        raise ValueError(f"bin width must be positive and finite, got {bin_width!r}")
    top = math.sqrt(g_max) + 2.0 * bin_width
    nbins = max(1, math.ceil(top / bin_width - 1e-9))
    return bin_width * np.arange(nbins + 1, dtype=float)


# moduli this close (relatively) to an edge are treated as lying on it
EDGE_SNAP = 1e-12


def _bin_index(edges: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Bin of each modulus, with values within rounding of an edge put on the edge.

    Eigenvalues on a circle that coincides with an edge (all-equal spectra
    land exactly on ``|z| = 1``) come back as ``1 +- 1 ulp``; without the
    snap they would scatter over two bins.
    """
    pos = np.searchsorted(edges, r, side="right") - 1
    nearest = np.clip(np.searchsorted(edges, r), 0, len(edges) - 1)
    close = np.abs(edges[nearest] - r) <= EDGE_SNAP * np.maximum(edges[nearest], 1.0)
    pos[close] = nearest[close]
    return pos


def _run_chunk(args) -> tuple:
    g, edges, seed, start, stop, backend = args
    sample = _backend.get(backend)["sample_moduli"]
    sqrt_g = np.sqrt(np.asarray(g, dtype=float))
    n = len(g)
    moduli = np.empty((stop - start, n))
    keep = np.ones(stop - start, dtype=bool)
    for row, idx in enumerate(range(start, stop)):
        # 4 n^2 uniforms: a second Gaussian matrix in case the first is singular
        u = RngStream(seed, idx).uniforms(4 * n * n)
        r, iterations, converged = sample(u, sqrt_g)
        if not converged:
            keep[row] = False
            log.warning("sample %d: eigensolver hit the iteration cap after %d steps; discarded",
                        idx, iterations)
            continue
        moduli[row] = r
    r = moduli[keep].ravel()
    discarded = int(np.count_nonzero(~keep))
    nbins = len(edges) - 1
    pos = _bin_index(edges, r)
    inside = (pos >= 0) & (pos < nbins)
    counts = np.bincount(pos[inside], minlength=nbins).astype(np.int64)
    r_min = float(r.min()) if len(r) else math.inf
    r_max = float(r.max()) if len(r) else -math.inf
    return counts, discarded, int(np.count_nonzero(~inside)), r_min, r_max


def _chunks(n_samples: int, workers: int) -> list[tuple[int, int]]:
    bounds = np.linspace(0, n_samples, workers + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def run_mc(spec: SpecLike, n_samples: int, bin_width: float, seed: int,
           workers: int = 1, backend: Optional[str] = None) -> RadialHistogram:
    """Histogram of ``|z|`` over ``n_samples`` draws of ``U sqrt(G)``.

    Samples whose eigensolver run does not converge are dropped and
    counted in ``discarded``.
    """
    spec = as_spectrum(spec)
    if not (isinstance(n_samples, (int, np.integer)) and n_samples >= 1):
        raise ValueError(f"n_samples must be a positive integer, got {n_samples!r}")
    if not (isinstance(workers, (int, np.integer)) and workers >= 1):
        raise ValueError(f"workers must be a positive integer, got {workers!r}")
    edges = histogram_edges(spec.g[-1], bin_width)
    _backend.get(backend)  # fail early on an unknown backend
    jobs = [(spec.g, edges, seed, a, b, backend) for a, b in _chunks(n_samples, workers)]
    if len(jobs) == 1:
        parts = [_run_chunk(jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=len(jobs)) as pool:
            parts = list(pool.map(_run_chunk, jobs))
    hist = RadialHistogram(edges, np.zeros(len(edges) - 1, dtype=np.int64), int(n_samples), spec.n)
    for counts, discarded, out, r_min, r_max in parts:
        hist.counts += counts
        hist.discarded += discarded
        hist.out_of_range += out
        hist.r_min = min(hist.r_min, r_min)
        hist.r_max = max(hist.r_max, r_max)
    return hist


def expected_histogram(spec: SpecLike, edges, n_samples: int) -> np.ndarray:
    """Expected counts per bin: ``n_samples * N`` times the modulus mass of the bin.

    The origin atom goes to the bin containing 0.  A scalar spectrum puts
    all of its mass in the bin containing ``sqrt(g)``.
    """
    spec = as_spectrum(spec)
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or len(edges) < 2 or not np.all(np.diff(edges) > 0):
        raise ValueError("edges must be a strictly increasing sequence of at least two values")
    total = n_samples * spec.n
    out = np.zeros(len(edges) - 1)
    if spec.is_scalar:
        k = int(_bin_index(edges, np.array([math.sqrt(spec.block_values[0])]))[0])
        if 0 <= k < len(out):
            out[k] = total
        return out
    if spec.zero_count and edges[0] <= 0.0 < edges[-1]:
        out[np.searchsorted(edges, 0.0, side="right") - 1] += total * spec.atom_at_origin
    lo = math.sqrt(spec.block_values[0])
    hi = math.sqrt(spec.block_values[-1])
    kinks = [math.sqrt(v) for v in kink_points(spec)]
    for k in range(len(out)):
        a, b = max(edges[k], lo), min(edges[k + 1], hi)
        if b <= a:
            continue
        mass, _ = integrate_pieces(lambda r: psi_radial(spec, r) if r > 0 else 0.0,
                                   a, b, [x for x in kinks if a < x < b])
        out[k] += total * mass
    return out


def _merged_chi_square(obs: np.ndarray, exp: np.ndarray, active: np.ndarray) -> tuple[float, int]:
    groups: list[list[float]] = []
    o_acc = e_acc = 0.0
    idx = np.flatnonzero(active)
    for k in idx:
        o_acc += obs[k]
        e_acc += exp[k]
        if e_acc >= CHI_SQUARE_MIN_EXPECTED:
            groups.append([o_acc, e_acc])
            o_acc = e_acc = 0.0
    if o_acc or e_acc:
        if groups:
            groups[-1][0] += o_acc
            groups[-1][1] += e_acc
        else:
            groups.append([o_acc, e_acc])
    chi = 0.0
    for o, e in groups:
        if e > 0:
            chi += (o - e) ** 2 / e
        elif o > 0:
            chi = math.inf
    return chi, max(len(groups) - 1, 0)


def compare(hist: RadialHistogram, expected) -> ComparisonReport:
    """Per-bin Poisson z-scores, merged-bin chi-square and total variation."""
    obs = np.asarray(hist.counts, dtype=float)
    exp = np.asarray(expected, dtype=float)
    if obs.shape != exp.shape:
        raise ValueError(f"binning mismatch: {obs.shape} observed vs {exp.shape} expected")
    if obs.sum() == 0:
        raise ValueError("histogram is empty")
    z = np.zeros_like(obs)
    pos = exp > 0
    z[pos] = (obs[pos] - exp[pos]) / np.sqrt(exp[pos])
    z[~pos & (obs > 0)] = math.inf
    active = pos | (obs > 0)
    chi, dof = _merged_chi_square(obs, exp, active)
    exp_total = exp.sum()
    p_exp = exp / exp_total if exp_total > 0 else exp
    tv = 0.5 * math.fsum(np.abs(obs / obs.sum() - p_exp))
    return ComparisonReport(
        observed=obs.astype(np.int64),
        expected=exp,
        zscores=z,
        chi_square=chi,
        dof=dof,
        tv_distance=min(tv, 1.0),
        max_abs_z=float(np.max(np.abs(z))),
        discarded=hist.discarded,
        active=active,
    )
