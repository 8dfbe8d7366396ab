"""The fixed matrix G: squared singular values, sorted and grouped into blocks."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

__all__ = ["CLUSTER_TOL", "SingularSpectrum", "read_spectrum_file", "parse_spectrum_text"]

CLUSTER_TOL = 1e-9


def _scale(x: float) -> float:
    return max(1.0, x)


@dataclass(frozen=True)
class SingularSpectrum:
    """Sorted eigenvalues ``g`` of G (squared singular values of A).

    Values closer than ``tol * max(1, g)`` are grouped into one block and
    share the block's representative value; blocks of size > 1 are handled
    by the degenerate-spectrum formulas.  A block containing an exact zero
    is pinned to zero.

    Parameters
    ----------
    g : sequence of float
        Nonnegative, finite values in any order.
    tol : float
        Relative cluster tolerance.
    """

    g: tuple[float, ...]
    tol: float = CLUSTER_TOL
    blocks: tuple[tuple[int, int], ...] = field(init=False)
    block_values: tuple[float, ...] = field(init=False)

    def __init__(self, g: Iterable[float], tol: float = CLUSTER_TOL):
        vals = []
        for v in g:
            v = float(v)
            if not math.isfinite(v):
                raise ValueError(f"non-finite spectrum value {v!r}")
            if v < 0:
                raise ValueError(f"negative spectrum value {v!r}")
            vals.append(v)
        if not vals:
            raise ValueError("spectrum must contain at least one value")
        if not tol >= 0:
            raise ValueError("cluster tolerance must be >= 0")
        vals.sort()
        object.__setattr__(self, "g", tuple(vals))
        object.__setattr__(self, "tol", float(tol))

        blocks = []
        start = 0
        for j in range(1, len(vals) + 1):
            if j == len(vals) or vals[j] - vals[j - 1] > tol * _scale(vals[j]):
                blocks.append((start, j - start))
                start = j
        reps = []
        for start, mult in blocks:
            members = vals[start:start + mult]
            lo, hi = members[0], members[-1]
            if hi - lo > tol * _scale(hi):
                raise ValueError(
                    f"values {lo!r}..{hi!r} chain into one cluster wider than the "
                    f"tolerance; pass an explicit tol"
                )
            reps.append(0.0 if lo == 0.0 else math.fsum(members) / mult)
        object.__setattr__(self, "blocks", tuple(blocks))
        object.__setattr__(self, "block_values", tuple(reps))

    @property
    def n(self) -> int:
        return len(self.g)

    @property
    def canonical(self) -> tuple[float, ...]:
        """``g`` with every entry replaced by its block value."""
        out = []
        for (start, mult), v in zip(self.blocks, self.block_values):
            out.extend([v] * mult)
        return tuple(out)

    @property
    def is_distinct(self) -> bool:
        return all(mult == 1 for _, mult in self.blocks)

    @property
    def zero_count(self) -> int:
        if self.block_values[0] == 0.0:
            return self.blocks[0][1]
        return 0

    @property
    def atom_at_origin(self) -> float:
        """Fraction of eigenvalues pinned at z = 0 by zero singular values."""
        return self.zero_count / self.n

    @property
    def is_scalar(self) -> bool:
        """All values equal and nonzero: A is a multiple of a Haar unitary.

        The eigenvalues then sit on the circle |z|^2 = g and the continuous
        density vanishes identically.
        """
        return len(self.blocks) == 1 and self.block_values[0] > 0.0

    def block_of(self, index: int) -> int:
        for b, (start, mult) in enumerate(self.blocks):
            if start <= index < start + mult:
                return b
        raise IndexError(index)

    def scaled(self, c: float) -> "SingularSpectrum":
        return SingularSpectrum([c * v for v in self.g], self.tol)

    def __repr__(self) -> str:
        return f"SingularSpectrum({list(self.g)!r})"


def parse_spectrum_text(text: str) -> list[float]:
    """Parse the spectrum file format.

    One value per line; blank lines and ``#`` comments are ignored.  A line
    holding two numbers ``re im`` is a complex diagonal entry and is
    replaced by its modulus (the phase can be absorbed into U).
    """
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        try:
            nums = [float(p) for p in parts]
        except ValueError:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}") from None
        if len(nums) == 1:
            v = nums[0]
            if v < 0:
                raise ValueError(f"line {lineno}: negative value {v!r}")
        elif len(nums) == 2:
            v = abs(complex(nums[0], nums[1]))
        else:
            raise ValueError(f"line {lineno}: expected 'g' or 're im', got {raw!r}")
        values.append(v)
    if not values:
        raise ValueError("spectrum file holds no values")
    return values


def read_spectrum_file(path: Union[str, os.PathLike]) -> list[float]:
    with open(path, encoding="utf-8") as fh:
        return parse_spectrum_text(fh.read())


def as_spectrum(spec: Union[SingularSpectrum, Sequence[float]]) -> SingularSpectrum:
    if isinstance(spec, SingularSpectrum):
        return spec
    return SingularSpectrum(spec)
