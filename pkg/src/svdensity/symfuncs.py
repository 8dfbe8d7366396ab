"""Elementary symmetric polynomials and exact binomials.

Everything here works on plain Python floats. The spectra are small
(N of a few dozen at most), so clarity and bit-reproducibility matter
more than vectorisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = ["SymTable", "elem_sym", "elem_sym_excluding", "binomial"]

BINOMIAL_MAX_N = 64


@dataclass(frozen=True)
class SymTable:
    """Elementary symmetric polynomials ``esp[l] = e_l(values)``.

    ``values`` is stored sorted ascending; ``esp`` has ``len(values) + 1``
    entries with ``esp[0] == 1.0``.
    """

    values: tuple[float, ...]
    esp: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.esp)

    def __getitem__(self, l: int) -> float:
        return self.esp[l]

    def poly(self, x: float) -> float:
        """Evaluate ``sum_l esp[l] * x**(N - l)``, i.e. ``prod(x + g)``."""
        n = len(self.values)
        return math.fsum(e * x ** (n - l) for l, e in enumerate(self.esp))


def _validated(values: Iterable[float]) -> list[float]:
    out = []
    for v in values:
        v = float(v)
        if not math.isfinite(v):
            raise ValueError(f"non-finite value {v!r}")
        if v < 0.0:
            raise ValueError(f"negative value {v!r}; expected g >= 0")
        out.append(v)
    return out


def _recurrence(values: list[float]) -> tuple[float, ...]:
    # sorted input makes the result independent of caller ordering
    values = sorted(values)
    esp = [1.0] + [0.0] * len(values)
    for count, g in enumerate(values, start=1):
        for l in range(count, 0, -1):
            esp[l] += g * esp[l - 1]
    return tuple(esp)


def elem_sym(values: Iterable[float]) -> SymTable:
    """Elementary symmetric polynomials of ``values`` by the one-at-a-time
    recurrence ``e_l <- e_l + g * e_{l-1}``.

    Raises
    ------
    ValueError
        If any value is negative, NaN or infinite.
    """
    vals = _validated(values)
    return SymTable(tuple(sorted(vals)), _recurrence(vals))


def elem_sym_excluding(values: Sequence[float], excluded: Iterable[int]) -> SymTable:
    """Symmetric polynomials with the entries at ``excluded`` (0-based) set to zero.

    The reduced list is run through the recurrence from scratch; no
    synthetic division, which would cancel badly for close values.
    """
    vals = _validated(values)
    drop = set()
    for idx in excluded:
        if not 0 <= idx < len(vals):
            raise IndexError(f"index {idx} out of range for {len(vals)} values")
        drop.add(idx)
    kept = [v for j, v in enumerate(vals) if j not in drop]
    return SymTable(tuple(sorted(kept)), _recurrence(kept))


def binomial(n: int, k: int) -> int:
    """Exact ``n choose k`` for ``0 <= k <= n <= 64``."""
    if not (isinstance(n, int) and isinstance(k, int)):
        raise TypeError("binomial expects integers")
    if n < 0 or k < 0 or k > n:
        raise ValueError(f"binomial({n}, {k}) requires 0 <= k <= n")
    if n > BINOMIAL_MAX_N:
        raise ValueError(f"n = {n} exceeds supported range (<= {BINOMIAL_MAX_N})")
    k = min(k, n - k)
    result = 1
    for j in range(1, k + 1):
        # exact at every step: result * (n - k + j) is divisible by j
        result = result * (n - k + j) // j
    return result
