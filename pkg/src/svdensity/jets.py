"""Truncated Taylor series ("jets") in one real variable.

A jet of order K carries the Taylor coefficients ``c[0..K]`` of a function
about some expansion point that the caller keeps track of, so that the
k-th derivative there is ``k! * c[k]``.  Arithmetic is exact up to the
truncation order, which is all the degenerate-spectrum formulas need.
"""

from __future__ import annotations

import math
from typing import Iterable, Union

__all__ = [
    "Jet",
    "jet_var",
    "jet_const",
    "jet_add",
    "jet_sub",
    "jet_mul",
    "jet_div",
    "jet_powi",
]

Number = Union[int, float]


class Jet:
    """Truncated Taylor series with ``order + 1`` real coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number]):
        c = tuple(float(x) for x in coeffs)
        if not c:
            raise ValueError("a jet needs at least one coefficient")
        if not all(math.isfinite(x) for x in c):
            raise ValueError(f"non-finite jet coefficient in {c}")
        self.coeffs = c

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self) -> float:
        return self.coeffs[0]

    def derivative(self, k: int) -> float:
        """k-th derivative at the expansion point."""
        if not 0 <= k <= self.order:
            raise ValueError(f"derivative {k} not available from order-{self.order} jet")
        return math.factorial(k) * self.coeffs[k]

    def __repr__(self) -> str:
        return f"Jet({list(self.coeffs)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Jet):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def _lift(self, other: Union["Jet", Number]) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ValueError(f"jet order mismatch: {self.order} vs {other.order}")
            return other
        return jet_const(other, self.order)

    def __add__(self, other):
        return jet_add(self, self._lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return jet_sub(self, self._lift(other))

    def __rsub__(self, other):
        return jet_sub(self._lift(other), self)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Jet(float(other) * c for c in self.coeffs)
        return jet_mul(self, self._lift(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            if other == 0:
                raise ZeroDivisionError("jet divided by zero")
            return Jet(c / float(other) for c in self.coeffs)
        return jet_div(self, self._lift(other))

    def __rtruediv__(self, other):
        return jet_div(self._lift(other), self)

    def __neg__(self):
        return Jet(-c for c in self.coeffs)

    def __pow__(self, p: int):
        return jet_powi(self, p)


def jet_var(value: Number, order: int) -> Jet:
    """The identity function expanded at ``value``: ``[value, 1, 0, ...]``."""
    if order < 0:
        raise ValueError("jet order must be >= 0")
    return Jet([value] + [1.0] * min(order, 1) + [0.0] * (order - 1))


def jet_const(value: Number, order: int) -> Jet:
    if order < 0:
        raise ValueError("jet order must be >= 0")
    return Jet([value] + [0.0] * order)


def _check(a: Jet, b: Jet) -> None:
    if a.order != b.order:
        raise ValueError(f"jet order mismatch: {a.order} vs {b.order}")


def jet_add(a: Jet, b: Jet) -> Jet:
    _check(a, b)
    return Jet(x + y for x, y in zip(a.coeffs, b.coeffs))


def jet_sub(a: Jet, b: Jet) -> Jet:
    _check(a, b)
    return Jet(x - y for x, y in zip(a.coeffs, b.coeffs))


def jet_mul(a: Jet, b: Jet) -> Jet:
    """Cauchy product truncated at the common order.

    Each coefficient is the correctly rounded sum (``math.fsum``) of the
    same multiset of products whichever operand comes first, so the
    product is commutative bit for bit.
    """
    _check(a, b)
    ac, bc = a.coeffs, b.coeffs
    return Jet(math.fsum(ac[j] * bc[k - j] for j in range(k + 1)) for k in range(len(ac)))


def jet_div(a: Jet, b: Jet) -> Jet:
    """Quotient by series inversion; ``b`` must have a nonzero constant term."""
    _check(a, b)
    b0 = b.coeffs[0]
    if b0 == 0.0:
        raise ZeroDivisionError("jet division by a series with zero constant term")
    q: list[float] = []
    for k, ak in enumerate(a.coeffs):
        acc = math.fsum([ak] + [-b.coeffs[j] * q[k - j] for j in range(1, k + 1)])
        q.append(acc / b0)
    return Jet(q)


def jet_powi(a: Jet, p: int) -> Jet:
    """Integer power by repeated squaring; negative ``p`` inverts first."""
    if not isinstance(p, int):
        raise TypeError("jet_powi needs an integer exponent")
    if p < 0:
        a = jet_div(jet_const(1.0, a.order), a)
        p = -p
    result = jet_const(1.0, a.order)
    base = a
    while p:
        if p & 1:
            result = jet_mul(result, base)
        p >>= 1
        if p:
            base = jet_mul(base, base)
    return result
