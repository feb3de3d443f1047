"""Shared types, unperturbed spectra and series helpers.

Conventions: hbar = M = 1, the box is y in [-1/2, 1/2] and the oscillator
has unit frequency.  Every quantity in the package is dimensionless; the
physical sum rule is ``Gamma**s * Zbar(s)`` with ``Gamma = M L^2 / hbar^2``
(box) or ``1 / (hbar omega)`` (oscillator).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy import special


class SumRuleError(ValueError):
    """Base class for domain errors (CLI exit code 2)."""


class DivergentOrderError(SumRuleError):
    def __init__(self, orders, s, detail=""):
        self.orders = tuple(orders)
        self.s = s
        names = ", ".join(str(o) for o in self.orders)
        msg = f"sum rule of order s={s} diverges at perturbative order(s) {names}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class PoleError(SumRuleError):
    def __init__(self, msg, location=None):
        self.location = location
        super().__init__(msg)


class BracketError(SumRuleError):
    def __init__(self, msg, interval=None):
        self.interval = interval
        super().__init__(msg)


@dataclass(frozen=True)
class RationalOrder:
    """Exponent s = numerator/denominator of a sum rule, kept as a reduced fraction."""

    numerator: int
    denominator: int = 1

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        if self.numerator <= 0:
            raise ValueError(f"sum rule order must be positive, got {self.numerator}/{self.denominator}")
        if math.gcd(self.numerator, self.denominator) != 1:
            raise ValueError("RationalOrder must be a reduced fraction; use RationalOrder.of()")

    @classmethod
    def of(cls, value) -> "RationalOrder":
        """Build from int, Fraction, float or a string like ``"3/4"``."""
        if isinstance(value, RationalOrder):
            return value
        if isinstance(value, float):
            frac = Fraction(value).limit_denominator(10_000)
        else:
            frac = Fraction(value)
        return cls(frac.numerator, frac.denominator)

    @property
    def value(self) -> float:
        return self.numerator / self.denominator

    def __float__(self):
        return self.value

    def __str__(self):
        return str(self.numerator) if self.denominator == 1 else f"{self.numerator}/{self.denominator}"


def as_order(s) -> RationalOrder:
    return RationalOrder.of(s)


# --------------------------------------------------------------------------
# unperturbed bases

BOX1D = "Box1D"
SHO1D = "SHO1D"


@dataclass(frozen=True)
class UnperturbedBasis:
    """Eigen-system of H0.  Box states are n = 1, 2, ...; oscillator states n = 0, 1, ..."""

    kind: str = BOX1D

    def __post_init__(self):
        if self.kind not in (BOX1D, SHO1D):
            raise ValueError(f"unknown basis kind {self.kind!r}")

    @property
    def first_index(self) -> int:
        return 1 if self.kind == BOX1D else 0

    def indices(self, cutoff: int) -> np.ndarray:
        """Quantum numbers of the lowest ``cutoff`` states."""
        return np.arange(self.first_index, self.first_index + cutoff)

    def eigenvalue(self, n):
        n = np.asarray(n, dtype=float)
        if self.kind == BOX1D:
            return n * n * np.pi**2 / 2
        return n + 0.5

    def eigenvalues(self, cutoff: int) -> np.ndarray:
        return self.eigenvalue(self.indices(cutoff))

    def eigenfunction(self, n, y):
        y = np.asarray(y, dtype=float)
        if self.kind == BOX1D:
            out = np.sqrt(2.0) * np.sin(np.multiply.outer(n, y + 0.5) * np.pi)
            return np.where(np.abs(y) <= 0.5, out, 0.0)
        return _hermite_function(n, y)

    def matrix_element(self, potential, m: int, n: int) -> float:
        return potential.element(self, m, n)

    def convergence_threshold(self) -> float:
        """Z0(s) converges for s above this value."""
        return 0.5 if self.kind == BOX1D else 1.0


BOX = UnperturbedBasis(BOX1D)
SHO = UnperturbedBasis(SHO1D)


def _hermite_function(n, y):
    # normalized Hermite functions by the stable three-term recurrence
    y = np.asarray(y, dtype=float)
    if np.ndim(n):
        return np.stack([_hermite_function(int(k), y) for k in np.ravel(n)]).reshape(np.shape(n) + y.shape)
    n = int(n)
    h_prev = np.zeros_like(y)
    h = np.pi**-0.25 * np.exp(-y * y / 2)
    for k in range(n):
        h_prev, h = h, np.sqrt(2.0 / (k + 1)) * y * h - np.sqrt(k / (k + 1)) * h_prev
    return h


# --------------------------------------------------------------------------
# zeta values and series helpers


def riemann_zeta(x: float) -> float:
    """Riemann zeta for real x > 1."""
    if x <= 1:
        raise DivergentOrderError([0], x, "Riemann zeta needs argument > 1")
    return float(special.zeta(x))


def hurwitz_zeta(x: float, q: float) -> float:
    """sum_{k>=0} (k + q)^-x for x > 1."""
    return float(special.zeta(x, q))


def accurate_sum(terms) -> float:
    """Compensated summation (exactly rounded) for long series."""
    return math.fsum(np.ravel(np.asarray(terms, dtype=float)))


def power_tail_sum(coeff: float, p: float, start: int, step: int = 1) -> float:
    """Exact value of sum_{k>=0} coeff * (start + k*step)^-p."""
    return coeff * step**-p * hurwitz_zeta(p, start / step)


def completed_series(term: Callable[[np.ndarray], np.ndarray], start: int, s: float, *,
                     step: int = 1, leading: float = 2 / np.pi**2, direct: int = 2_000_000,
                     chunk: int = 250_000):
    """Sum ``term(n)`` over n = start, start+step, ... to infinity.

    ``term`` is summed directly for ``direct`` indices; the remainder uses the
    leading behaviour ``(leading * n^-2)^s`` through the Hurwitz zeta.  The
    returned bound is the size of the first neglected correction, taken as
    the relative difference between ``term`` and its leading form at the
    switch point times the remainder.
    """
    total = []
    n0 = start
    stop = start + step * direct
    while n0 < stop:
        n = np.arange(n0, min(stop, n0 + step * chunk), step, dtype=float)
        total.append(accurate_sum(term(n)))
        n0 = int(n[-1]) + step
    head = math.fsum(total)
    remainder = power_tail_sum(leading**s, 2 * s, stop, step)
    last = float(term(np.array([float(stop)]))[0])
    lead_last = (leading / stop**2) ** s
    bound = abs(last / lead_last - 1.0) * abs(remainder) + 1e-16 * abs(head)
    return head + remainder, bound


def zeta_unperturbed(basis: UnperturbedBasis, s) -> float:
    """Z0(s) = sum_n eps_n^-s for the box or the oscillator."""
    s = as_order(s)
    x = s.value
    if x <= basis.convergence_threshold():
        raise DivergentOrderError([0], s, f"{basis.kind} needs s > {basis.convergence_threshold()}")
    if basis.kind == BOX1D:
        return 2**x * np.pi ** (-2 * x) * riemann_zeta(2 * x)
    # sum (n + 1/2)^-s over n >= 0
    return hurwitz_zeta(x, 0.5)


@dataclass(frozen=True)
class ScaleFactor:
    """Dimensional prefactor Gamma^s multiplying every dimensionless sum rule."""

    symbol: str = "Gamma"
    meaning: str = "M L^2 / hbar^2"

    def describe(self, s) -> str:
        return f"Z(s) = ({self.meaning})^{as_order(s)} * Zbar(s)"


BOX_SCALE = ScaleFactor()
SHO_SCALE = ScaleFactor(meaning="1 / (hbar omega)")
DISK_SCALE = ScaleFactor(meaning="2 M R^2 / hbar^2")


@dataclass(frozen=True)
class SumRuleEvaluation:
    """Per-order terms of Z(s) = z0 + lam*z1 + lam^2*z2.

    ``truncation_error`` estimates the mode-sum truncation of z0, z1, z2
    (weighted by |lam|^k); it does not include the O(lam^3) remainder.
    """

    s: RationalOrder
    z0: float
    z1: float
    z2: float
    lam: float = 1.0
    truncation_error: float = 0.0
    pade: Optional[float] = None
    scale_factor: ScaleFactor = field(default=BOX_SCALE)
    cutoff: int = 0

    @property
    def total(self) -> float:
        return self.z0 + self.lam * self.z1 + self.lam**2 * self.z2

    def terms(self) -> dict:
        return {"z0": self.z0, "z1": self.z1, "z2": self.z2}
