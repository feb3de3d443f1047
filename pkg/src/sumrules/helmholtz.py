"""Mapping a heterogeneous string, -phi'' = E Sigma(u) phi, onto a 1D Schroedinger problem.

Units hbar = M = 1.  With phi(u) = R(u) psi(x(u)) the string becomes
-1/2 psi'' + V psi = E psi when

    x(u) = (1/sqrt 2) int sqrt(Sigma) du,   R = Sigma^(-1/4),
    V    = -5 Sigma'^2 / (16 Sigma^3) + Sigma'' / (4 Sigma^2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy.optimize import brentq

from .core import SumRuleError

BORG = "borg"
INVERSE_SQUARE = "inverse_square"
CONSTANT = "constant"
CUSTOM = "custom"


@dataclass(frozen=True)
class DensityProfile:
    """Sigma(u) on [-ell/2, ell/2].

    ``form`` is one of borg (beta / (1 + alpha u)^4), inverse_square
    (beta / (1 + alpha u)^2), constant (beta) or custom (``func``).
    """

    form: str
    ell: float = 1.0
    alpha: float = 0.0
    beta: float = 1.0
    func: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        if self.form not in (BORG, INVERSE_SQUARE, CONSTANT, CUSTOM):
            raise ValueError(f"unknown density form {self.form!r}")
        if self.ell <= 0:
            raise SumRuleError("domain length ell must be positive")
        if self.form == CUSTOM and self.func is None:
            raise ValueError("custom density needs a callable")
        if self.form in (BORG, INVERSE_SQUARE):
            if self.beta <= 0 or abs(self.alpha) * self.ell / 2 >= 1:
                raise SumRuleError("need beta > 0 and |alpha| ell / 2 < 1 for a positive density")
        if self.form == CONSTANT and self.beta <= 0:
            raise SumRuleError("density must be positive")
        if self.form == CUSTOM:
            u = np.linspace(-self.ell / 2, self.ell / 2, 513)
            if np.any(np.asarray(self.func(u), dtype=float) <= 0):
                raise SumRuleError("density must be positive on the closed domain")

    @classmethod
    def borg(cls, alpha, beta, ell=1.0):
        return cls(BORG, ell, alpha, beta)

    @classmethod
    def inverse_square(cls, alpha, beta, ell=1.0):
        return cls(INVERSE_SQUARE, ell, alpha, beta)

    @classmethod
    def constant(cls, beta, ell=1.0):
        return cls(CONSTANT, ell, 0.0, beta)

    @classmethod
    def custom(cls, func, ell=1.0):
        return cls(CUSTOM, ell, func=func)

    def _power(self):
        return {BORG: 4, INVERSE_SQUARE: 2, CONSTANT: 0}[self.form]

    def sigma(self, u):
        u = np.asarray(u, dtype=float)
        if self.form == CUSTOM:
            return np.asarray(self.func(u), dtype=float)
        return self.beta / (1 + self.alpha * u) ** self._power()

    def dsigma(self, u):
        u = np.asarray(u, dtype=float)
        if self.form == CUSTOM:
            return _fd5(self.sigma, u, 1e-4 * self.ell, 1)
        p = self._power()
        return -p * self.alpha * self.beta / (1 + self.alpha * u) ** (p + 1)

    def d2sigma(self, u):
        u = np.asarray(u, dtype=float)
        if self.form == CUSTOM:
            return _fd5(self.sigma, u, 1e-4 * self.ell, 2)
        p = self._power()
        return p * (p + 1) * self.alpha**2 * self.beta / (1 + self.alpha * u) ** (p + 2)


def _fd5(f, u, h, order):
    if order == 1:
        return (f(u - 2 * h) - 8 * f(u - h) + 8 * f(u + h) - f(u + 2 * h)) / (12 * h)
    return (-f(u - 2 * h) + 16 * f(u - h) - 30 * f(u) + 16 * f(u + h) - f(u + 2 * h)) / (12 * h * h)


@dataclass(frozen=True)
class TransformedProblem:
    density: DensityProfile
    L: float
    x_of_u: Callable = field(repr=False)
    R_of_u: Callable = field(repr=False)
    V_of_u: Callable = field(repr=False)

    def u_of_x(self, x):
        """Inverse of the monotone map x(u)."""
        half = self.density.ell / 2
        return brentq(lambda u: self.x_of_u(u) - x, -half, half, xtol=1e-15, rtol=1e-15)

    def V_of_x(self, x):
        return self.V_of_u(self.u_of_x(x))


def _log1p_ratio(x):
    """log(1 + x) / x, regular at x = 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-5
    safe = np.where(small, 1.0, x)
    out = np.where(small, 1 - x / 2 + x * x / 3, np.log1p(safe) / safe)
    return float(out) if out.ndim == 0 else out


def _atanh_over(y):
    """arctanh(y) / y, regular at y = 0."""
    return 1.0 + y * y * _atanh_ratio(y)


def _primitive(density: DensityProfile):
    """A primitive of sqrt(Sigma(u)/2), closed form where available."""
    a, b = density.alpha, density.beta
    if density.form == CONSTANT or (density.form != CUSTOM and a == 0.0):
        return lambda u: math.sqrt(b / 2) * np.asarray(u, dtype=float)
    if density.form == INVERSE_SQUARE:
        return lambda u: math.sqrt(b / 2) * np.asarray(u, dtype=float) * _log1p_ratio(a * np.asarray(u, dtype=float))
    if density.form == BORG:
        return lambda u: math.sqrt(b / 2) * np.asarray(u, dtype=float) / (1 + a * np.asarray(u, dtype=float))

    def prim(u):
        f = lambda t: math.sqrt(float(density.sigma(t)) / 2)
        vals = [integrate.quad(f, 0.0, float(x), epsabs=0, epsrel=1e-13)[0] for x in np.ravel(u)]
        out = np.array(vals).reshape(np.shape(u))
        return float(out) if out.ndim == 0 else out

    return prim


def length_map(density: DensityProfile, ell: Optional[float] = None) -> float:
    """L = x(ell/2) - x(-ell/2)."""
    d = density if ell is None else _with_ell(density, ell)
    half = d.ell / 2
    if d.form == INVERSE_SQUARE and d.alpha != 0.0:
        return math.sqrt(2 * d.beta) * half * _atanh_over(d.alpha * half)
    prim = _primitive(d)
    return float(prim(half) - prim(-half))


def _with_ell(density, ell):
    return DensityProfile(density.form, ell, density.alpha, density.beta, density.func)


def transform(density: DensityProfile) -> TransformedProblem:
    """Map, amplitude and potential; constants fixed by x(-ell/2) = -L/2 and R = Sigma^(-1/4)."""
    u = np.linspace(-density.ell / 2, density.ell / 2, 257)
    if np.any(density.sigma(u) <= 0):
        raise SumRuleError("density must be positive on the domain")
    L = length_map(density)
    prim = _primitive(density)
    shift = -L / 2 - float(prim(-density.ell / 2))
    x_of_u = lambda uu: prim(uu) + shift
    R_of_u = lambda uu: density.sigma(uu) ** -0.25

    def V_of_u(uu):
        s, s1, s2 = density.sigma(uu), density.dsigma(uu), density.d2sigma(uu)
        return -5 * s1**2 / (16 * s**3) + s2 / (4 * s**2)

    return TransformedProblem(density, L, x_of_u, R_of_u, V_of_u)


# --------------------------------------------------------------------------
# order-one sum rules on both sides


def _atanh_ratio(y):
    """(arctanh(y)/y - 1) / y^2 = sum_k y^(2k-2) / (2k+1)."""
    if abs(y) < 0.1:
        k = np.arange(1, 20)
        return float(np.sum(y ** (2 * k - 2) / (2 * k + 1)))
    return (math.atanh(y) / y - 1.0) / (y * y)


def _coth_ratio(z):
    """(q coth q - 1) / q^2 with q^2 = z; real for z > -pi^2."""
    if abs(z) < 1.0:
        k = np.arange(25)
        fact = np.array([math.factorial(2 * i + 1) for i in k], dtype=float)
        num = np.sum((2 * k + 2) * z**k / (fact * (2 * k + 2) * (2 * k + 3)))
        den = np.sum(z**k / fact)
        return float(num / den)
    if z > 0:
        q = math.sqrt(z)
        return (q / math.tanh(q) - 1.0) / z
    q = math.sqrt(-z)
    return (q / math.tan(q) - 1.0) / z


def helmholtz_Z1(density: DensityProfile, ell: Optional[float] = None) -> float:
    """int_{-ell/2}^{ell/2} (ell/4 - u^2/ell) Sigma(u) du."""
    d = density if ell is None else _with_ell(density, ell)
    l = d.ell
    if d.form == CONSTANT or (d.form != CUSTOM and d.alpha == 0.0):
        return d.beta * l * l / 6
    if d.form == INVERSE_SQUARE:
        return d.beta * l * l / 2 * _atanh_ratio(d.alpha * l / 2)
    f = lambda u: (l / 4 - u * u / l) * float(d.sigma(u))
    return integrate.quad(f, -l / 2, l / 2, epsabs=0, epsrel=1e-13, limit=200)[0]


def schrodinger_Z1_const_potential(L: float, V0: float) -> float:
    """sum_n 1 / (pi^2 n^2 / (2 L^2) + V0) = (L / sqrt(2 V0)) coth(L sqrt(2 V0)) - 1 / (2 V0).

    Written as L^2 (q coth q - 1) / q^2 with q = L sqrt(2 V0), which is
    regular at V0 = 0 (value L^2 / 3) and continues to V0 > -pi^2 / (2 L^2).
    """
    if L <= 0:
        raise SumRuleError("box length must be positive")
    z = 2.0 * V0 * L * L
    if z <= -np.pi**2:
        raise SumRuleError("V0 at or below minus the lowest box level: the sum has a pole")
    return L * L * _coth_ratio(z)
