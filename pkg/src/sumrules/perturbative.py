"""Second-order perturbative sum rules and their [1,1] Pade extension.

Z(s) = Z0 + lam Z1 + lam^2 Z2 with

    Z1 = -s sum_n V_nn / eps_n^(1+s)
    Z2 = s(s+3)/2 sum_n V_nn^2 / eps_n^(2+s) - s sum_n (V^2)_nn / eps_n^(2+s)
         - s/2 sum_{r != n} (eps_r eps_n^(-s-2) - eps_n eps_r^(-s-2)) / (eps_n - eps_r) |V_nr|^2
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .core import (
    BOX1D,
    BOX_SCALE,
    SHO1D,
    SHO_SCALE,
    DivergentOrderError,
    SumRuleError,
    SumRuleEvaluation,
    UnperturbedBasis,
    as_order,
    zeta_unperturbed,
)


class DegeneratePadeError(SumRuleError):
    pass


# --------------------------------------------------------------------------
# potentials


def matrix_elements_linear(m, n, rho=1.0):
    """(<m|rho y|n>, <m|(rho y)^2|n>) in the unit-box basis."""
    m = np.asarray(m)
    n = np.asarray(n)
    same = m == n
    sign = np.where((m + n) % 2 == 0, 1.0, -1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        d2 = (m.astype(float) ** 2 - n.astype(float) ** 2) ** 2
        v = 4 * m * n * rho * (sign - 1) / (np.pi**2 * d2)
        v2 = 4 * m * n * rho**2 * (sign + 1) / (np.pi**2 * d2)
        v2_diag = (np.pi**2 * n**2 - 6.0) * rho**2 / (12 * np.pi**2 * n**2)
    v = np.where(same, 0.0, v)
    v2 = np.where(same, v2_diag, v2)
    if v.ndim == 0:
        return float(v), float(v2)
    return v, v2


def matrix_elements_quartic(n):
    """<n|y^4|n> for the unit oscillator."""
    n = np.asarray(n, dtype=float)
    out = 0.75 * (2 * n * n + 2 * n + 1)
    return float(out) if out.ndim == 0 else out


def _position_matrix(size):
    k = np.sqrt(np.arange(1, size) / 2.0)
    return np.diag(k, 1) + np.diag(k, -1)


@dataclass(frozen=True)
class LinearInBox:
    rho: float = 1.0
    basis_kind = BOX1D

    def matrix(self, basis, cutoff):
        idx = basis.indices(cutoff)
        return matrix_elements_linear(idx[:, None], idx[None, :], self.rho)[0]

    def v2_diagonal(self, basis, cutoff):
        n = basis.indices(cutoff).astype(float)
        return (np.pi**2 * n**2 - 6.0) * self.rho**2 / (12 * np.pi**2 * n**2)

    def element(self, basis, m, n):
        return matrix_elements_linear(m, n, self.rho)[0]

    def diagonal(self, basis, n):
        return np.zeros_like(np.asarray(n, dtype=float))

    def thresholds(self, basis):
        return (0.5, 0.5, 0.5)


@dataclass(frozen=True)
class DeltaInBox:
    """rho * delta(y - abar); matrix elements rho phi_m(abar) phi_n(abar)."""

    rho: float = 1.0
    abar: float = 0.0
    basis_kind = BOX1D

    def __post_init__(self):
        if abs(self.abar) > 0.5:
            raise SumRuleError(f"impurity position |abar| = {abs(self.abar)} exceeds 1/2")

    def _phi(self, basis, idx):
        return basis.eigenfunction(np.asarray(idx), self.abar)

    def matrix(self, basis, cutoff):
        phi = self._phi(basis, basis.indices(cutoff))
        return self.rho * np.outer(phi, phi)

    def v2_diagonal(self, basis, cutoff):
        # <n|delta^2|n> does not exist; the truncated completeness sum is used instead
        return None

    def element(self, basis, m, n):
        return float(self.rho * self._phi(basis, m) * self._phi(basis, n))

    def diagonal(self, basis, n):
        return self.rho * self._phi(basis, n) ** 2

    def thresholds(self, basis):
        return (0.5, 0.5, 0.5)


@dataclass(frozen=True)
class DoubleDeltaInBox:
    rho: float = 1.0
    mu: float = 1.0
    abar: float = 0.0
    bbar: float = 0.0
    basis_kind = BOX1D

    def __post_init__(self):
        if abs(self.abar) > 0.5 or abs(self.bbar) > 0.5:
            raise SumRuleError("impurity positions must satisfy |abar|, |bbar| <= 1/2")

    def matrix(self, basis, cutoff):
        idx = basis.indices(cutoff)
        pa = basis.eigenfunction(idx, self.abar)
        pb = basis.eigenfunction(idx, self.bbar)
        return self.rho * np.outer(pa, pa) + self.mu * np.outer(pb, pb)

    def v2_diagonal(self, basis, cutoff):
        return None

    def element(self, basis, m, n):
        return float(self.matrix(basis, max(m, n))[m - 1, n - 1])

    def diagonal(self, basis, n):
        return (self.rho * basis.eigenfunction(np.asarray(n), self.abar) ** 2
                + self.mu * basis.eigenfunction(np.asarray(n), self.bbar) ** 2)

    def thresholds(self, basis):
        return (0.5, 0.5, 0.5)


@dataclass(frozen=True)
class QuarticSHO:
    """rho * y^4 on top of the unit oscillator."""

    rho: float = 1.0
    basis_kind = SHO1D

    def _x4(self, cutoff, power):
        x = _position_matrix(cutoff + power)
        return np.linalg.matrix_power(x, power)[:cutoff, :cutoff]

    def matrix(self, basis, cutoff):
        return self.rho * self._x4(cutoff, 4)

    def v2_diagonal(self, basis, cutoff):
        return self.rho**2 * np.diag(self._x4(cutoff, 8)).copy()

    def element(self, basis, m, n):
        return float(self.matrix(basis, max(m, n) + 1)[m, n])

    def diagonal(self, basis, n):
        return self.rho * matrix_elements_quartic(n)

    def thresholds(self, basis):
        # <n|y^4|n> ~ n^2 while eps_n ~ n
        return (1.0, 2.0, 3.0)


@dataclass(frozen=True)
class PerturbationSpec:
    potential: object
    lam: float = 1.0

    @property
    def kind(self) -> str:
        return type(self.potential).__name__


def _as_spec(perturbation) -> PerturbationSpec:
    if isinstance(perturbation, PerturbationSpec):
        return perturbation
    return PerturbationSpec(perturbation)


# --------------------------------------------------------------------------
# the sum rule


def split_kernel(eps_n, eps_r, s, rel_tol=1e-8):
    """(eps_r eps_n^(-s-2) - eps_n eps_r^(-s-2)) / (eps_n - eps_r), analytic on the diagonal."""
    eps_n, eps_r = np.broadcast_arrays(np.asarray(eps_n, float), np.asarray(eps_r, float))
    diff = eps_n - eps_r
    near = np.abs(diff) < rel_tol * np.abs(eps_n)
    safe = np.where(near, 1.0, diff)
    out = (eps_r * eps_n ** (-s - 2) - eps_n * eps_r ** (-s - 2)) / safe
    # r -> n limit: -(s+3) eps^(-s-2), first-order corrected in the offset
    mid = 0.5 * (eps_n + eps_r)
    limit = -(s + 3) * mid ** (-s - 2)
    return np.where(near, limit, out)


def presplit_kernel(eps_n, eps_r, s, rel_tol=1e-8):
    """(eps_n^(-1-s) - eps_r^(-1-s)) / (eps_n - eps_r), analytic on the diagonal."""
    eps_n, eps_r = np.broadcast_arrays(np.asarray(eps_n, float), np.asarray(eps_r, float))
    diff = eps_n - eps_r
    near = np.abs(diff) < rel_tol * np.abs(eps_n)
    safe = np.where(near, 1.0, diff)
    out = (eps_n ** (-1 - s) - eps_r ** (-1 - s)) / safe
    mid = 0.5 * (eps_n + eps_r)
    return np.where(near, -(1 + s) * mid ** (-2 - s), out)


def check_convergence(basis, potential, s):
    s = as_order(s)
    bad = [k for k, t in enumerate(potential.thresholds(basis)) if s.value <= t]
    if bad:
        detail = ", ".join(f"order {k} needs s > {potential.thresholds(basis)[k]:g}" for k in bad)
        raise DivergentOrderError(bad, s, detail)


def _correction_terms(basis, potential, s, cutoff):
    eps = basis.eigenvalues(cutoff)
    v = potential.matrix(basis, cutoff)
    vd = np.diag(v).copy()
    w2 = eps ** (-2 - s)
    z1 = -s * np.sum(vd * eps ** (-1 - s))
    v2d = potential.v2_diagonal(basis, cutoff)
    if v2d is None:
        v2d = np.einsum("ij,ij->i", v, v)
    kern = split_kernel(eps[:, None], eps[None, :], s)
    np.fill_diagonal(kern, 0.0)
    offdiag = np.sum(kern * v * v)
    z2 = s * (s + 3) / 2 * np.sum(vd * vd * w2) - s * np.sum(v2d * w2) - s / 2 * offdiag
    return float(z1), float(z2)


def sum_rule_perturbative(basis: UnperturbedBasis, perturbation, s, cutoff: int = 1000,
                          error_estimate: bool = True) -> SumRuleEvaluation:
    """Z(s) through second order in lam for a potential on the truncated basis.

    The truncation error is |T(cutoff) - T(cutoff // 2)| summed over orders
    with weights |lam|^k; for the 1/cutoff remainders of the impurity sums
    this equals the remainder itself, for faster-decaying sums it is an
    overestimate.
    """
    spec = _as_spec(perturbation)
    s = as_order(s)
    pot = spec.potential
    if getattr(pot, "basis_kind", basis.kind) != basis.kind:
        raise SumRuleError(f"{type(pot).__name__} is defined on {pot.basis_kind}, not {basis.kind}")
    check_convergence(basis, pot, s)
    x = s.value
    z0 = zeta_unperturbed(basis, s)
    z1, z2 = _correction_terms(basis, pot, x, cutoff)
    err = 0.0
    if error_estimate and cutoff >= 4:
        h1, h2 = _correction_terms(basis, pot, x, cutoff // 2)
        lam = abs(spec.lam)
        err = lam * abs(z1 - h1) + lam**2 * abs(z2 - h2)
    ev = SumRuleEvaluation(s=s, z0=z0, z1=z1, z2=z2, lam=spec.lam, truncation_error=err,
                           scale_factor=SHO_SCALE if basis.kind == SHO1D else BOX_SCALE,
                           cutoff=cutoff)
    if z1 != 0.0:
        try:
            ev = replace(ev, pade=pade_extend(ev)(spec.lam))
        except SumRuleError:
            pass
    return ev


# --------------------------------------------------------------------------
# Pade


@dataclass(frozen=True)
class PadeForm:
    """(a0 + a1 lam) / (1 + b1 lam)."""

    a0: float
    a1: float
    b1: float
    pole_location: Optional[float]

    def __call__(self, lam):
        den = 1 + self.b1 * lam
        if den == 0:
            raise SumRuleError(f"Pade approximant evaluated at its pole lam={lam}")
        return (self.a0 + self.a1 * lam) / den

    def taylor(self):
        """First three Taylor coefficients in lam."""
        c1 = self.a1 - self.a0 * self.b1
        return self.a0, c1, -self.b1 * c1


def pade_extend(ev: SumRuleEvaluation) -> PadeForm:
    z0, z1, z2 = ev.z0, ev.z1, ev.z2
    if z1 == 0:
        raise DegeneratePadeError(
            "first-order term vanishes (series even in the coupling); the [1,1] Pade is undefined")
    a1 = (z1 * z1 - z0 * z2) / z1
    b1 = -z2 / z1
    pole = z1 / z2 if z2 != 0 else None
    return PadeForm(a0=z0, a1=a1, b1=b1, pole_location=pole)
