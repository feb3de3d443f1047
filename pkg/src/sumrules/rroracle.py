"""Rayleigh-Ritz oracle: diagonalise H0 + lam V in a truncated basis and sum the spectrum.

The lowest quarter of the Ritz values is trusted by default; the rest of
the spectrum comes from an asymptotic tail model.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg, special
from scipy.optimize import brentq

from .core import BOX, BOX1D, SumRuleError, accurate_sum, as_order, completed_series
from .impurity1d import SingleImpurity, asymptotic_eigenvalue
from .perturbative import DeltaInBox, LinearInBox, PerturbationSpec, _as_spec

TAIL_MODELS = ("wkb-linear", "first-order", "cj", "unperturbed")


@dataclass(frozen=True)
class RRConfig:
    basis_size: int = 2000
    kept_levels: Optional[int] = None
    tail_model: str = "first-order"

    def __post_init__(self):
        if self.basis_size < 1:
            raise ValueError("basis_size must be positive")
        if self.kept_levels is not None and not 1 <= self.kept_levels <= self.basis_size:
            raise ValueError("kept_levels must lie in [1, basis_size]")
        if self.tail_model not in TAIL_MODELS:
            raise ValueError(f"tail_model must be one of {TAIL_MODELS}")

    @property
    def kept(self) -> int:
        return self.kept_levels if self.kept_levels is not None else max(1, self.basis_size // 4)


def hamiltonian_matrix(basis, perturbation, size: int) -> np.ndarray:
    spec = _as_spec(perturbation)
    h = spec.lam * spec.potential.matrix(basis, size)
    h[np.diag_indices_from(h)] += basis.eigenvalues(size)
    return h


def assemble_and_solve(basis, perturbation, cfg: RRConfig) -> np.ndarray:
    """Lowest ``cfg.kept`` Ritz values of H0 + lam V, increasing."""
    h = hamiltonian_matrix(basis, perturbation, cfg.basis_size)
    try:
        return linalg.eigh(h, eigvals_only=True, subset_by_index=[0, cfg.kept - 1], check_finite=True)
    except (linalg.LinAlgError, ValueError) as exc:
        asym = float(np.max(np.abs(h - h.T))) if np.all(np.isfinite(h)) else float("nan")
        raise SumRuleError(f"eigensolver failed on a {h.shape[0]}x{h.shape[1]} matrix "
                           f"(max |H - H^T| = {asym:g}, finite = {bool(np.all(np.isfinite(h)))}): {exc}") from exc


def wkb_tail_linear(n, rho):
    """Large-n levels of -1/2 d^2/dy^2 + rho y on the unit box.

    The semiclassical series is written in terms of (2 nu + 1) pi with
    nu = n - 1/2 for box level n, so that the leading term is n^2 pi^2 / 2.
    """
    n = np.asarray(n, dtype=float)
    w = 2 * np.pi * n  # (2 nu + 1) pi
    out = w**2 / 8 + rho**2 / (6 * w**2) + 2 * rho**4 / (9 * w**6) + 8 * rho**6 / (9 * w**10)
    return float(out) if out.ndim == 0 else out


def _tail_levels(model, basis, potential, lam):
    if model == "unperturbed":
        return lambda n: basis.eigenvalue(n)
    if model == "first-order":
        return lambda n: basis.eigenvalue(n) + lam * np.asarray(potential.diagonal(basis, n.astype(int)))
    if model == "wkb-linear":
        if not isinstance(potential, LinearInBox):
            raise SumRuleError("the WKB tail is derived for the linear potential")
        return lambda n: wkb_tail_linear(n, lam * potential.rho)
    if model == "cj":
        if not isinstance(potential, DeltaInBox):
            raise SumRuleError("c_j asymptotics exist for a single delta impurity")
        cfg = SingleImpurity(lam * potential.rho, potential.abar)
        return lambda n: asymptotic_eigenvalue(n, cfg, 3)
    raise ValueError(model)


@dataclass(frozen=True)
class NumericSumRule:
    value: float
    head: float
    tail: float
    tail_bound: float
    kept: int


def numeric_sum_rule(s, eigenvalues, tail_model: str, cfg: RRConfig, perturbation=None,
                     basis=BOX) -> NumericSumRule:
    """sum_{n <= N} E_n^-s over Ritz values plus the tail model for n > N, N = len(eigenvalues)."""
    s = as_order(s)
    x = s.value
    if basis.kind != BOX1D:
        raise SumRuleError("tail models are available for the box basis only")
    if x <= basis.convergence_threshold():
        raise SumRuleError(f"s = {s} is not above the convergence threshold {basis.convergence_threshold()}")
    ev = np.asarray(eigenvalues, dtype=float)
    if np.any(ev <= 0) and s.denominator != 1:
        raise SumRuleError("non-integer s with a non-positive eigenvalue")
    if np.any(ev == 0):
        raise SumRuleError("zero eigenvalue: the sum rule diverges")
    head = accurate_sum(ev ** (-x))
    if perturbation is None:
        spec = PerturbationSpec(LinearInBox(0.0), 0.0)
    else:
        spec = _as_spec(perturbation)
    levels = _tail_levels(tail_model, basis, spec.potential, spec.lam)
    start = basis.first_index + len(ev)
    tail, bound = completed_series(lambda n: levels(n) ** (-x), start, x, direct=200_000)
    # rounding of the compensated head sum, a few ulps of its largest term
    bound += 4 * np.finfo(float).eps * float(np.max(np.abs(ev ** (-x))))
    return NumericSumRule(head + tail, head, tail, bound, len(ev))


def rr_sum_rule(s, perturbation, cfg: RRConfig, basis=BOX, extrapolate: bool = False) -> float:
    """Ritz values plus tail; optionally removes the 1/basis_size error by Richardson.

    Delta impurities converge like 1/N in a smooth basis, so with
    ``extrapolate`` the result is 2 Z(N) - Z(N/2) (each with its own N/4
    kept levels).
    """
    def one(c):
        ev = assemble_and_solve(basis, perturbation, c)
        return numeric_sum_rule(s, ev, c.tail_model, c, perturbation, basis).value

    full = one(cfg)
    if not extrapolate:
        return full
    half = RRConfig(cfg.basis_size // 2, None if cfg.kept_levels is None else cfg.kept_levels // 2,
                    cfg.tail_model)
    return 2 * full - one(half)


@dataclass(frozen=True)
class FitResult:
    powers: tuple
    coefficients: np.ndarray
    stderr: np.ndarray
    rms_residual: float

    def coefficient(self, power: int) -> float:
        return float(self.coefficients[self.powers.index(power)])

    def error(self, power: int) -> float:
        return float(self.stderr[self.powers.index(power)])


def fit_coupling_dependence(samples, even_only: bool = False, degree: int = 8) -> FitResult:
    """Least-squares polynomial in rho (or in rho^2 when ``even_only``) with standard errors."""
    data = np.asarray(samples, dtype=float)
    rho, z = data[:, 0], data[:, 1]
    powers = tuple(range(0, degree + 1, 2 if even_only else 1))
    if len(rho) < len(powers):
        raise SumRuleError(f"{len(rho)} samples cannot fix {len(powers)} coefficients")
    design = np.stack([rho**p for p in powers], axis=1)
    coef, _, rank, sv = np.linalg.lstsq(design, z, rcond=None)
    if rank < len(powers):
        raise SumRuleError(f"rank-deficient fit (rank {rank} < {len(powers)} unknowns)")
    resid = z - design @ coef
    dof = max(len(z) - len(powers), 1)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.pinv(design.T @ design)
    return FitResult(powers, coef, np.sqrt(np.abs(np.diag(cov))), math.sqrt(float(resid @ resid) / len(z)))


def linear_ground_state_airy(rho: float) -> float:
    """Exact lowest level of -1/2 psi'' + rho y psi on [-1/2, 1/2] from Airy functions.

    psi = Ai(z) Bi(z-) - Bi(z) Ai(z-), z = (2 rho)^(1/3) (y - E / rho); the
    level lies within |rho| / 2 of pi^2 / 2 since |rho y| <= |rho| / 2, so the
    first sign change on that window is the ground state.
    """
    if rho == 0:
        return np.pi**2 / 2
    c = np.cbrt(2 * rho)

    def cond(e):
        zm, zp = c * (-0.5 - e / rho), c * (0.5 - e / rho)
        am, _, bm, _ = special.airy(zm)
        ap, _, bp, _ = special.airy(zp)
        return am * bp - ap * bm

    e0 = np.pi**2 / 2
    grid = np.linspace(e0 - abs(rho) / 2 - 1e-9, e0 + abs(rho) / 2 + 1e-9, 401)
    vals = np.array([cond(e) for e in grid])
    hit = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]
    if hit.size == 0:
        raise SumRuleError(f"no Airy root found for rho = {rho}")
    i = hit[0]
    return brentq(cond, grid[i], grid[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps)
