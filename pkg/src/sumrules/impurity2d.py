"""Unit disk with an impurity smeared on the ring r = r0.

Dimensionless operator -Delta + rho delta(r - r0) / (2 pi r) with Dirichlet
boundary at r = 1.  Everything is decomposed in partial waves
G = sum_{n>=0} g_n(r, r') cos(n (theta - theta')).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .core import PoleError, SumRuleError

PI = np.pi


class ExtrapolationError(SumRuleError):
    def __init__(self, msg, table=None):
        self.table = table
        super().__init__(msg)


@dataclass(frozen=True)
class RingImpurity:
    rho: float
    r0: float

    def __post_init__(self):
        if not 0.0 < self.r0 < 1.0:
            raise SumRuleError(f"ring radius r0 = {self.r0} must lie in (0, 1)")


@dataclass(frozen=True)
class PartialWave:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("angular momentum must be >= 0")

    @property
    def weight(self) -> float:
        return 2.0 if self.n == 0 else 1.0


def _weight(n):
    return 2.0 if n == 0 else 1.0


# --------------------------------------------------------------------------
# partial-wave Green's functions


def _g0_zero_energy(n, r_lo, r_hi):
    if n == 0:
        return -np.log(r_hi) / (2 * PI)
    return ((r_lo / r_hi) ** n - (r_lo * r_hi) ** n) / (2 * n * PI)


def g0_partial(n: int, rbar, rbar_prime, gammabar: float = 0.0):
    """Radial Green's function of -Delta - gammabar in the n-th wave.

    |gammabar| < 1e-13 uses the closed zero-energy form; otherwise Bessel J_n, Y_n
    with k = sqrt(gammabar), complex for gammabar < 0 (the combination is
    entire in gammabar, so the imaginary part is rounding only).
    """
    r = np.asarray(rbar, dtype=float)
    rp = np.asarray(rbar_prime, dtype=float)
    lo, hi = np.minimum(r, rp), np.maximum(r, rp)
    if abs(gammabar) < 1e-13:
        # the O(gammabar) correction is below rounding; Y_n(sqrt gammabar) would overflow
        out = _g0_zero_energy(n, lo, hi)
        return float(out) if np.ndim(out) == 0 else out
    if gammabar > 0.0:
        _check_resonance(n, gammabar)
    k = np.sqrt(complex(gammabar))
    jk = special.jv(n, k)
    pref = -0.25 if n == 0 else -0.5
    # J_n(k) can be tiny without being near a zero (small k, large n), so it
    # only ever enters through the ratio J_n(k r_>) / J_n(k)
    val = pref * (special.jv(n, k * lo) * special.yv(n, k * hi)
                  - special.yv(n, k) * special.jv(n, k * lo) * (special.jv(n, k * hi) / jk))
    out = np.real(val)
    return float(out) if np.ndim(out) == 0 else out


@lru_cache(maxsize=256)
def _bessel_zeros(n, count):
    return special.jn_zeros(n, count)


def _check_resonance(n, gammabar, rel=1e-12):
    """PoleError if sqrt(gammabar) sits on a zero of J_n (a Dirichlet level of the disk)."""
    k = math.sqrt(gammabar)
    count = 4
    while True:
        zeros = _bessel_zeros(n, count)
        if zeros[-1] > k or count > 10_000:
            break
        count *= 2
    if np.min(np.abs(zeros - k)) <= rel * k:
        raise PoleError(f"gammabar = {gammabar} is a Dirichlet eigenvalue of wave n = {n}", gammabar)


def _coupling_factor(n, cfg, gammabar=0.0):
    """c = (rho w / 2) / (1 + (rho w / 2) g_n(r0, r0))."""
    half = cfg.rho * _weight(n) / 2
    den = 1.0 + half * g0_partial(n, cfg.r0, cfg.r0, gammabar)
    if abs(den) < 1e-14:
        raise PoleError(f"rho = {cfg.rho} is the critical coupling of wave n = {n}", cfg.rho)
    return half / den


def g_tilde(n: int, rbar, rbar_prime, gammabar: float, cfg: RingImpurity):
    c = _coupling_factor(n, cfg, gammabar)
    return (g0_partial(n, rbar, rbar_prime, gammabar)
            - c * g0_partial(n, rbar, cfg.r0, gammabar) * g0_partial(n, cfg.r0, rbar_prime, gammabar))


# --------------------------------------------------------------------------
# order-two sum rule per partial wave


def critical_coupling_2d(j: int, r0: float) -> float:
    """Coupling at which wave j acquires a zero-energy state.

    j = 0: 2 pi / ln r0.  j >= 1: -4 pi j / (1 - r0^(2j)), the root of
    rho (r0^(2j) - 1) - 4 pi j; both are negative (attractive rings).
    """
    if not 0.0 < r0 < 1.0:
        raise SumRuleError("r0 must lie in (0, 1)")
    if j == 0:
        return 2 * PI / math.log(r0)
    return -4 * PI * j / (1.0 - r0 ** (2 * j))


def _check_pole(n, cfg):
    rc = critical_coupling_2d(n, cfg.r0)
    if abs(cfg.rho - rc) < 1e-12 * max(1.0, abs(rc)):
        raise PoleError(f"z_{n}(2) has a double pole at rho = {rc}", rc)


def _z2_low_waves(n, rho, r0):
    lr = math.log(r0)
    if n == 0:
        num = (4 * rho**2 * (r0**2 - 1) ** 2 - 2 * PI * rho * (11 * r0**4 - 16 * r0**2 + 5)
               + rho * lr * (5 * rho + r0**4 * (-5 * rho + 4 * rho * lr + 24 * PI) + 2 * rho * lr - 8 * PI)
               + 8 * PI**2)
        return num / (64 * (rho * lr - 2 * PI) ** 2)
    if n == 1:
        num = ((rho + 4 * PI) ** 2 - 16 * rho * (rho + 4 * PI) * r0**2
               + rho * r0**4 * (31 * rho + 2 * r0**2 * (-9 * rho + rho * r0**2 + 20 * PI)
                                + 48 * lr * (rho * lr - 4 * PI) + 16 * PI))
        return num / (96 * (rho - rho * r0**2 + 4 * PI) ** 2)
    if n == 2:
        num = ((rho + 8 * PI) ** 2
               + rho * r0**4 * (64 * (rho + 6 * PI) + 2 * rho * r0**8 - 128 * (rho + 4 * PI) * r0**2
                                + r0**4 * (61 * rho - 72 * rho * lr + 112 * PI) + 72 * (rho + 8 * PI) * lr))
        return num / (288 * (rho - rho * r0**4 + 8 * PI) ** 2)
    raise ValueError(n)


def _abc_general(n, r0):
    """Zero-energy moments for n >= 3.

    A = int int g(r,s)^2 r s, B = int int g(r,s) f(r) f(s) r s, C = int f^2 r
    with f = g(., r0).  Closed forms from symbolic integration of the
    polynomial kernels.
    """
    p = r0 ** (2 * n)
    q = r0 * r0
    a = 1.0 / (16 * PI**2 * (n + 1) ** 2 * (n + 2))
    c = (n * q * p - n * p - q * p + q) / (4 * PI**2 * n * (n - 1) * (n + 1))
    b = -(2 * n**3 * q * q * p - 4 * n**3 * q * p + 2 * n**3 * p - 3 * n**2 * q * q * p + 3 * n**2 * p
          - 5 * n * q * q * p - 6 * n * q * q + 16 * n * q * p - 5 * n * p + 6 * q * q * p - 6 * q * q)
    b /= 32 * PI**3 * n * (n - 2) * (n - 1) * (n + 1) ** 2 * (n + 2)
    return a, b, c


def z2_partial_closed(n: int, cfg: RingImpurity) -> float:
    """z_n(2) in closed form.

    n <= 2 are explicit rational/log expressions; n >= 3 use
    2 pi^2 w (A - 2 c B + c^2 C^2), the trace of d g~_n / d gammabar.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    _check_pole(n, cfg)
    if n <= 2:
        return _z2_low_waves(n, cfg.rho, cfg.r0)
    a, b, cc = _abc_general(n, cfg.r0)
    c = _coupling_factor(n, cfg)
    return 2 * PI**2 * (a - 2 * c * b + c * c * cc * cc)


def _radial_trace(n, gammabar, cfg, epsrel):
    f = lambda r: r * g_tilde(n, r, r, gammabar, cfg)
    opts = dict(epsabs=0.0, epsrel=epsrel, limit=200)
    left = integrate.quad(f, 0.0, cfg.r0, **opts)[0]
    right = integrate.quad(f, cfg.r0, 1.0, **opts)[0]
    return 2 * PI * (left + right)


def z2_partial_numeric(n: int, cfg: RingImpurity, h: float | None = None, levels: int = 5,
                       epsrel: float = 1e-13) -> float:
    """z_n(2) as d/dgammabar of 2 pi int g~_n(r, r; gammabar) r dr at 0.

    Central differences at h, h/2, ... with Richardson extrapolation.  The
    default base step is a fifth of the distance to the nearest singularity
    in gammabar (the lowest |eigenvalue| of the wave, bracketed by the
    zero-energy denominator), capped at 0.2.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    _check_pole(n, cfg)
    if h is None:
        h = 0.2 * min(1.0, _lowest_level_estimate(n, cfg))
    f = lambda g: _radial_trace(n, g, cfg, epsrel)
    table = [(f(hh) - f(-hh)) / (2 * hh) for hh in (h / 2**i for i in range(levels))]
    rows = [table]
    for m in range(1, levels):
        fac = 4.0**m
        table = [(fac * table[i + 1] - table[i]) / (fac - 1) for i in range(len(table) - 1)]
        rows.append(table)
    est = table[0]
    prev = rows[-2]
    spread = max(abs(x - est) for x in prev)
    if not np.isfinite(est) or spread > 1e-6 * max(abs(est), 1e-300):
        raise ExtrapolationError(f"Richardson table for wave n={n} did not settle (spread {spread:g})", rows)
    return float(est)


def _lowest_level_estimate(n, cfg):
    """Distance from 0 to the nearest eigenvalue of wave n, from the secular equation in gammabar."""
    from scipy.optimize import brentq

    def den(g):
        return 1.0 + cfg.rho * _weight(n) / 2 * g0_partial(n, cfg.r0, cfg.r0, g)

    j1 = special.jn_zeros(n, 1)[0] ** 2
    # the denominator changes sign between the pole-free points 0 and the first free level
    # for repulsive rings; attractive rings may push a level below zero
    grid = np.concatenate([-np.geomspace(50.0, 1e-3, 40), np.linspace(1e-3, j1 * 0.999, 40)])
    vals = np.array([den(g) for g in grid])
    best = j1
    for i in range(len(grid) - 1):
        if vals[i] * vals[i + 1] < 0:
            root = brentq(den, grid[i], grid[i + 1])
            best = min(best, abs(root))
    return best


def denominator_root(n: int, r0: float, gammas=(1e-3, 5e-4, 2.5e-4, 1.25e-4)) -> float:
    """Coupling at which 1 + (rho w/2) g_n(r0, r0; gammabar) vanishes, extrapolated to gammabar -> 0."""
    vals = [-2.0 / (_weight(n) * g0_partial(n, r0, r0, g)) for g in gammas]
    # linear Richardson on halving steps (the root is analytic in gammabar)
    table = vals
    for m in range(1, len(vals)):
        fac = 2.0**m
        table = [(fac * table[i + 1] - table[i]) / (fac - 1) for i in range(len(table) - 1)]
    return float(table[0])


@dataclass(frozen=True)
class Z2Total:
    value: float
    tail: float
    tail_bound: float
    nmax: int
    terms: tuple


def unperturbed_tail(nmax: int) -> float:
    """sum_{n > nmax} 1 / (8 (n+1)^2 (n+2))."""
    m = nmax + 2
    return (float(special.polygamma(1, m)) - 1.0 / m) / 8


def z2_total(cfg: RingImpurity, nmax: int = 200) -> Z2Total:
    """Sum of z_n(2) through nmax plus the unperturbed tail.

    The coupling-dependent part of z_n(2) falls off like n^-5, so the bound
    continues that power law from the last retained wave and doubles it:
    2 |delta_N| N / 4.
    """
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    terms = [z2_partial_closed(n, cfg) for n in range(nmax + 1)]
    tail = unperturbed_tail(nmax)
    if nmax >= 3:
        delta = abs(terms[-1] - 1.0 / (8 * (nmax + 1) ** 2 * (nmax + 2)))
        bound = 2 * delta * nmax / 4 + 1e-16 * abs(tail)
    else:
        bound = abs(tail)
    value = math.fsum(terms) + tail
    return Z2Total(value, tail, bound, nmax, tuple(terms))


def unit_disk_z2() -> float:
    return PI**2 / 48 - 5.0 / 32


def verify_zero_mode(m: int, r0: float, rho: float | None = None, npts: int = 2001) -> float:
    """Largest residual of the zero-energy radial equation for the explicit mode Psi_m.

    Checks, at the given coupling (default the critical one): the interior
    equation Psi'' + Psi'/r - m^2 Psi / r^2 = 0 on a grid with analytic
    derivatives, the Dirichlet condition Psi(1) = 0, and the ring matching
    -r0 [Psi'] + rho Psi(r0) / (2 pi) = 0, the last one relative to the
    size of its two terms.
    """
    if rho is None:
        rho = critical_coupling_2d(m, r0)
    r = np.linspace(1e-3, 1.0, npts)
    inside = r < r0
    if m == 0:
        psi = np.where(inside, -math.log(r0), -np.log(r))
        d1 = np.where(inside, 0.0, -1.0 / r)
        d2 = np.where(inside, 0.0, 1.0 / r**2)
        psi_r0, jump = -math.log(r0), -1.0 / r0
    else:
        inner = 0.5 * (1.0 - r0 ** (-2 * m))
        psi = np.where(inside, inner * r**m, 0.5 * (r**m - r ** (-m)))
        d1 = np.where(inside, inner * m * r ** (m - 1), 0.5 * m * (r ** (m - 1) + r ** (-m - 1)))
        d2 = np.where(inside, inner * m * (m - 1) * r ** (m - 2),
                      0.5 * (m * (m - 1) * r ** (m - 2) - m * (m + 1) * r ** (-m - 2)))
        psi_r0 = inner * r0**m
        jump = 0.5 * m * (r0 ** (m - 1) + r0 ** (-m - 1)) - inner * m * r0 ** (m - 1)
    scale = np.max(np.abs(psi))
    interior = np.max(np.abs(d2 + d1 / r - m * m * psi / r**2) * r**2) / scale
    boundary = abs(psi[-1]) / scale
    t1, t2 = -r0 * jump, rho * psi_r0 / (2 * PI)
    matching = abs(t1 + t2) / max(abs(t1), abs(t2))
    return float(max(interior, boundary, matching))


# --------------------------------------------------------------------------
# first-order cross-check in the disk eigenbasis


def disk_first_order_z2(n: int, r0: float, nzeros: int = 400) -> float:
    """d z_n(2) / d rho at rho = 0 from first-order perturbation theory in the disk basis.

    Eigenpairs of -Delta: E = j_{nk}^2, with ring matrix elements
    <V> = (rho / 2 pi) * 2 J_n(j r0)^2 / J_{n+1}(j)^2, each level counted
    twice for n >= 1 (cos and sin).  Z^(1)(2) = -2 sum <V> / E^3.
    """
    j = special.jn_zeros(n, nzeros)
    v = (1.0 / (2 * PI)) * 2 * special.jv(n, j * r0) ** 2 / special.jv(n + 1, j) ** 2
    deg = 1.0 if n == 0 else 2.0
    return float(-2 * deg * math.fsum(v / j**6))


def z2_linear_response(n: int, r0: float) -> float:
    """d z_n(2) / d rho at rho = 0 from the exact partial-wave result, -2 pi^2 w^2 B."""
    if n >= 3:
        _, b, _ = _abc_general(n, r0)
    else:
        # B by quadrature of the zero-energy kernels
        f = lambda r: _g0_zero_energy(n, min(r, r0), max(r, r0))
        inner = lambda s: integrate.quad(
            lambda r: _g0_zero_energy(n, min(r, s), max(r, s)) * f(r) * r, 0, 1,
            points=[s, r0], epsabs=0, epsrel=1e-13, limit=200)[0]
        b = integrate.quad(lambda s: inner(s) * f(s) * s, 0, 1, points=[r0], epsabs=0, epsrel=1e-12,
                           limit=200)[0]
    w = _weight(n)
    return -2 * PI**2 * w * w * b
