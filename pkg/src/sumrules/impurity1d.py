"""Unit box with one or two Dirac delta impurities: exact results.

Dimensionless problem: [-1/2 d^2/dy^2 + rho delta(y - abar) (+ mu delta(y - bbar))] phi = E phi
on y in [-1/2, 1/2] with Dirichlet ends.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .core import (
    BracketError,
    PoleError,
    SumRuleError,
    accurate_sum,
    as_order,
    completed_series,
    riemann_zeta,
)

PI = np.pi
_TINY = 1e-14


@dataclass(frozen=True)
class SingleImpurity:
    rho: float
    abar: float = 0.0

    def __post_init__(self):
        if abs(self.abar) > 0.5:
            raise SumRuleError(f"|abar| = {abs(self.abar)} > 1/2 puts the impurity outside the box")


@dataclass(frozen=True)
class DoubleImpurity:
    rho: float
    mu: float
    abar: float
    bbar: float

    def __post_init__(self):
        if abs(self.abar) > 0.5 or abs(self.bbar) > 0.5:
            raise SumRuleError("impurity positions must satisfy |abar|, |bbar| <= 1/2")


@dataclass(frozen=True)
class SpectrumApproximation:
    """Solved low levels plus the data needed to continue them asymptotically.

    ``levels`` are the level indices (1-based) of ``roots``.  When
    ``symmetric_only`` is set (centred impurity), only the odd-index levels
    were solved and the even-index ones are the unshifted n^2 pi^2 / 2.
    """

    roots: np.ndarray
    levels: np.ndarray
    asymptotic_order: int
    tail_start: int
    symmetric_only: bool = False


# --------------------------------------------------------------------------
# Green's functions and closed forms


def green0_box(xbar, ybar):
    """G0 of -1/2 d^2/dy^2 on the unit box, 2 (x_< + 1/2)(1/2 - x_>)."""
    x = np.asarray(xbar, dtype=float)
    y = np.asarray(ybar, dtype=float)
    lo = np.minimum(x, y) + 0.5
    hi = np.maximum(x, y) + 0.5
    out = 2.0 * lo * (1.0 - hi)
    return float(out) if out.ndim == 0 else out


def _single_denominator(cfg):
    return 1.0 + cfg.rho * green0_box(cfg.abar, cfg.abar)


def green_single_delta(xbar, ybar, cfg: SingleImpurity):
    den = _single_denominator(cfg)
    if abs(den) < _TINY:
        raise PoleError(f"rho = {cfg.rho} is the critical coupling for abar = {cfg.abar}", cfg.rho)
    a = cfg.abar
    return green0_box(xbar, ybar) - cfg.rho * green0_box(xbar, a) * green0_box(a, ybar) / den


def critical_coupling(abar: float) -> float:
    """Coupling at which a zero-energy bound state appears, -2 / (1 - 4 abar^2)."""
    if abs(abar) >= 0.5:
        raise SumRuleError("impurity on the border of the box has no effect: no critical coupling")
    return -2.0 / (1.0 - 4.0 * abar * abar)


def zero_coupling(abar: float) -> float:
    """Coupling at which Zbar(1) vanishes, -4 / (1 - 16 abar^4)."""
    if abs(abar) >= 0.5:
        raise SumRuleError("impurity on the border of the box has no effect: Zbar(1) has no zero")
    return -4.0 / (1.0 - 16.0 * abar**4)


def sum_rule_exact(order: int, cfg: SingleImpurity) -> float:
    """Closed-form Zbar(order) for order 1..4."""
    r, a = cfg.rho, cfg.abar
    den = 2.0 + r - 4.0 * r * a * a
    if abs(den) < _TINY * (1 + abs(r)):
        raise PoleError(f"Zbar({order}) has a pole at rho = {r}, abar = {a}", r)
    a2 = a * a
    if order == 1:
        return (4.0 + r - 16.0 * r * a2 * a2) / (6.0 * den)
    if order == 2:
        num = (32.0 + r * r * (1 + 16 * a2 - 160 * a2**2 + 256 * a2**3 + 256 * a2**4)
               + r * (8 + 16 * a2 * (6 - 40 * a2 + 32 * a2**2)))
        return num / (180.0 * den**2)
    if order == 3:
        num = (256.0
               + r * (78 + 1440 * a2 - 9408 * a2**2 + 10752 * a2**3 - 4608 * a2**4)
               + r**2 * (12 + 480 * a2 - 3456 * a2**2 + 27648 * a2**4 - 24576 * a2**5)
               + r**3 * (1 + 48 * a2 - 432 * a2**2 + 6912 * a2**4 - 12288 * a2**5 - 4096 * a2**6))
        return num / (3780.0 * den**3)
    if order == 4:
        q = 4 * a2 - 1
        num = (6144.0
               + 64 * r * (37 + 756 * a2 - 4960 * a2**2 + 6272 * a2**3 - 3840 * a2**4 + 1024 * a2**5)
               + 16 * r**2 * q**2 * (27 + 1600 * a2 + 4704 * a2**2 - 10752 * a2**3 + 5888 * a2**4)
               + 48 * r**3 * q**3 * (-1 - 96 * a2 - 672 * a2**2 + 768 * a2**4)
               + 3 * r**4 * q**4 * (1 + 112 * a2 + 1120 * a2**2 + 1792 * a2**3 + 256 * a2**4))
        return num / (226800.0 * den**4)
    raise ValueError("closed forms exist for orders 1, 2, 3, 4")


# --------------------------------------------------------------------------
# transcendental spectrum


def eigen_lhs(energy, cfg: SingleImpurity):
    """Left-hand side of the eigenvalue condition as a function of E (E < 0 allowed)."""
    e = np.asarray(energy, dtype=complex)
    k = np.sqrt(2.0 * e)
    k = np.where(k == 0, 1e-300, k)
    val = cfg.rho * (np.cos(2 * cfg.abar * k) - np.cos(k)) / k**2 + np.sin(k) / k
    out = val.real
    return float(out) if out.ndim == 0 else out


def _secular(k, rho, a):
    # k^2 * eigen_lhs: rho (cos 2ak - cos k) + k sin k
    return rho * (math.cos(2 * a * k) - math.cos(k)) + k * math.sin(k)


def _symmetric_secular(k, rho):
    # centred impurity, even states: rho sin(k/2) + k cos(k/2)
    return rho * math.sin(k / 2) + k * math.cos(k / 2)


def _bound_state(rho, a, xtol):
    # E = -kappa^2/2: rho (cosh 2 a kappa - cosh kappa) - kappa sinh kappa, divided by kappa^2
    def h(kap):
        if kap < 1e-4:
            return -(1.0 + rho * (1 - 4 * a * a) / 2) + 0.0 * kap
        return (rho * (math.cosh(2 * a * kap) - math.cosh(kap)) - kap * math.sinh(kap)) / kap**2

    hi = 2.0 * abs(rho) + 2.0
    lo = 1e-3
    if h(lo) * h(hi) > 0:
        lo = 1e-6
        if h(lo) * h(hi) > 0:
            raise BracketError("no sign change while isolating the bound state", (lo, hi))
    kap = brentq(h, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)
    return -kap * kap / 2


def _root_in(f, lo, hi, closed, xtol):
    """Root of f in an interval that is closed at ``closed`` ('lo' or 'hi') and open at the other end."""
    scale = 1.0 + abs(lo) + abs(hi)
    c_pt, o_pt = (lo, hi) if closed == "lo" else (hi, lo)
    fc = f(c_pt)
    if abs(fc) <= 1e-12 * scale:
        return c_pt
    fo = f(o_pt)
    if abs(fo) <= 1e-12 * scale:
        o_pt = o_pt + (c_pt - o_pt) * 1e-9
        fo = f(o_pt)
    if fc * fo > 0:
        raise BracketError(f"no sign change of the eigenvalue condition on k in [{lo}, {hi}]", (lo, hi))
    a, b = sorted((c_pt, o_pt))
    return brentq(f, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)


def solve_spectrum(cfg: SingleImpurity, count: int, precision: float = 1e-13,
                   symmetric_only: bool = False) -> SpectrumApproximation:
    """Lowest ``count`` eigenvalues from the transcendental condition.

    Roots are isolated between consecutive unperturbed levels (interlacing
    for a rank-one perturbation); a level below zero appears when rho is
    below the critical coupling.  For a centred impurity the antisymmetric
    levels (2m)^2 pi^2 / 2 are inserted exactly and the symmetric ones are
    solved from rho sin(k/2) + k cos(k/2) = 0; ``symmetric_only`` returns
    the odd-index levels alone.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rho, a = float(cfg.rho), float(cfg.abar)
    xtol = precision
    rho_c = critical_coupling(a) if abs(a) < 0.5 else -math.inf

    def lowest_nonpositive():
        if rho == rho_c:
            return 0.0
        return _bound_state(rho, a, xtol)

    roots, levels = [], []
    if rho == 0.0 or abs(a) == 0.5:
        n = np.arange(1, count + 1) if not symmetric_only else np.arange(1, 2 * count, 2)
        return SpectrumApproximation(n**2 * PI**2 / 2, n, 3, int(n[-1]), symmetric_only)

    if a == 0.0:
        f = lambda k: _symmetric_secular(k, rho)
        m = 1
        while len(roots) < count:
            n = 2 * m - 1
            if rho > 0:
                k = _root_in(f, (2 * m - 1) * PI, 2 * m * PI, "lo", xtol)
                e = k * k / 2
            elif m == 1 and rho <= rho_c:
                e = lowest_nonpositive()
            else:
                lo = max((2 * m - 2) * PI, 1e-12)
                k = _root_in(f, lo, (2 * m - 1) * PI, "hi", xtol)
                e = k * k / 2
            roots.append(e)
            levels.append(n)
            if not symmetric_only and len(roots) < count:
                roots.append((2 * m) ** 2 * PI**2 / 2)
                levels.append(2 * m)
            m += 1
    else:
        f = lambda k: _secular(k, rho, a)
        for n in range(1, count + 1):
            if rho > 0:
                k = _root_in(f, n * PI, (n + 1) * PI, "lo", xtol)
                e = k * k / 2
            elif n == 1 and rho <= rho_c:
                e = lowest_nonpositive()
            else:
                lo = (n - 1) * PI if n > 1 else 1e-9
                k = _root_in(f, lo, n * PI, "hi", xtol)
                e = k * k / 2
            roots.append(e)
            levels.append(n)
    roots = np.array(roots)
    levels = np.array(levels)
    return SpectrumApproximation(roots, levels, 3, int(levels[-1]), symmetric_only)


def asymptotic_cj(j: int, n, abar: float):
    """Coefficient of rho^j in the large-n expansion of the n-th level."""
    n = np.asarray(n, dtype=float)
    a = abar
    sgn = np.where(np.mod(n, 2) == 0, 1.0, -1.0)  # (-1)^n
    c2a, c4a, c6a = (np.cos(k * n * PI * a) for k in (2, 4, 6))
    s2a, s4a, s6a = (np.sin(k * n * PI * a) for k in (2, 4, 6))
    npi = n * PI
    if j == 1:
        out = 1.0 - sgn * c2a
    elif j == 2:
        out = (-3 / (4 * npi**2) + sgn * c2a / npi**2 - c4a / (4 * npi**2)
               + 2 * sgn * a * s2a / npi - a * s4a / npi)
    elif j == 3:
        out = (5 / (2 * npi**4) - 1 / (3 * npi**2)
               + sgn * c2a * (-30 + npi**2 * (3 + 20 * a * a)) / (8 * npi**4)
               - c4a * (-3 + 8 * npi**2 * a * a) / (2 * npi**4)
               + sgn * c6a * (-6 + npi**2 * (-1 + 36 * a * a)) / (24 * npi**4)
               - 5 * sgn * a * s2a / npi**3 + 4 * a * s4a / npi**3 - sgn * a * s6a / npi**3)
    else:
        raise ValueError("asymptotic coefficients are available for j = 1, 2, 3")
    return float(out) if out.ndim == 0 else out


def asymptotic_eigenvalue(n, cfg: SingleImpurity, order: int = 3):
    n = np.asarray(n, dtype=float)
    e = n * n * PI**2 / 2
    for j in range(1, order + 1):
        e = e + asymptotic_cj(j, n, cfg.abar) * cfg.rho**j
    return e


def _power(e, s):
    if np.any(np.asarray(e) <= 0) and float(s) != int(s):
        raise SumRuleError("non-integer order with a non-positive eigenvalue")
    return np.asarray(e, dtype=float) ** (-s)


def head_sum(s, spec: SpectrumApproximation) -> float:
    s = as_order(s).value
    if np.any(spec.roots == 0):
        raise PoleError("a zero eigenvalue makes every sum rule diverge")
    return accurate_sum(_power(spec.roots, s))


def tail_completed_sum(s, spec: SpectrumApproximation, cfg: SingleImpurity, *,
                       return_bound: bool = False, direct: int = 50_000):
    """Solved levels plus the asymptotic levels beyond ``spec.tail_start``.

    The asymptotic levels are summed one by one for ``direct`` indices and
    the rest through the Hurwitz zeta of the bare n^2 pi^2 / 2 levels.
    """
    s = as_order(s).value
    if spec.roots.size == 0:
        raise ValueError("no solved roots")
    head = head_sum(s, spec)
    order = spec.asymptotic_order
    term = lambda n: asymptotic_eigenvalue(n, cfg, order) ** (-s)
    if spec.symmetric_only:
        tail, bound = completed_series(term, spec.tail_start + 2, s, step=2, direct=direct)
        tail += (2 * PI**2) ** (-s) * riemann_zeta(2 * s)
    else:
        tail, bound = completed_series(term, spec.tail_start + 1, s, direct=direct)
    total = head + tail
    return (total, bound) if return_bound else total


# --------------------------------------------------------------------------
# shifted Hamiltonian H0 + gamma


def _entire_series(z, a, nterms=40):
    """N(z), D(z), T(z) numerators and their z-derivatives as power series.

    With q^2 = z:  cosh q - cosh 2aq = z N(z),  sinh q / q = D(z),
    (q cosh q - sinh q) / q^3 = P(z).
    """
    k = np.arange(nterms)
    fact2k1 = np.array([math.factorial(2 * i + 1) for i in k], dtype=float)
    fact2k2 = np.array([math.factorial(2 * i + 2) for i in k], dtype=float)
    cn = (1.0 - (2 * a) ** (2 * k + 2)) / fact2k2
    cd = 1.0 / fact2k1
    cp = (2 * k + 2) / np.array([math.factorial(2 * i + 3) for i in k], dtype=float)
    zp = z ** k
    dzp = np.concatenate([[0.0], k[1:] * z ** (k[1:] - 1)])
    return (cn @ zp, cd @ zp, cp @ zp, cn @ dzp, cd @ dzp)


def _shifted_parts(gammabar, a):
    """(trace of G0_gamma, G0_gamma(a,a), d/dgamma G0_gamma(a,a))."""
    z = 2.0 * complex(gammabar)
    if abs(z) <= 16.0:
        n, d, p, dn, dd = _entire_series(z, a)
        trace = p / d
        g = n / d
        dg = 2.0 * (dn * d - n * dd) / d**2
        return trace, g, dg
    q = np.sqrt(z)
    sh, ch = np.sinh(q), np.cosh(q)
    trace = (q * ch / sh - 1.0) / z
    num = ch - np.cosh(2 * a * q)
    den = q * sh
    dnum = sh - 2 * a * np.sinh(2 * a * q)
    dden = sh + q * ch
    g = num / den
    dg = (dnum * den - num * dden) / den**2 / q  # d/dgamma = (1/q) d/dq
    return trace, g, dg


def shifted_sum_rule(gammabar: float, cfg: SingleImpurity) -> float:
    """sum_n 1 / (E_n + gammabar) in closed form.

    Built from the Green's function of H0 + gammabar: its trace
    (q coth q - 1)/q^2 with q^2 = 2 gammabar, and the impurity correction
    rho * dG(a,a)/dgamma / (1 + rho G(a,a)), using
    int G(x,a) G(a,x) dx = -dG(a,a)/dgamma.  Negative gammabar is the
    analytic continuation; it has poles at -E_n.
    """
    trace, g, dg = _shifted_parts(gammabar, cfg.abar)
    den = 1.0 + cfg.rho * g
    if abs(den) < 1e-13 or not np.isfinite(abs(trace)):
        raise PoleError(f"gammabar = {gammabar} sits on a pole (an eigenvalue at -gammabar)", gammabar)
    out = trace + cfg.rho * dg / den
    if not np.isfinite(abs(out)):
        raise PoleError(f"gammabar = {gammabar} sits on a pole", gammabar)
    return float(out.real)


_CENTRAL = {
    1: ([1, -1], [1, -1], 2),            # (f(h) - f(-h)) / 2h
    2: ([1, 0, -1], [1, -2, 1], 1),      # (f(h) - 2 f(0) + f(-h)) / h^2
    3: ([2, 1, -1, -2], [1, -2, 2, -1], 2),
}


def _central_derivative(f, order, h):
    nodes, weights, div = _CENTRAL[order]
    return sum(w * f(m * h) for m, w in zip(nodes, weights)) / (div * h**order)


def derivative_sum_rules(j: int, cfg: SingleImpurity, h: float | None = None, levels: int = 4) -> float:
    """Zbar(j) = (-1)^(j-1)/(j-1)! d^(j-1)/dgamma^(j-1) Zbar_gamma(1) at gamma = 0.

    Central differences with ``levels``-fold Richardson extrapolation.  The
    base step defaults to a tenth of the distance to the nearest pole, the
    smallest |E_n| (capped at 0.1), which keeps both the O(h^8) truncation and the
    eps/h^(j-1) rounding below 1e-9 relative.
    """
    if j not in (2, 3, 4):
        raise ValueError("derivative trick implemented for j = 2, 3, 4")
    f = lambda g: shifted_sum_rule(g, cfg)
    k = j - 1
    if h is None:
        radius = float(np.min(np.abs(solve_spectrum(cfg, 2).roots)))
        if radius == 0.0:
            raise PoleError("zero eigenvalue: every Zbar(j) diverges", cfg.rho)
        h = 0.1 * min(radius, 1.0)
    table = [_central_derivative(f, k, h / 2**i) for i in range(levels)]
    for m in range(1, levels):
        fac = 4.0**m
        table = [(fac * table[i + 1] - table[i]) / (fac - 1) for i in range(len(table) - 1)]
    return (-1) ** k / math.factorial(k) * table[0]


# --------------------------------------------------------------------------
# two impurities


def _double_matrix(cfg: DoubleImpurity):
    a, b = cfg.abar, cfg.bbar
    return np.array([[1 + cfg.rho * green0_box(a, a), cfg.rho * green0_box(a, b)],
                     [cfg.mu * green0_box(b, a), 1 + cfg.mu * green0_box(b, b)]])


def green_double_delta(xbar, ybar, cfg: DoubleImpurity):
    """G0 - [G0(x,a), G0(x,b)] M^-1 [rho G0(a,y), mu G0(b,y)]^T."""
    if cfg.abar == cfg.bbar:
        return green_single_delta(xbar, ybar, SingleImpurity(cfg.rho + cfg.mu, cfg.abar))
    m = _double_matrix(cfg)
    det = np.linalg.det(m)
    if abs(det) < _TINY:
        raise PoleError(f"(rho, mu) = ({cfg.rho}, {cfg.mu}) is a critical coupling pair", (cfg.rho, cfg.mu))
    a, b = cfg.abar, cfg.bbar
    rhs = np.array([cfg.rho * green0_box(a, ybar), cfg.mu * green0_box(b, ybar)])
    coef = np.linalg.solve(m, rhs)
    return green0_box(xbar, ybar) - green0_box(xbar, a) * coef[0] - green0_box(xbar, b) * coef[1]


def _double_numerator(a, b, r, m):
    return (4 + r * (1 - 16 * a**4) + m * (1 - 16 * b**4)
            - 2 * m * r * (-1 + 2 * a) * (a - b) * (1 + 2 * b)
            * (1 + 4 * (a * a + b * b - a * b) + 2 * (b - a)))


def _double_denominator(a, b, r, m):
    return (12 + 6 * r * (1 - 4 * a * a) + 6 * m * (1 - 4 * b * b)
            - 12 * m * r * (-1 + 2 * a) * (a - b) * (1 + 2 * b))


def sum_rule_double_Z1(cfg: DoubleImpurity) -> float:
    if cfg.abar == cfg.bbar:
        return sum_rule_exact(1, SingleImpurity(cfg.rho + cfg.mu, cfg.abar))
    if cfg.abar > cfg.bbar:
        args, branch = (cfg.abar, cfg.bbar, cfg.rho, cfg.mu), "abar > bbar"
    else:
        args, branch = (cfg.bbar, cfg.abar, cfg.mu, cfg.rho), "bbar > abar"
    den = _double_denominator(*args)
    if abs(den) < _TINY * 12:
        raise PoleError(f"Zbar(1) pole on the {branch} branch at (rho, mu) = ({cfg.rho}, {cfg.mu})",
                        (cfg.rho, cfg.mu))
    return _double_numerator(*args) / den


def double_critical_couplings(abar: float, bbar: float, ratio: float) -> np.ndarray:
    """Real rho with mu = ratio * rho at which Zbar(1) of two impurities has a pole."""
    if abar == bbar:
        total = 1.0 + ratio
        return np.array([critical_coupling(abar) / total]) if total != 0 else np.array([])
    a, b, t = (abar, bbar, ratio) if abar > bbar else (bbar, abar, 1.0 / ratio if ratio else 0.0)
    if abar < bbar and ratio == 0:
        # only the impurity at abar is active
        return np.array([critical_coupling(abar)])
    # D(rho) = 12 + rho * c1 + rho^2 * c2 along the ray
    c1 = 6 * (1 - 4 * a * a) + 6 * t * (1 - 4 * b * b)
    c2 = -12 * t * (-1 + 2 * a) * (a - b) * (1 + 2 * b)
    roots = np.roots([c2, c1, 12.0]) if c2 != 0 else np.array([-12.0 / c1])
    roots = np.sort(roots[np.isreal(roots)].real)
    if abar < bbar:
        roots = roots * t  # the ray was parametrised by mu
    polished = []
    for r0 in roots:
        r = r0
        for _ in range(3):
            d = _double_denominator(abar, bbar, r, ratio * r) if abar > bbar else \
                _double_denominator(bbar, abar, ratio * r, r)
            dd = (c1 + 2 * c2 * (r / (t if abar < bbar else 1.0))) / (t if abar < bbar else 1.0)
            if dd == 0:
                break
            r -= d / dd
        polished.append(r)
    return np.sort(np.array(polished))
