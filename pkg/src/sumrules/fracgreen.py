"""Order-by-order coefficients of the Green's function and of its N-th root.

``Q`` is the expansion of G = (H0 + lam V)^-1 in the unperturbed basis,
``q`` the expansion of the kernel whose N-fold product reproduces G.  All
matrices live on the basis truncated at ``cutoff``; matrix row/column k
corresponds to quantum number ``basis.indices(cutoff)[k]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GreenCoefficients:
    order: int
    N: int
    matrix: np.ndarray
    first_index: int = 1

    @property
    def basis_cutoff(self) -> int:
        return self.matrix.shape[0]

    def entries(self, a: int, b: int) -> float:
        return float(self.matrix[a - self.first_index, b - self.first_index])


def _frac_pow(eps, p):
    return np.exp(p * np.log(eps))


def eta_coeff(N: int, eps_n, eps_m):
    """sum_{j=0}^{N-1} eps_n^(-j/N) eps_m^(-(N-1-j)/N)."""
    eps_n = np.asarray(eps_n, dtype=float)
    eps_m = np.asarray(eps_m, dtype=float)
    out = np.zeros(np.broadcast(eps_n, eps_m).shape)
    for j in range(N):
        out = out + _frac_pow(eps_n, -j / N) * _frac_pow(eps_m, -(N - 1 - j) / N)
    return out if out.ndim else float(out)


def xi_coeff(N: int, eps_n, eps_r, eps_m):
    """sum_{j=0}^{N-2} sum_{l=0}^{N-2-j} eps_n^(-j/N) eps_r^(-l/N) eps_m^(-(N-2-l-j)/N)."""
    if N < 2:
        raise ValueError("xi is defined for N >= 2")
    eps_n, eps_r, eps_m = (np.asarray(e, dtype=float) for e in (eps_n, eps_r, eps_m))
    out = np.zeros(np.broadcast(eps_n, eps_r, eps_m).shape)
    for j in range(N - 1):
        for l in range(N - 1 - j):
            out = out + (_frac_pow(eps_n, -j / N) * _frac_pow(eps_r, -l / N)
                         * _frac_pow(eps_m, -(N - 2 - l - j) / N))
    return out if out.ndim else float(out)


def _setup(basis, potential, cutoff):
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    return basis.eigenvalues(cutoff), potential.matrix(basis, cutoff)


def q_order_Q(j: int, basis, potential, cutoff: int) -> GreenCoefficients:
    """Q^(j) by the recursion Q^(j)_ab = -sum_s <a|V|s> Q^(j-1)_sb / eps_a."""
    if j < 0:
        raise ValueError("order must be >= 0")
    eps, v = _setup(basis, potential, cutoff)
    q = np.diag(1.0 / eps)
    for _ in range(j):
        q = -(v @ q) / eps[:, None]
    return GreenCoefficients(j, 1, q, basis.first_index)


def q_fractional(j: int, N: int, basis, potential, cutoff: int) -> GreenCoefficients:
    if j not in (0, 1, 2):
        raise ValueError("fractional coefficients are available for j = 0, 1, 2")
    if N < 1:
        raise ValueError("N must be >= 1")
    eps, v = _setup(basis, potential, cutoff)
    if j == 0:
        return GreenCoefficients(0, N, np.diag(_frac_pow(eps, -1.0 / N)), basis.first_index)
    eta = eta_coeff(N, eps[:, None], eps[None, :])
    outer = eps[:, None] * eps[None, :]
    if j == 1 or N == 1:
        if j == 2:
            # N = 1: q is Q itself
            return q_order_Q(2, basis, potential, cutoff)
        return GreenCoefficients(1, N, -v / (eta * outer), basis.first_index)
    # q2_nm = (1/eta_nm) sum_r V_nr V_rm / (eps_n eps_r eps_m) (1 - xi_nrm / (eps_r eta_nr eta_rm))
    xi = xi_coeff(N, eps[:, None, None], eps[None, :, None], eps[None, None, :])
    corr = 1.0 - xi / (eps[None, :, None] * eta[:, :, None] * eta[None, :, :])
    summand = v[:, :, None] * v[None, :, :] / eps[None, :, None] * corr
    q2 = summand.sum(axis=1) / (outer * eta)
    return GreenCoefficients(2, N, q2, basis.first_index)


def _poly_matmul(a, b, order=2):
    out = [np.zeros_like(a[0]) for _ in range(order + 1)]
    for i, ai in enumerate(a):
        for k, bk in enumerate(b):
            if i + k <= order:
                out[i + k] = out[i + k] + ai @ bk
    return out


def composition_residuals(N: int, basis, potential, cutoff: int, lam: float = 1.0) -> np.ndarray:
    """Max-norm of (q^N - Q) in each of the lam^0, lam^1, lam^2 blocks, scaled by |lam|^k.

    The product keeps only terms through lam^2, so O(lam^3) cross terms of
    the N-fold product never enter.
    """
    q = [q_fractional(k, N, basis, potential, cutoff).matrix for k in range(3)]
    big_q = [q_order_Q(k, basis, potential, cutoff).matrix for k in range(3)]
    prod = q
    for _ in range(N - 1):
        prod = _poly_matmul(prod, q)
    return np.array([abs(lam) ** k * np.max(np.abs(prod[k] - big_q[k])) for k in range(3)])


def composition_check(N: int, basis, potential, cutoff: int, lam: float = 1.0) -> float:
    if N < 2:
        raise ValueError("composition check needs N >= 2")
    return float(np.max(composition_residuals(N, basis, potential, cutoff, lam)))
