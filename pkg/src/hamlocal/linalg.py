"""Dense linear algebra: Hermitian exponentials, spectral norms and the
phase-minimized distance between unitaries."""

from __future__ import annotations

import math

import numpy as np

from .pauli import PauliSum

UNITARY_TOL = 1e-9
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _as_matrix(h) -> np.ndarray:
    return h.matrix() if isinstance(h, PauliSum) else np.asarray(h, dtype=complex)


def expm_hermitian(M: np.ndarray, t: float) -> np.ndarray:
    """exp(-i M t) for Hermitian ``M`` via its eigendecomposition."""
    w, V = np.linalg.eigh(M)
    return (V * np.exp(-1j * w * t)) @ V.conj().T


def evolve(h, t: float) -> np.ndarray:
    """The time evolution unitary exp(-i H t); negative ``t`` gives the inverse."""
    return expm_hermitian(_as_matrix(h), t)


def spectral_norm(M: np.ndarray) -> float:
    M = np.asarray(M)
    if M.size == 0 or not np.any(M):
        return 0.0
    return float(np.linalg.norm(M, 2))


def is_unitary(U: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    U = np.asarray(U)
    return spectral_norm(U.conj().T @ U - np.eye(U.shape[0])) <= tol


def _check_pair(U, V):
    U = np.asarray(U, dtype=complex)
    V = np.asarray(V, dtype=complex)
    if U.shape != V.shape:
        raise ValueError("unitaries must have equal dimension")
    if not (is_unitary(U) and is_unitary(V)):
        raise ValueError("inputs must be unitary")
    return U, V


def golden_section(f, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Minimizer of a unimodal ``f`` on [lo, hi]."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def min_phase_spectral_distance(U, V, *, grid: int = 4096, return_theta: bool = False):
    """min over theta of ||exp(i theta) U - V||_inf.

    With W = U^dag V unitary, the singular values of exp(i theta) U - V are
    |exp(i theta) - w_j| over the eigenvalues w_j of W, so each evaluation is
    vectorized over the eigenphases.  A fine grid locates the basin and a
    golden-section search refines theta to 1e-10.
    """
    U, V = _check_pair(U, V)
    w = np.linalg.eigvals(U.conj().T @ V)

    def objective(theta):
        return float(np.max(np.abs(np.exp(1j * theta) - w)))

    thetas = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    vals = np.max(np.abs(np.exp(1j * thetas)[:, None] - w[None, :]), axis=1)
    step = 2 * np.pi / grid
    best = float(thetas[int(np.argmin(vals))])
    theta = golden_section(objective, best - step, best + step)
    value = min(objective(theta), float(vals.min()))
    theta %= 2 * np.pi
    return (value, theta) if return_theta else value


def diamond_interval(U, V) -> tuple[float, float]:
    """Bracket [lo, hi] on the diamond distance between two unitary channels."""
    lo = min_phase_spectral_distance(U, V)
    return lo, 2.0 * lo
