"""Symplectic and covariance-matrix linear algebra for n-mode Gaussian states.

Conventions used throughout the package:

* Quadratures are X = a + a' and P = i(a' - a), so the vacuum state has unit
  variance in both and its covariance matrix is the identity.
* The quadrature vector is interleaved, r = (X1, P1, X2, P2, ..., Xn, Pn);
  every 2n x 2n matrix in this package follows that ordering.
* Modes are numbered from 1.

All functions are pure and never mutate their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: tolerance for the +/- modulus pairing of the eigenvalues of Omega @ sigma
PAIRING_TOL = 1e-8

#: symmetry tolerance accepted on covariance-matrix inputs
SYMMETRY_TOL = 1e-10


def _as_even_square(mat, name: str) -> np.ndarray:
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {mat.shape}")
    if mat.shape[0] == 0 or mat.shape[0] % 2:
        raise ValueError(f"{name} must have even, positive dimension, got {mat.shape[0]}")
    return mat


def _as_cm(sigma, name: str = "sigma") -> np.ndarray:
    sigma = _as_even_square(sigma, name)
    asym = np.max(np.abs(sigma - sigma.T))
    if asym > SYMMETRY_TOL:
        raise ValueError(f"{name} is not symmetric (max asymmetry {asym:.3e})")
    return sigma


@dataclass(frozen=True)
class ModeBipartition:
    """A split of the modes {1, ..., n} into a nonempty proper subset A and its complement."""

    n_modes: int
    set_a: frozenset

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be >= 1")
        modes = frozenset(int(m) for m in self.set_a)
        object.__setattr__(self, "set_a", modes)
        if not modes:
            raise ValueError("bipartition subset A must be nonempty")
        bad = [m for m in modes if m < 1 or m > self.n_modes]
        if bad:
            raise ValueError(f"modes {sorted(bad)} out of range 1..{self.n_modes}")
        if len(modes) == self.n_modes:
            raise ValueError("bipartition subset A must be a proper subset of the modes")

    @property
    def set_b(self) -> frozenset:
        return frozenset(range(1, self.n_modes + 1)) - self.set_a

    @property
    def min_side(self) -> int:
        return min(len(self.set_a), self.n_modes - len(self.set_a))


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form with n copies of [[0, 1], [-1, 0]]."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def vacuum_cm(n_modes: int) -> np.ndarray:
    """Covariance matrix of the n-mode vacuum (identity in this normalization)."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    return np.eye(2 * n_modes)


def is_symplectic(u, tol: float = 1e-10) -> tuple[bool, float]:
    """Check U Omega U^T = Omega.

    Returns
    -------
    (ok, residual)
        ``residual`` is the max-abs entry of U Omega U^T - Omega and ``ok``
        is True when it is below ``tol``.
    """
    u = _as_even_square(u, "transform")
    omega = symplectic_form(u.shape[0] // 2)
    residual = float(np.max(np.abs(u @ omega @ u.T - omega)))
    return residual < tol, residual


def evolve_cm(u, sigma_in) -> np.ndarray:
    """Propagate a covariance matrix through a quadrature transform: U sigma U^T.

    The result is explicitly symmetrized to remove floating-point asymmetry.
    """
    u = _as_even_square(u, "transform")
    sigma_in = _as_cm(sigma_in, "sigma_in")
    if u.shape != sigma_in.shape:
        raise ValueError(f"dimension mismatch: transform {u.shape} vs sigma {sigma_in.shape}")
    out = u @ sigma_in @ u.T
    return (out + out.T) / 2.0


def _paired_moduli(moduli: np.ndarray) -> tuple[np.ndarray, float]:
    """Collapse sorted eigenvalue moduli (last axis) into +/- pairs.

    Returns the pair means and the worst in-pair mismatch.
    """
    n2 = moduli.shape[-1]
    pairs = moduli.reshape(moduli.shape[:-1] + (n2 // 2, 2))
    residual = float(np.max(np.abs(pairs[..., 1] - pairs[..., 0])))
    return pairs.mean(axis=-1), residual


def symplectic_eigenvalues(sigma, return_residual: bool = False):
    """Symplectic eigenvalues of a covariance matrix, ascending.

    Computed as the moduli of the eigenvalues of Omega @ sigma, which come in
    +/- pairs; each pair is averaged. A pairing mismatch above PAIRING_TOL
    (relative to the largest eigenvalue) means the input is not a valid
    covariance matrix and raises ValueError.
    """
    sigma = _as_cm(sigma)
    n = sigma.shape[0] // 2
    eigs = np.linalg.eigvals(symplectic_form(n) @ sigma)
    moduli = np.sort(np.abs(eigs))
    nus, residual = _paired_moduli(moduli)
    scale = max(1.0, float(moduli[-1]))
    if residual > PAIRING_TOL * scale:
        raise ValueError(
            f"eigenvalues of Omega @ sigma do not pair up (+/- pairing residual "
            f"{residual:.3e}); input is not a valid covariance matrix"
        )
    if return_residual:
        return nus, residual
    return nus


def _min_symplectic_eigenvalue_batch(sigmas: np.ndarray) -> np.ndarray:
    """Smallest symplectic eigenvalue for a stack of covariance matrices.

    ``sigmas`` has shape (..., 2m, 2m); symmetry is the caller's responsibility.
    """
    n = sigmas.shape[-1] // 2
    eigs = np.linalg.eigvals(symplectic_form(n) @ sigmas)
    moduli = np.sort(np.abs(eigs), axis=-1)
    _, residual = _paired_moduli(moduli)
    scale = max(1.0, float(moduli.max()))
    if residual > PAIRING_TOL * scale:
        raise ValueError(
            f"symplectic eigenvalue pairing failed on batch (residual {residual:.3e})"
        )
    return moduli[..., :2].mean(axis=-1)


def partial_transpose(sigma, part: ModeBipartition) -> np.ndarray:
    """Partial transposition on subsystem A: flip the sign of every P row and
    column belonging to a mode in A. Involutive."""
    sigma = _as_cm(sigma)
    n = sigma.shape[0] // 2
    if part.n_modes != n:
        raise ValueError(f"bipartition is over {part.n_modes} modes, sigma has {n}")
    signs = np.ones(2 * n)
    for m in part.set_a:
        signs[2 * (m - 1) + 1] = -1.0
    return signs[:, None] * sigma * signs[None, :]


def reduced_cm(sigma, modes) -> np.ndarray:
    """Covariance matrix of a subset of modes (principal submatrix)."""
    sigma = _as_cm(sigma)
    n = sigma.shape[0] // 2
    kept = sorted(set(int(m) for m in modes))
    if not kept:
        raise ValueError("cannot reduce to an empty mode set")
    bad = [m for m in kept if m < 1 or m > n]
    if bad:
        raise ValueError(f"modes {bad} out of range 1..{n}")
    idx = [q for m in kept for q in (2 * (m - 1), 2 * (m - 1) + 1)]
    return sigma[np.ix_(idx, idx)]
