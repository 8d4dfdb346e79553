"""Brute-force number-basis oracle for the Gaussian model.

Evolves truncated multimode states under the pair-creation generator
r * (a_i' a_j' - a_i a_j) of each amplifier and reconstructs quadrature
covariances directly from expectation values. This path shares no code with
the symplectic construction, so agreement between the two is a meaningful
cross-check. Only small squeezing is reachable before truncation bites; the
closed-form checks cover the high-gain regime instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

#: hard cap on the squeezing parameter per evolution (safe at cutoff 12)
MAX_SQUEEZING = 0.35

#: tolerated probability mass in the top Fock layer after an evolution
LEAK_TOL = 1e-6

MIN_CUTOFF = 4


class TruncationError(RuntimeError):
    """Raised when an evolution pushes too much population to the cutoff."""

    def __init__(self, message: str, leakage: float):
        super().__init__(message)
        self.leakage = leakage


@dataclass
class TruncatedState:
    """State on a truncated number basis with ``cutoff`` levels per mode."""

    n_modes: int
    cutoff: int
    amplitudes: np.ndarray
    leakage: float = field(default=0.0)

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be >= 1")
        if self.cutoff < MIN_CUTOFF:
            raise ValueError(f"cutoff must be >= {MIN_CUTOFF}, got {self.cutoff}")
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        expected = (self.cutoff,) * self.n_modes
        if self.amplitudes.shape != expected:
            raise ValueError(
                f"amplitude tensor has shape {self.amplitudes.shape}, expected {expected}"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def vacuum_state(n_modes: int, cutoff: int) -> TruncatedState:
    """All modes in the ground state."""
    amps = np.zeros((cutoff,) * n_modes, dtype=complex)
    amps[(0,) * n_modes] = 1.0
    return TruncatedState(n_modes, cutoff, amps)


@lru_cache(maxsize=None)
def _lowering(cutoff: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, cutoff)), offsets=1, format="csr")


@lru_cache(maxsize=None)
def _mode_lowering(n_modes: int, cutoff: int, mode: int) -> sp.csr_matrix:
    """Annihilation operator of one mode on the full tensor space (mode 1 = slowest axis)."""
    op = sp.identity(1, format="csr")
    for m in range(1, n_modes + 1):
        factor = _lowering(cutoff) if m == mode else sp.identity(cutoff, format="csr")
        op = sp.kron(op, factor, format="csr")
    return op


def _top_layer_mass(amplitudes: np.ndarray) -> float:
    """Probability of finding any mode in its highest retained level."""
    prob = np.abs(amplitudes) ** 2
    interior = prob[tuple(slice(0, -1) for _ in range(amplitudes.ndim))]
    return float(prob.sum() - interior.sum())


def evolve_tms(state: TruncatedState, i: int, j: int, r: float) -> TruncatedState:
    """Apply the two-mode squeezer exp[r (a_i' a_j' - a_i a_j)] to the state.

    ``r`` is capped at MAX_SQUEEZING and the evolution is rejected with
    :class:`TruncationError` if more than LEAK_TOL of the population ends up
    in the top Fock layer.
    """
    n, cutoff = state.n_modes, state.cutoff
    if i == j or not (1 <= i <= n) or not (1 <= j <= n):
        raise ValueError(f"invalid mode pair ({i}, {j}) for {n} modes")
    if not (0.0 <= r <= MAX_SQUEEZING):
        raise ValueError(f"squeezing parameter must be in [0, {MAX_SQUEEZING}], got {r}")
    if r == 0.0:
        return TruncatedState(n, cutoff, state.amplitudes.copy(), state.leakage)
    a_i = _mode_lowering(n, cutoff, i)
    a_j = _mode_lowering(n, cutoff, j)
    pair_down = a_i @ a_j
    generator = r * (pair_down.conj().T - pair_down)
    psi = expm_multiply(generator, state.amplitudes.ravel())
    amps = psi.reshape(state.amplitudes.shape)
    leak = _top_layer_mass(amps)
    if leak > LEAK_TOL:
        raise TruncationError(
            f"truncation leakage {leak:.3e} exceeds {LEAK_TOL:.0e} "
            f"(r={r}, cutoff={cutoff}); increase the cutoff or lower r",
            leakage=leak,
        )
    return TruncatedState(n, cutoff, amps, max(state.leakage, leak))


def mean_photon_number(state: TruncatedState, mode: int) -> float:
    """<n> of one mode."""
    a_m = _mode_lowering(state.n_modes, state.cutoff, mode)
    lowered = a_m @ state.amplitudes.ravel()
    return float(np.real(np.vdot(lowered, lowered)))


def covariance_from_state(state: TruncatedState) -> np.ndarray:
    """Quadrature covariance matrix from expectation values on the state.

    Uses X = a + a', P = i(a' - a) and the symmetrized second moments minus
    first-moment products, in the interleaved (X1, P1, ...) ordering.
    """
    if abs(state.norm - 1.0) > 1e-6:
        raise ValueError(f"state is not normalized (norm {state.norm:.8f})")
    n, cutoff = state.n_modes, state.cutoff
    psi = state.amplitudes.ravel()
    columns = []
    for mode in range(1, n + 1):
        a_m = _mode_lowering(n, cutoff, mode)
        down = a_m @ psi
        up = a_m.conj().T @ psi
        columns.append(down + up)  # X|psi>
        columns.append(1j * (up - down))  # P|psi>
    quad = np.column_stack(columns)
    means = np.real(psi.conj() @ quad)
    second = np.real(quad.conj().T @ quad)
    sigma = (second + second.T) / 2.0 - np.outer(means, means)
    return sigma
