"""Duan and PPT entanglement criteria for the cascaded-FWM output states.

The Duan value for a mode pair (i, j) is

    D_ij = V(Xi - Xj) + V(Pi + Pj),

with separable states satisfying D_ij >= 4 in this normalization; a value
below 4 certifies entanglement. The PPT value for a bipartition A|B is the
smallest symplectic eigenvalue of the partially transposed covariance matrix
minus 1, so separability requires value >= 0 and a negative value certifies
entanglement (necessary and sufficient only for 1-vs-n splits).

Criterion labels accepted by the sweep machinery:

* ``"D12"``            Duan value of modes 1 and 2.
* ``"PPT:1|23"``       PPT value of the bipartition {1} | {2,3}.

A PPT label whose two sides do not cover all modes of the state is evaluated
on the reduced covariance matrix of the modes it names, e.g. ``"PPT:1|3"``
inside a three-mode state traces out mode 2 first.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .gaussian import (
    ModeBipartition,
    _as_cm,
    _min_symplectic_eigenvalue_batch,
    partial_transpose,
    reduced_cm,
    symplectic_eigenvalues,
)
from .model import GainSet, quad_transform_batch, tri_transform_batch

DUAN_BOUND = 4.0

NECESSARY_AND_SUFFICIENT = "necessary_and_sufficient"
SUFFICIENT_ONLY = "sufficient_only"


@dataclass(frozen=True)
class DuanResult:
    mode_i: int
    mode_j: int
    value: float

    @property
    def entangled(self) -> bool:
        return self.value < DUAN_BOUND


@dataclass(frozen=True)
class PPTResult:
    bipartition: ModeBipartition
    nu_min: float

    @property
    def value(self) -> float:
        return self.nu_min - 1.0

    @property
    def entangled(self) -> bool:
        return self.value < 0.0

    @property
    def sufficiency(self) -> str:
        if self.bipartition.min_side == 1:
            return NECESSARY_AND_SUFFICIENT
        return SUFFICIENT_ONLY


def _quad_indices(sigma: np.ndarray, mode: int) -> tuple[int, int]:
    n = sigma.shape[-1] // 2
    if not (1 <= mode <= n):
        raise ValueError(f"mode {mode} out of range 1..{n}")
    return 2 * (mode - 1), 2 * (mode - 1) + 1


def duan_value(sigma, i: int, j: int) -> DuanResult:
    """Evaluate D_ij = V(Xi - Xj) + V(Pi + Pj) on a covariance matrix."""
    sigma = _as_cm(sigma)
    if i == j:
        raise ValueError("Duan criterion needs two distinct modes")
    xi, pi = _quad_indices(sigma, i)
    xj, pj = _quad_indices(sigma, j)
    value = (
        sigma[xi, xi] + sigma[xj, xj] - 2.0 * sigma[xi, xj]
        + sigma[pi, pi] + sigma[pj, pj] + 2.0 * sigma[pi, pj]
    )
    return DuanResult(i, j, float(value))


def duan_tri_closed_grid(pair: str, g1_amp, g2_amp):
    """Vectorized closed-form three-mode Duan values over gain arrays."""
    big1 = np.asarray(g1_amp, dtype=float)
    big2 = np.asarray(g2_amp, dtype=float)
    if pair == "12":
        c1 = np.sqrt(big1**2 - 1.0)
        return 4.0 * (big1**2 * (big2**2 + 1.0) - 2.0 * big1 * big2 * c1 - 1.0)
    if pair == "13":
        return 4.0 * big1**2 * big2**2
    if pair == "23":
        c2 = np.sqrt(big2**2 - 1.0)
        return 4.0 * big1**2 * (2.0 * big2**2 - 2.0 * big2 * c2 - 1.0)
    raise ValueError(f"unknown three-mode pair label {pair!r}; expected 12, 13 or 23")


def duan_quad_closed_grid(pair: str, g1_amp, g2_amp, g3_amp):
    """Vectorized closed-form four-mode Duan values over gain arrays."""
    big1 = np.asarray(g1_amp, dtype=float)
    big2 = np.asarray(g2_amp, dtype=float)
    big3 = np.asarray(g3_amp, dtype=float)
    if pair == "12":
        c1 = np.sqrt(big1**2 - 1.0)
        return 4.0 * (
            big1**2 * big2**2 + big1**2 * big3**2 - 2.0 * big1 * big2 * big3 * c1 - 1.0
        )
    if pair in ("13", "24"):
        return 4.0 * big1**2 * (big2**2 + big3**2 - 1.0)
    if pair == "14":
        c3 = np.sqrt(big3**2 - 1.0)
        return 4.0 * big1**2 * (2.0 * big3**2 - 2.0 * big3 * c3 - 1.0)
    if pair == "23":
        c2 = np.sqrt(big2**2 - 1.0)
        return 4.0 * big1**2 * (2.0 * big2**2 - 2.0 * big2 * c2 - 1.0)
    if pair == "34":
        c1 = np.sqrt(big1**2 - 1.0)
        c2 = np.sqrt(big2**2 - 1.0)
        c3 = np.sqrt(big3**2 - 1.0)
        return 4.0 * (
            -2.0 * big1**2 + big1**2 * big2**2 + big1**2 * big3**2
            - 2.0 * big1 * c1 * c2 * c3 + 1.0
        )
    raise ValueError(f"unknown four-mode pair label {pair!r}")


def duan_tri_closed(gains: GainSet, pair: str) -> float:
    """Closed-form three-mode Duan value for one gain set."""
    if gains.g3_amp is not None:
        raise ValueError("three-mode closed forms take a two-gain set")
    return float(duan_tri_closed_grid(pair, gains.g1_amp, gains.g2_amp))


def duan_quad_closed(gains: GainSet, pair: str) -> float:
    """Closed-form four-mode Duan value for one gain set."""
    if gains.g3_amp is None:
        raise ValueError("four-mode closed forms require g3_amp")
    return float(duan_quad_closed_grid(pair, gains.g1_amp, gains.g2_amp, gains.g3_amp))


def ppt_value(sigma, part: ModeBipartition) -> PPTResult:
    """PPT value (smallest symplectic eigenvalue of the partial transpose, minus 1)."""
    sig_pt = partial_transpose(sigma, part)
    nus = symplectic_eigenvalues(sig_pt)
    return PPTResult(part, float(nus[0]))


def classify_tri_region(gains: GainSet) -> str:
    """Entanglement region of the three-mode source in the (G1, G2) plane.

    "I" if only D12 < 4, "II" if only D23 < 4, "III" if both, "none" otherwise
    (D13 never violates the bound).
    """
    d12 = duan_tri_closed(gains, "12")
    d23 = duan_tri_closed(gains, "23")
    if d12 < DUAN_BOUND and d23 < DUAN_BOUND:
        return "III"
    if d12 < DUAN_BOUND:
        return "I"
    if d23 < DUAN_BOUND:
        return "II"
    return "none"


# --------------------------------------------------------------------------
# criterion labels and batched evaluation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Criterion:
    """Parsed criterion label: a Duan pair or a PPT bipartition."""

    kind: str  # "duan" | "ppt"
    modes_a: tuple
    modes_b: tuple
    label: str


class CriterionError(ValueError):
    """Raised for criterion labels that cannot be parsed for the given system."""


def _parse_mode_group(text: str, n_modes: int, label: str) -> tuple:
    if not text or not text.isdigit():
        raise CriterionError(f"invalid criterion label {label!r}")
    modes = tuple(sorted(int(ch) for ch in text))
    if len(set(modes)) != len(modes):
        raise CriterionError(f"repeated mode in criterion label {label!r}")
    if any(m < 1 or m > n_modes for m in modes):
        raise CriterionError(f"criterion label {label!r} names a mode outside 1..{n_modes}")
    return modes


def parse_criterion(label: str, n_modes: int) -> Criterion:
    """Parse ``"Dij"`` or ``"PPT:a...|b..."`` into a Criterion."""
    if label.startswith("D") and ":" not in label:
        modes = _parse_mode_group(label[1:], n_modes, label)
        if len(modes) != 2:
            raise CriterionError(f"Duan label {label!r} must name exactly two modes")
        return Criterion("duan", (modes[0],), (modes[1],), label)
    if label.startswith("PPT:"):
        body = label[4:]
        if body.count("|") != 1:
            raise CriterionError(f"PPT label {label!r} must contain exactly one '|'")
        a_text, b_text = body.split("|")
        modes_a = _parse_mode_group(a_text, n_modes, label)
        modes_b = _parse_mode_group(b_text, n_modes, label)
        if set(modes_a) & set(modes_b):
            raise CriterionError(f"PPT label {label!r} has overlapping sides")
        return Criterion("ppt", modes_a, modes_b, label)
    raise CriterionError(f"unknown criterion label {label!r}")


def evaluate_criterion_batch(sigmas: np.ndarray, crit: Criterion) -> np.ndarray:
    """Evaluate one criterion on a stack of covariance matrices (..., 2n, 2n)."""
    n = sigmas.shape[-1] // 2
    if crit.kind == "duan":
        (i,), (j,) = crit.modes_a, crit.modes_b
        xi, pi = 2 * (i - 1), 2 * (i - 1) + 1
        xj, pj = 2 * (j - 1), 2 * (j - 1) + 1
        return (
            sigmas[..., xi, xi] + sigmas[..., xj, xj] - 2.0 * sigmas[..., xi, xj]
            + sigmas[..., pi, pi] + sigmas[..., pj, pj] + 2.0 * sigmas[..., pi, pj]
        )
    kept = sorted(set(crit.modes_a) | set(crit.modes_b))
    if len(kept) < n:
        idx = [q for m in kept for q in (2 * (m - 1), 2 * (m - 1) + 1)]
        sigmas = sigmas[..., idx, :][..., :, idx]
    remap = {m: k + 1 for k, m in enumerate(kept)}
    signs = np.ones(2 * len(kept))
    for m in crit.modes_a:
        signs[2 * (remap[m] - 1) + 1] = -1.0
    flipped = signs[:, None] * sigmas * signs[None, :]
    return _min_symplectic_eigenvalue_batch(flipped) - 1.0


def evaluate_criterion(sigma, crit: Criterion) -> float:
    """Scalar version of :func:`evaluate_criterion_batch` for a single state."""
    sigma = _as_cm(sigma)
    if crit.kind == "ppt":
        kept = sorted(set(crit.modes_a) | set(crit.modes_b))
        n = sigma.shape[0] // 2
        if len(kept) < n:
            sigma = reduced_cm(sigma, kept)
        remap = {m: k + 1 for k, m in enumerate(kept)}
        part = ModeBipartition(len(kept), frozenset(remap[m] for m in crit.modes_a))
        return ppt_value(sigma, part).value
    return duan_value(sigma, crit.modes_a[0], crit.modes_b[0]).value


def criterion_entangled(crit: Criterion, value) -> np.ndarray:
    """Entanglement flag(s) for the raw criterion value(s); strict inequality."""
    value = np.asarray(value)
    if crit.kind == "duan":
        return value < DUAN_BOUND
    return value < 0.0


# --------------------------------------------------------------------------
# gain-grid sweeps
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GridAxis:
    """Inclusive uniform range start, start+step, ..., stop."""

    start: float
    stop: float
    step: float

    def values(self) -> np.ndarray:
        if self.step <= 0:
            raise ValueError(f"grid step must be > 0, got {self.step}")
        if self.stop < self.start:
            raise ValueError("grid stop must be >= start")
        count = int(round((self.stop - self.start) / self.step)) + 1
        return self.start + self.step * np.arange(count)


@dataclass(frozen=True)
class SweepRow:
    gains: tuple
    criterion: str
    value: float
    entangled: bool
    region: str


def _axis_values(axis) -> np.ndarray:
    if isinstance(axis, GridAxis):
        vals = axis.values()
    else:
        vals = np.atleast_1d(np.asarray(axis, dtype=float))
    if vals.size == 0:
        raise ValueError("empty gain grid")
    if np.any(~(vals >= 1.0)):
        raise ValueError("all gains in a sweep must be >= 1")
    return vals


def _sweep_chunk(system: str, pts: np.ndarray, crits: list) -> np.ndarray:
    if system == "tri":
        u = tri_transform_batch(pts[:, 0], pts[:, 1])
    else:
        u = quad_transform_batch(pts[:, 0], pts[:, 1], pts[:, 2])
    sigmas = u @ u.transpose(0, 2, 1)
    return np.column_stack([evaluate_criterion_batch(sigmas, c) for c in crits])


def sweep_criteria(system: str, axes: dict, criteria, jobs: int = 1) -> list:
    """Evaluate criteria over a gain grid.

    Parameters
    ----------
    system : "tri" or "quad"
    axes : mapping with keys "G1", "G2" (and "G3" for quad); each value is a
        GridAxis or a fixed float.
    criteria : iterable of criterion label strings.
    jobs : number of worker threads; the output is identical for any value.

    Rows are ordered lexicographically by grid point (G1 outermost), then by
    criterion label.
    """
    if system == "tri":
        names = ("G1", "G2")
        n_modes = 3
    elif system == "quad":
        names = ("G1", "G2", "G3")
        n_modes = 4
    else:
        raise ValueError(f"unknown system {system!r}; expected 'tri' or 'quad'")
    missing = [k for k in names if k not in axes]
    extra = [k for k in axes if k not in names]
    if missing or extra:
        raise ValueError(f"sweep axes must be exactly {names}; missing {missing}, extra {extra}")
    labels = sorted(set(criteria))
    if not labels:
        raise ValueError("no criteria requested")
    crits = [parse_criterion(lbl, n_modes) for lbl in labels]

    grids = np.meshgrid(*[_axis_values(axes[k]) for k in names], indexing="ij")
    pts = np.column_stack([g.ravel() for g in grids])

    jobs = max(1, int(jobs))
    if jobs == 1 or pts.shape[0] < 2 * jobs:
        values = _sweep_chunk(system, pts, crits)
    else:
        chunks = np.array_split(np.arange(pts.shape[0]), jobs)
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda idx: _sweep_chunk(system, pts[idx], crits), chunks))
        values = np.vstack(parts)

    if system == "tri":
        regions = [
            classify_tri_region(GainSet(pt[0], pt[1])) for pt in pts
        ]
    else:
        regions = [""] * pts.shape[0]

    rows = []
    for p_idx in range(pts.shape[0]):
        gains = tuple(float(v) for v in pts[p_idx])
        for c_idx, crit in enumerate(crits):
            val = float(values[p_idx, c_idx])
            rows.append(
                SweepRow(
                    gains=gains,
                    criterion=crit.label,
                    value=val,
                    entangled=bool(criterion_entangled(crit, val)),
                    region=regions[p_idx],
                )
            )
    return rows
