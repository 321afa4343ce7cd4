"""Seeded Gaussian sampling, spectral trajectory synthesis, ensemble statistics.

Randomness comes from a counter-based generator (Philox) keyed by
(seed, stream_id), with normals produced by an explicit Box-Muller
transform on its uniforms.  The construction is reproducible across
platforms and parallel-safe: distinct stream ids give independent
streams, so ensembles can fan out without coordination.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import GridMismatchError, IndexNegativeError
from .spectral_basis import CosineBasis


class GaussianSource:
    """Deterministic stream of standard normal variates.

    Identical (seed, stream_id) always yields the identical sequence for
    the identical call pattern.  ``with_stream`` derives an independent
    source for a parallel trajectory.
    """

    def __init__(self, seed: int = 0, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def with_stream(self, stream_id: int) -> "GaussianSource":
        return GaussianSource(self.seed, stream_id)

    def standard_normal(self, n: int) -> np.ndarray:
        """n independent N(0,1) draws via Box-Muller on Philox uniforms."""
        if n < 0:
            raise IndexNegativeError(f"cannot draw {n} variates")
        pairs = (n + 1) // 2
        u = self._gen.random(2 * pairs)
        u1, u2 = u[:pairs], u[pairs:]
        radius = np.sqrt(-2.0 * np.log1p(-u1))  # 1-u1 in (0, 1], log finite
        angle = 2.0 * np.pi * u2
        out = np.empty(2 * pairs)
        out[0::2] = radius * np.cos(angle)
        out[1::2] = radius * np.sin(angle)
        return out[:n]


@dataclass(frozen=True)
class SampleTrajectory:
    """One simulated path on a uniform grid.

    ``coefficients`` keeps the spectral expansion coefficients when the
    trajectory was produced by the spectral method (empty otherwise); a
    spectral trajectory is a continuous-time object and can be resampled
    exactly from them.
    """

    grid: np.ndarray
    values: np.ndarray
    method: str
    seed: int
    stream_id: int
    coefficients: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.shape != values.shape:
            raise GridMismatchError("grid and values must have equal length")
        if grid.size >= 2 and not np.all(np.diff(grid) > 0):
            raise GridMismatchError("grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class EnsembleStats:
    grid: np.ndarray
    mean: np.ndarray
    variance: np.ndarray      # unbiased, ddof=1
    stderr_mean: np.ndarray
    stderr_variance: np.ndarray
    count: int


def sample_noise_spectrum(source: GaussianSource, order: int) -> np.ndarray:
    """Spectral characteristic of white noise: order i.i.d. N(0,1) variates."""
    if order < 1:
        raise IndexNegativeError(f"truncation order must be >= 1, got {order}")
    return source.standard_normal(order)


def spectral_simulate(operator, source: GaussianSource, grid_size: int) -> SampleTrajectory:
    """Draw one realization x(t) = sum_i (W v)_i q(i, t) on a uniform grid.

    ``operator`` is a SpectralOperator (anything with .matrix, .T, .L).
    The randomness enters only through the coefficient vector, so
    refining the grid resamples the same realization.
    """
    if grid_size < 2:
        raise IndexNegativeError(f"grid must have >= 2 points, got {grid_size}")
    noise = sample_noise_spectrum(source, operator.L)
    coeffs = operator.matrix @ noise
    basis = CosineBasis(operator.T)
    grid = np.linspace(0.0, operator.T, grid_size)
    values = coeffs @ basis.eval_matrix(operator.L, grid)
    return SampleTrajectory(
        grid=grid,
        values=values,
        method="spectral",
        seed=source.seed,
        stream_id=source.stream_id,
        coefficients=coeffs,
    )


def spectral_values_ensemble(
    operator,
    base: GaussianSource,
    n_trajectories: int,
    times: Sequence[float],
    chunk: int = 2000,
) -> np.ndarray:
    """Values of n spectral realizations at chosen times, one stream each.

    Stream k reproduces exactly what ``spectral_simulate`` with
    base.with_stream(base.stream_id + k) would give at those times.
    Returns an array of shape (len(times), n_trajectories).
    """
    basis = CosineBasis(operator.T)
    q_at = basis.eval_matrix(operator.L, np.asarray(times, dtype=float))  # (L, nt)
    out = np.empty((q_at.shape[1], n_trajectories))
    for start in range(0, n_trajectories, chunk):
        stop = min(start + chunk, n_trajectories)
        noise = np.column_stack(
            [
                base.with_stream(base.stream_id + k).standard_normal(operator.L)
                for k in range(start, stop)
            ]
        )
        out[:, start:stop] = q_at.T @ (operator.matrix @ noise)
    return out


def ensemble_stats(trajectories: Sequence[SampleTrajectory]) -> EnsembleStats:
    """Per-time mean and unbiased variance with standard errors."""
    if len(trajectories) < 2:
        raise GridMismatchError("need at least two trajectories")
    grid = trajectories[0].grid
    for traj in trajectories[1:]:
        if traj.grid.shape != grid.shape or not np.array_equal(traj.grid, grid):
            raise GridMismatchError("trajectories are not on a common grid")
    data = np.stack([t.values for t in trajectories])
    n = data.shape[0]
    mean = data.mean(axis=0)
    var = data.var(axis=0, ddof=1)
    return EnsembleStats(
        grid=grid,
        mean=mean,
        variance=var,
        stderr_mean=np.sqrt(var / n),
        stderr_variance=var * np.sqrt(2.0 / (n - 1)),
        count=n,
    )
