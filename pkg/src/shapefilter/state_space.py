"""Companion-form state-space realizations and their SDE simulator.

The filter dx = A x dt + B dw, x_out = C x is built from a validated
transfer function either by the direct coefficient recursion for B or by
interpolation of H(s) at sample points away from the poles.  Both must
agree; ``transfer_residual`` quantifies how well C (sE - A)^{-1} B
reproduces H(s).
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import InputError, SamplePointOnPoleError, SingularVandermondeError
from .simulation import GaussianSource, SampleTrajectory
from .tf_core import RationalTransferFunction

logger = logging.getLogger(__name__)

_COND_WARN = 1e12


@dataclass(frozen=True)
class StateSpaceRealization:
    """(A, B, C) with A in companion form and C = [1, 0, ..., 0]."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        a = np.array(self.A, dtype=float)
        b = np.array(self.B, dtype=float).reshape(-1)
        c = np.array(self.C, dtype=float).reshape(-1)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InputError("A must be square")
        if b.shape[0] != a.shape[0] or c.shape[0] != a.shape[0]:
            raise InputError("B and C must match the order of A")
        for arr in (a, b, c):
            arr.setflags(write=False)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "C", c)

    @property
    def order(self) -> int:
        return self.A.shape[0]


def _companion_a(tf: RationalTransferFunction) -> np.ndarray:
    n = tf.n
    a = np.zeros((n, n))
    for i in range(n - 1):
        a[i, i + 1] = 1.0
    a[n - 1, :] = [-tf.den[j] / tf.den[n] for j in range(n)]
    return a


def companion_realization(tf: RationalTransferFunction) -> StateSpaceRealization:
    """Companion A plus the closed B-recursion on the coefficients.

    With one-based row index i: B_i = 0 for i <= n-m-1, B_{n-m} = b_m/a_n,
    then each later entry folds back the already-known ones through the
    denominator coefficients.
    """
    n, m = tf.n, tf.m
    a, b = tf.den, tf.num
    an = a[n]
    bvec = np.zeros(n)
    nm = n - m
    bvec[nm - 1] = b[m] / an
    for i in range(nm + 1, n + 1):
        acc = sum(a[n - i + j] * bvec[j - 1] for j in range(nm, i))
        bvec[i - 1] = (b[n - i] - acc) / an
    c = np.zeros(n)
    c[0] = 1.0
    return StateSpaceRealization(_companion_a(tf), bvec, c)


def default_sample_points(tf: RationalTransferFunction) -> list[float]:
    """Points 0, 1, ..., n-1, each nudged by +0.5 while it sits on a pole."""
    scale = max(abs(c) for c in tf.den)
    points = []
    for k in range(tf.n):
        s = float(k)
        while abs(npoly.polyval(s, tf.den)) <= 1e-8 * scale:
            s += 0.5
        points.append(s)
    return points


def interpolation_realization(
    tf: RationalTransferFunction, sample_points: Sequence[float] | None = None
) -> StateSpaceRealization:
    """Same A and C, with B solved from H(s_k) interpolation conditions.

    The k-th equation is sum_j V_kj B_j = M(s_k) with
    V_kj = sum_{l >= j} a_l s_k^{l-j} (one-based j); V is singular exactly
    when sample points repeat.
    """
    n = tf.n
    a = np.asarray(tf.den, dtype=float)
    if sample_points is None:
        points = default_sample_points(tf)
    else:
        points = [float(s) for s in sample_points]
        if len(points) != n:
            raise InputError(f"need exactly {n} sample points, got {len(points)}")
        scale = max(abs(c) for c in tf.den)
        for s in points:
            if abs(npoly.polyval(s, tf.den)) <= 1e-8 * scale:
                raise SamplePointOnPoleError(f"sample point {s:g} lies on a pole of H")
    if len(set(points)) != len(points):
        raise SingularVandermondeError(f"duplicate sample points {points}")

    v = np.empty((n, n))
    for k, s in enumerate(points):
        powers = s ** np.arange(n + 1)
        for j in range(1, n + 1):
            v[k, j - 1] = np.sum(a[j:] * powers[: n + 1 - j])
    mvec = np.array([npoly.polyval(s, tf.num) for s in points], dtype=float)

    cond = np.linalg.cond(v)
    if cond > _COND_WARN:
        logger.warning("interpolation system badly conditioned: cond(V) = %.3e", cond)
    try:
        bvec = np.linalg.solve(v, mvec)
        # one refinement step; V grows ill-conditioned with the order
        bvec = bvec + np.linalg.solve(v, mvec - v @ bvec)
    except np.linalg.LinAlgError as exc:
        raise SingularVandermondeError(f"interpolation system is singular: {exc}") from exc

    c = np.zeros(n)
    c[0] = 1.0
    return StateSpaceRealization(_companion_a(tf), bvec, c)


def transfer_residual(
    realization: StateSpaceRealization, tf: RationalTransferFunction, s: complex
) -> float:
    """|C (sE - A)^{-1} B - H(s)| at one complex point."""
    scale = max(abs(c) for c in tf.den)
    if abs(npoly.polyval(s, tf.den)) <= 1e-12 * scale * max(1.0, abs(s)) ** tf.n:
        raise SamplePointOnPoleError(f"s={s} is a pole of H")
    mat = s * np.eye(realization.order) - realization.A
    resolvent_b = np.linalg.solve(mat, realization.B.astype(complex))
    return float(abs(realization.C @ resolvent_b - tf.evaluate(s)))


def euler_maruyama(
    realization: StateSpaceRealization,
    horizon: float,
    steps: int,
    noise: GaussianSource,
) -> SampleTrajectory:
    """Explicit Euler-Maruyama from a zero initial state.

    x_{k+1} = x_k + h A x_k + B sqrt(h) xi_k; returns the output component
    C x on the uniform grid of steps+1 points.  The scheme is exact in
    distribution as h -> 0; additive noise means there is no Milstein
    correction to add.
    """
    if steps < 1:
        raise InputError(f"steps must be >= 1, got {steps}")
    _warn_if_unstable(realization)
    h = horizon / steps
    sqrt_h = np.sqrt(h)
    xi = noise.standard_normal(steps)
    state = np.zeros(realization.order)
    values = np.zeros(steps + 1)
    for k in range(steps):
        state = state + h * (realization.A @ state) + realization.B * (sqrt_h * xi[k])
        values[k + 1] = realization.C @ state
    return SampleTrajectory(
        grid=np.linspace(0.0, horizon, steps + 1),
        values=values,
        method="euler_maruyama",
        seed=noise.seed,
        stream_id=noise.stream_id,
    )


def euler_maruyama_values_ensemble(
    realization: StateSpaceRealization,
    horizon: float,
    steps: int,
    base: GaussianSource,
    n_trajectories: int,
    grid_indices: Sequence[int],
    chunk: int = 2000,
) -> np.ndarray:
    """Ensemble of Euler-Maruyama outputs at chosen grid indices.

    Column k is exactly the trajectory ``euler_maruyama`` would produce
    with base.with_stream(base.stream_id + k), sampled at the requested
    indices; shape (len(grid_indices), n_trajectories).
    """
    _warn_if_unstable(realization)
    h = horizon / steps
    sqrt_h = np.sqrt(h)
    indices = list(grid_indices)
    out = np.empty((len(indices), n_trajectories))
    for start in range(0, n_trajectories, chunk):
        stop = min(start + chunk, n_trajectories)
        xi = np.column_stack(
            [
                base.with_stream(base.stream_id + k).standard_normal(steps)
                for k in range(start, stop)
            ]
        )
        states = np.zeros((realization.order, stop - start))
        values = np.zeros((steps + 1, stop - start))
        for k in range(steps):
            states = states + h * (realization.A @ states) + np.outer(realization.B, sqrt_h * xi[k])
            values[k + 1] = realization.C @ states
        out[:, start:stop] = values[indices]
    return out


def _warn_if_unstable(realization: StateSpaceRealization) -> None:
    if np.max(np.linalg.eigvals(realization.A).real) >= 0:
        warnings.warn(
            "realization has a pole with nonnegative real part; "
            "trajectories will not reach a stationary regime",
            stacklevel=3,
        )
