"""Cosine orthonormal basis of L2([0, T]) and the kernel-projection oracle.

The basis is q(0, t) = sqrt(1/T), q(i, t) = sqrt(2/T) cos(i pi t / T).
``project_kernel`` computes the matrix of a causal convolution kernel in
this basis by panelized Gauss-Legendre quadrature over the triangle
0 <= tau <= t <= T.  It is deliberately independent of every closed-form
matrix in :mod:`spectral_operators`; the closed forms are tested against
it, never the other way around.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import IndexNegativeError, QuadratureNotConvergedError, TimeOutOfRangeError

# 32-point Gauss-Legendre rule per panel: exact to machine precision for
# panels that resolve the local oscillation of the integrand.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)

_MAX_REFINEMENTS = 6


@dataclass(frozen=True)
class CosineBasis:
    """Cosine basis on the horizon [0, T]."""

    T: float

    def __post_init__(self):
        if not self.T > 0:
            raise TimeOutOfRangeError(f"horizon T must be positive, got {self.T}")

    def eval(self, i: int, t: float) -> float:
        """Value of the i-th basis function at time t."""
        if i < 0:
            raise IndexNegativeError(f"basis index must be >= 0, got {i}")
        t = float(t)
        if not 0.0 <= t <= self.T:
            raise TimeOutOfRangeError(f"t={t:g} outside [0, {self.T:g}]")
        if i == 0:
            return float(np.sqrt(1.0 / self.T))
        return float(np.sqrt(2.0 / self.T) * np.cos(i * np.pi * t / self.T))

    def eval_matrix(self, order: int, times: np.ndarray) -> np.ndarray:
        """Stack q(i, t) for i < order over a time grid: shape (order, len(times))."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        out = np.empty((order, times.size))
        out[0] = np.sqrt(1.0 / self.T)
        if order > 1:
            idx = np.arange(1, order)[:, None]
            out[1:] = np.sqrt(2.0 / self.T) * np.cos(idx * np.pi * times[None, :] / self.T)
        return out

    def _check_times(self, times: np.ndarray) -> None:
        if times.size and (times.min() < 0.0 or times.max() > self.T):
            raise TimeOutOfRangeError(
                f"times must lie in [0, {self.T}], got range "
                f"[{times.min():g}, {times.max():g}]"
            )


def basis_eval(basis: CosineBasis, i: int, t: float) -> float:
    return basis.eval(i, t)


def synthesize_function(
    basis: CosineBasis, coefficients: Sequence[float], grid: Sequence[float]
) -> np.ndarray:
    """Partial sum sum_i c_i q(i, t) on the grid (grid must lie in [0, T])."""
    coeffs = np.asarray(coefficients, dtype=float)
    times = np.atleast_1d(np.asarray(grid, dtype=float))
    basis._check_times(times)
    return coeffs @ basis.eval_matrix(len(coeffs), times)


def project_kernel(
    basis: CosineBasis,
    kernel,
    order: int,
    tol: float = 1e-10,
) -> np.ndarray:
    """Project k(t - tau) restricted to tau <= t onto the basis product.

    Returns the order x order matrix W with
    W[i, j] = integral over {0 <= tau <= t <= T} of k(t-tau) q(i,t) q(j,tau).

    ``kernel`` is either a callable eta -> k(eta) (vectorized) or an object
    with an ``evaluate`` method.  The triangle is covered by panels no
    wider than T / max(8, order-1) so that the fastest basis mode is
    resolved; the panel count doubles until two successive levels agree to
    ``tol`` per element.
    """
    if order < 1:
        raise IndexNegativeError(f"truncation order must be >= 1, got {order}")
    kfun = _as_callable(kernel)
    panels = max(8, order - 1)
    prev = _triangle_quadrature(basis, kfun, order, panels)
    for _ in range(_MAX_REFINEMENTS):
        panels *= 2
        cur = _triangle_quadrature(basis, kfun, order, panels)
        if np.max(np.abs(cur - prev)) < tol:
            return cur
        prev = cur
    raise QuadratureNotConvergedError(
        f"kernel projection did not reach {tol:g} after {_MAX_REFINEMENTS} refinements"
    )


def _as_callable(kernel) -> Callable[[np.ndarray], np.ndarray]:
    if callable(kernel):
        return kernel
    if hasattr(kernel, "evaluate"):
        return kernel.evaluate
    raise TypeError("kernel must be callable or expose an evaluate() method")


def _triangle_quadrature(
    basis: CosineBasis, kfun, order: int, panels: int
) -> np.ndarray:
    """One quadrature pass: outer nodes over t, inner panels over [0, t]."""
    T = basis.T
    h = T / panels
    edges = np.linspace(0.0, T, panels + 1)
    w_mat = np.zeros((order, order))
    for a, b in zip(edges[:-1], edges[1:]):
        mid, rad = (a + b) / 2, (b - a) / 2
        t_nodes = mid + rad * _GL_NODES
        t_weights = rad * _GL_WEIGHTS
        for t, wt in zip(t_nodes, t_weights):
            m = max(1, int(np.ceil(t / h)))
            inner_edges = np.linspace(0.0, t, m + 1)
            imid = (inner_edges[:-1] + inner_edges[1:]) / 2
            irad = (inner_edges[1:] - inner_edges[:-1]) / 2
            taus = (imid[:, None] + irad[:, None] * _GL_NODES[None, :]).ravel()
            tauw = (irad[:, None] * _GL_WEIGHTS[None, :]).ravel()
            inner = basis.eval_matrix(order, taus) @ (kfun(t - taus) * tauw)
            q_t = basis.eval_matrix(order, np.array([t]))[:, 0]
            w_mat += wt * np.outer(q_t, inner)
    return w_mat
