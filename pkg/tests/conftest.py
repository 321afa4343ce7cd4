"""Shared test helpers: random stable systems and independent quadrature oracles."""
from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import quad

from shapefilter.spectral_basis import CosineBasis
from shapefilter.tf_core import RationalTransferFunction

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


def make_stable_tf(rng: np.random.Generator, max_order: int = 6) -> RationalTransferFunction:
    """Random strictly proper stable tf with well-separated poles."""
    n = int(rng.integers(1, max_order + 1))
    m = int(rng.integers(0, n))
    poles = _random_left_half_roots(rng, n)
    zeros = _random_left_half_roots(rng, m)
    den = npoly.polyfromroots(poles).real
    num = npoly.polyfromroots(zeros).real if m else np.array([1.0])
    gain = rng.uniform(0.5, 2.0)
    den_scale = rng.uniform(0.5, 2.0)
    return RationalTransferFunction.from_coefficients(gain * num, den_scale * den)


def _random_left_half_roots(rng: np.random.Generator, count: int) -> list[complex]:
    roots: list[complex] = []
    while len(roots) < count:
        if count - len(roots) >= 2 and rng.random() < 0.4:
            re = rng.uniform(-3.0, -0.3)
            im = rng.uniform(0.2, 2.0)
            cand = [complex(re, im), complex(re, -im)]
        else:
            cand = [complex(rng.uniform(-3.0, -0.3), 0.0)]
        if all(abs(c - r) > 0.15 for c in cand for r in roots):
            roots.extend(cand)
    return roots[:count]


def quad_kernel_norm_sq(kernel, horizon: float) -> float:
    """Adaptive-quadrature oracle for the triangle norm: int_0^T (T-u) k(u)^2 du."""
    val, err = quad(
        lambda u: (horizon - u) * kernel.evaluate(u) ** 2,
        0.0,
        horizon,
        limit=400,
        epsabs=1e-13,
        epsrel=1e-13,
    )
    assert err < 1e-10
    return val


def quad_variance(kernel, t: float) -> float:
    val, err = quad(
        lambda u: kernel.evaluate(u) ** 2, 0.0, t, limit=400, epsabs=1e-13, epsrel=1e-13
    )
    assert err < 1e-10
    return val


def _panel_nodes(a: float, b: float, panels: int):
    edges = np.linspace(a, b, panels + 1)
    mid = (edges[:-1] + edges[1:]) / 2
    rad = (edges[1:] - edges[:-1]) / 2
    nodes = (mid[:, None] + rad[:, None] * GL_NODES[None, :]).ravel()
    weights = (rad[:, None] * GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


def l2_distance_sq_on_square(kernel, matrix: np.ndarray, horizon: float, panels: int = 24) -> float:
    """Quadrature of ||k(t-tau) 1[tau<=t] - ktilde||^2 over the full square.

    ktilde(t, tau) = q(t)^T matrix q(tau).  The square splits along the
    diagonal so each sub-integrand is smooth: below it the difference,
    above it ktilde alone (the causal kernel vanishes there).
    """
    order = matrix.shape[0]
    basis = CosineBasis(horizon)
    t_nodes, t_weights = _panel_nodes(0.0, horizon, panels)
    total = 0.0
    for t, wt in zip(t_nodes, t_weights):
        qt = basis.eval_matrix(order, np.array([t]))[:, 0]
        row = qt @ matrix  # ktilde(t, .) coefficients against q(tau)
        if t > 0:
            taus, tws = _panel_nodes(0.0, t, max(1, int(np.ceil(panels * t / horizon))))
            ktilde = row @ basis.eval_matrix(order, taus)
            diff = kernel.evaluate(t - taus) - ktilde
            total += wt * float(tws @ (diff * diff))
        if t < horizon:
            taus, tws = _panel_nodes(t, horizon, max(1, int(np.ceil(panels * (horizon - t) / horizon))))
            ktilde = row @ basis.eval_matrix(order, taus)
            total += wt * float(tws @ (ktilde * ktilde))
    return total
