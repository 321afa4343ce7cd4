"""Closed-form impulse responses, their energy integrals, and Ito-sum sampling.

A supported filter's impulse response is a finite sum of modal terms
c * eta^p * exp(mu*eta) * {1, cos(nu*eta), sin(nu*eta)} with p <= 1.  All
variances and norms reduce to integrals of products of such terms, which
are evaluated exactly through the complex primitive
I_p(z, t) = integral_0^t u^p e^{z u} du, so no quadrature enters the
error-analysis pipeline.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError, UnsupportedPoleStructureError
from .simulation import GaussianSource, SampleTrajectory
from .tf_core import PartialFractions

KINDS = ("exp", "t_exp", "exp_cos", "exp_sin")


@dataclass(frozen=True)
class ModalTerm:
    """coefficient * f(eta) with f determined by ``kind``:

    exp      -> exp(rate*eta)
    t_exp    -> eta * exp(rate*eta)
    exp_cos  -> exp(rate*eta) * cos(frequency*eta)
    exp_sin  -> exp(rate*eta) * sin(frequency*eta)
    """

    kind: str
    rate: float
    frequency: float
    coefficient: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown modal kind {self.kind!r}")
        if self.kind in ("exp", "t_exp") and self.frequency != 0.0:
            raise InputError(f"{self.kind} terms must have zero frequency")


@dataclass(frozen=True)
class ModalImpulseResponse:
    """k(eta) as a sum of modal terms; zero for eta < 0 (causality)."""

    terms: tuple[ModalTerm, ...]

    def evaluate(self, eta):
        scalar = np.ndim(eta) == 0
        arr = np.atleast_1d(np.asarray(eta, dtype=float))
        out = np.zeros_like(arr)
        mask = arr >= 0
        e = arr[mask]
        acc = np.zeros_like(e)
        for t in self.terms:
            envelope = np.exp(t.rate * e)
            if t.kind == "exp":
                acc += t.coefficient * envelope
            elif t.kind == "t_exp":
                acc += t.coefficient * e * envelope
            elif t.kind == "exp_cos":
                acc += t.coefficient * envelope * np.cos(t.frequency * e)
            else:
                acc += t.coefficient * envelope * np.sin(t.frequency * e)
        out[mask] = acc
        return float(out[0]) if scalar else out


def impulse_from_fractions(pf: PartialFractions) -> ModalImpulseResponse:
    """Inverse Laplace transform of the standardized fractions.

    d/(g s+1)        -> (d/g)   exp(-eta/g)
    d/(g s+1)^2      -> (d/g^2) eta exp(-eta/g)
    d/(th^2 s^2 + 2 xi th s + 1)
                     -> d/(th*sqrt(1-xi^2)) exp(-xi eta/th) sin(sqrt(1-xi^2) eta/th)
    """
    terms = []
    for t in pf.terms:
        tc = t.time_constant
        if t.damping is None:
            if t.multiplicity == 1:
                terms.append(ModalTerm("exp", -1.0 / tc, 0.0, t.coefficient / tc))
            elif t.multiplicity == 2:
                terms.append(ModalTerm("t_exp", -1.0 / tc, 0.0, t.coefficient / tc**2))
            else:
                raise UnsupportedPoleStructureError(
                    f"multiplicity {t.multiplicity} has no modal form"
                )
        else:
            xi = t.damping
            root = np.sqrt(1.0 - xi * xi)
            terms.append(
                ModalTerm("exp_sin", -xi / tc, root / tc, t.coefficient / (tc * root))
            )
    return ModalImpulseResponse(tuple(terms))


# --- exact integration machinery ---

def _power_integral(z: complex, t: float, p: int) -> complex:
    """I_p = integral_0^t u^p e^{z u} du, exact for any complex z."""
    if t == 0.0:
        return 0.0 + 0.0j
    if abs(z) * t < 1e-5:
        # series in z avoids the (e^{zt}-1)/z cancellation near z = 0
        acc = 0.0 + 0.0j
        zk = 1.0 + 0.0j
        for k in range(6):
            acc += zk * t ** (p + k + 1) / (math.factorial(k) * (p + k + 1))
            zk *= z
        return acc
    vals = [(np.exp(z * t) - 1.0) / z]
    for q in range(1, p + 1):
        vals.append((t**q * np.exp(z * t) - q * vals[q - 1]) / z)
    return vals[p]


def _product_components(u: ModalTerm, v: ModalTerm):
    """Decompose f_u * f_v into (weight, p, a, b, flavor) elementary pieces.

    Each piece integrates as weight * u^p e^{a u} cos(b u) (flavor 'cos')
    or sin (flavor 'sin'); trig products split by the product-to-sum
    identities.
    """
    p = (u.kind == "t_exp") + (v.kind == "t_exp")
    a = u.rate + v.rate
    c = u.coefficient * v.coefficient

    def trig_of(term: ModalTerm):
        if term.kind == "exp_cos":
            return "cos", term.frequency
        if term.kind == "exp_sin":
            return "sin", term.frequency
        return "one", 0.0

    ku, bu = trig_of(u)
    kv, bv = trig_of(v)
    if ku == "one" and kv == "one":
        return [(c, p, a, 0.0, "cos")]
    if ku == "one" or kv == "one":
        kind, b = (kv, bv) if ku == "one" else (ku, bu)
        return [(c, p, a, b, kind)]
    if ku == "cos" and kv == "cos":
        return [(c / 2, p, a, bu - bv, "cos"), (c / 2, p, a, bu + bv, "cos")]
    if ku == "sin" and kv == "sin":
        return [(c / 2, p, a, bu - bv, "cos"), (-c / 2, p, a, bu + bv, "cos")]
    # one cos, one sin: cos(x)sin(y) = (sin(x+y) - sin(x-y)) / 2
    if ku == "cos":
        x, y = bu, bv
    else:
        x, y = bv, bu
    return [(c / 2, p, a, x + y, "sin"), (-c / 2, p, a, x - y, "sin")]


def _integrate_square(k: ModalImpulseResponse, t: float, with_t_weight: float | None):
    """integral_0^t k(u)^2 du, or with weight (T-u) when with_t_weight = T."""
    total = 0.0
    for u in k.terms:
        for v in k.terms:
            for w, p, a, b, flavor in _product_components(u, v):
                z = complex(a, b)
                base = _power_integral(z, t, p)
                if with_t_weight is not None:
                    base = with_t_weight * base - _power_integral(z, t, p + 1)
                total += w * (base.real if flavor == "cos" else base.imag)
    return total


def variance_at(k: ModalImpulseResponse, t: float) -> float:
    """E x(t)^2 = integral_0^t k(u)^2 du, in closed form."""
    if t < 0:
        raise InputError(f"time must be >= 0, got {t}")
    return _integrate_square(k, float(t), None)


def kernel_norm_squared(k: ModalImpulseResponse, horizon: float) -> float:
    """Squared L2 norm of k(t - tau) over the triangle tau <= t <= T.

    Equals integral_0^T (T - u) k(u)^2 du after switching the order of
    integration; this is the total output energy E int x^2 dt.
    """
    if not horizon > 0:
        raise InputError(f"horizon must be positive, got {horizon}")
    return _integrate_square(k, float(horizon), float(horizon))


def ito_sum_simulate(
    k: ModalImpulseResponse,
    horizon: float,
    steps: int,
    noise: GaussianSource,
) -> SampleTrajectory:
    """Left-endpoint Ito sum x(t_j) = sum_{i<j} k(t_j - t_i) sqrt(h) xi_i.

    Realized as a causal discrete convolution of the sampled kernel with
    the noise increments; x(0) = 0.
    """
    if steps < 1:
        raise InputError(f"steps must be >= 1, got {steps}")
    h = horizon / steps
    xi = noise.standard_normal(steps)
    lags = k.evaluate(h * np.arange(1, steps + 1))
    values = np.zeros(steps + 1)
    values[1:] = np.sqrt(h) * np.convolve(lags, xi)[:steps]
    return SampleTrajectory(
        grid=np.linspace(0.0, horizon, steps + 1),
        values=values,
        method="ito_sum",
        seed=noise.seed,
        stream_id=noise.stream_id,
    )


def ito_values_ensemble(
    k: ModalImpulseResponse,
    horizon: float,
    steps: int,
    base: GaussianSource,
    n_trajectories: int,
    grid_indices: Sequence[int],
    chunk: int = 2000,
) -> np.ndarray:
    """Ito-sum ensemble values at chosen grid indices, one stream per column.

    Column k matches ``ito_sum_simulate`` with stream base.stream_id + k
    at the requested indices; shape (len(grid_indices), n_trajectories).
    """
    h = horizon / steps
    sqrt_h = np.sqrt(h)
    lags = k.evaluate(h * np.arange(1, steps + 1))
    indices = list(grid_indices)
    out = np.empty((len(indices), n_trajectories))
    for start in range(0, n_trajectories, chunk):
        stop = min(start + chunk, n_trajectories)
        xi = np.column_stack(
            [
                base.with_stream(base.stream_id + j).standard_normal(steps)
                for j in range(start, stop)
            ]
        )
        for row, j in enumerate(indices):
            if j == 0:
                out[row, start:stop] = 0.0
            else:
                out[row, start:stop] = sqrt_h * (lags[:j][::-1] @ xi[:j])
    return out
