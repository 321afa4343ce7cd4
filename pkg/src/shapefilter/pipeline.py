"""High-level runs shared by the HTTP service and the CLI.

Everything here resolves inputs (preset names or raw coefficients),
assembles the right objects from the core modules, and returns plain
data structures ready for serialization.
"""
from __future__ import annotations

import warnings
from typing import Sequence

import numpy as np

from . import __version__
from .error_analysis import ErrorReport, convergence_rate, error_table
from .errors import InputError, UnsupportedPoleStructureError
from .impulse_response import impulse_from_fractions, ito_sum_simulate, kernel_norm_squared
from .presets import DEFAULT_GRID, DEFAULT_HORIZON, DEFAULT_ORDER, get_preset
from .simulation import GaussianSource, SampleTrajectory, spectral_simulate
from .spectral_operators import (
    SpectralOperator,
    compose_rational,
    differentiation_matrix,
    exact_projection,
    integration_matrix,
    whitening_operator,
)
from .state_space import companion_realization, euler_maruyama, interpolation_realization
from .tf_core import RationalTransferFunction, find_poles_zeros, partial_fractions

METHODS = ("spectral", "sde", "ito")
OPERATOR_NAMES = ("P", "Pinv", "exact", "rational", "whiten")


def resolve_tf(
    preset: str | None = None,
    num: Sequence[float] | None = None,
    den: Sequence[float] | None = None,
) -> tuple[RationalTransferFunction, str]:
    """Turn a preset name or raw coefficients into a validated tf."""
    if preset is not None:
        if num is not None or den is not None:
            raise InputError("give either a preset or coefficients, not both")
        p = get_preset(preset)
        return p.tf, preset
    if num is None or den is None:
        raise InputError("transfer function needs both num and den (or a preset)")
    tf = RationalTransferFunction.from_coefficients(num, den)
    return tf, f"num={list(tf.num)}, den={list(tf.den)}"


def synthesize_report(
    tf: RationalTransferFunction,
    label: str,
    interpolation_points: Sequence[float] | None = None,
) -> dict:
    """All three filter forms for one transfer function, as a JSON document."""
    pz = find_poles_zeros(tf)
    companion = companion_realization(tf)
    interp = interpolation_realization(tf, interpolation_points)
    doc: dict = {
        "tf": tf.to_json_dict(),
        "source": label,
        "stable": pz.stable,
        "poles": [
            {"re": p.real, "im": p.imag, "multiplicity": mult} for p, mult in pz.poles
        ],
        "zeros": [{"re": z.real, "im": z.imag} for z in pz.zeros],
        "gain": pz.gain,
        "realization": {
            "A": companion.A.tolist(),
            "B": companion.B.tolist(),
            "C": companion.C.tolist(),
            "B_interpolation": interp.B.tolist(),
        },
    }
    try:
        pf = partial_fractions(tf)
    except UnsupportedPoleStructureError as exc:
        doc["partial_fractions"] = None
        doc["impulse_response"] = None
        doc["note"] = str(exc)
        return doc
    doc["partial_fractions"] = [
        {
            "pole": {"re": t.pole.real, "im": t.pole.imag},
            "multiplicity": t.multiplicity,
            "coefficient": t.coefficient,
            "time_constant": t.time_constant,
            "damping": t.damping,
        }
        for t in pf.terms
    ]
    kernel = impulse_from_fractions(pf)
    doc["impulse_response"] = [
        {
            "kind": t.kind,
            "rate": t.rate,
            "frequency": t.frequency,
            "coefficient": t.coefficient,
        }
        for t in kernel.terms
    ]
    doc["kernel_norm_sq_T5"] = kernel_norm_squared(kernel, DEFAULT_HORIZON)
    return doc


def build_operator(
    tf: RationalTransferFunction | None,
    name: str,
    horizon: float,
    order: int,
    w_form: str = "factored",
) -> SpectralOperator:
    if name == "P":
        return differentiation_matrix(horizon, order)
    if name == "Pinv":
        return integration_matrix(horizon, order)
    if tf is None:
        raise InputError(f"operator {name!r} needs a transfer function")
    if name == "exact":
        return exact_projection(tf, horizon, order)
    if name == "rational":
        return compose_rational(tf, horizon, order, form=w_form)
    if name == "whiten":
        return whitening_operator(compose_rational(tf, horizon, order, form=w_form))
    raise InputError(f"unknown operator {name!r}; choose from {OPERATOR_NAMES}")


def simulation_operator(
    tf: RationalTransferFunction, horizon: float, order: int
) -> SpectralOperator:
    """Exact projection when the pole structure allows it, else rational."""
    try:
        return exact_projection(tf, horizon, order)
    except UnsupportedPoleStructureError:
        return compose_rational(tf, horizon, order)


def run_simulation(
    tf: RationalTransferFunction,
    label: str,
    method: str = "spectral",
    horizon: float = DEFAULT_HORIZON,
    order: int = DEFAULT_ORDER,
    seed: int = 0,
    stream_id: int = 0,
    trajectories: int = 1,
    grid: int = DEFAULT_GRID,
) -> tuple[list[SampleTrajectory], dict]:
    """Generate trajectories by the chosen method plus metadata for headers."""
    if method not in METHODS:
        raise InputError(f"unknown method {method!r}; choose from {METHODS}")
    if trajectories < 1:
        raise InputError(f"trajectory count must be >= 1, got {trajectories}")
    if grid < 2:
        raise InputError(f"grid must have >= 2 points, got {grid}")
    if not horizon > 0:
        raise InputError(f"horizon must be positive, got {horizon}")

    stable = find_poles_zeros(tf).stable
    metadata = {
        "source": label,
        "method": method,
        "T": horizon,
        "seed": seed,
        "stream_id": stream_id,
        "version": __version__,
    }
    if not stable:
        metadata["warning"] = "transfer function has an unstable pole"

    runs: list[SampleTrajectory] = []
    if method == "spectral":
        metadata["L"] = order
        operator = simulation_operator(tf, horizon, order)
        metadata["operator"] = operator.source
        for k in range(trajectories):
            source = GaussianSource(seed, stream_id + k)
            runs.append(spectral_simulate(operator, source, grid))
    elif method == "sde":
        steps = grid - 1
        metadata["steps"] = steps
        realization = companion_realization(tf)
        # metadata already flags instability; silence the per-run warning
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for k in range(trajectories):
                source = GaussianSource(seed, stream_id + k)
                runs.append(euler_maruyama(realization, horizon, steps, source))
    else:
        steps = grid - 1
        metadata["steps"] = steps
        kernel = impulse_from_fractions(partial_fractions(tf))
        for k in range(trajectories):
            source = GaussianSource(seed, stream_id + k)
            runs.append(ito_sum_simulate(kernel, horizon, steps, source))
    return runs, metadata


def run_error_table(
    tf: RationalTransferFunction,
    horizon: float,
    orders: Sequence[int],
    w_form: str = "factored",
) -> tuple[list[ErrorReport], float | None]:
    reports = error_table(tf, horizon, list(orders), w_form=w_form)
    rate = convergence_rate(reports) if len(reports) >= 3 else None
    return reports, rate


def analytic_variance_curve(
    tf: RationalTransferFunction, times: Sequence[float]
) -> np.ndarray:
    """E x(t)^2 of the exact process at the given times."""
    from .impulse_response import variance_at

    kernel = impulse_from_fractions(partial_fractions(tf))
    return np.array([variance_at(kernel, t) for t in times])
