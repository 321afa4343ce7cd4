"""Exact mean-square approximation error of the spectral simulation.

For a filter with kernel k and truncation order L the error splits into
two orthogonal parts: the Parseval remainder of the truncated exact
matrix (eps1) plus the squared distance between the exact truncated
matrix and the rational-in-P composition actually used in computations
(eps2).  Both are computed in closed form, no sampling involved.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateFitError, InputError
from .impulse_response import impulse_from_fractions, kernel_norm_squared
from .spectral_operators import compose_rational, exact_projection
from .tf_core import RationalTransferFunction, partial_fractions

# asymptotic rate estimated from the largest orders only
_FIT_POINTS = 4


@dataclass(frozen=True)
class ErrorReport:
    order: int
    epsilon: float
    epsilon1: float
    epsilon2: float
    kernel_norm_sq: float


def error_decomposition(
    tf: RationalTransferFunction,
    horizon: float,
    order: int,
    w_form: str = "factored",
) -> ErrorReport:
    """eps = eps1 + eps2 at one truncation order.

    eps1 = ||k||^2 - ||W_exact||^2 (Parseval remainder of truncation),
    eps2 = ||W_exact - W_rational||^2 (cost of composing with truncated
    matrices), with W_rational built per ``w_form``.
    """
    kernel = impulse_from_fractions(partial_fractions(tf))
    norm_sq = kernel_norm_squared(kernel, horizon)
    exact = exact_projection(tf, horizon, order)
    rational = compose_rational(tf, horizon, order, form=w_form)
    eps1 = norm_sq - exact.frobenius_norm_sq()
    eps2 = float(np.sum((exact.matrix - rational.matrix) ** 2))
    return ErrorReport(
        order=order,
        epsilon=eps1 + eps2,
        epsilon1=eps1,
        epsilon2=eps2,
        kernel_norm_sq=norm_sq,
    )


def error_table(
    tf: RationalTransferFunction,
    horizon: float,
    orders: Sequence[int],
    w_form: str = "factored",
) -> list[ErrorReport]:
    if not orders:
        raise InputError("need at least one truncation order")
    if list(orders) != sorted(orders):
        raise InputError("truncation orders must be ascending")
    return [error_decomposition(tf, horizon, n, w_form=w_form) for n in orders]


def convergence_rate(reports: Sequence[ErrorReport]) -> float:
    """Fitted exponent p in eps ~ C / L^p over the largest orders.

    Least-squares slope of log(eps) against log(L), negated; uses the
    last min(4, len) reports so early pre-asymptotic orders do not bias
    the estimate.
    """
    if len(reports) < 3:
        raise InputError(f"need >= 3 reports to fit a rate, got {len(reports)}")
    tail = list(reports)[-_FIT_POINTS:]
    if any(r.epsilon <= 0 for r in tail):
        raise DegenerateFitError("non-positive error values cannot be log-fitted")
    logs_l = np.log([r.order for r in tail])
    logs_e = np.log([r.epsilon for r in tail])
    slope = np.polyfit(logs_l, logs_e, 1)[0]
    return float(-slope)
