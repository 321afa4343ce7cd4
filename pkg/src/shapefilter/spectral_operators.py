"""Closed-form spectral matrices of elementary blocks and their composition.

Every linear time-invariant block has a matrix representation in the
cosine basis: the action of the block on expansion coefficients.  This
module provides the exact truncated matrices of the integration and
differentiation operators, the first- and second-order lag blocks and the
damped oscillator, plus two ways to assemble a whole filter:

* ``exact_projection`` sums block matrices along the partial-fraction
  decomposition; every element equals the true infinite-matrix entry.
* ``compose_rational`` evaluates the transfer function as a matrix
  rational expression in the *truncated* differentiation matrix; this is
  cheaper and fully general but differs from the exact projection by a
  truncation artifact that ``error_analysis`` quantifies.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    IndexNegativeError,
    InputError,
    ResonantParametersError,
    SingularOperatorError,
    UnsupportedPoleStructureError,
)
from .tf_core import RationalTransferFunction, find_poles_zeros, partial_fractions

SQRT2 = np.sqrt(2.0)
PI = np.pi

CLOSED_FORM = "closed_form"
RATIONAL_IN_P = "rational_in_P"
QUADRATURE = "quadrature"

_COND_LIMIT = 1e14       # compose_rational refuses beyond this
_WHITEN_COND_LIMIT = 1e12


@dataclass(frozen=True)
class SpectralOperator:
    """L x L matrix of a block over horizon T, tagged with its origin.

    ``provenance`` records how the matrix was built (closed_form,
    rational_in_P, or quadrature) so the error decomposition can tell the
    truncation error from the matrix-composition error.
    """

    matrix: np.ndarray
    T: float
    L: int
    provenance: str
    source: str = ""

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=float)
        if mat.shape != (self.L, self.L):
            raise InputError(f"matrix shape {mat.shape} does not match L={self.L}")
        if not np.all(np.isfinite(mat)):
            raise InputError("operator matrix contains non-finite entries")
        if self.provenance not in (CLOSED_FORM, RATIONAL_IN_P, QUADRATURE):
            raise InputError(f"unknown provenance {self.provenance!r}")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    def frobenius_norm_sq(self) -> float:
        return float(np.sum(self.matrix * self.matrix))


@dataclass(frozen=True)
class BlockParameters:
    """Time constant and damping of a second-order (or first-order) block.

    With damping xi in (-1, 1): mu = -xi/theta, nu = sqrt(1-xi^2)/theta.
    Without damping (first-order lag): mu = -1/theta, nu = 0.  The
    quantity eta_sq = mu^2 - nu^2 is kept signed; no formula below ever
    needs its square root.
    """

    theta: float
    xi: float | None = None

    def __post_init__(self):
        if not self.theta > 0:
            raise InputError(f"time constant must be positive, got {self.theta}")
        if self.xi is not None and not -1.0 < self.xi < 1.0:
            raise InputError(f"damping must lie in (-1, 1), got {self.xi}")

    @property
    def mu(self) -> float:
        return -1.0 / self.theta if self.xi is None else -self.xi / self.theta

    @property
    def nu(self) -> float:
        return 0.0 if self.xi is None else np.sqrt(1.0 - self.xi**2) / self.theta

    @property
    def lam(self) -> float:
        return 1.0 / self.theta

    @property
    def eta_sq(self) -> float:
        return self.mu**2 - self.nu**2


def _check_order(order: int) -> None:
    if order < 1:
        raise IndexNegativeError(f"truncation order must be >= 1, got {order}")


def _index_grids(order: int):
    i = np.arange(1, order, dtype=float)
    sign_i = np.where(np.arange(1, order) % 2 == 0, 1.0, -1.0)
    big_i = i[:, None]
    big_j = i[None, :]
    sign_ij = np.outer(sign_i, sign_i)  # (-1)^(i+j)
    return i, sign_i, big_i, big_j, sign_ij


def integration_matrix(T: float, order: int) -> SpectralOperator:
    """Matrix of t -> integral_0^t, i.e. the inverse differentiation block."""
    _check_order(order)
    c = np.zeros((order, order))
    c[0, 0] = 0.5
    if order > 1:
        i, sign_i, big_i, big_j, _ = _index_grids(order)
        c0 = SQRT2 * (1.0 - sign_i) / (i * i * PI * PI)
        c[0, 1:] = c0
        c[1:, 0] = -c0
        den = big_i**2 - big_j**2
        den_safe = np.where(den == 0.0, 1.0, den)
        sign_ij = np.outer(sign_i, sign_i)
        low = 2.0 * (sign_ij - 1.0) / (den_safe * PI * PI)
        sub = np.where(big_i > big_j, low, -low.T)
        np.fill_diagonal(sub, 0.0)
        c[1:, 1:] = sub
    return SpectralOperator(T * c, T, order, CLOSED_FORM, source="integration")


def differentiation_matrix(T: float, order: int) -> SpectralOperator:
    """Matrix of d/dt extended to the basis (includes the boundary term)."""
    _check_order(order)
    c = np.zeros((order, order))
    c[0, 0] = 1.0
    if order > 1:
        i, sign_i, big_i, big_j, sign_ij = _index_grids(order)
        c[1:, 0] = SQRT2
        c[0, 1:] = sign_i * SQRT2
        den = big_i**2 - big_j**2
        den_safe = np.where(den == 0.0, 1.0, den)
        low = 2.0 * (big_i**2 - sign_ij * big_j**2) / den_safe
        sub = np.where(big_i > big_j, low, sign_ij * low.T)
        np.fill_diagonal(sub, 2.0)
        c[1:, 1:] = sub
    return SpectralOperator(c / T, T, order, CLOSED_FORM, source="differentiation")


def aperiodic_matrix(params: BlockParameters | float, T: float, order: int) -> SpectralOperator:
    """Matrix of the first-order lag 1/(theta s + 1)."""
    theta = params.theta if isinstance(params, BlockParameters) else float(params)
    params = BlockParameters(theta)
    _check_order(order)
    mu = params.mu
    emu = np.exp(mu * T)
    c = np.zeros((order, order))
    c[0, 0] = (emu - mu * T - 1.0) / (mu * mu * T)
    if order > 1:
        i, sign_i, big_i, big_j, sign_ij = _index_grids(order)
        phi_p = mu * mu * T * T + i * i * PI * PI
        c0 = SQRT2 * T * (emu - sign_i) / phi_p
        c[0, 1:] = c0
        c[1:, 0] = sign_i * c0
        phi_pi = phi_p[:, None]
        phi_pj = phi_p[None, :]
        den = big_i**2 - big_j**2
        den_safe = np.where(den == 0.0, 1.0, den)
        gamma = np.where(
            big_i == big_j,
            mu * T / 2.0,
            big_j**2 * (1.0 - sign_ij) / den_safe,
        )
        low = (2.0 * T / phi_pj) * (
            mu * mu * T * T * (sign_i[:, None] * emu - 1.0) / phi_pi - gamma
        )
        c[1:, 1:] = np.where(big_i >= big_j, low, sign_ij * low.T)
    return SpectralOperator(
        -mu * c, T, order, CLOSED_FORM, source=f"aperiodic(theta={theta:g})"
    )


def aperiodic2_matrix(params: BlockParameters | float, T: float, order: int) -> SpectralOperator:
    """Matrix of the critically damped second-order lag 1/(theta s + 1)^2."""
    theta = params.theta if isinstance(params, BlockParameters) else float(params)
    params = BlockParameters(theta)
    _check_order(order)
    mu = params.mu
    emu = np.exp(mu * T)
    c = np.zeros((order, order))
    c[0, 0] = ((mu * T - 2.0) * emu + mu * T + 2.0) / (mu**3 * T)
    if order > 1:
        i, sign_i, big_i, big_j, sign_ij = _index_grids(order)
        phi_p = mu * mu * T * T + i * i * PI * PI
        phi_m = mu * mu * T * T - i * i * PI * PI
        c0 = SQRT2 * T * T * (2.0 * mu * T * (sign_i - emu) + phi_p * emu) / phi_p**2
        c[0, 1:] = c0
        c[1:, 0] = sign_i * c0
        phi_pi, phi_pj = phi_p[:, None], phi_p[None, :]
        phi_mi, phi_mj = phi_m[:, None], phi_m[None, :]
        den = big_i**2 - big_j**2
        den_safe = np.where(den == 0.0, 1.0, den)
        zeta = np.where(
            big_i == big_j,
            phi_mj,
            4.0 * mu * big_j**2 * T * (1.0 - sign_ij) / den_safe,
        )
        low = (2.0 * mu * T**3 / (phi_pi * phi_pj)) * (
            (1.0 - sign_i[:, None] * emu) * (phi_mi / phi_pi + phi_mj / phi_pj)
            + sign_i[:, None] * mu * T * emu
        ) + zeta * T * T / phi_pj**2
        c[1:, 1:] = np.where(big_i >= big_j, low, sign_ij * low.T)
    return SpectralOperator(
        mu * mu * c, T, order, CLOSED_FORM, source=f"aperiodic2(theta={theta:g})"
    )


def oscillatory_matrix(params: BlockParameters, T: float, order: int) -> SpectralOperator:
    """Matrix of the oscillatory block 1/(theta^2 s^2 + 2 xi theta s + 1).

    Raises ResonantParametersError when a denominator
    (psi_i^+)^2 - (2 pi nu i T)^2 vanishes, which happens only at zero
    damping with nu T a multiple of pi.
    """
    if params.xi is None:
        raise InputError("oscillatory block needs an explicit damping coefficient")
    _check_order(order)
    mu, nu, lam, eta_sq = params.mu, params.nu, params.lam, params.eta_sq
    emu_cos = np.exp(mu * T) * np.cos(nu * T)
    emu_sin = np.exp(mu * T) * np.sin(nu * T)
    idx = np.arange(order, dtype=float)
    psi_p = lam * lam * T * T + idx * idx * PI * PI
    d_res = psi_p**2 - (2.0 * PI * nu * idx * T) ** 2
    if np.any(np.abs(d_res) <= 1e-12 * psi_p**2):
        k = int(np.argmin(np.abs(d_res)))
        raise ResonantParametersError(
            f"oscillatory block is resonant at basis index {k} "
            f"(theta={params.theta:g}, xi={params.xi:g}, T={T:g})"
        )
    c = np.zeros((order, order))
    c[0, 0] = (
        2.0 * mu * nu * (1.0 - emu_cos) + eta_sq * emu_sin + nu * lam * lam * T
    ) / (lam**4 * T)
    if order > 1:
        i, sign_i, big_i, big_j, sign_ij = _index_grids(order)
        d_i = d_res[1:]
        c0 = SQRT2 * T * (
            2.0 * mu * nu * T * T * (sign_i - emu_cos)
            + (eta_sq * T * T + i * i * PI * PI) * emu_sin
        ) / d_i
        c[0, 1:] = c0
        c[1:, 0] = sign_i * c0
        di_col, dj_row = d_i[:, None], d_i[None, :]
        psi_m = lam * lam * T * T - i * i * PI * PI
        den = big_i**2 - big_j**2
        den_safe = np.where(den == 0.0, 1.0, den)
        kappa = np.where(
            big_i == big_j,
            psi_m[None, :],
            4.0 * mu * big_j**2 * T * (1.0 - sign_ij) / den_safe,
        )
        low = 2.0 * T**3 * (
            2.0 * mu * nu * (lam**4 * T**4 - big_i**2 * big_j**2 * PI**4) * (1.0 - sign_i[:, None] * emu_cos)
            + sign_i[:, None]
            * (eta_sq * lam**4 * T**4 + PI * PI * (lam**4 * (big_i**2 + big_j**2) * T * T + PI * PI * big_i**2 * big_j**2 * eta_sq))
            * emu_sin
        ) / (di_col * dj_row) + nu * kappa * T * T / dj_row
        c[1:, 1:] = np.where(big_i >= big_j, low, sign_ij * low.T)
    scale = 1.0 / (params.theta * np.sqrt(1.0 - params.xi**2))
    return SpectralOperator(
        scale * c, T, order, CLOSED_FORM,
        source=f"oscillatory(theta={params.theta:g}, xi={params.xi:g})",
    )


def _solve_factor(factor: np.ndarray, rhs: np.ndarray, what: str) -> np.ndarray:
    cond = np.linalg.cond(factor)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise SingularOperatorError(
            f"{what} is numerically singular at this truncation (cond ~ {cond:.3e})"
        )
    return np.linalg.solve(factor, rhs)


def compose_rational(
    tf: RationalTransferFunction, T: float, order: int, form: str = "factored"
) -> SpectralOperator:
    """Evaluate H at the truncated differentiation matrix.

    form="polynomial" computes (sum a_k P^k)^{-1} (sum b_k P^k) directly;
    form="factored" multiplies first-order (and conjugate-pair quadratic)
    factors built from the poles and zeros.  Both agree up to rounding;
    the factored variant mirrors how composed filters are usually written
    out block by block.
    """
    _check_order(order)
    p_mat = differentiation_matrix(T, order).matrix
    eye = np.eye(order)
    if form == "polynomial":
        num = _matrix_polynomial(tf.num, p_mat, eye)
        den = _matrix_polynomial(tf.den, p_mat, eye)
        w = _solve_factor(den, num, "denominator matrix polynomial")
    elif form == "factored":
        pz = find_poles_zeros(tf)
        w = pz.gain * _zero_product(pz.zeros, p_mat, eye)
        for factor, label in _pole_factors(pz.poles, p_mat, eye):
            w = _solve_factor(factor, w, label)
    else:
        raise InputError(f"unknown composition form {form!r}")
    return SpectralOperator(
        w, T, order, RATIONAL_IN_P, source=f"rational[{form}]"
    )


def _matrix_polynomial(coeffs, p_mat: np.ndarray, eye: np.ndarray) -> np.ndarray:
    # Horner evaluation from the highest coefficient down
    acc = coeffs[-1] * eye
    for c in reversed(coeffs[:-1]):
        acc = acc @ p_mat + c * eye
    return acc


def _zero_product(zeros, p_mat: np.ndarray, eye: np.ndarray) -> np.ndarray:
    acc = eye.copy()
    used = [False] * len(zeros)
    for i, z in enumerate(zeros):
        if used[i]:
            continue
        if z.imag == 0.0:
            acc = acc @ (p_mat - z.real * eye)
        else:
            j = next(
                k for k, other in enumerate(zeros)
                if k != i and not used[k] and other == z.conjugate()
            )
            used[j] = True
            acc = acc @ (p_mat @ p_mat - 2.0 * z.real * p_mat + abs(z) ** 2 * eye)
        used[i] = True
    return acc


def _pole_factors(poles, p_mat: np.ndarray, eye: np.ndarray):
    factors = []
    seen_conj: set[int] = set()
    for i, (pole, mult) in enumerate(poles):
        if i in seen_conj:
            continue
        if pole.imag == 0.0:
            for _ in range(mult):
                factors.append((p_mat - pole.real * eye, f"factor (P - {pole.real:g} E)"))
        else:
            j = next(
                k for k, (other, _) in enumerate(poles)
                if k != i and other == pole.conjugate()
            )
            seen_conj.add(j)
            quad = p_mat @ p_mat - 2.0 * pole.real * p_mat + abs(pole) ** 2 * eye
            for _ in range(mult):
                factors.append((quad, f"conjugate-pair factor at {pole:.6g}"))
    return factors


def exact_projection(tf: RationalTransferFunction, T: float, order: int) -> SpectralOperator:
    """Exact truncated matrix of the filter: sum of block matrices.

    Requires the supported pole structure (and stable real poles, since
    the lag blocks are parametrized by positive time constants); each
    partial fraction maps to its block matrix and the matrices add.
    """
    pf = partial_fractions(tf)
    _check_order(order)
    acc = np.zeros((order, order))
    for term in pf.terms:
        if term.damping is not None:
            block = oscillatory_matrix(
                BlockParameters(term.time_constant, term.damping), T, order
            )
        elif term.multiplicity == 1:
            if term.time_constant <= 0:
                raise UnsupportedPoleStructureError(
                    "exact projection needs stable real poles "
                    f"(time constant {term.time_constant:g} <= 0)"
                )
            block = aperiodic_matrix(term.time_constant, T, order)
        else:
            if term.time_constant <= 0:
                raise UnsupportedPoleStructureError(
                    "exact projection needs stable real poles "
                    f"(time constant {term.time_constant:g} <= 0)"
                )
            block = aperiodic2_matrix(term.time_constant, T, order)
        acc = acc + term.coefficient * block.matrix
    return SpectralOperator(acc, T, order, CLOSED_FORM, source="exact projection")


def whitening_operator(w: SpectralOperator) -> SpectralOperator:
    """Inverse filter: maps the colored output back to white noise.

    The inverse is taken at the truncation order, so composing with the
    original operator gives the identity up to floating point.
    """
    cond = np.linalg.cond(w.matrix)
    if not np.isfinite(cond) or cond > _WHITEN_COND_LIMIT:
        raise SingularOperatorError(
            f"operator is not invertible at L={w.L} (cond ~ {cond:.3e})"
        )
    inv = np.linalg.solve(w.matrix, np.eye(w.L))
    return SpectralOperator(
        inv, w.T, w.L, RATIONAL_IN_P, source=f"whitening of [{w.source}]"
    )
