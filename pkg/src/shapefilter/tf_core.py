"""Rational transfer functions and their induced spectral densities.

Coefficients are stored in ascending powers throughout: ``num[k]`` is the
coefficient of ``s**k``.  A transfer function H(s) = M(s)/D(s) is accepted
only when strictly proper (deg D > deg M) with nonzero leading
coefficients; everything downstream (realizations, impulse responses,
spectral operators) builds on the validated form.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import (
    NotProperError,
    PoleOnImaginaryAxisError,
    UnsupportedPoleStructureError,
    ZeroLeadingCoefficientError,
)

# Root clustering scale: roots closer than CLUSTER_TOL*(1+|root|) merge
# into one multiple root.  Companion eigenvalues of a double root split
# by O(sqrt(machine eps)) ~ 1e-8, so the tolerance must sit well above
# that; the cluster mean still recovers the root to O(machine eps).
CLUSTER_TOL = 1e-6


@dataclass(frozen=True)
class RationalTransferFunction:
    """H(s) = (b_m s^m + ... + b_0) / (a_n s^n + ... + a_0), ascending order."""

    num: tuple[float, ...]
    den: tuple[float, ...]

    @classmethod
    def from_coefficients(cls, num: Sequence[float], den: Sequence[float]) -> "RationalTransferFunction":
        return validate(cls(tuple(float(c) for c in num), tuple(float(c) for c in den)))

    @classmethod
    def from_json_dict(cls, data: dict) -> "RationalTransferFunction":
        """Parse the wire format {"num": [b0, ...], "den": [a0, ...]}."""
        try:
            num, den = data["num"], data["den"]
        except (KeyError, TypeError) as exc:
            raise ZeroLeadingCoefficientError(
                "transfer function JSON must carry 'num' and 'den' arrays"
            ) from exc
        return cls.from_coefficients(num, den)

    @property
    def m(self) -> int:
        return len(self.num) - 1

    @property
    def n(self) -> int:
        return len(self.den) - 1

    def evaluate(self, s: complex) -> complex:
        return complex(npoly.polyval(s, self.num) / npoly.polyval(s, self.den))

    def to_json_dict(self) -> dict:
        return {"num": list(self.num), "den": list(self.den)}


@dataclass(frozen=True)
class PoleZeroForm:
    """Factored form: gain * prod(s - zero) / prod((s - pole)^multiplicity)."""

    gain: float
    zeros: tuple[complex, ...]
    poles: tuple[tuple[complex, int], ...]
    stable: bool

    def expand(self) -> tuple[np.ndarray, np.ndarray]:
        """Recover (num, den) coefficients, denominator monic."""
        den = npoly.polyfromroots(
            [p for p, mult in self.poles for _ in range(mult)]
        )
        zeros = npoly.polyfromroots(self.zeros) if self.zeros else np.array([1.0])
        return self.gain * zeros.real, den.real


@dataclass(frozen=True)
class PartialFractionTerm:
    """One standardized fraction.

    Real simple pole:  coefficient / (time_constant*s + 1), damping None.
    Real double pole:  coefficient / (time_constant*s + 1)**2, damping None.
    Conjugate pair:    coefficient / (tc^2 s^2 + 2*damping*tc*s + 1).
    """

    pole: complex
    multiplicity: int
    coefficient: float
    time_constant: float
    damping: float | None = None

    def evaluate(self, s: complex) -> complex:
        tc = self.time_constant
        if self.damping is not None:
            return self.coefficient / (tc * tc * s * s + 2 * self.damping * tc * s + 1)
        return self.coefficient / (tc * s + 1) ** self.multiplicity


@dataclass(frozen=True)
class PartialFractions:
    terms: tuple[PartialFractionTerm, ...]

    def evaluate(self, s: complex) -> complex:
        return sum((t.evaluate(s) for t in self.terms), 0j)


def validate(tf: RationalTransferFunction) -> RationalTransferFunction:
    """Return a normalized copy with trailing zero coefficients stripped.

    Raises NotProperError when deg(den) <= deg(num) and
    ZeroLeadingCoefficientError when either polynomial is empty or
    identically zero.
    """
    num = _strip(tf.num, "numerator")
    den = _strip(tf.den, "denominator")
    if not all(np.isfinite(num)) or not all(np.isfinite(den)):
        raise ZeroLeadingCoefficientError("coefficients must be finite")
    if len(den) <= len(num):
        raise NotProperError(
            f"denominator degree {len(den) - 1} must exceed numerator degree {len(num) - 1}"
        )
    return RationalTransferFunction(num, den)


def _strip(coeffs: Sequence[float], side: str) -> tuple[float, ...]:
    vals = [float(c) for c in coeffs]
    while vals and vals[-1] == 0.0:
        vals.pop()
    if not vals:
        raise ZeroLeadingCoefficientError(f"{side} has no nonzero coefficient")
    return tuple(vals)


def find_poles_zeros(tf: RationalTransferFunction) -> PoleZeroForm:
    """Roots of D and M with multiplicities via companion-matrix eigenvalues.

    Nearby roots (within CLUSTER_TOL*(1+|root|)) merge into one root of
    higher multiplicity; conjugate pairs are symmetrized exactly.  An
    unstable pole (Re >= 0) only clears the ``stable`` flag, it is not an
    error: the synthesis pipeline still produces a filter, the simulators
    warn instead.
    """
    poles = _cluster_roots(npoly.polyroots(tf.den))
    zero_roots = _cluster_roots(npoly.polyroots(tf.num)) if tf.m > 0 else []
    zeros = tuple(z for z, mult in zero_roots for _ in range(mult))
    stable = all(p.real < 0 for p, _ in poles)
    return PoleZeroForm(
        gain=tf.num[-1] / tf.den[-1],
        zeros=zeros,
        poles=tuple(poles),
        stable=stable,
    )


def _cluster_roots(roots: np.ndarray) -> list[tuple[complex, int]]:
    clusters: list[list[complex]] = []
    for r in sorted(roots, key=lambda z: (z.real, abs(z.imag))):
        for members in clusters:
            center = sum(members) / len(members)
            if abs(r - center) <= CLUSTER_TOL * (1 + abs(center)):
                members.append(r)
                break
        else:
            clusters.append([r])

    out: list[tuple[complex, int]] = []
    for members in clusters:
        center = sum(members) / len(members)
        if abs(center.imag) <= CLUSTER_TOL * (1 + abs(center)):
            center = complex(center.real, 0.0)
        out.append((center, len(members)))

    # exact conjugate symmetry: average each pair with its mirror
    sym: list[tuple[complex, int]] = []
    used = [False] * len(out)
    for i, (p, mult) in enumerate(out):
        if used[i] or p.imag == 0.0:
            continue
        partner = min(
            (j for j, (q, mq) in enumerate(out) if not used[j] and j != i and q.imag * p.imag < 0 and mq == mult),
            key=lambda j: abs(out[j][0] - p.conjugate()),
            default=None,
        )
        if partner is not None:
            center = (p + out[partner][0].conjugate()) / 2
            sym.append((center, mult))
            sym.append((center.conjugate(), mult))
            used[i] = used[partner] = True
    for i, (p, mult) in enumerate(out):
        if not used[i] and p.imag != 0.0:
            sym.append((p, mult))  # unpaired complex root, kept as-is
            used[i] = True
    reals = [(p, m) for i, (p, m) in enumerate(out) if not used[i]]
    return sorted(reals + sym, key=lambda pm: (pm[0].real, pm[0].imag))


def partial_fractions(tf: RationalTransferFunction) -> PartialFractions:
    """Decompose H into standardized fractions.

    Supported pole structure: real poles of multiplicity one or two and
    simple conjugate pairs whose residue carries no s-term (so each pair
    reduces to coefficient / (tc^2 s^2 + 2 xi tc s + 1)).  Anything else
    raises UnsupportedPoleStructureError.
    """
    pz = find_poles_zeros(tf)
    an = tf.den[-1]
    dnum = npoly.polyder(np.asarray(tf.num, dtype=float))

    def m_at(s: complex) -> complex:
        return complex(npoly.polyval(s, tf.num))

    def mprime_at(s: complex) -> complex:
        return complex(npoly.polyval(s, dnum))

    terms: list[PartialFractionTerm] = []
    handled_conj: set[int] = set()
    for idx, (pole, mult) in enumerate(pz.poles):
        if idx in handled_conj:
            continue
        if abs(pole) <= CLUSTER_TOL:
            raise UnsupportedPoleStructureError(
                "pole at the origin cannot be written as a time-constant fraction"
            )
        # Q(s) = D(s) / (s - pole)^mult evaluated from the other roots
        others = [(q, mq) for j, (q, mq) in enumerate(pz.poles) if j != idx]
        q_val = an * np.prod([(pole - q) ** mq for q, mq in others]) if others else complex(an)
        log_der = sum(mq / (pole - q) for q, mq in others)

        if pole.imag == 0.0:
            lam = pole.real
            tc = -1.0 / lam
            if mult == 1:
                r = m_at(pole) / q_val
                terms.append(
                    PartialFractionTerm(pole, 1, float(r.real * tc), tc)
                )
            elif mult == 2:
                r2 = m_at(pole) / q_val
                r1 = (mprime_at(pole) - m_at(pole) * log_der) / q_val
                terms.append(
                    PartialFractionTerm(pole, 2, float(r2.real * tc * tc), tc)
                )
                if r1.real * tc != 0.0:
                    terms.append(
                        PartialFractionTerm(pole, 1, float(r1.real * tc), tc)
                    )
            else:
                raise UnsupportedPoleStructureError(
                    f"real pole {lam:g} has multiplicity {mult} > 2"
                )
        else:
            if mult > 1:
                raise UnsupportedPoleStructureError(
                    f"complex pole pair at {pole:.6g} is repeated"
                )
            conj_idx = next(
                j for j, (q, _) in enumerate(pz.poles) if j != idx and q == pole.conjugate()
            )
            handled_conj.add(conj_idx)
            r = m_at(pole) / q_val
            if abs(r.real) > 1e-8 * max(abs(r), 1e-300):
                raise UnsupportedPoleStructureError(
                    "conjugate-pair residue carries an s-term; "
                    "only constant-numerator second-order fractions are supported"
                )
            theta = 1.0 / abs(pole)
            xi = -pole.real / abs(pole) + 0.0  # +0.0 normalizes -0.0
            delta = -2.0 * theta * theta * (r * pole.conjugate()).real
            terms.append(
                PartialFractionTerm(pole, 1, float(delta), theta, damping=float(xi))
            )
    return PartialFractions(tuple(terms))


def psd(tf: RationalTransferFunction, omega: float) -> float:
    """Power spectral density S(omega) = |H(i*omega)|**2 (even in omega)."""
    s = 1j * float(omega)
    d = complex(npoly.polyval(s, tf.den))
    d_scale = float(np.sum(np.abs(tf.den) * np.abs(s) ** np.arange(len(tf.den))))
    if abs(d) <= 1e-12 * max(d_scale, 1e-300):
        raise PoleOnImaginaryAxisError(f"denominator vanishes at omega={omega:g}")
    return float(abs(complex(npoly.polyval(s, tf.num)) / d) ** 2)
