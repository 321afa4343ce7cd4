"""Built-in filter presets.

The dryden presets are the longitudinal/lateral gust filters in their
generalized form at alpha=1, beta=2, gamma=3, delta=4; ``osc`` is the
damped oscillator with time constant 2 and damping 1/2.  The default
horizon is T=5 for all of them.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError
from .tf_core import RationalTransferFunction

DEFAULT_HORIZON = 5.0
DEFAULT_ORDER = 256
DEFAULT_GRID = 1000


@dataclass(frozen=True)
class Preset:
    name: str
    tf: RationalTransferFunction
    description: str


def _tf(num, den) -> RationalTransferFunction:
    return RationalTransferFunction.from_coefficients(num, den)


PRESETS: dict[str, Preset] = {
    "dryden1": Preset(
        "dryden1",
        _tf([1.0], [1.0, 3.0]),                    # 1 / (3s + 1)
        "first-order gust filter alpha/(gamma s + 1)",
    ),
    "dryden2": Preset(
        "dryden2",
        _tf([1.0, 2.0], [1.0, 8.0, 16.0]),         # (2s + 1) / (4s + 1)^2
        "second-order gust filter alpha(beta s + 1)/(delta s + 1)^2",
    ),
    "dryden3": Preset(
        "dryden3",
        _tf([0.0, 1.0, 2.0], [1.0, 11.0, 40.0, 48.0]),  # s(2s+1) / ((3s+1)(4s+1)^2)
        "third-order gust filter alpha s (beta s + 1)/((gamma s + 1)(delta s + 1)^2)",
    ),
    "osc": Preset(
        "osc",
        _tf([1.0], [1.0, 2.0, 4.0]),               # 1 / (4s^2 + 2s + 1)
        "oscillatory block with theta=2, xi=1/2",
    ),
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise InputError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None
