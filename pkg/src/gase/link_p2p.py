"""Point-to-point link: ergodic capacity, GASE, and the GASE-optimal power.

Under Rayleigh fading the ergodic capacity is (1/ln 2) * exp(x) * E1(x) with
x = d^a N / P_t, and GASE divides it by the single-transmitter affected area.
GASE is unimodal in P_t for path-loss exponents above 2; the maximiser solves
(x + 2/a) * exp(x) * E1(x) = 1, which is scale-free in x, so the root is
found once in x and mapped back through P_t = d^a N / x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict

from .mathkernel import find_root_bracketed, scaled_e1
from .propagation import (PowerLevel, PropagationEnvironment, affected_area_single,
                          mean_snr)

LN2 = math.log(2.0)

__all__ = [
    "P2pScenario",
    "GaseBreakdown",
    "NoInteriorOptimumError",
    "ergodic_capacity_p2p",
    "gase_p2p",
    "optimal_power_p2p",
    "optimal_power_residual",
]


class NoInteriorOptimumError(ValueError):
    """GASE has no interior maximum in transmit power (path-loss exponent <= 2)."""


@dataclass(frozen=True)
class P2pScenario:
    env: PropagationEnvironment
    p_t: PowerLevel
    d: float

    def __post_init__(self):
        if self.d <= 0:
            raise ValueError("distance must be > 0")


@dataclass(frozen=True)
class GaseBreakdown:
    """Ergodic capacity (bps/Hz), affected area (m^2), and their ratio.

    For multi-transmitter scenarios ``area`` is the effective area implied by
    capacity/gase; the true per-transmitter areas live in ``components``.
    """

    capacity: float
    area: float
    gase: float
    components: Dict[str, float] = field(default_factory=dict)


def ergodic_capacity_p2p(s: P2pScenario) -> float:
    """Rayleigh ergodic capacity (1/ln 2) * exp(x) * E1(x), x = d^a N / P_t."""
    x = 1.0 / mean_snr(s.env, s.p_t, s.d)
    return scaled_e1(x) / LN2


def gase_p2p(s: P2pScenario) -> GaseBreakdown:
    """Capacity over affected area for a single link."""
    capacity = ergodic_capacity_p2p(s)
    area = affected_area_single(s.env, s.p_t)
    return GaseBreakdown(capacity=capacity, area=area, gase=capacity / area,
                         components={"area_m2": area})


def optimal_power_residual(env: PropagationEnvironment, d: float, p_t) -> float:
    """Residual (x + 2/a) * exp(x) * E1(x) - 1 at x = d^a N / P_t."""
    x = 1.0 / mean_snr(env, p_t, d)
    return (x + 2.0 / env.path_loss_exponent) * scaled_e1(x) - 1.0


def optimal_power_p2p(env: PropagationEnvironment, d: float,
                      bracket=(1e-6, 1e3), tol: float = 1e-12) -> PowerLevel:
    """GASE-maximising transmit power for a > 2.

    Solves the dimensionless root equation on x = d^a N / P_t; the result is
    proportional to d^a * N and independent of the detection threshold.
    Refuses for a <= 2, where GASE has no interior maximum.
    """
    a = env.path_loss_exponent
    if a <= 2.0:
        raise NoInteriorOptimumError(
            f"path loss exponent {a:g} <= 2: GASE is maximised only in the "
            "vanishing-power limit, no interior optimum exists")

    def g(x):
        return (x + 2.0 / a) * scaled_e1(x) - 1.0

    x_star = find_root_bracketed(g, bracket[0], bracket[1], tol=tol)
    return PowerLevel(d ** a * env.noise_w / x_star)
