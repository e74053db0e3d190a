"""Propagation model shared by every transmission scenario.

Received power follows P_r = P_t * Z / (d / d_ref)^a with d_ref fixed at 1 m:
deterministic power-law path loss times a unit-mean fading power gain Z.
Under Rayleigh fading Z is Exp(1), which gives the closed-form affected area
(2*pi/a) * Gamma(2/a) * (P_t / P_min)^(2/a); the distribution-generic integral
form is kept alongside it as an independent cross-check path.

Scenario inputs arrive in dBm, the formulas run in watts; the module owns
that conversion discipline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .mathkernel import QuadratureError, QuadratureSpec, gamma_fn, integrate_semi_infinite

__all__ = [
    "PropagationEnvironment",
    "PowerLevel",
    "FadingGain",
    "dbm_to_watts",
    "watts_to_dbm",
    "watts_of",
    "mean_snr",
    "affected_area_single",
    "affected_area_generic",
]

REFERENCE_DISTANCE_M = 1.0


def dbm_to_watts(p_dbm: float) -> float:
    """dBm to watts: P_W = 10^((P_dBm - 30) / 10)."""
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_watts: float) -> float:
    """Watts to dBm; requires a positive power."""
    if p_watts <= 0:
        raise ValueError("watts_to_dbm requires power > 0")
    return 10.0 * math.log10(p_watts) + 30.0


@dataclass(frozen=True)
class PowerLevel:
    """A transmit power in watts, constructed from either unit."""

    watts: float

    def __post_init__(self):
        if not (self.watts > 0 and math.isfinite(self.watts)):
            raise ValueError("power must be positive and finite")

    @classmethod
    def from_dbm(cls, p_dbm: float) -> "PowerLevel":
        return cls(dbm_to_watts(p_dbm))

    @property
    def dbm(self) -> float:
        return watts_to_dbm(self.watts)


def watts_of(p) -> float:
    """Accept a PowerLevel or a plain positive wattage."""
    w = p.watts if isinstance(p, PowerLevel) else float(p)
    if not (w > 0 and math.isfinite(w)):
        raise ValueError("power must be positive and finite")
    return w


@dataclass(frozen=True)
class PropagationEnvironment:
    """Path-loss exponent, noise power, and detection threshold (linear units)."""

    path_loss_exponent: float
    noise_w: float
    p_min_w: float
    d_ref_m: float = field(default=REFERENCE_DISTANCE_M)

    def __post_init__(self):
        if self.path_loss_exponent <= 0:
            raise ValueError("path loss exponent must be > 0")
        if self.noise_w <= 0:
            raise ValueError("noise power must be > 0")
        if self.p_min_w <= 0:
            raise ValueError("detection threshold must be > 0")
        if self.d_ref_m != REFERENCE_DISTANCE_M:
            raise ValueError("reference distance is fixed at 1 m")

    @classmethod
    def from_dbm(cls, path_loss_exponent: float, noise_dbm: float,
                 p_min_dbm: float) -> "PropagationEnvironment":
        return cls(path_loss_exponent, dbm_to_watts(noise_dbm), dbm_to_watts(p_min_dbm))


@dataclass(frozen=True)
class FadingGain:
    """One realisation of the unit-mean multipath power gain."""

    z: float

    def __post_init__(self):
        if self.z < 0:
            raise ValueError("fading power gain must be >= 0")

    @staticmethod
    def rayleigh_ccdf(z):
        """P{Z > z} for the unit-mean exponential gain."""
        return np.exp(-np.asarray(z, dtype=float))


def mean_snr(env: PropagationEnvironment, p_t, d: float) -> float:
    """Average received SNR P_t / (d^a * N) at distance d (meters)."""
    if d <= 0:
        raise ValueError("distance must be > 0")
    return watts_of(p_t) / (d ** env.path_loss_exponent * env.noise_w)


def affected_area_single(env: PropagationEnvironment, p_t) -> float:
    """Rayleigh closed-form affected area of one transmitter, in m^2.

    (2*pi/a) * Gamma(2/a) * (P_t / P_min)^(2/a); grows as P_t^(2/a) and is
    independent of the noise power and of any link distance.
    """
    a = env.path_loss_exponent
    ratio = watts_of(p_t) / env.p_min_w
    return (2.0 * math.pi / a) * gamma_fn(2.0 / a) * ratio ** (2.0 / a)


def affected_area_generic(env: PropagationEnvironment, p_t, fading_ccdf,
                          spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Affected area for an arbitrary fading ccdf, by quadrature.

    The polar integral 2*pi * int (1 - F_Z(P_min r^a / P_t)) r dr is evaluated
    after the substitution s = (P_min r^a / P_t)^(2/a), which removes both the
    power scale and the endpoint singularity:

        A = pi * (P_t/P_min)^(2/a) * int_0^inf ccdf(v^(a/2)) dv.

    A heavy-tailed ccdf whose integral diverges surfaces as a quadrature
    non-convergence diagnostic.
    """
    a = env.path_loss_exponent
    ratio = watts_of(p_t) / env.p_min_w
    half_a = 0.5 * a

    def integrand(v):
        return np.asarray(fading_ccdf(np.asarray(v) ** half_a), dtype=float)

    try:
        result = integrate_semi_infinite(integrand, spec, scale=1.0)
    except QuadratureError as exc:
        raise QuadratureError(
            "affected-area integral did not converge (heavy-tailed ccdf?)",
            math.pi * ratio ** (2.0 / a) * exc.best, exc.error) from exc
    return math.pi * ratio ** (2.0 / a) * result.value
