"""Lennard-Jones pair potential, stored-energy density and the stress law.

Everything is evaluated from the inverse-power closed forms (no tables);
the only iteration is the bisection that locates the cutoff stretch.
All evaluators accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, EllipticRegionError
from .numerics import bisect_root

#: Stretch where the stress law peaks, the unique root of sigma'(F) = 0.
#: Equal to (13/7)**(1/6); independent of the energy scale.
SONIC_STRAIN = (13.0 / 7.0) ** (1.0 / 6.0)


@dataclass(frozen=True)
class PotentialParams:
    """Interaction constants.

    A is the energy scale of the pair potential (the stress prefactor is
    3A), r0 the reference bond length, and eta_cut the relative stress
    threshold that defines the cutoff stretch: z_cut is the stretch beyond
    the sonic point where sigma falls to eta_cut * c_max.
    """

    A: float = 0.25 / 3.0
    r0: float = 1.0
    eta_cut: float = 1e-2

    def __post_init__(self):
        if not self.A > 0:
            raise DomainError(f"energy scale A must be positive, got {self.A!r}")
        if not self.r0 > 0:
            raise DomainError(f"reference length r0 must be positive, got {self.r0!r}")
        if not 0 < self.eta_cut < 1:
            raise DomainError(f"eta_cut must lie in (0, 1), got {self.eta_cut!r}")

    @classmethod
    def from_stress_scale(cls, three_a: float = 0.25, r0: float = 1.0, eta_cut: float = 1e-2):
        """Build params from the stress prefactor 3A instead of A."""
        return cls(A=three_a / 3.0, r0=r0, eta_cut=eta_cut)

    @property
    def stress_scale(self) -> float:
        """Prefactor 3A of the stress law."""
        return 3.0 * self.A


@dataclass(frozen=True)
class CriticalConstants:
    """Derived constants of a parameter set.

    r: sonic stretch (argmax of sigma); c_max: peak stress sigma(r);
    z_cut: cutoff stretch where sigma has decayed to eta_cut * c_max;
    theta_min: minimum of the energy density, attained at F = 1.
    """

    r: float
    c_max: float
    z_cut: float
    theta_min: float


def _require_positive(x, name):
    if np.any(np.asarray(x) <= 0):
        raise DomainError(f"{name} must be positive, got {x!r}")


def pair_potential(r, r0=None, params: PotentialParams = PotentialParams()):
    """Pair interaction energy of a bond of length ``r`` with rest length ``r0``.

    (A/4) * [-2 (r0/r)^6 + (r0/r)^12]; minimum -A/4 at r = r0, decaying to
    zero for long bonds. ``r0`` defaults to the parameter set's rest length.
    """
    if r0 is None:
        r0 = params.r0
    _require_positive(r, "bond length")
    _require_positive(r0, "reference length")
    q = (np.asarray(r0) / r) ** 6
    out = (params.A / 4.0) * (-2.0 * q + q * q)
    return float(out) if np.isscalar(r) or np.ndim(out) == 0 else out


def pair_force(r, r0=None, params: PotentialParams = PotentialParams()):
    """Derivative of :func:`pair_potential` in the bond length (attractive > 0)."""
    if r0 is None:
        r0 = params.r0
    _require_positive(r, "bond length")
    _require_positive(r0, "reference length")
    r = np.asarray(r, dtype=float)
    out = 3.0 * params.A * (r0**6 / r**7 - r0**12 / r**13)
    return float(out) if np.ndim(out) == 0 else out


def theta(F, params: PotentialParams = PotentialParams()):
    """Stored-energy density at stretch ``F`` (the bond energy at unit rest length)."""
    _require_positive(F, "stretch")
    q = np.asarray(F, dtype=float) ** -6
    out = (params.A / 4.0) * (-2.0 * q + q * q)
    return float(out) if np.ndim(out) == 0 else out


def sigma(F, params: PotentialParams = PotentialParams()):
    """Stress at stretch ``F``: 3A (F^-7 - F^-13). Zero at F = 1, peak at the sonic stretch."""
    _require_positive(F, "stretch")
    F = np.asarray(F, dtype=float)
    out = 3.0 * params.A * (F**-7 - F**-13)
    return float(out) if np.ndim(out) == 0 else out


def sigma_prime(F, params: PotentialParams = PotentialParams()):
    """Derivative of the stress: 3A (-7 F^-8 + 13 F^-14); positive iff F < SONIC_STRAIN."""
    _require_positive(F, "stretch")
    F = np.asarray(F, dtype=float)
    out = 3.0 * params.A * (-7.0 * F**-8 + 13.0 * F**-14)
    return float(out) if np.ndim(out) == 0 else out


def wave_speed(F, params: PotentialParams = PotentialParams()):
    """Acoustic speed sqrt(sigma'(F)).

    Only defined in the hyperbolic region; raises EllipticRegionError where
    sigma' < 0 so callers must branch explicitly instead of receiving NaNs.
    """
    sp = sigma_prime(F, params)
    if np.any(np.asarray(sp) < 0):
        raise EllipticRegionError(
            f"sigma'(F) < 0 at F={F!r}: stretch lies in the elliptic region"
        )
    out = np.sqrt(sp)
    return float(out) if np.ndim(out) == 0 else out


@lru_cache(maxsize=32)
def critical_constants(params: PotentialParams = PotentialParams()) -> CriticalConstants:
    """Sonic stretch, peak stress, cutoff stretch and energy minimum for ``params``.

    z_cut is the unique root of sigma(F) = eta_cut * c_max beyond the sonic
    point, located by bracketed bisection (the bracket is grown by doubling
    until the stress falls below the threshold).
    """
    r = SONIC_STRAIN
    c_max = sigma(r, params)
    target = params.eta_cut * c_max
    hi = 2.0 * r
    while sigma(hi, params) > target:
        hi *= 2.0
    z_cut = bisect_root(lambda F: sigma(F, params) - target, r, hi, xtol=1e-15)
    return CriticalConstants(r=r, c_max=c_max, z_cut=z_cut, theta_min=-params.A / 4.0)
