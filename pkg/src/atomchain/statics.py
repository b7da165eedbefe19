"""Closed-form equilibria of the stretched chain and their local stability.

The equilibrium problem reduces to level sets of the stress law: a uniform
profile for end displacements below the rest length, and a two-phase family
(strains b- and b+ sharing one stress level c) beyond it. Stability is
classified through the Weierstrass excess function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstraintError, DomainError, NoSolutionError
from .numerics import bisect_root
from .potential import PotentialParams, critical_constants, sigma, theta

_ROOT_TOL = 1e-12


@dataclass(frozen=True)
class UniformSolution:
    """Homogeneous equilibrium F(X) = a, phi(X) = a X."""

    a: float
    c: float  # stress level sigma(a)

    @property
    def strains(self):
        return (self.a,)


@dataclass(frozen=True)
class TwoPhaseSolution:
    """Mixture of two strains at a common stress level.

    Only the phase measures are represented; energy does not depend on the
    spatial arrangement. ``canonical_profile`` realizes one arrangement
    (low-strain phase on the left) for plotting and comparisons.
    """

    c: float
    b_minus: float
    b_plus: float
    l_minus: float
    l_plus: float

    @property
    def a(self) -> float:
        return self.b_minus * self.l_minus + self.b_plus * self.l_plus

    @property
    def strains(self):
        return (self.b_minus, self.b_plus)


@dataclass(frozen=True)
class StabilityVerdict:
    """Classification plus, when unstable, a pair (v, u) with negative excess."""

    classification: str  # "locally_stable" | "unstable"
    witness: tuple[float, float] | None = None

    def __post_init__(self):
        if (self.classification == "unstable") != (self.witness is not None):
            raise ValueError("witness must be present exactly when unstable")


def solve_stress_level(c: float, params: PotentialParams = PotentialParams()):
    """Strains on (0, z_cut] where the stress equals ``c``.

    Returns (b-, b+) for 0 <= c <= c_max (a degenerate pair (r, r) at the
    peak) and a single-element tuple (b,) with b < 1 for c < 0. The falling
    tail is truncated at the cutoff: for stress levels at or below
    sigma(z_cut) the right root is reported as z_cut itself.
    """
    cc = critical_constants(params)
    if c > cc.c_max:
        raise NoSolutionError(
            f"stress level {c!r} exceeds the peak stress {cc.c_max!r}"
        )
    if c < 0:
        lo = 0.5
        while sigma(lo, params) > c:
            lo *= 0.5
        b = bisect_root(lambda F: sigma(F, params) - c, lo, 1.0, xtol=_ROOT_TOL)
        return (b,)
    # rising branch root in [1, r]
    b_minus = bisect_root(lambda F: sigma(F, params) - c, 1.0, cc.r, xtol=_ROOT_TOL)
    # falling branch root in [r, z_cut], truncated at the cutoff
    if c <= sigma(cc.z_cut, params):
        b_plus = cc.z_cut
    else:
        b_plus = bisect_root(lambda F: sigma(F, params) - c, cc.r, cc.z_cut, xtol=_ROOT_TOL)
    return (b_minus, b_plus)


def equilibrium(a: float, c: float | None = None, params: PotentialParams = PotentialParams()):
    """Equilibrium profile for end displacement ``a``.

    For a < 1 the unique solution is the uniform profile (any ``c`` is
    ignored). For a >= 1 there is a one-parameter family indexed by the
    stress level c in [0, sigma(a)]; when ``c`` is omitted it defaults to
    sigma(a), which selects the l+ = 0 member (a uniform profile embedded
    in the two-phase family).
    """
    if not a > 0:
        raise DomainError(f"end displacement must be positive, got {a!r}")
    cc = critical_constants(params)
    if a < 1.0:
        return UniformSolution(a=a, c=sigma(a, params))
    if a > cc.z_cut:
        raise ConstraintError(
            f"end displacement {a!r} exceeds the cutoff stretch {cc.z_cut!r}"
        )
    sa = sigma(a, params)
    if c is None:
        c = sa
    if not 0.0 <= c <= sa + _ROOT_TOL:
        raise ConstraintError(
            f"stress level must lie in [0, sigma(a)] = [0, {sa!r}], got {c!r}"
        )
    roots = solve_stress_level(min(c, cc.c_max), params)
    b_minus, b_plus = roots
    if b_plus - b_minus < 1e-9:
        l_minus, l_plus = 1.0, 0.0
    else:
        l_minus = (b_plus - a) / (b_plus - b_minus)
        l_plus = (a - b_minus) / (b_plus - b_minus)
        # guard roundoff at the family's endpoints
        l_minus = min(max(l_minus, 0.0), 1.0)
        l_plus = min(max(l_plus, 0.0), 1.0)
    return TwoPhaseSolution(c=c, b_minus=b_minus, b_plus=b_plus, l_minus=l_minus, l_plus=l_plus)


def canonical_profile(solution, X):
    """One spatial realization phi(X) of an equilibrium solution.

    The low-strain phase occupies [0, l-], the high-strain phase the rest.
    """
    X = np.asarray(X, dtype=float)
    if isinstance(solution, UniformSolution):
        out = solution.a * X
    else:
        s = solution
        out = s.b_minus * np.minimum(X, s.l_minus) + s.b_plus * np.maximum(X - s.l_minus, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def weierstrass_excess(v: float, u: float, params: PotentialParams = PotentialParams()) -> float:
    """Excess energy of replacing slope u by slope v at frozen stress sigma(u).

    Nonnegativity for all v is necessary for local stability of a profile
    with slope u.
    """
    return theta(v, params) - theta(u, params) - (v - u) * sigma(u, params)


def _excess_witness(u: float, params: PotentialParams, grid: int = 4096):
    """Most negative excess pair (v, u) over a v-grid, or None if all >= 0."""
    cc = critical_constants(params)
    vs = np.linspace(0.2, cc.z_cut, grid)
    w = theta(vs, params) - theta(u, params) - (vs - u) * sigma(u, params)
    i = int(np.argmin(w))
    if w[i] < -1e-15:
        return (float(vs[i]), u)
    return None


def classify_stability(profile, params: PotentialParams = PotentialParams()) -> StabilityVerdict:
    """Local stability of a uniform strain or of a two-phase solution.

    A uniform strain is locally stable strictly below the sonic stretch and
    unstable from there up to the cutoff. A two-phase mixture is unstable
    whenever the high-strain phase has positive measure.
    """
    cc = critical_constants(params)
    if isinstance(profile, TwoPhaseSolution):
        if profile.l_plus > 1e-12:
            witness = _excess_witness(profile.b_plus, params)
            if witness is None:  # b_plus >= r, so a witness always exists
                witness = (profile.b_plus + 1e-3, profile.b_plus)
            return StabilityVerdict("unstable", witness)
        return StabilityVerdict("locally_stable")
    F = profile.a if isinstance(profile, UniformSolution) else float(profile)
    if not 0 < F <= cc.z_cut:
        raise DomainError(f"uniform strain must lie in (0, z_cut], got {F!r}")
    if F < cc.r:
        return StabilityVerdict("locally_stable")
    witness = _excess_witness(F, params)
    if witness is None:
        witness = (F + 1e-3, F)
    return StabilityVerdict("unstable", witness)
