"""Semi-analytic Riemann solutions of the mixed-type wave system.

States are pairs (F, v) of stretch and velocity. Left states must be
hyperbolic (F below the sonic stretch). Discontinuities obey the
Rankine-Hugoniot conditions together with the chord admissibility
criterion for mixed-type laws (1-shocks move left, 2-shocks right,
stationary shocks are allowed); rarefaction fans are self-similar with
F recovered from sigma'(F) = (x/t)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import (
    DomainError,
    EllipticRegionError,
    HorizonError,
    InadmissibleShockError,
    NoSolutionError,
    WaveStructureError,
)
from .fields import FieldSnapshot
from .numerics import bisect_root
from .potential import (
    PotentialParams,
    critical_constants,
    sigma,
    sigma_prime,
    wave_speed,
)

_RH_TOL = 1e-9
_ZERO_WAVE_TOL = 1e-12
_ADMIS_GRID = 64


@dataclass(frozen=True)
class RiemannState:
    """A constant state: stretch F and velocity v."""

    F: float
    v: float

    def __post_init__(self):
        if not self.F > 0:
            raise DomainError(f"stretch must be positive, got {self.F!r}")

    def mirrored(self) -> "RiemannState":
        return RiemannState(self.F, -self.v)


@dataclass(frozen=True)
class Wave:
    """One wave of a fan: a shock (speed_lo == speed_hi) or a rarefaction."""

    kind: str  # shock1 | shock2 | stationary_shock | rarefaction1 | rarefaction2
    left: RiemannState
    right: RiemannState
    speed_lo: float
    speed_hi: float
    center: float = 0.0

    @property
    def is_shock(self) -> bool:
        return self.kind.endswith("shock") or self.kind.startswith("shock")

    @property
    def speed(self) -> float:
        if not self.is_shock:
            raise ValueError("rarefaction fans have a speed range, not a speed")
        return self.speed_lo

    @property
    def family(self) -> int:
        if self.kind in ("shock1", "rarefaction1"):
            return 1
        if self.kind in ("shock2", "rarefaction2"):
            return 2
        return 0  # stationary shock


def acoustic_integral(params: PotentialParams, F1: float, F2: float) -> float:
    """Signed integral of the acoustic speed sqrt(sigma') from F1 to F2.

    Both endpoints must be hyperbolic. The integrand has a square-root zero
    at the sonic stretch; adaptive Gauss-Kronrod quadrature handles the
    endpoint cusp to well below the 1e-10 tolerance used by the curve ops.
    """
    cc = critical_constants(params)
    for F in (F1, F2):
        if not 0 < F <= cc.r * (1 + 1e-12):
            raise EllipticRegionError(f"stretch {F!r} outside the hyperbolic region")
    if F1 == F2:
        return 0.0

    def integrand(y):
        return math.sqrt(max(sigma_prime(y, params), 0.0))

    val, _ = quad(integrand, F1, F2, epsabs=1e-13, epsrel=1e-11, limit=200)
    return val


def shock_speed(Fl: float, F: float, params: PotentialParams = PotentialParams()) -> float:
    """Magnitude of the shock speed from the chord slope of the stress law.

    s^2 = (sigma(F) - sigma(Fl)) / (F - Fl); the caller chooses the sign
    (negative for 1-shocks, positive for 2-shocks). A negative chord slope
    means no shock can join the two states.
    """
    if F == Fl:
        raise DomainError("shock requires distinct stretches")
    chord = (sigma(F, params) - sigma(Fl, params)) / (F - Fl)
    if chord < 0:
        raise NoSolutionError(
            f"negative chord slope {chord!r}: no shock joins F={Fl!r} and F={F!r}"
        )
    return math.sqrt(chord)


def _check_admissibility(Fl: float, F: float, s: float, params: PotentialParams) -> None:
    """Chord criterion on a grid between Fl and F; raises when violated."""
    if abs(s) <= _ZERO_WAVE_TOL or F == Fl:
        return
    chord_total = (sigma(F, params) - sigma(Fl, params)) / (F - Fl)
    ws = np.linspace(Fl, F, _ADMIS_GRID + 2)[1:-1]
    chords = (sigma(ws, params) - sigma(Fl, params)) / (ws - Fl)
    tol = 1e-10 * max(1.0, abs(chord_total))
    if s < 0:
        bad = chords > chord_total + tol
    else:
        bad = chords < chord_total - tol
    if np.any(bad):
        w = float(ws[int(np.argmax(bad))])
        raise InadmissibleShockError(
            f"chord criterion fails at w={w!r} for shock {Fl!r} -> {F!r} (s={s!r})"
        )


def s1_curve(Ul: RiemannState, F: float, params: PotentialParams = PotentialParams()) -> RiemannState:
    """State joined to Ul (on its left) by an admissible 1-shock at stretch F <= F_l."""
    if F > Ul.F:
        raise DomainError(f"1-shock requires F <= F_l, got F={F!r} > {Ul.F!r}")
    prod = (F - Ul.F) * (sigma(F, params) - sigma(Ul.F, params))
    if prod < 0:
        raise NoSolutionError("no 1-shock: chord slope is negative")
    if F == Ul.F:
        return Ul
    s = -shock_speed(Ul.F, F, params)
    _check_admissibility(Ul.F, F, s, params)
    return RiemannState(F, Ul.v - math.sqrt(prod))


def fbar(Fl: float, params: PotentialParams = PotentialParams()) -> float:
    """Largest stretch reachable from F_l by a 2-shock.

    For F_l <= 1 this is the cutoff stretch; for F_l in (1, r] it is the
    stretch beyond the sonic point carrying the same stress (truncated at
    the cutoff when that stress falls below the cutoff stress).
    """
    cc = critical_constants(params)
    if Fl > cc.r * (1 + 1e-12):
        raise DomainError(f"fbar requires F_l <= sonic stretch, got {Fl!r}")
    if Fl <= 1.0:
        return cc.z_cut
    target = sigma(Fl, params)
    if target <= sigma(cc.z_cut, params):
        return cc.z_cut
    return bisect_root(lambda F: sigma(F, params) - target, cc.r, cc.z_cut, xtol=1e-14)


def s2_curve(Ul: RiemannState, F: float, params: PotentialParams = PotentialParams()) -> RiemannState:
    """State joined to Ul (on its left) by an admissible 2-shock, F_l <= F <= fbar(F_l)."""
    upper = fbar(Ul.F, params)
    if not Ul.F <= F <= upper * (1 + 1e-12):
        raise DomainError(
            f"2-shock stretch must lie in [{Ul.F!r}, {upper!r}], got {F!r}"
        )
    if F == Ul.F:
        return Ul
    prod = (F - Ul.F) * (sigma(F, params) - sigma(Ul.F, params))
    if prod < 0:
        raise NoSolutionError("no 2-shock: chord slope is negative")
    s = shock_speed(Ul.F, F, params)
    _check_admissibility(Ul.F, F, s, params)
    return RiemannState(F, Ul.v - math.sqrt(prod))


def s2_slope(Ul: RiemannState, F: float, params: PotentialParams = PotentialParams()) -> float:
    """dv/dF along the 2-shock curve, -(s^2 + sigma'(F)) / (2 s). Diagnostic."""
    s = shock_speed(Ul.F, F, params)
    if s == 0:
        raise DomainError("slope undefined at a stationary shock")
    return -(s * s + sigma_prime(F, params)) / (2.0 * s)


def r1_curve(Ul: RiemannState, F: float, params: PotentialParams = PotentialParams()) -> RiemannState:
    """State joined to Ul by a 1-rarefaction: v = v_l + int_{F_l}^{F} sqrt(sigma')."""
    cc = critical_constants(params)
    if F > cc.r * (1 + 1e-12):
        raise EllipticRegionError(f"1-rarefaction cannot enter the elliptic region: F={F!r}")
    if F < Ul.F:
        raise DomainError(f"1-rarefaction requires F >= F_l, got {F!r} < {Ul.F!r}")
    return RiemannState(F, Ul.v + acoustic_integral(params, Ul.F, F))


def r2_curve(Ul: RiemannState, F: float, params: PotentialParams = PotentialParams()) -> RiemannState:
    """State joined to Ul by a 2-rarefaction: v = v_l - int_{F_l}^{F} sqrt(sigma')."""
    cc = critical_constants(params)
    if Ul.F > cc.r * (1 + 1e-12):
        raise EllipticRegionError("2-rarefaction requires a hyperbolic left state")
    if F > Ul.F:
        raise DomainError(f"2-rarefaction requires F <= F_l, got {F!r} > {Ul.F!r}")
    return RiemannState(F, Ul.v - acoustic_integral(params, Ul.F, F))


def _mirror_strain(Fm: float, params: PotentialParams) -> float:
    """Rising-branch stretch carrying the same stress as the elliptic stretch Fm."""
    return bisect_root(
        lambda F: sigma(F, params) - sigma(Fm, params),
        1.0,
        critical_constants(params).r,
        xtol=1e-14,
    )


def _forward_value(Fb: float, Ul: RiemannState, Fm: float, params: PotentialParams) -> float:
    """Velocity at Fm reached by composing the 1-wave to Fb with the 2-wave to Fm.

    The 1-wave is a rarefaction above F_l and a shock below; the 2-wave is a
    shock when Fm >= Fb and a rarefaction otherwise.
    """
    if Fb >= Ul.F:
        vb = Ul.v + acoustic_integral(params, Ul.F, Fb)
    else:
        prod = (Fb - Ul.F) * (sigma(Fb, params) - sigma(Ul.F, params))
        vb = Ul.v - math.sqrt(max(prod, 0.0))
    if Fm >= Fb:
        prod = (Fm - Fb) * (sigma(Fm, params) - sigma(Fb, params))
        if prod < -1e-12:
            return math.nan
        return vb - math.sqrt(max(prod, 0.0))
    return vb - acoustic_integral(params, Fb, Fm)


def solve_middle_state(
    Ul: RiemannState,
    Um: RiemannState,
    params: PotentialParams = PotentialParams(),
    center: float = 0.0,
) -> "RiemannSolution":
    """Two-wave fan joining Ul (left) to Um (right).

    The middle stretch is the root of the composed wave-curve residual,
    located by bracketed bisection; the wave types follow from the root's
    position relative to F_l and F_m. The middle state is unique by the
    no-gap/no-self-intersection geometry of the curve family.
    """
    cc = critical_constants(params)
    if Ul.F > cc.r:
        raise DomainError("left state must be hyperbolic")
    if not 0 < Um.F <= cc.z_cut * (1 + 1e-12):
        raise DomainError(f"right stretch must lie in (0, z_cut], got {Um.F!r}")

    if abs(Um.F - Ul.F) < _ZERO_WAVE_TOL and abs(Um.v - Ul.v) < _ZERO_WAVE_TOL:
        return RiemannSolution(
            states=[Ul],
            waves=[],
            t0=math.inf,
            params=params,
            meta={"middle": Ul, "center": center},
        )

    def residual(Fb):
        return _forward_value(Fb, Ul, Um.F, params) - Um.v

    hi = cc.r if Um.F <= cc.r else _mirror_strain(Um.F, params)
    lo = min(Ul.F, Um.F)
    r_lo, r_hi = residual(lo), residual(hi)
    tries = 0
    while not (math.isfinite(r_lo) and r_lo < 0) and tries < 60:
        lo *= 0.9
        r_lo = residual(lo)
        tries += 1
    if not (math.isfinite(r_lo) and math.isfinite(r_hi) and r_lo <= 0 <= r_hi):
        sweep = ", ".join(
            f"({F:.4f}: {residual(F):.3e})" for F in np.linspace(lo, hi, 7)
        )
        raise WaveStructureError(
            f"could not bracket the middle state for Ul={Ul}, Um={Um}; residual sweep: {sweep}"
        )
    Fbar = bisect_root(residual, lo, hi, xtol=1e-14)
    if Fbar >= Ul.F:
        Ubar = r1_curve(Ul, Fbar, params)
    else:
        Ubar = s1_curve(Ul, Fbar, params)

    waves = []
    # 1-wave between Ul and Ubar
    if abs(Fbar - Ul.F) > _ZERO_WAVE_TOL:
        if Fbar > Ul.F:
            waves.append(
                Wave(
                    "rarefaction1",
                    Ul,
                    Ubar,
                    -wave_speed(Ul.F, params),
                    -wave_speed(Fbar, params),
                    center,
                )
            )
        else:
            s = -shock_speed(Ul.F, Fbar, params)
            kind = "stationary_shock" if abs(s) <= _ZERO_WAVE_TOL else "shock1"
            waves.append(Wave(kind, Ul, Ubar, s, s, center))
    # 2-wave between Ubar and Um
    if abs(Um.F - Fbar) > _ZERO_WAVE_TOL:
        if Um.F > Fbar:
            s = shock_speed(Fbar, Um.F, params)
            kind = "stationary_shock" if abs(s) <= _ZERO_WAVE_TOL else "shock2"
            waves.append(Wave(kind, Ubar, Um, s, s, center))
        else:
            waves.append(
                Wave(
                    "rarefaction2",
                    Ubar,
                    Um,
                    wave_speed(Fbar, params),
                    wave_speed(Um.F, params),
                    center,
                )
            )

    states = [Ul] + [w.right for w in waves]
    sol = RiemannSolution(
        states=states,
        waves=waves,
        t0=math.inf,
        params=params,
        meta={"middle": Ubar, "center": center},
    )
    verify_solution(sol)
    return sol


def solve_defect(
    s1: float,
    s2: float,
    delta: float,
    params: PotentialParams = PotentialParams(),
) -> "RiemannSolution":
    """Symmetric three-state problem: strain s2 on (1/2-delta, 1/2+delta), s1 outside.

    The left discontinuity is solved as a two-state problem; the right one
    follows by the mirror symmetry F(X) = F(1-X), v(X) = -v(1-X). Valid up
    to the first interaction of the inward-moving waves at X = 1/2.
    """
    if not 0 < delta < 0.5:
        raise DomainError(f"defect half-width must lie in (0, 1/2), got {delta!r}")
    left = solve_middle_state(
        RiemannState(s1, 0.0), RiemannState(s2, 0.0), params, center=0.5 - delta
    )
    mirrored = [
        Wave(
            kind=_mirror_kind(w.kind),
            left=w.right.mirrored(),
            right=w.left.mirrored(),
            speed_lo=-w.speed_hi,
            speed_hi=-w.speed_lo,
            center=0.5 + delta,
        )
        for w in reversed(left.waves)
    ]
    waves = list(left.waves) + mirrored
    states = [RiemannState(s1, 0.0)] + [w.right for w in waves]

    inward = [w.speed_hi for w in left.waves if w.speed_hi > 0]
    t0 = delta / max(inward) if inward else math.inf
    outward = [-w.speed_lo for w in left.waves if w.speed_lo < 0]
    t_boundary = (0.5 - delta) / max(outward) if outward else math.inf
    sol = RiemannSolution(
        states=states,
        waves=waves,
        t0=t0,
        params=params,
        meta={
            "middle": left.meta["middle"],
            "delta": delta,
            "t_boundary": t_boundary,
            "left_motion": 0.0,
        },
    )
    verify_solution(sol)
    return sol


def _mirror_kind(kind: str) -> str:
    return {
        "shock1": "shock2",
        "shock2": "shock1",
        "rarefaction1": "rarefaction2",
        "rarefaction2": "rarefaction1",
        "stationary_shock": "stationary_shock",
    }[kind]


def end_load_fan(
    v0: float, Ul: RiemannState, params: PotentialParams = PotentialParams()
) -> "RiemannSolution":
    """Wave entering the material from a left end moving at speed v0.

    Stretching (v0 < v_l) produces a 2-rarefaction whose inner stretch F0
    solves v_l - v0 = integral of sqrt(sigma') from F_l to F0; the fan is
    only available while F0 stays below the sonic stretch. Compression
    (v0 > v_l) produces a 2-shock. The solution is valid until the leading
    edge crosses the unit domain.
    """
    cc = critical_constants(params)
    if Ul.F > cc.r:
        raise DomainError("end-load requires a hyperbolic interior state")
    pull = Ul.v - v0
    if abs(pull) <= _ZERO_WAVE_TOL:
        return RiemannSolution(
            states=[Ul], waves=[], t0=math.inf, params=params,
            meta={"left_motion": v0, "F0": Ul.F},
        )
    if pull > 0:  # stretching
        budget = acoustic_integral(params, Ul.F, cc.r)
        if pull > budget:
            raise DomainError(
                f"stretch rate {pull!r} exceeds the hyperbolic fan budget {budget!r}"
            )
        F0 = bisect_root(
            lambda F: acoustic_integral(params, Ul.F, F) - pull, Ul.F, cc.r, xtol=1e-14
        )
        inner = RiemannState(F0, v0)
        wave = Wave(
            "rarefaction2",
            inner,
            Ul,
            wave_speed(F0, params),
            wave_speed(Ul.F, params),
            center=0.0,
        )
    else:  # compression
        def gap(F0):
            prod = (Ul.F - F0) * (sigma(Ul.F, params) - sigma(F0, params))
            return Ul.v + math.sqrt(max(prod, 0.0)) - v0

        lo = Ul.F * 0.5
        while gap(lo) < 0:
            lo *= 0.5
        F0 = bisect_root(gap, lo, Ul.F, xtol=1e-14)
        inner = RiemannState(F0, v0)
        s = shock_speed(F0, Ul.F, params)
        _check_admissibility(F0, Ul.F, s, params)
        wave = Wave("shock2", inner, Ul, s, s, center=0.0)
    sol = RiemannSolution(
        states=[inner, Ul],
        waves=[wave],
        t0=1.0 / wave.speed_hi,
        params=params,
        meta={"left_motion": v0, "F0": F0},
    )
    verify_solution(sol)
    return sol


@dataclass
class RiemannSolution:
    """Ordered fan of waves with the constant states between them.

    ``states[i]`` sits left of ``waves[i]``; ``states[-1]`` is the rightmost
    state. Sampling is only served strictly before the interaction time t0.
    """

    states: list
    waves: list
    t0: float
    params: PotentialParams
    meta: dict = field(default_factory=dict)

    def sample(self, X: float, t: float) -> RiemannState:
        """Exact solution U(X, t) for 0 <= t < t0.

        Points exactly on a discontinuity take the state on the side of the
        defect, so the closed middle interval of the initial data is
        reproduced at t = 0. For symmetric defect solutions the right half
        is sampled through the mirror map, making the symmetry exact.
        """
        if t < 0:
            raise DomainError("time must be nonnegative")
        if t >= self.t0:
            raise HorizonError(
                f"solution valid only for t < t0 = {self.t0!r}, got t={t!r}"
            )
        if "delta" in self.meta and X > 0.5:
            return self._scan(1.0 - X, t).mirrored()
        return self._scan(X, t)

    def _scan(self, X: float, t: float) -> RiemannState:
        for i, w in enumerate(self.waves):
            x_lo = w.center + w.speed_lo * t
            x_hi = w.center + w.speed_hi * t
            if X < x_lo:
                return self.states[i]
            if X < x_hi:  # strictly inside a fan (zero-width at t = 0)
                return self._fan_state(w, (X - w.center) / t)
        return self.states[-1]

    def _fan_state(self, w: Wave, xi: float) -> RiemannState:
        F_lo, F_hi = sorted((w.left.F, w.right.F))
        F = bisect_root(
            lambda F: sigma_prime(F, self.params) - xi * xi, F_lo, F_hi, xtol=1e-14
        )
        sgn = 1.0 if w.family == 1 else -1.0
        v = w.left.v + sgn * acoustic_integral(self.params, w.left.F, F)
        return RiemannState(F, v)

    def sample_fields(self, xs, t: float, refine: int = 8) -> FieldSnapshot:
        """Sampled fields on a grid, exported as an exact-provenance snapshot.

        The position field is the cumulative trapezoid of the strain on a
        ``refine``-times finer grid plus the prescribed left-end position
        (exact up to quadrature of the fan pieces).
        """
        xs = np.asarray(xs, dtype=float)
        F = np.empty(len(xs))
        v = np.empty(len(xs))
        for i, X in enumerate(xs):
            u = self.sample(float(X), t)
            F[i] = u.F
            v[i] = u.v
        fine = np.linspace(0.0, max(float(xs[-1]), 1.0), refine * max(len(xs), 2) + 1)
        Ff = np.array([self.sample(float(X), t).F for X in fine])
        phi_fine = np.concatenate(
            [[0.0], np.cumsum(0.5 * (Ff[1:] + Ff[:-1]) * np.diff(fine))]
        )
        phi0 = self.meta.get("left_motion", 0.0) * t
        phi = phi0 + np.interp(xs, fine, phi_fine)
        return FieldSnapshot(
            t=t, x=xs, F=F, v=v, phi=phi, provenance="exact", meta={"t0": self.t0}
        )


def sample(sol: RiemannSolution, X: float, t: float) -> RiemannState:
    """Module-level alias of :meth:`RiemannSolution.sample`."""
    return sol.sample(X, t)


def interaction_time(sol: RiemannSolution, delta: float) -> float:
    """Time until the inward-moving waves of a symmetric defect fan meet at 1/2.

    Uses the maximum inward speed, i.e. the earliest possible meeting; the
    solution refuses samples at or beyond this time.
    """
    centers = [w.center for w in sol.waves]
    if not centers:
        return math.inf
    left_center = min(centers)
    inward = [w.speed_hi for w in sol.waves if w.center == left_center and w.speed_hi > 0]
    return delta / max(inward) if inward else math.inf


def verify_solution(sol: RiemannSolution, tol: float = _RH_TOL) -> None:
    """Check jump conditions, admissibility and fan ordering of every wave."""
    p = sol.params
    for w in sol.waves:
        if w.is_shock:
            s = w.speed
            r1 = (w.right.v - w.left.v) + s * (w.right.F - w.left.F)
            r2 = (sigma(w.right.F, p) - sigma(w.left.F, p)) + s * (w.right.v - w.left.v)
            if abs(r1) > tol or abs(r2) > tol:
                raise InadmissibleShockError(
                    f"jump-condition residuals ({r1!r}, {r2!r}) exceed {tol!r}"
                )
            _check_admissibility(w.left.F, w.right.F, s, p)
        else:
            if w.speed_lo > w.speed_hi + 1e-14:
                raise InadmissibleShockError(
                    f"fan speeds not ordered: [{w.speed_lo!r}, {w.speed_hi!r}]"
                )
    # waves sharing a center must have ordered speed ranges
    by_center: dict = {}
    for w in sol.waves:
        by_center.setdefault(w.center, []).append(w)
    for ws in by_center.values():
        flat = [s for w in ws for s in (w.speed_lo, w.speed_hi)]
        if any(b < a - 1e-12 for a, b in zip(flat, flat[1:])):
            raise InadmissibleShockError(f"wave speeds out of order: {flat!r}")
