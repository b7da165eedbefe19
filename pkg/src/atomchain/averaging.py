"""Mollifier averaging of sampled fields.

The kernel is the raised cosine 1 + cos(2 pi X) on [-1/2, 1/2] (unit mass,
nonnegative, vanishing smoothly at the support edge), rescaled to a support
of width eps. On the discrete grid the kernel weights are renormalized to
exact unit mass, and fields are extended by their end values beyond the
domain so constants are preserved near the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConstraintError, DomainError
from .fields import FieldSnapshot


@dataclass(frozen=True)
class Mollifier:
    """Raised-cosine kernel with support half-width eps/2."""

    eps: float

    def __post_init__(self):
        if self.eps <= 0:
            raise DomainError(f"mollifier scale must be positive, got {self.eps!r}")

    def kernel(self, X):
        """Scaled kernel (1/eps) * (1 + cos(2 pi X / eps)) inside the support."""
        X = np.asarray(X, dtype=float)
        inside = np.abs(X) < self.eps / 2.0
        out = np.where(inside, (1.0 + np.cos(2.0 * np.pi * X / self.eps)) / self.eps, 0.0)
        return float(out) if np.ndim(out) == 0 else out

    def discrete_weights(self, dx: float) -> np.ndarray:
        """Grid weights kernel(m dx) * dx, renormalized to unit mass."""
        half = int(np.ceil(self.eps / (2.0 * dx)))
        offsets = np.arange(-half, half + 1) * dx
        w = self.kernel(offsets) * dx
        total = w.sum()
        if total <= 0:
            raise ConstraintError("mollifier support does not cover any grid point")
        return w / total


def choose_eps(M: int) -> float:
    """Default averaging scale for an M-cell mesh: eight cells, clamped to [1/16, 1/4].

    Wide enough to hide the grid-scale oscillation, narrow enough relative
    to the unit domain; surfaced in the experiment config so sweeps can
    override it.
    """
    if M < 16:
        raise DomainError(f"averaging policy needs M >= 16, got {M}")
    return min(max(8.0 / M, 1.0 / 16.0), 0.25)


def mollify(field: FieldSnapshot, eps: float) -> FieldSnapshot:
    """Convolve the strain and velocity fields with the discrete kernel.

    Requires dx < eps < 1. Boundary handling is constant extension of the
    fields. The position field is carried through unchanged.
    """
    dx = field.dx
    if not dx < eps < 1.0:
        raise ConstraintError(
            f"averaging scale must satisfy dx < eps < 1 (dx={dx!r}, eps={eps!r})"
        )
    w = Mollifier(eps).discrete_weights(dx)
    half = (len(w) - 1) // 2

    def smooth(values):
        padded = np.pad(values, half, mode="edge")
        return np.convolve(padded, w, mode="valid")

    return replace(
        field,
        F=smooth(field.F),
        v=smooth(field.v),
        provenance="mollified",
        meta={**field.meta, "eps": eps},
    )


def time_average(snapshots, t_center: float, tau: float) -> FieldSnapshot:
    """Mean of the snapshots with |t - t_center| <= tau (all on one grid).

    tau = 0 selects the snapshot at t_center alone, i.e. the purely spatial
    average; a positive window adds the centered time average on top.
    """
    if tau < 0:
        raise DomainError("time window must be nonnegative")
    chosen = [s for s in snapshots if abs(s.t - t_center) <= tau + 1e-12]
    if not chosen:
        raise ConstraintError(f"no snapshots within {tau!r} of t={t_center!r}")
    base = chosen[0]
    for s in chosen[1:]:
        if len(s.x) != len(base.x) or not np.allclose(s.x, base.x):
            raise ConstraintError("time averaging requires a common grid")
    return replace(
        base,
        t=t_center,
        F=np.mean([s.F for s in chosen], axis=0),
        v=np.mean([s.v for s in chosen], axis=0),
        phi=np.mean([s.phi for s in chosen], axis=0),
        meta={**base.meta, "tau": tau, "averaged": len(chosen)},
    )
