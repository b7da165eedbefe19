"""Sampled grid functions exchanged between simulation, averaging and analysis."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(frozen=True)
class FieldSnapshot:
    """Strain, velocity and position fields at one instant.

    Fields are sampled at cell midpoints of a uniform grid: the strain is
    exact per cell, velocity and position are midpoint values of the
    piecewise-linear nodal interpolant. ``provenance`` records how the
    fields were produced: "raw", "mollified" or "exact".
    """

    t: float
    x: np.ndarray
    F: np.ndarray
    v: np.ndarray
    phi: np.ndarray
    provenance: str = "raw"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("x", "F", "v", "phi"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = len(self.x)
        if not (len(self.F) == len(self.v) == len(self.phi) == n):
            raise ValueError("all snapshot fields must share the grid length")

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0]) if len(self.x) > 1 else 1.0

    def restricted_to(self, x_target) -> "FieldSnapshot":
        """Piecewise-linear restriction of the fields onto another grid."""
        x_target = np.asarray(x_target, dtype=float)
        return replace(
            self,
            x=x_target,
            F=np.interp(x_target, self.x, self.F),
            v=np.interp(x_target, self.x, self.v),
            phi=np.interp(x_target, self.x, self.phi),
            meta={**self.meta, "restricted_from": len(self.x)},
        )


def midpoint_grid(M: int) -> np.ndarray:
    """Cell midpoints of the uniform M-cell mesh on [0, 1]."""
    return (np.arange(M) + 0.5) / M
