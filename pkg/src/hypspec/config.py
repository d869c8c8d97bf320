"""Numerical tolerances shared by all modules."""
from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    matrix: float = 1e-12      # determinant / linear algebra
    geometric: float = 1e-9    # point-on-geodesic, tangency
    angle_dedup: float = 1e-9  # collapsing equal angles in a PhiSet
    relator: float = 1e-9      # holonomy of the surface relator

    def with_(self, **kw) -> "Tolerances":
        return replace(self, **kw)


DEFAULT = Tolerances()
