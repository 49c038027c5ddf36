"""Tolerance block shared by the manifold kernels and every check."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    spd_tol: float = 1e-10      # smallest admissible SPD eigenvalue
    sym_tol: float = 1e-10      # max |X - X^T| entry
    hyp_tol: float = 1e-10      # |<x,x>_1 + 1| and |<x,v>_1|
    deriv_tol: float = 1e-7     # successive Richardson extrapolants
    cont_tol: float = 1e-6      # continuity probe sup at the smallest radius
    gx_tol: float = 1e-5        # Gateaux homogeneity / additivity
    ineq_tol: float = 1e-8      # slack on endpoint comparisons in inequalities
    eq_tol: float = 1e-6        # derivative endpoints treated as ties
    law_tol: float = 1e-12      # interval algebra laws
    x_tol: float = 1e-4         # argmin agreement
    h_tol: float = 1e-8         # objective ties in the uniqueness sweep

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict | None) -> Tolerances:
        if not d:
            return cls()
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")
        for k, v in d.items():
            if not isinstance(v, (int, float)) or v <= 0:
                raise ValueError(f"tolerance {k} must be a positive number, got {v!r}")
        return replace(cls(), **{k: float(v) for k, v in d.items()})


DEFAULT = Tolerances()
