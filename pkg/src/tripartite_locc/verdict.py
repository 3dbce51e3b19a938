from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class FeasibilityVerdict:
    """Outcome of a feasibility or verification check.

    ``violated_quantity`` carries the offending number (for GHZ targets the
    concurrence product); ``violated_indices`` lists W-type coefficient slots
    (1, 2, 3) that break monotonicity.
    """

    feasible: bool
    reason: str = ""
    violated_quantity: float | None = None
    violated_indices: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.feasible and not self.reason:
            raise ValueError("an infeasible verdict needs a reason")

    def __bool__(self) -> bool:
        return self.feasible

    def as_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "reason": self.reason,
            "violated_quantity": self.violated_quantity,
            "violated_indices": list(self.violated_indices),
        }
