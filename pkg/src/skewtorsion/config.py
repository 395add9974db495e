from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Default thresholds; every check accepts an override."""

    check: float = 1e-9
    rank: float = 1e-9  # singular-value cutoff for holonomy span closure
    parallel_relation: float = 1e-12  # |delta - 2 alpha| accepted in float mode
    max_closure_rounds: int = 50


DEFAULT = Tolerances()
