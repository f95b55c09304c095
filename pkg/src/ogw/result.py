"""Common result container for the discrepancy solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class DiscrepancyResult:
    """Value of one discrepancy evaluation plus solver metadata.

    ``bound_kind`` is one of ``"lower"``, ``"upper"`` or ``"exact"`` (the
    latter for the brute-force permutation oracle).  ``coupling`` is the
    recovered alignment in the caller's argument order (rows index the
    first graph) when the method produces one.  ``info`` carries
    method-specific extras such as the reduced orthogonal variables.
    """

    value: float
    method: str
    bound_kind: str
    coupling: np.ndarray | None = None
    iterations: int | None = None
    seconds: float | None = None
    converged: bool = True
    info: dict = field(default_factory=dict)
