"""Closed-form bounds on the expected number of discarded steps.

All four calculators return a BoundReport so downstream reports carry the
bound kind and the inputs it was computed from next to the value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bodies import Box, FisherMatrix, dirichlet_lambda1_box, direction_information

__all__ = [
    "BoundReport",
    "upper_bound_general",
    "upper_bound_cube",
    "isotropic_bound",
    "lower_bound_1d",
]


@dataclass(frozen=True)
class BoundReport:
    kind: str  # general_fisher | cube_l2 | isotropic | lower_1d
    value: float
    inputs_digest: str


def upper_bound_general(fisher: FisherMatrix, steps) -> BoundReport:
    """(1/2) * sum_j sqrt(v_j^T I v_j) over the step sequence."""
    v = np.asarray(steps, dtype=float)
    if v.ndim != 2 or v.shape[1] != fisher.dimension:
        raise ValueError("steps must have shape (n, d) matching the Fisher matrix")
    value = 0.5 * sum(direction_information(fisher, row) for row in v)
    digest = f"n={v.shape[0]}, d={fisher.dimension}, fisher={fisher.estimator_kind}"
    return BoundReport("general_fisher", float(value), digest)


def upper_bound_cube(half_width: float, step_l2_norms) -> BoundReport:
    """(pi / (2 T)) * sum_j |v_j|_2 for a cube of half-width T."""
    t = float(half_width)
    if not (t > 0.0):
        raise ValueError("half_width must be positive")
    norms = np.asarray(step_l2_norms, dtype=float)
    if norms.ndim != 1 or np.any(norms < 0.0):
        raise ValueError("step_l2_norms must be a 1-d sequence of nonnegative norms")
    value = (math.pi / (2.0 * t)) * float(np.sum(norms))
    digest = f"n={norms.size}, T={t}, sum_l2={float(np.sum(norms))}"
    return BoundReport("cube_l2", value, digest)


def isotropic_bound(box: Box, n_steps: int) -> BoundReport:
    """sqrt(lambda_1(K)) * n for isotropic unit-covariance steps."""
    n = int(n_steps)
    if n < 0:
        raise ValueError("n_steps must be nonnegative")
    lam = dirichlet_lambda1_box(box)
    digest = f"n={n}, d={box.dimension}, lambda1={lam}"
    return BoundReport("isotropic", math.sqrt(lam) * n, digest)


def lower_bound_1d(half_width: int, n_steps: int) -> BoundReport:
    """n / (2 T + 1) - T for the unit-step walk on a band of integer radius T.

    Computed as an exact rational, then converted.  May be negative for
    short runs; reported raw.
    """
    t = int(half_width)
    n = int(n_steps)
    if t < 0 or n < 0:
        raise ValueError("half_width and n_steps must be nonnegative integers")
    value = float(Fraction(n, 2 * t + 1) - t)
    return BoundReport("lower_1d", value, f"n={n}, T={t}")
