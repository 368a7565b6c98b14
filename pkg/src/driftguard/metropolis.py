"""Online step-discarding filter for symmetric walks.

Each incoming signed step is accepted with the classical Metropolis
probability min(pi(w + v) / pi(w), 1) for a fixed stationary density pi.
Started from a pi-distributed point, the filtered walk stays pi-distributed
forever, and the running sum of accepted steps is trapped in twice the
support box: both the current point and the starting point live in the
support, so their difference cannot leave 2K.

The acceptance ratio is computed in log space and one uniform coin is
consumed per step whether or not the proposal can be rejected, which keeps
the random stream independent of the data.  ``run_ensemble`` advances many
trials in lockstep with identical arithmetic, so a vectorized ensemble and
a loop of ``filter_run`` calls produce bit-identical trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .bodies import Density

__all__ = [
    "ContainmentError",
    "FilterState",
    "StepOutcome",
    "Trajectory",
    "EnsembleResult",
    "filter_init",
    "filter_step",
    "filter_run",
    "run_ensemble",
    "rejection_rate_exact_1d",
    "rejection_rate_monte_carlo",
]

# slack for the 2K containment assertion, per unit of half-width
_CONTAINMENT_TOL = 1e-9

SeedLike = Union[int, np.random.SeedSequence]


class ContainmentError(RuntimeError):
    """An accepted partial sum left the doubled support box."""


@dataclass
class FilterState:
    """Mutable state of one filtered walk."""

    density: Density
    origin: np.ndarray
    current: np.ndarray
    steps_seen: int
    steps_discarded: int
    rng: np.random.Generator
    log_current: float = field(repr=False, default=0.0)

    @property
    def accepted_sum(self) -> np.ndarray:
        return self.current - self.origin


@dataclass(frozen=True)
class StepOutcome:
    accepted: bool
    acceptance_probability: float
    proposed: np.ndarray
    resulting_sum: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    outcomes: tuple[StepOutcome, ...]
    accepted_sums: np.ndarray  # (n, d) running sums after each step

    @property
    def n_steps(self) -> int:
        return len(self.outcomes)

    @property
    def n_discarded(self) -> int:
        return sum(1 for o in self.outcomes if not o.accepted)


def filter_init(density: Density, rng_seed: SeedLike) -> FilterState:
    """Fresh filter state with a pi-distributed starting point."""
    rng = np.random.default_rng(rng_seed)
    origin = density.sample(rng)
    return FilterState(
        density=density,
        origin=origin,
        current=origin.copy(),
        steps_seen=0,
        steps_discarded=0,
        rng=rng,
        log_current=float(density.log_density(origin)),
    )


def filter_step(state: FilterState, signed_step) -> StepOutcome:
    """Feed one signed step through the filter, consuming one coin."""
    step = np.asarray(signed_step, dtype=float)
    if step.shape != (state.density.dimension,):
        raise ValueError(
            f"step has shape {step.shape}, expected ({state.density.dimension},)"
        )
    if not np.all(np.isfinite(step)):
        raise ValueError("step has non-finite entries")
    proposal = state.current + step
    log_new = state.density.log_density(proposal)
    accept_prob = np.exp(np.minimum(0.0, log_new - state.log_current))
    coin = state.rng.uniform()
    accepted = bool(coin < accept_prob)
    state.steps_seen += 1
    if accepted:
        state.current = proposal
        state.log_current = float(log_new)
    else:
        state.steps_discarded += 1
    return StepOutcome(
        accepted=accepted,
        acceptance_probability=float(accept_prob),
        proposed=proposal,
        resulting_sum=state.current - state.origin,
    )


def filter_run(density: Density, signed_steps, rng_seed: SeedLike) -> Trajectory:
    """Run a whole step sequence, asserting 2K containment after every step."""
    steps = np.asarray(signed_steps, dtype=float)
    if steps.size == 0:
        steps = steps.reshape(0, density.dimension)
    if steps.ndim != 2 or steps.shape[1] != density.dimension:
        raise ValueError("signed_steps must have shape (n, d)")
    state = filter_init(density, rng_seed)
    n = steps.shape[0]
    outcomes = []
    sums = np.zeros((n, density.dimension))
    for k in range(n):
        outcome = filter_step(state, steps[k])
        sums[k] = outcome.resulting_sum
        if not density.support.contains_scaled(outcome.resulting_sum, 2.0, _CONTAINMENT_TOL):
            raise ContainmentError(
                f"accepted sum {outcome.resulting_sum} left 2K at step {k}"
            )
        outcomes.append(outcome)
    return Trajectory(outcomes=tuple(outcomes), accepted_sums=sums)


@dataclass(frozen=True)
class EnsembleResult:
    """Final states of many filtered walks run in lockstep."""

    origins: np.ndarray  # (m, d)
    finals: np.ndarray  # (m, d)
    accepted: np.ndarray  # (m, n) bool
    max_abs_sums: np.ndarray  # (m,) running max of |accepted sum| over all prefixes

    @property
    def n_trials(self) -> int:
        return int(self.origins.shape[0])

    @property
    def discards(self) -> np.ndarray:
        return self.accepted.shape[1] - self.accepted.sum(axis=1)

    @property
    def accepted_sums(self) -> np.ndarray:
        return self.finals - self.origins


def run_ensemble(density: Density, steps, seeds: Sequence[SeedLike]) -> EnsembleResult:
    """Advance m trials together, one vectorized filter step at a time.

    ``steps`` has shape (m, n, d): each trial gets its own step sequence.
    Trial i draws its origin and its n coins from seeds[i] in exactly the
    order ``filter_run`` would, so results match the sequential path bit
    for bit.  Raises ContainmentError the moment any trial's accepted sum
    leaves the doubled support.
    """
    steps = np.asarray(steps, dtype=float)
    if steps.ndim != 3 or steps.shape[2] != density.dimension:
        raise ValueError("steps must have shape (m, n, d)")
    m, n, _ = steps.shape
    if m < 1:
        raise ValueError("need at least one trial")
    if len(seeds) != m:
        raise ValueError("need one seed per trial")
    gens = [np.random.default_rng(s) for s in seeds]
    origins = np.stack([density.sample(g) for g in gens])
    coins = np.stack([g.uniform(size=n) for g in gens]) if n else np.zeros((m, 0))
    hw = density.support.half_widths
    limit = 2.0 * hw + _CONTAINMENT_TOL * hw
    current = origins.copy()
    log_current = np.asarray(density.log_density(current), dtype=float)
    accepted = np.zeros((m, n), dtype=bool)
    max_abs = np.zeros(m)
    for k in range(n):
        proposal = current + steps[:, k, :]
        log_new = density.log_density(proposal)
        accept_prob = np.exp(np.minimum(0.0, log_new - log_current))
        acc = coins[:, k] < accept_prob
        accepted[:, k] = acc
        current = np.where(acc[:, None], proposal, current)
        log_current = np.where(acc, log_new, log_current)
        abs_sums = np.abs(current - origins)
        np.maximum(max_abs, abs_sums.max(axis=-1), out=max_abs)
        outside = abs_sums > limit
        if np.any(outside):
            trial = int(np.argmax(np.any(outside, axis=-1)))
            raise ContainmentError(
                f"trial {trial} accepted sum {current[trial] - origins[trial]} "
                f"left 2K at step {k}"
            )
    return EnsembleResult(
        origins=origins, finals=current, accepted=accepted, max_abs_sums=max_abs
    )


def rejection_rate_exact_1d(density: Density, step: float, grid: int = 1024) -> float:
    """Stationary one-step discard probability in d = 1, by quadrature.

    Equals (1/2) * integral |pi(x + v) - pi(x)| dx.  The integrand is split
    at the support edges of both shifted copies and at sign changes of the
    difference (located by a ``grid``-point scan plus bisection), then each
    smooth signed piece is integrated with 64-node Gauss-Legendre.
    """
    if density.dimension != 1:
        raise ValueError("exact rejection rate is one-dimensional only")
    if grid < 256:
        raise ValueError("grid must be at least 256")
    v = float(step)
    if v == 0.0:
        return 0.0
    t = float(density.support.half_widths[0])

    def diff(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lp_shift = density.log_density((x + v)[..., None])
        lp = density.log_density(x[..., None])
        return np.exp(lp_shift) - np.exp(lp)

    lo = min(-t, -t - v)
    hi = max(t, t - v)
    span = hi - lo
    cuts = {lo, hi, -t, t, -t - v, t - v}
    xs = np.linspace(lo, hi, int(grid) + 1)
    gs = diff(xs)
    for i in np.nonzero(gs == 0.0)[0]:
        cuts.add(float(xs[i]))
    for i in np.nonzero(gs[:-1] * gs[1:] < 0.0)[0]:
        a, b = float(xs[i]), float(xs[i + 1])
        fa = float(gs[i])
        while b - a > 1e-14 * span:
            mid = 0.5 * (a + b)
            fm = float(diff(np.array([mid]))[0])
            if fa * fm <= 0.0:
                b = mid
            else:
                a, fa = mid, fm
        cuts.add(0.5 * (a + b))
    edges = sorted(c for c in cuts if lo <= c <= hi)
    nodes, weights = np.polynomial.legendre.leggauss(64)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= 1e-13 * span:
            continue
        x = 0.5 * (a + b) + 0.5 * (b - a) * nodes
        total += 0.5 * (b - a) * float(np.sum(weights * np.abs(diff(x))))
    return min(max(0.5 * total, 0.0), 1.0)


def rejection_rate_monte_carlo(
    density: Density, step, n_steps: int, rng_seed: SeedLike
) -> tuple[float, float]:
    """Monte Carlo discard frequency of one filter step from stationarity.

    Draws ``n_steps`` independent stationary points, proposes x + step from
    each with a fresh coin, and returns (frequency, standard error).
    """
    v = np.asarray(step, dtype=float)
    if v.shape != (density.dimension,):
        raise ValueError("step dimension mismatch")
    n = int(n_steps)
    if n < 1:
        raise ValueError("n_steps must be positive")
    rng = np.random.default_rng(rng_seed)
    points = density.sample(rng, n)
    log_pi = np.asarray(density.log_density(points), dtype=float)
    log_pi_shift = np.asarray(density.log_density(points + v), dtype=float)
    accept_prob = np.exp(np.minimum(0.0, log_pi_shift - log_pi))
    rejected = rng.uniform(size=n) >= accept_prob
    freq = float(np.mean(rejected))
    std_error = float(np.sqrt(freq * (1.0 - freq) / n))
    return freq, std_error
