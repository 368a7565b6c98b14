"""Step generators, the Monte Carlo experiment runner, and report emission.

Each trial gets its own random streams derived from (seed, trial_index) via
SeedSequence, one stream for step generation and one for the filter, so the
results cannot depend on scheduling.  Trials advance in lockstep through
``run_ensemble``, which is bit-identical to running ``filter_run`` per trial.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bodies import Box, cube_eigen_density, fisher_closed_form_cube
from .bounds import (
    BoundReport,
    isotropic_bound,
    lower_bound_1d,
    upper_bound_cube,
    upper_bound_general,
)
from .metropolis import EnsembleResult, run_ensemble

__all__ = [
    "StepGenerator",
    "ExperimentConfig",
    "RunStats",
    "generate_steps",
    "trial_streams",
    "run_experiment",
    "run_experiment_ensemble",
    "emit_report",
    "run_stats_from_json",
]

GENERATOR_KINDS = ("fixed_list", "random_unit_sphere", "coordinate_basis_cycle", "isotropic_custom")
DENSITY_KINDS = ("cube_eigen",)
REPORT_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class StepGenerator:
    """Recipe for a sequence of signed steps.

    ``rademacher`` multiplies every generated vector by an independent fair
    sign.  ``vectors`` (fixed_list only) is cycled when n exceeds its length.
    """

    kind: str
    dimension: int
    rademacher: bool = True
    vectors: Optional[tuple[tuple[float, ...], ...]] = None

    def __post_init__(self) -> None:
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.dimension < 1:
            raise ValueError("dimension must be at least 1")
        if self.kind == "fixed_list":
            if not self.vectors:
                raise ValueError("fixed_list requires a nonempty vector list")
            vecs = tuple(tuple(float(x) for x in v) for v in self.vectors)
            if any(len(v) != self.dimension for v in vecs):
                raise ValueError("fixed_list vectors must all have the generator dimension")
            if not all(math.isfinite(x) for v in vecs for x in v):
                raise ValueError("fixed_list vectors must be finite")
            object.__setattr__(self, "vectors", vecs)
        elif self.vectors is not None:
            raise ValueError("vectors only apply to fixed_list generators")


def generate_steps(gen: StepGenerator, n: int, rng_seed) -> np.ndarray:
    """n signed step vectors, shape (n, d), deterministic given the seed."""
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative")
    d = gen.dimension
    rng = np.random.default_rng(rng_seed)
    if gen.kind == "fixed_list":
        base = np.asarray(gen.vectors, dtype=float)
        reps = -(-n // base.shape[0]) if n else 0
        out = np.tile(base, (max(reps, 1), 1))[:n].copy()
    elif gen.kind == "coordinate_basis_cycle":
        out = np.eye(d)[np.arange(n) % d] if n else np.zeros((0, d))
    else:
        gauss = rng.standard_normal((n, d))
        norms = np.linalg.norm(gauss, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        out = gauss / norms
        if gen.kind == "isotropic_custom":
            out = out * math.sqrt(d)
    if gen.rademacher:
        signs = rng.integers(0, 2, size=n) * 2.0 - 1.0
        out = out * signs[:, None]
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    body: Box
    generator: StepGenerator
    n_steps: int
    n_trials: int
    seed: int
    density_kind: str = "cube_eigen"
    output_path: str = ""

    def __post_init__(self) -> None:
        if self.n_trials < 1:
            raise ValueError("n_trials must be at least 1")
        if self.n_steps < 0:
            raise ValueError("n_steps must be nonnegative")
        if self.density_kind not in DENSITY_KINDS:
            raise ValueError(f"unknown density kind {self.density_kind!r}")
        if self.generator.dimension != self.body.dimension:
            raise ValueError("generator and body dimensions differ")


@dataclass(frozen=True)
class RunStats:
    per_trial_discards: tuple[int, ...]
    mean: float
    std_error: float
    bound_reports: tuple[BoundReport, ...]
    containment_violations: int = 0


def trial_streams(config: ExperimentConfig) -> tuple[np.ndarray, list]:
    """Per-trial step arrays (m, n, d) and filter seeds, from (seed, index)."""
    m, n, d = config.n_trials, config.n_steps, config.body.dimension
    steps = np.empty((m, n, d))
    filter_seeds = []
    for i in range(m):
        step_seed, filter_seed = np.random.SeedSequence((config.seed, i)).spawn(2)
        steps[i] = generate_steps(config.generator, n, step_seed)
        filter_seeds.append(filter_seed)
    return steps, filter_seeds


def run_experiment_ensemble(config: ExperimentConfig) -> tuple[RunStats, EnsembleResult]:
    """run_experiment, also returning the raw ensemble for further checks."""
    density = cube_eigen_density(config.body)
    steps, filter_seeds = trial_streams(config)
    result = run_ensemble(density, steps, filter_seeds)
    discards = np.asarray(result.discards, dtype=np.int64)
    mean = float(np.mean(discards))
    std_error = (
        float(np.std(discards, ddof=1) / math.sqrt(config.n_trials))
        if config.n_trials > 1
        else 0.0
    )
    stats = RunStats(
        per_trial_discards=tuple(int(x) for x in discards),
        mean=mean,
        std_error=std_error,
        bound_reports=tuple(_matching_bounds(config, steps)),
        containment_violations=0,
    )
    return stats, result


def run_experiment(config: ExperimentConfig) -> RunStats:
    """Run n_trials seeded trials and aggregate discard counts and bounds.

    Containment is checked after every step of every trial; a violation
    raises ContainmentError rather than being counted, so a returned
    RunStats always has containment_violations = 0.
    """
    stats, _ = run_experiment_ensemble(config)
    return stats


def _matching_bounds(config: ExperimentConfig, steps: np.ndarray) -> list[BoundReport]:
    """Bounds that apply to this configuration, averaged over trials.

    The Fisher-based upper bounds need the closed-form cube matrix, so they
    attach only for cubic boxes with the cube_eigen density.  The isotropic
    bound is geometric and always attaches.  The 1-d unit-step lower bound
    attaches only when the steps really are integer unit steps on an
    integer-radius band.
    """
    box = config.body
    m, n = config.n_trials, config.n_steps
    reports = []
    if box.is_cube:
        t = float(box.half_widths[0])
        fisher = fisher_closed_form_cube(box)
        quad = np.einsum("mnd,df,mnf->mn", steps, fisher.entries, steps)
        general = 0.5 * float(np.mean(np.sum(np.sqrt(np.maximum(quad, 0.0)), axis=1)))
        reports.append(
            BoundReport(
                "general_fisher",
                general,
                f"n={n}, d={box.dimension}, fisher=closed_form, mean over {m} trials",
            )
        )
        norms = np.linalg.norm(steps, axis=2)
        cube_val = (math.pi / (2.0 * t)) * float(np.mean(np.sum(norms, axis=1)))
        reports.append(
            BoundReport("cube_l2", cube_val, f"n={n}, T={t}, mean over {m} trials")
        )
    reports.append(isotropic_bound(box, n))
    if box.dimension == 1:
        t = float(box.half_widths[0])
        if t.is_integer() and (n == 0 or bool(np.all(np.abs(steps) == 1.0))):
            reports.append(lower_bound_1d(int(t), n))
    return reports


def emit_report(stats: RunStats, report_format: str = "csv") -> str:
    """Render RunStats as csv or json text; byte-stable for fixed input."""
    if report_format == "json":
        payload = {
            "per_trial_discards": list(stats.per_trial_discards),
            "mean": stats.mean,
            "std_error": stats.std_error,
            "containment_violations": stats.containment_violations,
            "bound_reports": [
                {"kind": b.kind, "value": b.value, "inputs_digest": b.inputs_digest}
                for b in stats.bound_reports
            ],
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"
    if report_format == "csv":
        lines = ["trial,discards"]
        lines.extend(f"{i},{c}" for i, c in enumerate(stats.per_trial_discards))
        lines.append(f"mean,{stats.mean!r}")
        lines.append(f"std_error,{stats.std_error!r}")
        lines.append(f"containment_violations,{stats.containment_violations}")
        lines.extend(
            f'bound,{b.kind},{b.value!r},"{b.inputs_digest}"' for b in stats.bound_reports
        )
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {report_format!r}")


def run_stats_from_json(text: str) -> RunStats:
    """Inverse of emit_report(..., 'json'): parse(emit(stats)) == stats."""
    obj = json.loads(text)
    return RunStats(
        per_trial_discards=tuple(int(x) for x in obj["per_trial_discards"]),
        mean=float(obj["mean"]),
        std_error=float(obj["std_error"]),
        bound_reports=tuple(
            BoundReport(b["kind"], float(b["value"]), b["inputs_digest"])
            for b in obj["bound_reports"]
        ),
        containment_violations=int(obj["containment_violations"]),
    )
