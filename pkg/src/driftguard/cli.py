"""driftguard command line: simulate, bounds, oracle, fisher."""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bodies import (
    Box,
    cube_eigen_density,
    dirichlet_lambda1_box,
    fisher_closed_form_cube,
    fisher_monte_carlo,
    fisher_operator_norm,
    fisher_quadrature,
)
from .bounds import isotropic_bound, lower_bound_1d, upper_bound_cube, upper_bound_general
from .harness import ExperimentConfig, StepGenerator, emit_report, run_experiment
from .metropolis import ContainmentError
from .oracle1d import (
    dp_longest_valid,
    exact_chain_expectation,
    exact_chain_expectation_fraction,
    reflected_walk,
    signs_from_string,
    verify_lex_optimality,
    verify_start_shift,
)

_SIM_DEFAULTS = {
    "dim": 1,
    "half_width": 1.0,
    "half_widths": None,
    "density": "cube_eigen",
    "generator": "unit",
    "rademacher": True,
    "steps": 1000,
    "trials": 100,
    "seed": 0,
    "out": "",
    "format": "csv",
}

_ENUM_LIMIT = 14


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _load_step_file(path: str, dim: int) -> np.ndarray:
    with warnings.catch_warnings():
        # empty files are reported below, not via loadtxt's UserWarning
        warnings.simplefilter("ignore")
        vectors = np.loadtxt(path, ndmin=2, dtype=float)
    if vectors.size == 0:
        raise ValueError(f"step file {path} is empty")
    if vectors.shape[1] != dim:
        raise ValueError(
            f"step file {path} has vectors of dimension {vectors.shape[1]}, expected {dim}"
        )
    if not np.all(np.isfinite(vectors)):
        raise ValueError(f"step file {path} has non-finite entries")
    return vectors


def _parse_generator(choice: str, dim: int, rademacher: bool) -> StepGenerator:
    if choice == "unit":
        return StepGenerator("random_unit_sphere", dim, rademacher)
    if choice == "isotropic":
        return StepGenerator("isotropic_custom", dim, rademacher)
    if choice == "pm1":
        return StepGenerator("coordinate_basis_cycle", dim, rademacher)
    if choice.startswith("file:"):
        vectors = _load_step_file(choice[len("file:"):], dim)
        return StepGenerator(
            "fixed_list", dim, rademacher, tuple(tuple(row) for row in vectors)
        )
    raise ValueError(f"unknown generator {choice!r} (use unit|isotropic|pm1|file:<path>)")


def _cmd_simulate(args: argparse.Namespace) -> int:
    settings = dict(_SIM_DEFAULTS)
    if args.config:
        raw = json.loads(Path(args.config).read_text())
        unknown = sorted(set(raw) - set(_SIM_DEFAULTS))
        if unknown:
            raise ValueError(f"unknown config keys: {unknown}")
        settings.update(raw)
    for key in ("trials", "steps", "seed", "dim", "generator", "out", "format"):
        value = getattr(args, key)
        if value is not None:
            settings[key] = value
    if args.half_width is not None:
        settings["half_width"] = args.half_width
        settings["half_widths"] = None
    if args.dim is not None:
        # explicit dimension flag forces the cube path
        settings["half_widths"] = None
    if settings["half_widths"] is not None:
        box = Box(np.asarray(settings["half_widths"], dtype=float))
    else:
        box = Box.cube(int(settings["dim"]), float(settings["half_width"]))
    generator = _parse_generator(
        str(settings["generator"]), box.dimension, bool(settings["rademacher"])
    )
    config = ExperimentConfig(
        body=box,
        generator=generator,
        n_steps=int(settings["steps"]),
        n_trials=int(settings["trials"]),
        seed=int(settings["seed"]),
        density_kind=str(settings["density"]),
        output_path=str(settings["out"]),
    )
    stats = run_experiment(config)
    text = emit_report(stats, str(settings["format"]))
    if config.output_path:
        Path(config.output_path).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_bounds(args: argparse.Namespace) -> int:
    dim = int(args.dim)
    t = float(args.half_width)
    if args.norms:
        if not args.norms.startswith("file:"):
            raise ValueError("--norms expects file:<path>")
        steps_arr = _load_step_file(args.norms[len("file:"):], dim)
    else:
        n = int(args.steps)
        steps_arr = np.zeros((n, dim))
        steps_arr[:, 0] = 1.0
    n = steps_arr.shape[0]
    norms = np.linalg.norm(steps_arr, axis=1)
    box = Box.cube(dim, t)
    fisher = fisher_closed_form_cube(box)
    for report in (
        upper_bound_general(fisher, steps_arr),
        upper_bound_cube(t, norms),
        isotropic_bound(box, n),
    ):
        _emit({"kind": report.kind, "value": report.value, "inputs_digest": report.inputs_digest})
    if t.is_integer():
        report = lower_bound_1d(int(t), n)
        _emit({"kind": report.kind, "value": report.value, "inputs_digest": report.inputs_digest})
    else:
        _emit({"kind": "lower_1d", "skipped": "requires integer half-width"})
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    t = int(args.T)
    if args.mode == "single":
        if not args.signs:
            raise ValueError("--signs is required in single mode")
        eps = signs_from_string(args.signs)
        if args.n and int(args.n) != len(eps):
            raise ValueError(f"--n {args.n} does not match {len(eps)} signs")
        start = int(args.start) if args.start is not None else 0
        walk = reflected_walk(eps, t, start)
        n = len(eps)
        record = {
            "mode": "single",
            "T": t,
            "start": start,
            "signs": args.signs,
            "kept_indices": list(walk.indices),
            "discards": n - len(walk.indices),
            "longest_valid": dp_longest_valid(eps, t, start) if n <= 30 else None,
            "lex_minimal": verify_lex_optimality(eps, t, start) if n <= _ENUM_LIMIT else None,
        }
        _emit(record)
        return 0
    if args.mode == "chain":
        n = int(args.n)
        start = int(args.start) if args.start is not None else "uniform"
        value = exact_chain_expectation(t, n, start)
        record = {
            "mode": "chain",
            "T": t,
            "n": n,
            "start": start if isinstance(start, str) else int(start),
            "expected_discards": value,
            "lower_bound": lower_bound_1d(t, n).value,
        }
        if 2 * t + 1 <= 65:
            exact = exact_chain_expectation_fraction(t, n, start)
            record["exact"] = f"{exact.numerator}/{exact.denominator}"
        _emit(record)
        return 0
    if args.mode == "exhaustive":
        n = int(args.n)
        if n > _ENUM_LIMIT:
            raise ValueError(f"exhaustive mode is limited to n <= {_ENUM_LIMIT}")
        starts = [int(args.start)] if args.start is not None else list(range(-t, t + 1))
        instances = 0
        failures = 0
        for bits in range(1 << n):
            eps = tuple(1 if bits & (1 << i) else -1 for i in range(n))
            for start in starts:
                instances += 1
                ok = verify_lex_optimality(eps, t, start) and verify_start_shift(eps, t, start)
                if not ok:
                    failures += 1
                    _emit(
                        {
                            "mode": "exhaustive",
                            "T": t,
                            "start": start,
                            "signs": "".join("+" if e > 0 else "-" for e in eps),
                            "ok": False,
                        }
                    )
        _emit({"mode": "exhaustive", "T": t, "n": n, "instances": instances, "failures": failures})
        return 0 if failures == 0 else 2
    raise ValueError(f"unknown oracle mode {args.mode!r}")


def _cmd_fisher(args: argparse.Namespace) -> int:
    dim = int(args.dim)
    t = float(args.half_width)
    box = Box.cube(dim, t)
    if args.method == "closed":
        fisher = fisher_closed_form_cube(box)
    elif args.method == "quadrature":
        fisher = fisher_quadrature(cube_eigen_density(box), int(args.nodes))
    elif args.method == "mc":
        fisher = fisher_monte_carlo(cube_eigen_density(box), int(args.samples), int(args.seed))
    else:
        raise ValueError(f"unknown method {args.method!r}")
    record = {
        "method": args.method,
        "dim": dim,
        "half_width": t,
        "entries": [[float(x) for x in row] for row in fisher.entries],
        "std_error": (
            [[float(x) for x in row] for row in fisher.std_error]
            if fisher.std_error is not None
            else None
        ),
        "operator_norm": fisher_operator_norm(fisher),
        "trace": fisher.trace,
        "four_lambda1": 4.0 * dirichlet_lambda1_box(box),
    }
    _emit(record)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="driftguard")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run filtered-walk trials and report discards")
    p_sim.add_argument("--config", help="JSON config file; flags override its values")
    p_sim.add_argument("--trials", type=int)
    p_sim.add_argument("--steps", type=int)
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--dim", type=int)
    p_sim.add_argument("--half-width", dest="half_width", type=float)
    p_sim.add_argument("--generator", help="unit|isotropic|pm1|file:<path>")
    p_sim.add_argument("--out", help="output path (default stdout)")
    p_sim.add_argument("--format", choices=["csv", "json"])
    p_sim.set_defaults(func=_cmd_simulate)

    p_bounds = sub.add_parser("bounds", help="print the four bound reports")
    p_bounds.add_argument("--dim", type=int, required=True)
    p_bounds.add_argument("--half-width", dest="half_width", type=float, required=True)
    p_bounds.add_argument("--steps", type=int, default=0)
    p_bounds.add_argument("--norms", help="file:<path> of step vectors, one per line")
    p_bounds.set_defaults(func=_cmd_bounds)

    p_oracle = sub.add_parser("oracle", help="1-d reflected-walk oracles, JSON lines")
    p_oracle.add_argument("--mode", choices=["exhaustive", "chain", "single"], required=True)
    p_oracle.add_argument("--T", type=int, required=True)
    p_oracle.add_argument("--n", type=int, default=0)
    p_oracle.add_argument("--start", type=int)
    p_oracle.add_argument("--signs")
    p_oracle.set_defaults(func=_cmd_oracle)

    p_fisher = sub.add_parser("fisher", help="Fisher information of the cube density")
    p_fisher.add_argument("--dim", type=int, required=True)
    p_fisher.add_argument("--half-width", dest="half_width", type=float, required=True)
    p_fisher.add_argument("--method", choices=["closed", "quadrature", "mc"], required=True)
    p_fisher.add_argument("--nodes", type=int, default=128)
    p_fisher.add_argument("--samples", type=int, default=10**6)
    p_fisher.add_argument("--seed", type=int, default=0)
    p_fisher.set_defaults(func=_cmd_fisher)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ContainmentError as exc:
        print(f"containment violation: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
