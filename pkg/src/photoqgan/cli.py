"""Command-line experiment harness.

Subcommands::

    photoqgan train            one adversarial run, trace CSV
    photoqgan noise-sweep      final fidelity vs phase-noise level
    photoqgan defect-sweep     final fidelity vs defect rate
    photoqgan shot-noise-tvd   TVD of Poisson-sampled uniform distributions
    photoqgan decompose-check  mesh decomposition round-trips

Settings come from built-in defaults, then the ``[common]`` and per-command
tables of the ``--config`` TOML file, then command-line flags.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .linalg import distance_up_to_global_phase, haar_random_unitary
from .mesh import N_PHASES, clements_decompose, mesh_unitary
from .noise import DefectMask, NoiseModel, shot_noise_tvd
from .qgan import Convergence, TrainingConfig, train
from .state import random_true_state

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

log = logging.getLogger("photoqgan")

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_CHECK = 0, 1, 2, 3
DEFAULT_REPS, FULL_REPS = 20, 100
ROUNDTRIP_TOL = 1e-10

TRAINING_DEFAULTS = {
    "max_rounds": 300,
    "inner_steps_d": 5,
    "inner_steps_g": 10,
    "lr_d": 10.0,
    "lr_g": 1.0,
    "lr_decay_d": 1.0,
    "lr_decay_g": 0.995,
    "sigma_pi": 0.0,
    "total_count": "exact",
    "shot_noise_on_target": False,
    "epsilon_d": 0.02,
    "patience": 10,
    "defects_per_arm": 0,
}

COMMAND_DEFAULTS = {
    "train": {},
    "noise-sweep": {
        "sigmas_pi": [0.01, 0.02, 0.03, 0.04, 0.05],
        "total_count": 1500,
        "repetitions": DEFAULT_REPS,
    },
    "defect-sweep": {
        "defect_rates": [round(0.1 * k, 1) for k in range(9)],
        "sigma_pi": 0.02,
        "total_count": 1500,
        "repetitions": DEFAULT_REPS,
    },
    "shot-noise-tvd": {
        "counts": [100, 300, 1000, 3000, 10000],
        "repetitions": 1000,
    },
    "decompose-check": {"samples": 1000},
}


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    """CSV cell: 12 significant digits for floats, empty for None."""
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def write_csv(path: str | None, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# -- configuration -----------------------------------------------------------


def load_settings(command: str, config_path: str | None, overrides: dict) -> dict:
    settings = dict(TRAINING_DEFAULTS)
    settings.update(COMMAND_DEFAULTS[command])
    if config_path:
        try:
            with open(config_path, "rb") as fh:
                data = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML in {config_path}: {exc}") from exc
        for table in ("common", command):
            section = data.get(table, {})
            if not isinstance(section, dict):
                raise ConfigError(f"[{table}] must be a table")
            settings.update(section)
    settings.update({k: v for k, v in overrides.items() if v is not None})
    unknown = set(settings) - set(TRAINING_DEFAULTS) - set(COMMAND_DEFAULTS[command]) - {"seed"}
    if unknown:
        raise ConfigError(f"unknown setting(s) for {command}: {', '.join(sorted(unknown))}")
    return settings


def parse_count(value):
    if value is None or (isinstance(value, str) and value.lower() == "exact"):
        return None
    try:
        count = float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"total_count must be a number or 'exact', got {value!r}") from exc
    if not count > 0:
        raise ConfigError("total_count must be positive")
    return count


@dataclass(frozen=True)
class RunSpec:
    """Everything a worker needs for one training run."""

    seed: int
    repetition: int
    point: int
    config: TrainingConfig
    defects_per_arm: int


def training_config(settings: dict, sigma_pi=None, total_count=None) -> TrainingConfig:
    try:
        noise = NoiseModel(
            sigma=float(settings["sigma_pi"] if sigma_pi is None else sigma_pi) * np.pi,
            total_count=parse_count(settings["total_count"] if total_count is None else total_count),
            shot_noise_on_target=bool(settings["shot_noise_on_target"]),
        )
        return TrainingConfig(
            max_rounds=int(settings["max_rounds"]),
            inner_steps_d=int(settings["inner_steps_d"]),
            inner_steps_g=int(settings["inner_steps_g"]),
            lr_d=float(settings["lr_d"]),
            lr_g=float(settings["lr_g"]),
            lr_decay_d=float(settings["lr_decay_d"]),
            lr_decay_g=float(settings["lr_decay_g"]),
            noise=noise,
            convergence=Convergence(float(settings["epsilon_d"]), int(settings["patience"])),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def run_streams(seed: int, repetition: int, point: int):
    """Independent generators for the target/initialisation and for the run.

    The target stream depends only on ``(seed, repetition)`` so every sweep
    point of one repetition faces the same target and starting discriminator.
    """
    target_rng = np.random.default_rng([seed, repetition])
    run_rng = np.random.default_rng([seed, repetition, point, 1])
    return target_rng, run_rng


def execute(spec: RunSpec):
    """Run one repetition; module-level so it pickles into worker processes."""
    from .state import DiscriminatorParams

    target_rng, run_rng = run_streams(spec.seed, spec.repetition, spec.point)
    tau = random_true_state(target_rng)
    disc = DiscriminatorParams.random(target_rng)
    defects = DefectMask.random(spec.defects_per_arm, run_rng) if spec.defects_per_arm else DefectMask()
    trace = train(spec.config.replace(defects=defects), tau, discriminator=disc, rng=run_rng)
    return trace


def run_all(specs: list[RunSpec], workers: int):
    if workers <= 1 or len(specs) <= 1:
        return [execute(s) for s in specs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(execute, specs))


def convergence_round(trace) -> int:
    return trace.converged_round if trace.converged_round is not None else trace.rounds


# -- commands ----------------------------------------------------------------


def cmd_train(settings: dict, out: str | None, workers: int, timing: bool = False) -> int:
    config = training_config(settings)
    spec = RunSpec(int(settings["seed"]), 0, 0, config, int(settings["defects_per_arm"]))
    trace = execute(spec)
    header = ["round", "phase", "d", "fidelity"] + (["wall_time"] if timing else [])
    rows = []
    for r in trace.records:
        row = [r.round, r.phase, r.d, r.fidelity]
        if timing:
            row.append(r.wall_time)
        rows.append(row)
    write_csv(out, header, rows)
    print(f"final fidelity {trace.final_fidelity:.6f} after {trace.rounds} rounds ({trace.termination})",
          file=sys.stderr)
    return EXIT_OK


SWEEP_HEADER = ["kind", "{axis}", "repetition", "final_fidelity", "std_fidelity",
                "rounds", "converged_round", "termination"]


def _sweep(settings: dict, axis: str, values, make_spec, out, workers) -> int:
    reps = int(settings["repetitions"])
    if reps < 1:
        raise ConfigError("repetitions must be >= 1")
    if not values:
        raise ConfigError(f"{axis} list must not be empty")
    specs = [make_spec(point, value, rep) for point, value in enumerate(values) for rep in range(reps)]
    traces = run_all(specs, workers)
    rows = []
    for point, value in enumerate(values):
        block = traces[point * reps:(point + 1) * reps]
        for rep, trace in enumerate(block):
            rows.append(["run", value, rep, trace.final_fidelity, None, trace.rounds,
                         convergence_round(trace), trace.termination])
        fids = np.array([t.final_fidelity for t in block])
        conv = np.array([convergence_round(t) for t in block], dtype=float)
        rows.append(["aggregate", value, None, fids.mean(), fids.std(),
                     np.mean([t.rounds for t in block]), conv.mean(), None])
        print(f"{axis}={value}: mean fidelity {fids.mean():.4f} +/- {fids.std():.4f}", file=sys.stderr)
    header = [h.format(axis=axis) for h in SWEEP_HEADER]
    write_csv(out, header, rows)
    return EXIT_OK


def cmd_noise_sweep(settings: dict, out: str | None, workers: int) -> int:
    sigmas = [float(s) for s in settings["sigmas_pi"]]
    if any(s < 0 for s in sigmas):
        raise ConfigError("sigmas must be non-negative")
    seed = int(settings["seed"])
    defects = int(settings["defects_per_arm"])

    def make_spec(point, sigma_pi, rep):
        return RunSpec(seed, rep, point, training_config(settings, sigma_pi=sigma_pi), defects)

    return _sweep(settings, "sigma_pi", sigmas, make_spec, out, workers)


def defects_for_rate(rate: float) -> int:
    return int(round(rate * N_PHASES))


def cmd_defect_sweep(settings: dict, out: str | None, workers: int) -> int:
    rates = [float(r) for r in settings["defect_rates"]]
    if any(not 0 <= r <= 1 for r in rates):
        raise ConfigError("defect rates must lie in [0, 1]")
    seed = int(settings["seed"])
    config = training_config(settings)

    def make_spec(point, rate, rep):
        return RunSpec(seed, rep, point, config, defects_for_rate(rate))

    return _sweep(settings, "defect_rate", rates, make_spec, out, workers)


def cmd_shot_noise_tvd(settings: dict, out: str | None, workers: int) -> int:
    counts = [float(c) for c in settings["counts"]]
    reps = int(settings["repetitions"])
    if reps < 1 or not counts or any(c <= 0 for c in counts):
        raise ConfigError("need repetitions >= 1 and a non-empty list of positive counts")
    rng = np.random.default_rng([int(settings["seed"]), 0])
    results = shot_noise_tvd(counts, reps, rng)
    rows = [[c, reps, mean, std] for c, (mean, std) in zip(counts, results)]
    write_csv(out, ["total_count", "repetitions", "mean_tvd", "std_tvd"], rows)
    return EXIT_OK


def cmd_decompose_check(settings: dict, out: str | None, workers: int) -> int:
    samples = int(settings["samples"])
    if samples < 1:
        raise ConfigError("samples must be >= 1")
    rng = np.random.default_rng([int(settings["seed"]), 0])
    rows = []
    for k in range(samples):
        u = np.eye(4, dtype=complex) if k == 0 and samples == 1 else haar_random_unitary(4, rng)
        dist = distance_up_to_global_phase(mesh_unitary(clements_decompose(u)), u)
        rows.append(["sample", k, dist, dist < ROUNDTRIP_TOL])
    worst = max(r[2] for r in rows)
    passed = worst < ROUNDTRIP_TOL
    rows.append(["summary", samples, worst, passed])
    write_csv(out, ["kind", "index", "distance", "pass"], rows)
    print(f"max round-trip distance {worst:.3e} over {samples} samples: {'PASS' if passed else 'FAIL'}",
          file=sys.stderr)
    return EXIT_OK if passed else EXIT_CHECK


COMMANDS = {
    "train": cmd_train,
    "noise-sweep": cmd_noise_sweep,
    "defect-sweep": cmd_defect_sweep,
    "shot-noise-tvd": cmd_shot_noise_tvd,
    "decompose-check": cmd_decompose_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="photoqgan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="TOML file with [common] and [%s] tables" % name)
        p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
        p.add_argument("--out", default=None, help="output CSV path (default stdout)")
        p.add_argument("--full", action="store_true",
                       help="sweeps: %d repetitions per point instead of %d" % (FULL_REPS, DEFAULT_REPS))
        p.add_argument("--workers", type=int, default=1, help="worker processes")
        if name != "train" and name != "decompose-check":
            p.add_argument("--repetitions", type=int, default=None)
        if name != "decompose-check" and name != "shot-noise-tvd":
            p.add_argument("--max-rounds", type=int, default=None)
            p.add_argument("--sigma-pi", type=float, default=None,
                           help="phase noise in units of pi")
            p.add_argument("--count", default=None, help="total coincidence count or 'exact'")
            p.add_argument("--defects-per-arm", type=int, default=None)
        if name == "train":
            p.add_argument("--timing", action="store_true", help="add a wall_time column")
        if name == "decompose-check":
            p.add_argument("--samples", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    overrides = {
        "seed": args.seed,
        "repetitions": getattr(args, "repetitions", None),
        "max_rounds": getattr(args, "max_rounds", None),
        "sigma_pi": getattr(args, "sigma_pi", None),
        "total_count": getattr(args, "count", None),
        "defects_per_arm": getattr(args, "defects_per_arm", None),
        "samples": getattr(args, "samples", None),
    }
    if args.full and args.command in ("noise-sweep", "defect-sweep") and overrides["repetitions"] is None:
        overrides["repetitions"] = FULL_REPS
    if args.command == "noise-sweep" and overrides["sigma_pi"] is not None:
        overrides["sigmas_pi"] = [overrides.pop("sigma_pi")]
    try:
        settings = load_settings(args.command, args.config, overrides)
        settings.setdefault("seed", 0)
        if args.command == "train":
            return cmd_train(settings, args.out, args.workers, timing=args.timing)
        return COMMANDS[args.command](settings, args.out, args.workers)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
