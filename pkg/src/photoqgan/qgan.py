"""Adversarial training loop for the photonic QGAN.

The payoff is the measurement difference

    d(g, D) = | <M(D)>_rho(g) - <M(D)>_tau |

between the generated state and the target, where ``M(D)`` is the product
projector selected by the discriminator phases. The discriminator ascends
``d``, the generator descends it, and every gradient is taken with the
parameter-shift rule so the same code path works for exact and noisy
readout.
"""
from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field

import numpy as np

from .mesh import N_PHASES
from .noise import DefectMask, NoiseModel, apply_defects, perturb_phases
from .projector import N_PROJECTOR_PHASES
from .state import (
    DiscriminatorParams,
    GeneratorParams,
    TwoQuquartState,
    coincidence_batch,
    coincidence_on_state,
    generator_matrices,
)

N_GEN = 2 * N_PHASES
N_DISC = 2 * N_PROJECTOR_PHASES
SHIFT = np.pi / 2
SIGN_ATOL = 1e-12


class MeasurementChannel:
    """Reads out projector expectations, optionally with phase and shot noise.

    Every row of a batch is an independent measurement setting, so it gets its
    own phase-noise draw and its own Poisson counts. Only the monitored (2, 2)
    outcome matters to the estimate ``c_22 / sum(c)``, and a sum of independent
    Poisson bins is itself Poisson, so the other 15 bins are drawn as one
    lumped bin; the estimate has exactly the same distribution.
    """

    def __init__(self, noise: NoiseModel | None = None, defects: DefectMask | None = None):
        self.noise = noise if noise is not None else NoiseModel()
        self.defects = defects if defects is not None else DefectMask()

    @property
    def exact(self) -> bool:
        return self.noise.is_exact

    def _readout(self, prob: np.ndarray, rng) -> np.ndarray:
        if self.noise.total_count is None:
            return prob
        prob = np.clip(prob, 0.0, 1.0)
        hits = rng.poisson(self.noise.total_count * prob)
        misses = rng.poisson(self.noise.total_count * (1.0 - prob))
        total = hits + misses
        return np.where(total > 0, hits / np.maximum(total, 1), 0.0)

    def generated(self, gen: np.ndarray, disc: np.ndarray, rng=None) -> np.ndarray:
        """Measured coincidence probability for stacked generator/discriminator rows."""
        gen = apply_defects(np.atleast_2d(gen), self.defects)
        disc = np.atleast_2d(np.asarray(disc, dtype=float))
        rows = max(gen.shape[0], disc.shape[0])
        gen = np.broadcast_to(gen, (rows, N_GEN))
        disc = np.broadcast_to(disc, (rows, N_DISC))
        if self.noise.sigma > 0:
            gen = perturb_phases(gen, self.noise.sigma, rng)
            disc = perturb_phases(disc, self.noise.sigma, rng)
        return self._readout(coincidence_batch(gen, disc), rng)

    def target(self, tau: np.ndarray, disc: np.ndarray, rng=None) -> np.ndarray:
        """Projector expectation on the true state (4x4 amplitude matrix ``tau``)."""
        disc = np.atleast_2d(np.asarray(disc, dtype=float))
        if not self.noise.shot_noise_on_target:
            return coincidence_on_state(tau, disc)
        if self.noise.sigma > 0:
            disc = perturb_phases(disc, self.noise.sigma, rng)
        return self._readout(coincidence_on_state(tau, disc), rng)

    def signed_difference(self, gen, disc, tau, rng=None) -> np.ndarray:
        return self.generated(gen, disc, rng) - self.target(tau, disc, rng)


def _tau_matrix(tau) -> np.ndarray:
    amps = tau.amplitudes if isinstance(tau, TwoQuquartState) else np.asarray(tau, dtype=complex)
    return amps.reshape(4, 4)


def measurement_difference(g, d, tau, ch: MeasurementChannel | None = None, rng=None) -> float:
    """``|<M>_generated - <M>_target|`` for a single configuration."""
    ch = ch if ch is not None else MeasurementChannel()
    gen = g.to_vector() if isinstance(g, GeneratorParams) else np.asarray(g, dtype=float)
    disc = d.to_vector() if isinstance(d, DiscriminatorParams) else np.asarray(d, dtype=float)
    return float(abs(ch.signed_difference(gen, disc, _tau_matrix(tau), rng)[0]))


def shifted_stack(phases: np.ndarray, indices=None) -> np.ndarray:
    """Rows ``[theta, theta + s e_k..., theta - s e_k...]`` for the parameter-shift rule."""
    phases = np.asarray(phases, dtype=float)
    idx = np.arange(phases.shape[0]) if indices is None else np.asarray(indices, dtype=int)
    n = idx.shape[0]
    stack = np.repeat(phases[None, :], 2 * n + 1, axis=0)
    stack[1 + np.arange(n), idx] += SHIFT
    stack[1 + n + np.arange(n), idx] -= SHIFT
    return stack


def param_shift_grad(objective, phases) -> np.ndarray:
    """Parameter-shift gradient of a scalar objective of a phase vector.

    ``objective`` maps one phase vector to a float. Exact whenever the
    objective is a first-order trigonometric polynomial in each phase.
    """
    phases = np.asarray(phases, dtype=float)
    grad = np.empty_like(phases)
    for k in range(phases.shape[0]):
        plus = phases.copy()
        minus = phases.copy()
        plus[k] += SHIFT
        minus[k] -= SHIFT
        grad[k] = (objective(plus) - objective(minus)) / 2
    return grad


def _split_shifted(values: np.ndarray, n: int) -> tuple[float, np.ndarray]:
    return values[0], (values[1:1 + n] - values[1 + n:]) / 2


def _sign(delta: float) -> float:
    return 0.0 if abs(delta) < SIGN_ATOL else float(np.sign(delta))


@dataclass(frozen=True)
class Convergence:
    epsilon_d: float = 0.02
    patience: int = 10


@dataclass(frozen=True)
class TrainingConfig:
    """Hyper-parameters of one adversarial run.

    Learning rates are in radians per unit gradient and decay geometrically
    after every round, each player at its own rate.
    """

    max_rounds: int = 300
    inner_steps_d: int = 5
    inner_steps_g: int = 10
    lr_d: float = 10.0
    lr_g: float = 1.0
    lr_decay_d: float = 1.0
    lr_decay_g: float = 0.995
    noise: NoiseModel = field(default_factory=NoiseModel)
    defects: DefectMask = field(default_factory=DefectMask)
    convergence: Convergence = field(default_factory=Convergence)
    seed: int = 0
    snapshots: bool = False

    def __post_init__(self):
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if self.inner_steps_d < 0 or self.inner_steps_g < 0:
            raise ValueError("inner step counts must be >= 0")
        if self.lr_d < 0 or self.lr_g < 0:
            raise ValueError("learning rates must be non-negative")
        if not (0 < self.lr_decay_d <= 1 and 0 < self.lr_decay_g <= 1):
            raise ValueError("learning-rate decays must lie in (0, 1]")
        if self.convergence.patience < 1:
            raise ValueError("patience must be >= 1")

    def replace(self, **changes) -> "TrainingConfig":
        return dataclasses.replace(self, **changes)


@dataclass
class TraceRecord:
    round: int
    phase: str  # "D" or "G"
    d: float
    fidelity: float
    wall_time: float
    zero_counts: bool = False
    generator: np.ndarray | None = None
    discriminator: np.ndarray | None = None


@dataclass
class TrainingTrace:
    records: list[TraceRecord] = field(default_factory=list)
    termination: str = "max_rounds"
    converged_round: int | None = None
    generator: np.ndarray | None = None
    discriminator: np.ndarray | None = None

    @property
    def rounds(self) -> int:
        return self.records[-1].round if self.records else 0

    @property
    def final_fidelity(self) -> float:
        return self.records[-1].fidelity if self.records else float("nan")

    @property
    def final_d(self) -> float:
        return self.records[-1].d if self.records else float("nan")

    def column(self, name: str, phase: str | None = None) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records if phase is None or r.phase == phase])


class AdversarialGame:
    """Mutable state of one training run: both players, the target and the RNG."""

    def __init__(self, config: TrainingConfig, tau, rng: np.random.Generator,
                 generator=None, discriminator=None):
        self.config = config
        self.rng = rng
        self.tau = _tau_matrix(tau)
        self.channel = MeasurementChannel(config.noise, config.defects)
        if generator is None:
            generator = GeneratorParams.identity()
        if discriminator is None:
            discriminator = DiscriminatorParams.random(rng)
        self.gen = apply_defects(_vec(generator), config.defects)
        self.disc = _vec(discriminator).astype(float)
        self.free = np.setdiff1d(np.arange(N_GEN), config.defects.flat_indices())
        self.lr_d = config.lr_d
        self.lr_g = config.lr_g

    def difference(self) -> float:
        return float(self.channel.signed_difference(self.gen, self.disc, self.tau, self.rng)[0])

    def fidelity(self) -> float:
        """Noise-free fidelity of the (defect-pinned) generated state."""
        state = generator_matrices(self.gen[None, :])[0]
        return float(min(1.0, abs(np.vdot(self.tau, state))))

    def discriminator_gradient(self) -> tuple[float, np.ndarray]:
        stack = shifted_stack(self.disc)
        values = self.channel.signed_difference(self.gen, stack, self.tau, self.rng)
        return _split_shifted(values, N_DISC)

    def generator_gradient(self) -> tuple[float, np.ndarray]:
        stack = shifted_stack(self.gen, self.free)
        measured = self.channel.generated(stack, self.disc, self.rng)
        target = self.channel.target(self.tau, self.disc, self.rng)[0]
        delta, partial = _split_shifted(measured - target, self.free.shape[0])
        grad = np.zeros(N_GEN)
        grad[self.free] = partial
        return delta, grad

    def discriminator_turn(self) -> None:
        for _ in range(self.config.inner_steps_d):
            delta, grad = self.discriminator_gradient()
            self.disc = self.disc + self.lr_d * _sign(delta) * grad

    def generator_turn(self) -> None:
        for _ in range(self.config.inner_steps_g):
            delta, grad = self.generator_gradient()
            self.gen = apply_defects(self.gen - self.lr_g * _sign(delta) * grad, self.config.defects)

    def decay(self) -> None:
        self.lr_d *= self.config.lr_decay_d
        self.lr_g *= self.config.lr_decay_g


def _vec(params) -> np.ndarray:
    return params.to_vector() if hasattr(params, "to_vector") else np.array(params, dtype=float)


def train(config: TrainingConfig, tau, generator=None, discriminator=None,
          rng: np.random.Generator | None = None) -> TrainingTrace:
    """Alternate discriminator and generator turns until convergence or ``max_rounds``.

    A run counts as converged once the discriminator, after its own turn,
    can no longer find a measurement with difference ``epsilon_d`` or more,
    for ``patience`` consecutive rounds; ``converged_round`` is the first
    round of that streak. (The difference after the generator's turn is not
    used: the generator can always null it on the one projector it was
    just shown.)
    """
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    game = AdversarialGame(config, tau, rng, generator, discriminator)
    trace = TrainingTrace()
    start = time.perf_counter()
    streak = 0

    def record(round_index: int, phase: str) -> None:
        delta = game.difference()
        rec = TraceRecord(
            round=round_index,
            phase=phase,
            d=float(min(1.0, abs(delta))),
            fidelity=game.fidelity(),
            wall_time=time.perf_counter() - start,
        )
        if config.snapshots:
            rec.generator = game.gen.copy()
            rec.discriminator = game.disc.copy()
        trace.records.append(rec)

    for r in range(1, config.max_rounds + 1):
        game.discriminator_turn()
        record(r, "D")
        d_after_discriminator = trace.records[-1].d
        game.generator_turn()
        record(r, "G")
        game.decay()
        streak = streak + 1 if d_after_discriminator < config.convergence.epsilon_d else 0
        if streak >= config.convergence.patience:
            trace.termination = "converged"
            trace.converged_round = r - streak + 1
            break

    trace.generator = game.gen.copy()
    trace.discriminator = game.disc.copy()
    return trace
