"""scikit-learn style front end for the adversarial trainer."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_phase_matrix, check_random_state, check_state
from .qgan import N_DISC, Convergence, MeasurementChannel, TrainingConfig, train
from .noise import DefectMask, NoiseModel
from .state import (
    COINCIDENCE_INDEX,
    DiscriminatorParams,
    GeneratorParams,
    TwoQuquartState,
    distribution_batch,
    fidelity,
    generate_state,
)


class PhotonicQGAN(BaseEstimator):
    """Learn a two-ququart maximally entangled state adversarially.

    ``fit`` takes the target state (16 amplitudes) and trains the generator
    meshes against the projector discriminator. After fitting,
    ``predict`` returns the generated state's coincidence probability for
    rows of 12 discriminator phases, and ``score`` the fidelity with a
    reference state.

    Parameters
    ----------
    sigma : float
        Phase-noise standard deviation in radians.
    total_count : float or None
        Mean coincidences per setting; ``None`` reads probabilities exactly.
    defects : DefectMask, optional
        Frozen generator phases. Takes precedence over ``defects_per_arm``.
    defects_per_arm : int
        Number of broken shifters drawn at random in each mesh at fit time.
    random_state : int, SeedSequence, Generator or None
        Seeds the discriminator initialisation, defect draw and noise.
    """

    def __init__(
        self,
        max_rounds=300,
        inner_steps_d=5,
        inner_steps_g=10,
        lr_d=10.0,
        lr_g=1.0,
        lr_decay_d=1.0,
        lr_decay_g=0.995,
        sigma=0.0,
        total_count=None,
        shot_noise_on_target=False,
        defects=None,
        defects_per_arm=0,
        epsilon_d=0.02,
        patience=10,
        snapshots=False,
        random_state=None,
    ):
        self.max_rounds = max_rounds
        self.inner_steps_d = inner_steps_d
        self.inner_steps_g = inner_steps_g
        self.lr_d = lr_d
        self.lr_g = lr_g
        self.lr_decay_d = lr_decay_d
        self.lr_decay_g = lr_decay_g
        self.sigma = sigma
        self.total_count = total_count
        self.shot_noise_on_target = shot_noise_on_target
        self.defects = defects
        self.defects_per_arm = defects_per_arm
        self.epsilon_d = epsilon_d
        self.patience = patience
        self.snapshots = snapshots
        self.random_state = random_state

    def _make_config(self, defects: DefectMask) -> TrainingConfig:
        return TrainingConfig(
            max_rounds=self.max_rounds,
            inner_steps_d=self.inner_steps_d,
            inner_steps_g=self.inner_steps_g,
            lr_d=self.lr_d,
            lr_g=self.lr_g,
            lr_decay_d=self.lr_decay_d,
            lr_decay_g=self.lr_decay_g,
            noise=NoiseModel(self.sigma, self.total_count, self.shot_noise_on_target),
            defects=defects,
            convergence=Convergence(self.epsilon_d, self.patience),
            snapshots=self.snapshots,
        )

    def fit(self, X, y=None):
        target = check_state(X, name="X")
        rng = check_random_state(self.random_state)
        if self.defects is not None:
            defects = self.defects
        elif self.defects_per_arm:
            defects = DefectMask.random(self.defects_per_arm, rng)
        else:
            defects = DefectMask()
        self.config_ = self._make_config(defects)
        self.target_ = target
        self.trace_ = train(self.config_, target, rng=rng)
        self.generator_params_ = GeneratorParams.from_vector(self.trace_.generator)
        self.discriminator_params_ = DiscriminatorParams.from_vector(self.trace_.discriminator)
        self.defects_ = defects
        self.n_rounds_ = self.trace_.rounds
        self.converged_ = self.trace_.termination == "converged"
        self.fidelity_ = self.trace_.final_fidelity
        return self

    def generated_state(self) -> TwoQuquartState:
        check_is_fitted(self, "generator_params_")
        return generate_state(self.generator_params_)

    def predict(self, X) -> np.ndarray:
        """Noise-free coincidence probability of the generated state per discriminator row."""
        check_is_fitted(self, "generator_params_")
        disc = check_phase_matrix(X, N_DISC)
        state = self.generated_state().as_matrix()
        return distribution_batch(state, disc)[:, COINCIDENCE_INDEX]

    def measure(self, X, random_state=None) -> np.ndarray:
        """Like :meth:`predict` but read out through the fitted noise model."""
        check_is_fitted(self, "generator_params_")
        disc = check_phase_matrix(X, N_DISC)
        channel = MeasurementChannel(self.config_.noise, self.defects_)
        return channel.generated(self.generator_params_.to_vector(), disc,
                                 check_random_state(random_state))

    def score(self, X, y=None) -> float:
        """Fidelity between the generated state and ``X``."""
        check_is_fitted(self, "generator_params_")
        return fidelity(self.generated_state(), check_state(X, name="X"))
