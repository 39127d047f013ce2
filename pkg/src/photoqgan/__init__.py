"""Simulator for adversarial learning of two-ququart entangled states on a 4-mode photonic chip."""
from .estimator import PhotonicQGAN
from .linalg import (
    NotUnitaryError,
    check_unitary,
    distance_up_to_global_phase,
    haar_random_unitary,
    tensor_product,
)
from .mesh import MeshPhases, clements_decompose, identity_phases, mesh_unitary
from .noise import DefectMask, NoiseModel, sample_counts, tvd
from .projector import BasisParams, ProjectorPhases, projection_phases, projection_unitary
from .qgan import Convergence, TrainingConfig, TrainingTrace, measurement_difference, train
from .state import (
    DiscriminatorParams,
    GeneratorParams,
    TwoQuquartState,
    expectation,
    fidelity,
    generate_state,
    outcome_distribution,
    random_true_state,
)

__version__ = "0.1.0"

__all__ = [
    "BasisParams",
    "Convergence",
    "DefectMask",
    "DiscriminatorParams",
    "GeneratorParams",
    "MeshPhases",
    "NoiseModel",
    "NotUnitaryError",
    "PhotonicQGAN",
    "ProjectorPhases",
    "TrainingConfig",
    "TrainingTrace",
    "TwoQuquartState",
    "check_unitary",
    "clements_decompose",
    "distance_up_to_global_phase",
    "expectation",
    "fidelity",
    "generate_state",
    "haar_random_unitary",
    "identity_phases",
    "measurement_difference",
    "mesh_unitary",
    "outcome_distribution",
    "projection_phases",
    "projection_unitary",
    "random_true_state",
    "sample_counts",
    "tensor_product",
    "train",
    "tvd",
]
