"""Multi-objective evolutionary feature selection with a neural subset cost."""

from ._backend import BACKEND
from .baselines import DecompositionConfig, run_decomposition, sweep_weights
from .classify import SvmSpec, holdout_accuracy, train_svm
from .core import BitChromosome, Individual, ObjectiveVector, dominates
from .dataset import Dataset, SplitIndices, load_csv, preprocess, split
from .engine import EvolutionConfig, RunReport, knee_select, run
from .errors import (ConfigError, ContractViolation, DataError, EvaluationError, MoefsError,
                     TrainingError)
from .neurocost import Evaluator, TrainSpec, evaluate_subset
from .ranking import crowded_compare, crowding_distance, non_dominated_sort

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BitChromosome", "ConfigError", "ContractViolation", "DataError", "Dataset",
    "DecompositionConfig", "EvaluationError", "Evaluator", "EvolutionConfig", "Individual",
    "MoefsError", "ObjectiveVector", "RunReport", "SplitIndices", "SvmSpec", "TrainSpec",
    "TrainingError", "crowded_compare", "crowding_distance", "dominates", "evaluate_subset",
    "holdout_accuracy", "knee_select", "load_csv", "non_dominated_sort", "preprocess", "run",
    "run_decomposition", "split", "sweep_weights", "train_svm",
]
