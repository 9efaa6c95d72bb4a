"""ngramsent: a deterministic bag-of-ngrams sentence sentiment toolkit.

An ensemble of five small multilayer perceptrons over uni/bigram bags,
trained with Adam and early stopping, with the full pipeline around it:
corpus loading and splitting, vocabulary construction, evaluation
metrics, and a robustness probe for out-of-vocabulary substitutions.
"""

from .corpus import (
    Example, Kind, SplitSpec, filter_binary, load_examples, shuffle_split,
)
from .inference import (
    Ensemble, ModelFormatError, Prediction, load_model, predict, save_model,
)
from .metrics import MetricsReport, MinimalPair, accuracy, broken_rate, f1_report
from .model import ModelDims, ModelParams, init_params
from .optim import AdamHyper, AdamState, adam_step
from .probe import ProbeResult, coverage_report, oov_substitution_probe
from .textproc import extract_ngrams, normalize, tokenize
from .training import TrainConfig, TrainedModel, train_ensemble, train_model
from .vocab import NgramVocabulary, build_vocabulary, featurize

__version__ = "0.1.0"

__all__ = [
    "AdamHyper",
    "AdamState",
    "Ensemble",
    "Example",
    "Kind",
    "MetricsReport",
    "MinimalPair",
    "ModelDims",
    "ModelFormatError",
    "ModelParams",
    "NgramVocabulary",
    "Prediction",
    "ProbeResult",
    "SplitSpec",
    "TrainConfig",
    "TrainedModel",
    "accuracy",
    "adam_step",
    "broken_rate",
    "build_vocabulary",
    "coverage_report",
    "extract_ngrams",
    "f1_report",
    "featurize",
    "filter_binary",
    "init_params",
    "load_examples",
    "load_model",
    "normalize",
    "oov_substitution_probe",
    "predict",
    "save_model",
    "shuffle_split",
    "tokenize",
    "train_ensemble",
    "train_model",
]
