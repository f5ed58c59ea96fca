from .layers import Model, ModelConfig, NeuralError, loss_bce
from .optim import AdamW
from .tensor import Parameter, Tensor
from .train import (
    FoldReport,
    TrainConfig,
    TrainCorpus,
    accuracy,
    cross_validate,
    fit_single,
    load_checkpoint,
    prepare_fold,
    rng_for,
    save_checkpoint,
    stratified_kfold,
    train_final,
)

__all__ = [
    "AdamW",
    "FoldReport",
    "Model",
    "ModelConfig",
    "NeuralError",
    "Parameter",
    "Tensor",
    "TrainConfig",
    "TrainCorpus",
    "accuracy",
    "cross_validate",
    "fit_single",
    "load_checkpoint",
    "loss_bce",
    "prepare_fold",
    "rng_for",
    "save_checkpoint",
    "stratified_kfold",
    "train_final",
]
