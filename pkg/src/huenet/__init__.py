"""Hierarchical color-opponency model with hue tuning, spatial
correlation, and hue-reconstruction experiments."""

from .config import KernelParams, ModelConfig, RectifierParams
from .experiments import (
    CorrelationReport,
    ExperimentError,
    HueCircleStimulus,
    ReconstructionReport,
    TuningSweep,
    correlation_experiment,
    full_field_stimulus,
    hue_circle_stimulus,
    reconstruction_experiment,
    sweep_all_layers,
    tuning_sweep,
)
from .model import (
    HUE_ANGLES,
    HUE_TYPES,
    LGN_CONE_WEIGHTS,
    OPPONENT_TYPES,
    V4_HUE_WEIGHTS,
    LayerActivations,
    PipelineResult,
    derive_v4_weights,
    hue_distance,
    rectify,
    run_pipeline,
)
from .regression import (
    Dataset,
    SingularFitError,
    StepwiseModel,
    fit_ols,
    stepwise_fit,
)

__version__ = "0.1.0"

__all__ = [
    "KernelParams",
    "ModelConfig",
    "RectifierParams",
    "CorrelationReport",
    "ExperimentError",
    "HueCircleStimulus",
    "ReconstructionReport",
    "TuningSweep",
    "correlation_experiment",
    "full_field_stimulus",
    "hue_circle_stimulus",
    "reconstruction_experiment",
    "sweep_all_layers",
    "tuning_sweep",
    "Dataset",
    "SingularFitError",
    "StepwiseModel",
    "fit_ols",
    "stepwise_fit",
    "HUE_ANGLES",
    "HUE_TYPES",
    "LGN_CONE_WEIGHTS",
    "OPPONENT_TYPES",
    "V4_HUE_WEIGHTS",
    "LayerActivations",
    "PipelineResult",
    "derive_v4_weights",
    "hue_distance",
    "rectify",
    "run_pipeline",
    "__version__",
]
