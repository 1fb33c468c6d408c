"""Spectrum-hole prediction: binary channel-occupancy forecasting with a
small feedforward network trained by damped least squares over a
genetic-algorithm-selected starting point.

The pipeline: threshold power sweeps into busy/idle series, slice them
into sliding-window patterns, train one network per channel, and report
next-slot prediction error.  ``specpredict.cli`` exposes the same flow as
a command line; ``SpectrumMlpPredictor`` wraps it as an sklearn estimator.
"""

from .data import (
    BandDefinition,
    ChannelModel,
    OccupancySeries,
    PowerSweep,
    WindowedDataset,
    band_by_name,
    bayes_floor,
    binarize,
    default_band_presets,
    load_band_presets,
    load_occupancy,
    load_sweeps,
    save_occupancy,
    save_sweeps,
    split,
    synth_generate,
    window,
)
from ._validation import derive_rng
from .errors import (
    DataFormatError,
    NumericalError,
    SpecpredictError,
    StructuralError,
)
from .estimator import OccupancyBinarizer, SpectrumMlpPredictor
from .evaluation import (
    PredictionReport,
    emit_report,
    evaluate,
    mean_error_rate,
    predict,
)
from .genetic import (
    Chromosome,
    GaConfig,
    GaLog,
    Population,
    crossover,
    decode,
    encode,
    evolve,
    fitness,
    ga_lm_train,
    mutate,
    roulette_select,
)
from .network import (
    ForwardTrace,
    NetworkTopology,
    NetworkWeights,
    activation,
    activation_derivative,
    forward,
    init_random,
    load_model,
    model_from_json,
    model_to_json,
    save_model,
)
from .training import (
    GdConfig,
    Gradient,
    LmConfig,
    TrainingPattern,
    TrainLog,
    backprop_gradient,
    error_sse,
    jacobian,
    lm_step,
    total_error,
    train_gd,
    train_lm,
)

__version__ = "0.1.0"

__all__ = [
    "BandDefinition",
    "ChannelModel",
    "Chromosome",
    "DataFormatError",
    "ForwardTrace",
    "GaConfig",
    "GaLog",
    "GdConfig",
    "Gradient",
    "LmConfig",
    "NetworkTopology",
    "NetworkWeights",
    "NumericalError",
    "OccupancyBinarizer",
    "OccupancySeries",
    "Population",
    "PowerSweep",
    "PredictionReport",
    "SpecpredictError",
    "SpectrumMlpPredictor",
    "StructuralError",
    "TrainLog",
    "TrainingPattern",
    "WindowedDataset",
    "activation",
    "activation_derivative",
    "backprop_gradient",
    "band_by_name",
    "bayes_floor",
    "binarize",
    "crossover",
    "decode",
    "default_band_presets",
    "derive_rng",
    "emit_report",
    "encode",
    "error_sse",
    "evaluate",
    "evolve",
    "fitness",
    "forward",
    "ga_lm_train",
    "init_random",
    "jacobian",
    "lm_step",
    "load_band_presets",
    "load_model",
    "load_occupancy",
    "load_sweeps",
    "mean_error_rate",
    "model_from_json",
    "model_to_json",
    "mutate",
    "predict",
    "roulette_select",
    "save_model",
    "save_occupancy",
    "save_sweeps",
    "split",
    "synth_generate",
    "total_error",
    "train_gd",
    "train_lm",
    "window",
]
