"""Streaming semi-supervised continual learning.

Fuzzy ART category learning with per-node label density functions,
co-activation label propagation, uncertainty-gated prediction, a supervised
ARTMAP baseline, a shared feature-stream file format, and a seeded
experiment harness.
"""

from .art import (
    ArtHyperParams,
    activate,
    choice,
    complement_code,
    create_node,
    match,
    select_winner,
    update_weight,
)
from .errors import ConfigError, FormatError
from .fam import FamModel, FamNode
from .harness import (
    ExperimentConfig,
    report_emit,
    run_continual,
    run_semi_supervised,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .model import (
    ABSTAIN,
    LpartHyperParams,
    LpartModel,
    LpartNode,
    ObserveResult,
    Prediction,
    label_distribution,
    uncertainty_count,
    uncertainty_entropy,
)
from .streams import (
    FeatureSample,
    MaskSchedule,
    StreamHeader,
    UNLABELED,
    mask_labels,
    normalize,
    read_all,
    read_header,
    read_stream,
    shuffle,
    synth_clusters,
    synth_split,
    write_stream,
)

__version__ = "0.1.0"

__all__ = [
    "ABSTAIN",
    "UNLABELED",
    "KERNEL_BACKEND",
    "ArtHyperParams",
    "LpartHyperParams",
    "LpartModel",
    "LpartNode",
    "ObserveResult",
    "Prediction",
    "FamModel",
    "FamNode",
    "FeatureSample",
    "StreamHeader",
    "MaskSchedule",
    "ExperimentConfig",
    "ConfigError",
    "FormatError",
    "complement_code",
    "choice",
    "match",
    "update_weight",
    "activate",
    "select_winner",
    "create_node",
    "label_distribution",
    "uncertainty_entropy",
    "uncertainty_count",
    "read_header",
    "read_stream",
    "read_all",
    "write_stream",
    "normalize",
    "mask_labels",
    "shuffle",
    "synth_clusters",
    "synth_split",
    "run_semi_supervised",
    "run_continual",
    "report_emit",
    "__version__",
]
