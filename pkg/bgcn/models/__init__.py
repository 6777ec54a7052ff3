"""Modelos de dados do BGCN."""

from .config import (
    ABLATION_PRESETS,
    AblationSwitches,
    B2BMode,
    HardFamily,
    ModelKind,
    OverlapMeasure,
    SplitSpec,
    SynthSpec,
    TrainConfig,
)
from .report import (
    AblationReport,
    AblationRun,
    EvalReport,
    GroupReport,
    MetricSet,
    TrainingLogRecord,
)

__all__ = [
    "AblationReport",
    "AblationRun",
    "ABLATION_PRESETS",
    "AblationSwitches",
    "B2BMode",
    "HardFamily",
    "ModelKind",
    "OverlapMeasure",
    "SplitSpec",
    "SynthSpec",
    "TrainConfig",
    "EvalReport",
    "GroupReport",
    "MetricSet",
    "TrainingLogRecord",
]
