"""Modelo BGCN (forward, backward analítico) e o baseline MF-BPR."""

from .backward import backward, bgcn_loss
from .mf_bpr import MFParams, init_mf_params, mf_bpr_backward, mf_bpr_loss, mf_bpr_score
from .model import BGCNModel, MFBPRModel, RankingModel, Scorer, build_model
from .params import ModelParams, glorot_uniform, init_params
from .propagation import (
    DropoutMasks,
    PropagatedEmbeddings,
    bundle_level_forward,
    forward,
    item_level_forward,
    predict,
)

__all__ = [
    "backward",
    "bgcn_loss",
    "MFParams",
    "init_mf_params",
    "mf_bpr_backward",
    "mf_bpr_loss",
    "mf_bpr_score",
    "BGCNModel",
    "MFBPRModel",
    "RankingModel",
    "Scorer",
    "build_model",
    "ModelParams",
    "glorot_uniform",
    "init_params",
    "DropoutMasks",
    "PropagatedEmbeddings",
    "bundle_level_forward",
    "forward",
    "item_level_forward",
    "predict",
]
