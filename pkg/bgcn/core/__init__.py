"""Núcleo numérico: matrizes densas/CSR, operações do modelo e Adam."""

from .numeric import (
    DEFAULT_SLOPE,
    DenseMatrix,
    SparseMatrix,
    checked_mode,
    concat_rows,
    csr_from_pairs,
    dense,
    ensure_finite,
    finite_diff_grad,
    leaky_relu,
    leaky_relu_grad,
    make_dropout_mask,
    row_normalize,
    scale_rows,
    set_checked,
    split_columns,
    spmm,
)
from .loss import bpr_loss, bpr_margin_grad, squared_norm
from .optim import Adam, AdamState, adam_step

__all__ = [
    "DEFAULT_SLOPE",
    "DenseMatrix",
    "SparseMatrix",
    "checked_mode",
    "concat_rows",
    "csr_from_pairs",
    "dense",
    "ensure_finite",
    "finite_diff_grad",
    "leaky_relu",
    "leaky_relu_grad",
    "make_dropout_mask",
    "row_normalize",
    "scale_rows",
    "set_checked",
    "split_columns",
    "spmm",
    "Adam",
    "AdamState",
    "adam_step",
    "bpr_loss",
    "bpr_margin_grad",
    "squared_norm",
]
