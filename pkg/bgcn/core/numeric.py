"""
Núcleo numérico determinístico.

Matrizes densas são `numpy.ndarray` float64 em ordem de linha; matrizes
esparsas são `scipy.sparse.csr_matrix`. Só as poucas operações que o modelo
precisa vivem aqui, mais o oráculo de gradiente por diferenças finitas.
"""

import logging
from contextlib import contextmanager
from typing import Callable, Iterator, List, Sequence

import numpy as np
import scipy.sparse as sp

from ..errors import NumericError, ShapeError

logger = logging.getLogger(__name__)

DenseMatrix = np.ndarray
SparseMatrix = sp.csr_matrix

DEFAULT_SLOPE = 0.01

_checked = False


def set_checked(enabled: bool) -> None:
    """Liga/desliga as verificações de NaN/Inf em todas as operações."""
    global _checked
    _checked = bool(enabled)


@contextmanager
def checked_mode(enabled: bool = True) -> Iterator[None]:
    previous = _checked
    set_checked(enabled)
    try:
        yield
    finally:
        set_checked(previous)


def ensure_finite(x, name: str) -> None:
    """Levanta NumericError se `x` (densa ou CSR) tiver NaN/Inf."""
    data = x.data if sp.issparse(x) else np.asarray(x)
    if not np.all(np.isfinite(data)):
        raise NumericError(f"Valor não finito em '{name}'")


def _guard(x, name: str) -> None:
    if _checked:
        ensure_finite(x, name)


def dense(rows: int, cols: int, values: Sequence[float] = ()) -> DenseMatrix:
    """Cria matriz densa float64 (zeros se `values` vazio)."""
    if len(values) == 0:
        return np.zeros((rows, cols), dtype=np.float64)
    out = np.asarray(values, dtype=np.float64)
    if out.size != rows * cols:
        raise ShapeError(f"{out.size} valores para matriz {rows}x{cols}")
    return out.reshape(rows, cols)


def csr_from_pairs(rows: np.ndarray, cols: np.ndarray, shape, values=None) -> SparseMatrix:
    """
    CSR a partir de pares (linha, coluna).

    Sem `values` a matriz é binária: pares duplicados viram uma única aresta.
    """
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    binary = values is None
    if binary:
        values = np.ones(len(rows), dtype=np.float64)
    mat = sp.coo_matrix((np.asarray(values, dtype=np.float64), (rows, cols)), shape=shape).tocsr()
    mat.sum_duplicates()
    if binary:
        mat.data[:] = 1.0
    mat.sort_indices()
    return mat


def row_normalize(mat: SparseMatrix) -> SparseMatrix:
    """Normaliza cada linha para somar 1; linhas vazias continuam zeradas."""
    mat = sp.csr_matrix(mat, dtype=np.float64)
    sums = np.asarray(mat.sum(axis=1)).ravel()
    inv = np.zeros_like(sums)
    nonzero = sums != 0
    inv[nonzero] = 1.0 / sums[nonzero]
    out = sp.diags(inv) @ mat
    out = sp.csr_matrix(out)
    out.sort_indices()
    return out


def scale_rows(mat: SparseMatrix, scale: np.ndarray) -> SparseMatrix:
    """diag(scale) · mat, mantendo o formato CSR."""
    out = sp.csr_matrix(sp.diags(np.asarray(scale, dtype=np.float64)) @ mat)
    out.sort_indices()
    return out


def spmm(a: SparseMatrix, b: DenseMatrix) -> DenseMatrix:
    """
    Produto esparso x denso.

    Com `a` normalizada por linha, cada linha do resultado é a média dos
    vizinhos; linhas sem entradas produzem zero.
    """
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"spmm: {a.shape} x {b.shape}")
    _guard(a, "spmm.a")
    _guard(b, "spmm.b")
    return np.asarray(a @ b, dtype=np.float64)


def leaky_relu(x: DenseMatrix, slope: float = DEFAULT_SLOPE) -> DenseMatrix:
    """max(x, slope·x) elemento a elemento (slope em [0, 1])."""
    if not 0.0 <= slope <= 1.0:
        raise ValueError(f"slope fora de [0, 1]: {slope}")
    _guard(x, "leaky_relu.x")
    return np.where(x > 0, x, slope * x)


def leaky_relu_grad(x: DenseMatrix, slope: float = DEFAULT_SLOPE) -> DenseMatrix:
    """Derivada da LeakyReLU avaliada na pré-ativação."""
    return np.where(x > 0, 1.0, slope)


def concat_rows(layers: Sequence[DenseMatrix]) -> DenseMatrix:
    """Concatena as camadas lado a lado, blocos de coluna na ordem 0..L."""
    if not layers:
        raise ShapeError("concat_rows sem camadas")
    rows = layers[0].shape[0]
    for i, layer in enumerate(layers):
        if layer.shape[0] != rows:
            raise ShapeError(f"concat_rows: camada {i} tem {layer.shape[0]} linhas, esperado {rows}")
        _guard(layer, f"concat_rows[{i}]")
    return np.concatenate(layers, axis=1)


def split_columns(mat: DenseMatrix, widths: Sequence[int]) -> List[DenseMatrix]:
    """Inverso de concat_rows: fatia os blocos de coluna."""
    if sum(widths) != mat.shape[1]:
        raise ShapeError(f"split_columns: larguras {list(widths)} para {mat.shape[1]} colunas")
    bounds = np.cumsum([0, *widths])
    return [mat[:, bounds[i]:bounds[i + 1]] for i in range(len(widths))]


def make_dropout_mask(rows: int, cols: int, rate: float, rng: np.random.Generator) -> DenseMatrix:
    """
    Máscara de dropout invertido com valores {0, 1/(1-rate)}.

    O valor esperado de cada entrada é 1, então a inferência não reescala.
    """
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"rate fora de [0, 1): {rate}")
    if rate == 0.0:
        return np.ones((rows, cols), dtype=np.float64)
    keep = rng.random((rows, cols)) >= rate
    return keep.astype(np.float64) / (1.0 - rate)


def finite_diff_grad(
    loss: Callable[[], float],
    params: np.ndarray,
    eps: float = 1e-5,
) -> np.ndarray:
    """
    Gradiente por diferenças centrais (f(θ+ε) - f(θ-ε)) / 2ε.

    `params` é perturbado no lugar e restaurado; `loss` lê o valor atual.
    """
    if eps <= 0:
        raise ValueError("eps precisa ser > 0")
    grad = np.zeros_like(params, dtype=np.float64)
    flat = params.reshape(-1)
    if not np.shares_memory(flat, params):
        raise ValueError("finite_diff_grad precisa de um array contíguo")
    flat_grad = grad.reshape(-1)
    for idx in range(flat.size):
        original = flat[idx]
        flat[idx] = original + eps
        up = loss()
        flat[idx] = original - eps
        down = loss()
        flat[idx] = original
        flat_grad[idx] = (up - down) / (2.0 * eps)
    return grad
