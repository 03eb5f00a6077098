"""Matrix formulation of one step.

With ``t`` the 0/1 state vector, the enabled reactions are
``a = clip_enabled((R - In) t)`` and the next state is
``clip_positive(a P)``. Context is merged with an element-wise max.
All arithmetic is int64.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from rsim.core import DimensionError, ReactionSystem, State

__all__ = [
    "StepMatrices",
    "CSRMatrix",
    "MatrixEngine",
    "DEFAULT_SPARSE_THRESHOLD",
    "build_matrices",
    "clip_enabled",
    "clip_positive",
    "matrix_step",
    "state_to_vector",
    "vector_to_state",
]

Kernel = Literal["dense", "sparse", "auto"]

# Below this fill ratio (nnz over the total size of both matrices) "auto" picks sparse.
DEFAULT_SPARSE_THRESHOLD = 0.25
_MAX_DIM = 1 << 30


@dataclass(frozen=True)
class StepMatrices:
    rminus_in: np.ndarray  # (|A|, |S|), entries in {-1, 0, 1}
    products: np.ndarray  # (|A|, |S|), entries in {0, 1}
    thresholds: np.ndarray  # (|A|,), |R_i|

    @property
    def shape(self) -> tuple[int, int]:
        return self.rminus_in.shape

    def fill_ratio(self) -> float:
        n_a, n_s = self.shape
        if n_a * n_s == 0:
            return 0.0
        nnz = np.count_nonzero(self.rminus_in) + np.count_nonzero(self.products)
        return nnz / (2 * n_a * n_s)


@dataclass(frozen=True)
class CSRMatrix:
    """Compressed rows: row ``i`` holds ``data[indptr[i]:indptr[i+1]]`` at ``indices``."""

    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    n_cols: int

    @classmethod
    def from_dense(cls, m: np.ndarray) -> CSRMatrix:
        rows, cols = np.nonzero(m)
        indptr = np.zeros(m.shape[0] + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=m.shape[0]), out=indptr[1:])
        return cls(indptr, cols.astype(np.int64), m[rows, cols].astype(np.int64), m.shape[1])

    @property
    def row_of(self) -> np.ndarray:
        """Row index of every stored entry."""
        return np.repeat(np.arange(len(self.indptr) - 1), np.diff(self.indptr))

    def matvec(self, x: np.ndarray) -> np.ndarray:
        prod = self.data * x[self.indices]
        cs = np.zeros(len(prod) + 1, dtype=np.int64)
        np.cumsum(prod, out=cs[1:])
        return cs[self.indptr[1:]] - cs[self.indptr[:-1]]


def build_matrices(sys: ReactionSystem) -> StepMatrices:
    n_a, n_s = sys.n_reactions, sys.n_entities
    if n_a > _MAX_DIM or n_s > _MAX_DIM:
        raise ValueError(f"system {n_s}x{n_a} too large for int64 accumulation")
    rmi = np.zeros((n_a, n_s), dtype=np.int64)
    prod = np.zeros((n_a, n_s), dtype=np.int64)
    thresholds = np.zeros(n_a, dtype=np.int64)
    for i, r in enumerate(sys.reactions):
        rmi[i, list(r.reactants)] = 1
        rmi[i, list(r.inhibitors)] = -1
        prod[i, list(r.products)] = 1
        thresholds[i] = len(r.reactants)
    return StepMatrices(rmi, prod, thresholds)


def clip_enabled(ahat: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """1 where ``ahat[i] >= thresholds[i]``, else 0."""
    ahat = np.asarray(ahat)
    thresholds = np.asarray(thresholds)
    if ahat.shape != thresholds.shape:
        raise DimensionError(f"length mismatch {ahat.shape} vs {thresholds.shape}")
    return (ahat >= thresholds).astype(np.int64)


def clip_positive(x: np.ndarray) -> np.ndarray:
    """1 where ``x[j] > 0``, else 0."""
    return (np.asarray(x) > 0).astype(np.int64)


def state_to_vector(s: State) -> np.ndarray:
    n_bytes = (s.width + 7) // 8
    raw = np.frombuffer(s.bits.to_bytes(n_bytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[: s.width].astype(np.int64)


def vector_to_state(v: np.ndarray) -> State:
    packed = np.packbits(np.asarray(v, dtype=np.uint8), bitorder="little")
    return State(int.from_bytes(packed.tobytes(), "little"), len(v))


class MatrixEngine:
    """Matrix engine with a dense or a compressed-row kernel.

    ``kernel="auto"`` picks sparse when the fill ratio of the two matrices
    is below ``sparse_threshold``.
    """

    name = "matrix"

    def __init__(
        self,
        system: ReactionSystem,
        kernel: Kernel = "auto",
        sparse_threshold: float = DEFAULT_SPARSE_THRESHOLD,
    ) -> None:
        if kernel not in ("dense", "sparse", "auto"):
            raise ValueError(f"unknown matrix kernel {kernel!r}")
        self.system = system
        self.n_entities = system.n_entities
        self.m = build_matrices(system)
        if kernel == "auto":
            kernel = "sparse" if self.m.fill_ratio() < sparse_threshold else "dense"
        self.kernel = kernel
        if kernel == "sparse":
            self._rmi = CSRMatrix.from_dense(self.m.rminus_in)
            self._p = CSRMatrix.from_dense(self.m.products)
            self._p_rows = self._p.row_of

    def enabled_vector(self, t: np.ndarray) -> np.ndarray:
        if self.kernel == "dense":
            ahat = self.m.rminus_in @ t
        else:
            ahat = self._rmi.matvec(t)
        return clip_enabled(ahat, self.m.thresholds)

    def product_counts(self, a: np.ndarray) -> np.ndarray:
        """``a P`` computed by gathering the rows of P selected by ``a``."""
        if self.kernel == "dense":
            return self.m.products[a.astype(bool)].sum(axis=0, dtype=np.int64)
        sel = a.astype(bool)[self._p_rows]
        return np.bincount(self._p.indices[sel], minlength=self.n_entities).astype(np.int64)

    def step_vector(self, t: np.ndarray) -> np.ndarray:
        return clip_positive(self.product_counts(self.enabled_vector(t)))

    def step(self, d: State, c: State) -> State:
        for s in (d, c):
            if s.width != self.n_entities:
                raise DimensionError(
                    f"state has width {s.width}, engine expects {self.n_entities}"
                )
        t = np.maximum(state_to_vector(d), state_to_vector(c))
        return vector_to_state(self.step_vector(t))


def matrix_step(e: MatrixEngine, d: State, c: State) -> State:
    return e.step(d, c)
