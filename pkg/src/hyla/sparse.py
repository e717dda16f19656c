"""CSR sparse matrices and the propagation products used by the models.

Covers adjacency matrices, the self-loop-augmented symmetric normalization
S = D^{-1/2} (A + I) D^{-1/2}, and sparse-times-dense products. Matrices
are immutable after construction; entries within each row are sorted by
column and explicit zeros are dropped.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, DataError


@dataclass(frozen=True)
class SparseMatrix:
    n_rows: int
    n_cols: int
    row_offsets: np.ndarray   # int64, length n_rows + 1
    col_indices: np.ndarray   # int64, length nnz
    values: np.ndarray        # float64, length nnz

    def __post_init__(self):
        for arr in (self.row_offsets, self.col_indices, self.values):
            arr.flags.writeable = False

    @property
    def nnz(self) -> int:
        return self.values.shape[0]

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols))
        for i in range(self.n_rows):
            lo, hi = self.row_offsets[i], self.row_offsets[i + 1]
            out[i, self.col_indices[lo:hi]] = self.values[lo:hi]
        return out

    def row(self, i):
        lo, hi = self.row_offsets[i], self.row_offsets[i + 1]
        return self.col_indices[lo:hi], self.values[lo:hi]

    def triplets(self):
        rows = np.repeat(np.arange(self.n_rows, dtype=np.int64),
                         np.diff(self.row_offsets))
        return rows, self.col_indices.copy(), self.values.copy()


def from_triplets(n_rows, n_cols, rows, cols, vals, binary=False) -> SparseMatrix:
    """Build a CSR matrix from coordinate triplets.

    Duplicate coordinates are summed, or collapsed to value 1 when
    `binary`. Explicit zeros are dropped.
    """
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.float64)
    if rows.size:
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        first = np.empty(rows.shape[0], dtype=bool)
        first[0] = True
        first[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
        starts = np.nonzero(first)[0]
        if binary:
            rows, cols = rows[starts], cols[starts]
            vals = np.ones(starts.shape[0])
        else:
            vals = np.add.reduceat(vals, starts)
            rows, cols = rows[starts], cols[starts]
        keep = vals != 0.0
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
    counts = np.bincount(rows, minlength=n_rows)
    row_offsets = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
    return SparseMatrix(int(n_rows), int(n_cols), row_offsets,
                        np.ascontiguousarray(cols),
                        np.ascontiguousarray(vals))


def csr_from_edges(n, edges, symmetrize=True) -> SparseMatrix:
    """Binary adjacency from an edge list, deduplicated.

    With `symmetrize`, both (u, v) and (v, u) are stored. The diagonal is
    kept as given. Out-of-range endpoints raise DataError naming the
    offending line (1-based).
    """
    us, vs = [], []
    for lineno, (u, v) in enumerate(edges, start=1):
        if not (0 <= u < n and 0 <= v < n):
            raise DataError(
                f"edge ({u}, {v}) out of range [0, {n}) at line {lineno}")
        us.append(u)
        vs.append(v)
    rows = np.array(us, dtype=np.int64)
    cols = np.array(vs, dtype=np.int64)
    if symmetrize:
        rows, cols = np.concatenate([rows, cols]), np.concatenate([cols, rows])
    return from_triplets(n, n, rows, cols, np.ones(rows.shape[0]), binary=True)


def identity(n) -> SparseMatrix:
    idx = np.arange(n, dtype=np.int64)
    return from_triplets(n, n, idx, idx, np.ones(n))


def transpose(M: SparseMatrix) -> SparseMatrix:
    rows, cols, vals = M.triplets()
    return from_triplets(M.n_cols, M.n_rows, cols, rows, vals)


def is_symmetric(M: SparseMatrix) -> bool:
    if M.n_rows != M.n_cols:
        return False
    T = transpose(M)
    return (np.array_equal(M.row_offsets, T.row_offsets)
            and np.array_equal(M.col_indices, T.col_indices)
            and np.array_equal(M.values, T.values))


def normalize_adjacency(A: SparseMatrix) -> SparseMatrix:
    """Self-loop-augmented symmetric normalization of an adjacency matrix.

    Any existing diagonal is replaced by weight-1 self-loops, degrees are
    row sums of the augmented matrix, and each entry (i, j) is divided by
    sqrt(d_i d_j).
    """
    if A.n_rows != A.n_cols:
        raise ConfigError("normalize_adjacency: matrix must be square")
    if not is_symmetric(A):
        raise ValueError("normalize_adjacency: adjacency must be symmetric")
    rows, cols, vals = A.triplets()
    off = rows != cols
    rows, cols, vals = rows[off], cols[off], vals[off]
    diag = np.arange(A.n_rows, dtype=np.int64)
    rows = np.concatenate([rows, diag])
    cols = np.concatenate([cols, diag])
    vals = np.concatenate([vals, np.ones(A.n_rows)])
    degrees = np.bincount(rows, weights=vals, minlength=A.n_rows)
    inv_sqrt = 1.0 / np.sqrt(degrees)
    vals = vals * inv_sqrt[rows] * inv_sqrt[cols]
    return from_triplets(A.n_rows, A.n_cols, rows, cols, vals)


def spmm(M: SparseMatrix, X) -> np.ndarray:
    """Sparse-times-dense product M @ X with deterministic accumulation."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != M.n_cols:
        raise ConfigError(
            f"spmm: dense operand shape {X.shape} does not match "
            f"({M.n_cols}, _)")
    return kernels.csr_spmm(M.row_offsets, M.col_indices, M.values,
                            M.n_cols, X)


def propagate_k(S: SparseMatrix, X, K) -> np.ndarray:
    """Apply S to X K times without materializing S^K."""
    if K < 0:
        raise ConfigError(f"propagation steps K must be >= 0, got {K}")
    out = np.ascontiguousarray(X, dtype=np.float64)
    for _ in range(K):
        out = spmm(S, out)
    return out


def undirected_edges(M: SparseMatrix) -> list:
    """Unique undirected edge set as sorted (min, max) pairs."""
    rows, cols, _ = M.triplets()
    lo = np.minimum(rows, cols)
    hi = np.maximum(rows, cols)
    pairs = {(int(u), int(v)) for u, v in zip(lo, hi)}
    return sorted(pairs)
