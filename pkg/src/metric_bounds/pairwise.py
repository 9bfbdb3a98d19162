"""Pairwise scores, hinge pair loss and empirical risks.

The empirical risk is the U-statistic

    E_z(M, b) = 1/(n(n-1)) * sum_{i != j} loss(z_i, z_j)

over ordered pairs. ``block_risk`` is the cheaper estimator that pairs point
``i`` with point ``m + i`` (``m = n // 2``); averaged over all orderings of
the sample it reproduces the U-statistic exactly.
"""
import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .norms import sym


class Task(str, Enum):
    METRIC = "metric"
    SIMILARITY = "similarity"


@dataclass(frozen=True)
class Dataset:
    """Ordered labeled sample. Row order matters for block pairing."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y)
        if X.ndim != 2 or X.shape[1] < 1:
            raise ValueError(f"X must have shape (n, d) with d >= 1, got {X.shape}")
        if y.shape != (X.shape[0],):
            raise ValueError("y must hold one label per row of X")
        if not np.all(np.isfinite(X)):
            raise ValueError("data has non-finite features")
        if y.size and not np.issubdtype(y.dtype, np.integer):
            if not np.all(np.equal(np.mod(y, 1), 0)):
                raise ValueError("labels must be integers")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y.astype(np.int64))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def __len__(self):
        return self.n

    def permuted(self, order) -> "Dataset":
        order = np.asarray(order)
        return Dataset(self.X[order], self.y[order])


@dataclass(frozen=True)
class Model:
    """Symmetric matrix ``M`` and offset ``b``."""

    M: np.ndarray
    b: float

    def __post_init__(self):
        object.__setattr__(self, "M", sym(self.M))
        if not np.isfinite(self.b):
            raise ValueError("offset b must be finite")
        object.__setattr__(self, "b", float(self.b))

    @property
    def d(self) -> int:
        return self.M.shape[0]

    @classmethod
    def zero(cls, d: int, b: float = 0.0) -> "Model":
        return cls(np.zeros((d, d)), b)


def relation(y, y_other) -> int:
    """+1 if the labels agree, -1 otherwise."""
    return 1 if y == y_other else -1


def score(task: Task, M, x, x_other) -> float:
    """``(x - x')^T M (x - x')`` for metric learning, ``x^T M x'`` for similarity."""
    x = np.asarray(x, dtype=float)
    x_other = np.asarray(x_other, dtype=float)
    M = np.asarray(M, dtype=float)
    if x.shape != x_other.shape or x.shape != (M.shape[0],):
        raise ValueError("dimension mismatch between points and matrix")
    if Task(task) is Task.METRIC:
        v = x - x_other
        return float(v @ M @ v)
    return float(x @ M @ x_other)


def _hinge_arg(task: Task, r, s, b):
    if Task(task) is Task.METRIC:
        return 1.0 + r * (s - b)
    return 1.0 - r * (s - b)


def pair_loss(task: Task, model: Model, z, z_other) -> float:
    """Hinge loss of one pair; ``z`` and ``z_other`` are ``(x, y)`` tuples."""
    (x, y), (x2, y2) = z, z_other
    s = score(task, model.M, x, x2)
    return max(0.0, _hinge_arg(task, relation(y, y2), s, model.b))


def score_matrix(task: Task, M: np.ndarray, X: np.ndarray) -> np.ndarray:
    """All pairwise scores ``S[i, j]`` for the rows of ``X`` (diagonal included)."""
    XM = X @ M
    G = XM @ X.T
    if Task(task) is Task.SIMILARITY:
        return (G + G.T) / 2.0
    q = np.einsum("ij,ij->i", XM, X)
    S = q[:, None] + q[None, :] - 2.0 * G
    return (S + S.T) / 2.0


def relation_matrix(y: np.ndarray) -> np.ndarray:
    return np.where(y[:, None] == y[None, :], 1.0, -1.0)


def pair_losses(task: Task, model: Model, data: Dataset) -> np.ndarray:
    """Matrix of pair losses; the diagonal is set to 0."""
    S = score_matrix(task, model.M, data.X)
    L = np.maximum(_hinge_arg(task, relation_matrix(data.y), S, model.b), 0.0)
    np.fill_diagonal(L, 0.0)
    return L


def _need_pairs(data: Dataset):
    if data.n < 2:
        raise ValueError(f"need at least 2 points, got {data.n}")


def _check_dims(model: Model, data: Dataset):
    if model.d != data.d:
        raise ValueError(f"model dimension {model.d} != data dimension {data.d}")


def empirical_risk(task: Task, model: Model, data: Dataset) -> float:
    """U-statistic hinge risk over all ordered pairs ``i != j``."""
    _need_pairs(data)
    _check_dims(model, data)
    n = data.n
    return float(pair_losses(task, model, data).sum() / (n * (n - 1)))


def block_risk(task: Task, model: Model, data: Dataset) -> float:
    """Average loss over the ``m = n // 2`` blocks ``(z_i, z_{m+i})``.

    For odd ``n`` the last point is unused.
    """
    _need_pairs(data)
    _check_dims(model, data)
    m = data.n // 2
    A, B = data.X[:m], data.X[m:2 * m]
    if Task(task) is Task.METRIC:
        V = A - B
        s = np.einsum("ij,jk,ik->i", V, model.M, V)
    else:
        s = np.einsum("ij,jk,ik->i", A, model.M, B)
    r = np.where(data.y[:m] == data.y[m:2 * m], 1.0, -1.0)
    return float(np.maximum(_hinge_arg(task, r, s, model.b), 0.0).mean())


def risk_estimate(task: Task, model: Model, test: Dataset) -> float:
    """Held-out estimate of the expected pair risk (U-statistic on ``test``)."""
    return empirical_risk(task, model, test)


def load_csv(path) -> Dataset:
    """Read a dataset with header ``x1,...,xd,label``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        d = len(header) - 1
        if d < 1 or header[-1] != "label" or header[:-1] != [f"x{k}" for k in range(1, d + 1)]:
            raise ValueError(f"{path}: header must be x1,...,xd,label")
        X, y = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != d + 1:
                raise ValueError(f"{path}:{lineno}: expected {d + 1} fields, got {len(row)}")
            try:
                X.append([float(v) for v in row[:-1]])
                y.append(int(row[-1]))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return Dataset(np.array(X, dtype=float).reshape(-1, d), np.array(y, dtype=np.int64))


def save_csv(data: Dataset, path) -> None:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"x{k}" for k in range(1, data.d + 1)] + ["label"])
        for x, label in zip(data.X, data.y):
            w.writerow([repr(float(v)) for v in x] + [int(label)])
