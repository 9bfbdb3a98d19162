"""Matrix norms on symmetric matrices, their duals and subgradients.

Four regularizer families are supported. Each has a fixed dual:

==========  ===============================  ======================
kind        norm                             dual
==========  ===============================  ======================
``fro``     Frobenius                        Frobenius
``l1``      entrywise sum of ``|M_lk|``      max ``|X_lk|``
``l21``     sum of row Euclidean norms       max row Euclidean norm
``trace``   sum of singular values           largest singular value
==========  ===============================  ======================

Symmetric matrices are plain ``ndarray`` objects; :func:`sym` validates and
symmetrizes raw input.
"""
from enum import Enum

import numpy as np

# eigenvalues below this magnitude are treated as exact zeros in subgradients
EIG_ZERO = 1e-12


class NormKind(str, Enum):
    FROBENIUS = "fro"
    L1 = "l1"
    L21 = "l21"
    TRACE = "trace"

    @property
    def dual_name(self) -> str:
        return _DUAL_NAMES[self]

    @classmethod
    def from_dual(cls, name: str) -> "NormKind":
        """Return the norm whose dual is called ``name`` (``linf``, ``spectral``, ...)."""
        for kind, dual in _DUAL_NAMES.items():
            if dual == name:
                return kind
        raise ValueError(f"unknown dual norm {name!r}; expected one of {sorted(_DUAL_NAMES.values())}")


_DUAL_NAMES = {
    NormKind.FROBENIUS: "fro",
    NormKind.L1: "linf",
    NormKind.L21: "l2inf",
    NormKind.TRACE: "spectral",
}


def sym(A) -> np.ndarray:
    """Validate a square real matrix and return ``(A + A.T) / 2``."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return (A + A.T) / 2.0


def _check(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def matrix_norm(M, kind: NormKind) -> float:
    """Regularizer norm ``||M||`` of a symmetric matrix."""
    M = _check(M)
    kind = NormKind(kind)
    if kind is NormKind.FROBENIUS:
        return float(np.sqrt(np.sum(M * M)))
    if kind is NormKind.L1:
        return float(np.sum(np.abs(M)))
    if kind is NormKind.L21:
        return float(np.sum(np.linalg.norm(M, axis=1)))
    # singular values of a symmetric matrix are its absolute eigenvalues
    return float(np.sum(np.abs(np.linalg.eigvalsh(M))))


def dual_norm(X, kind: NormKind) -> float:
    """Dual of the ``kind`` norm evaluated at ``X``."""
    X = _check(X)
    return float(dual_norm_batch(X[None], kind)[0])


def dual_norm_batch(Xs: np.ndarray, kind: NormKind) -> np.ndarray:
    """Vectorized :func:`dual_norm` over a stack of shape ``(k, d, d)``.

    No validation is done here; callers pass internally built stacks.
    """
    kind = NormKind(kind)
    if kind is NormKind.FROBENIUS:
        return np.sqrt(np.einsum("kij,kij->k", Xs, Xs))
    if kind is NormKind.L1:
        return np.abs(Xs).max(axis=(1, 2))
    if kind is NormKind.L21:
        return np.linalg.norm(Xs, axis=2).max(axis=1)
    return np.abs(np.linalg.eigvalsh(Xs)).max(axis=1)


def norm_subgradient(M, kind: NormKind) -> np.ndarray:
    """A symmetric element of the subdifferential of ``||.||`` at ``M``.

    At kinks (zero entry, zero row, zero eigenvalue) the contribution is 0.
    For ``l21`` the row-wise subgradient is symmetrized; this stays a valid
    subgradient for the norm restricted to symmetric matrices.
    """
    M = _check(M)
    kind = NormKind(kind)
    if kind is NormKind.FROBENIUS:
        nrm = np.sqrt(np.sum(M * M))
        return M / nrm if nrm > 0 else np.zeros_like(M)
    if kind is NormKind.L1:
        return np.sign(M)
    if kind is NormKind.L21:
        rows = np.linalg.norm(M, axis=1)
        safe = np.where(rows > 0, rows, 1.0)
        G = np.where(rows[:, None] > 0, M / safe[:, None], 0.0)
        return (G + G.T) / 2.0
    w, U = np.linalg.eigh(M)
    s = np.where(np.abs(w) < EIG_ZERO, 0.0, np.sign(w))
    G = (U * s) @ U.T
    return (G + G.T) / 2.0


def project_l1_ball(v: np.ndarray, radius: float) -> np.ndarray:
    """Euclidean projection of a vector onto ``{u : ||u||_1 <= radius}``.

    Sort-based soft threshold (Duchi et al., 2008).
    """
    v = np.asarray(v, dtype=float)
    a = np.abs(v)
    if a.sum() <= radius:
        return v.copy()
    mu = np.sort(a)[::-1]
    cssv = np.cumsum(mu) - radius
    idx = np.arange(1, a.size + 1)
    rho = np.nonzero(mu - cssv / idx > 0)[0][-1]
    theta = cssv[rho] / (rho + 1.0)
    return np.sign(v) * np.maximum(a - theta, 0.0)


def project_norm_ball(M, kind: NormKind, radius: float) -> np.ndarray:
    """Project a symmetric matrix onto ``{X : ||X|| <= radius}``.

    ``fro``, ``l1`` and ``trace`` are exact Euclidean projections. For
    ``l21`` the row-group projection is symmetrized, and rescaled radially
    if symmetrization pushed it back outside the ball, so the result is
    feasible but not necessarily the nearest point.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    M = _check(M)
    kind = NormKind(kind)
    if matrix_norm(M, kind) <= radius:
        return M.copy()
    if kind is NormKind.FROBENIUS:
        return M * (radius / matrix_norm(M, kind))
    if kind is NormKind.L1:
        P = project_l1_ball(M.ravel(), radius).reshape(M.shape)
        P = (P + P.T) / 2.0
    elif kind is NormKind.TRACE:
        w, U = np.linalg.eigh(M)
        w = project_l1_ball(w, radius)
        P = (U * w) @ U.T
        P = (P + P.T) / 2.0
    else:
        rows = np.linalg.norm(M, axis=1)
        shrunk = project_l1_ball(rows, radius)
        scale = np.divide(shrunk, rows, out=np.zeros_like(rows), where=rows > 0)
        P = M * scale[:, None]
        P = (P + P.T) / 2.0
    nrm = matrix_norm(P, kind)
    if nrm > radius:
        P = P * (radius / nrm)
    return P
