"""Rademacher complexity over i.i.d. sample blocks.

For a sample of size ``n`` with ``m = n // 2`` the blocks are

* metric:     ``X_i = (x_i - x_{m+i})(x_i - x_{m+i})^T``
* similarity: ``sym(x_i x_{m+i}^T)``

and the empirical complexity is ``E_sigma ||sum_i sigma_i X_i||_* / m`` with
the dual of the regularizer norm. It is computed either exactly (all ``2^m``
sign vectors) or by seeded Monte Carlo.
"""
import math
from dataclasses import asdict, dataclass
from typing import Union

import numpy as np

from .norms import NormKind, dual_norm_batch
from .pairwise import Dataset, Task

EXACT_MAX_BLOCKS = 20
# draws per independently seeded chunk; fixes the draw -> stream mapping
SIGN_CHUNK = 1024
# cap on float64 entries materialized at once
_MAX_ENTRIES = 1 << 22


@dataclass(frozen=True)
class BlockSet:
    blocks: np.ndarray  # (m, d, d)
    task: Task

    @property
    def m(self) -> int:
        return self.blocks.shape[0]

    @property
    def d(self) -> int:
        return self.blocks.shape[1]


@dataclass(frozen=True)
class RademacherEstimate:
    value: float
    draws: int  # 0 means exact enumeration
    std_error: float
    dual_kind: NormKind
    seed: int

    @property
    def exact(self) -> bool:
        return self.draws == 0

    def to_dict(self) -> dict:
        out = asdict(self)
        out["dual_kind"] = self.dual_kind.dual_name
        return out


@dataclass(frozen=True)
class UnitBox:
    d: int


@dataclass(frozen=True)
class Empirical:
    data: Dataset


Domain = Union[UnitBox, Empirical]


def _outer_pairs(task, A, B):
    if Task(task) is Task.METRIC:
        V = A - B
        return np.einsum("ij,ik->ijk", V, V)
    P = np.einsum("ij,ik->ijk", A, B)
    return (P + P.transpose(0, 2, 1)) / 2.0


def build_blocks(task: Task, data: Dataset) -> BlockSet:
    """Pair point ``i`` with point ``m + i``; an odd trailing point is dropped."""
    if data.n < 2:
        raise ValueError(f"need at least 2 points, got {data.n}")
    m = data.n // 2
    return BlockSet(_outer_pairs(task, data.X[:m], data.X[m:2 * m]), Task(task))


def _signed_norms(blocks: np.ndarray, signs: np.ndarray, kind: NormKind) -> np.ndarray:
    m, d, _ = blocks.shape
    flat = blocks.reshape(m, d * d)
    if kind is NormKind.FROBENIUS:
        G = flat @ flat.T
        q = np.einsum("ki,ij,kj->k", signs, G, signs)
        return np.sqrt(np.maximum(q, 0.0))
    step = max(1, _MAX_ENTRIES // (d * d))
    out = np.empty(signs.shape[0])
    for lo in range(0, signs.shape[0], step):
        S = (signs[lo:lo + step] @ flat).reshape(-1, d, d)
        out[lo:lo + step] = dual_norm_batch(S, kind)
    return out


def _check_blocks(blocks: BlockSet):
    if blocks.m < 1:
        raise ValueError("empty block set")


def _sign_chunk(seed: int, chunk: int, size: int, m: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))
    return (rng.integers(0, 2, size=(size, m)) * 2 - 1).astype(float)


def empirical_rademacher(blocks: BlockSet, kind: NormKind, draws: int = 100_000,
                         seed: int = 0) -> RademacherEstimate:
    """Monte Carlo estimate over ``draws`` uniform sign vectors.

    Draw ``j`` always comes from chunk ``j // SIGN_CHUNK`` seeded by
    ``(seed, chunk)``, so the estimate does not depend on how chunks are
    scheduled.
    """
    _check_blocks(blocks)
    if draws < 1:
        raise ValueError("draws must be >= 1")
    kind = NormKind(kind)
    vals = np.empty(draws)
    for c, lo in enumerate(range(0, draws, SIGN_CHUNK)):
        size = min(SIGN_CHUNK, draws - lo)
        signs = _sign_chunk(seed, c, size, blocks.m)
        vals[lo:lo + size] = _signed_norms(blocks.blocks, signs, kind)
    vals /= blocks.m
    se = float(vals.std(ddof=1) / math.sqrt(draws)) if draws > 1 else 0.0
    return RademacherEstimate(float(vals.mean()), draws, se, kind, seed)


def exact_rademacher(blocks: BlockSet, kind: NormKind) -> RademacherEstimate:
    """Exact expectation by enumerating sign vectors (``m <= 20``).

    ``||-S||_* = ||S||_*`` so only vectors with ``sigma_1 = +1`` are visited.
    """
    _check_blocks(blocks)
    m = blocks.m
    if m > EXACT_MAX_BLOCKS:
        raise ValueError(f"exact enumeration refused for m={m} > {EXACT_MAX_BLOCKS}")
    kind = NormKind(kind)
    total_patterns = 1 << (m - 1)
    bits = np.arange(m - 1)
    acc = 0.0
    step = 1 << 14
    for lo in range(0, total_patterns, step):
        idx = np.arange(lo, min(lo + step, total_patterns))
        rest = ((idx[:, None] >> bits) & 1) * 2.0 - 1.0
        signs = np.hstack([np.ones((idx.size, 1)), rest])
        acc += math.fsum(_signed_norms(blocks.blocks, signs, kind))
    return RademacherEstimate(acc / total_patterns / m, 0, 0.0, kind, 0)


def mean_rademacher(datasets, task: Task, kind: NormKind, draws: int = 10_000,
                    seed: int = 0) -> float:
    """Average of the Monte Carlo estimate over several samples (a proxy for ``E_z``)."""
    vals = [empirical_rademacher(build_blocks(task, z), kind, draws, seed).value for z in datasets]
    if not vals:
        raise ValueError("no datasets given")
    return float(np.mean(vals))


def _all_pairs(n: int, distinct: bool):
    i, j = np.triu_indices(n, k=1 if distinct else 0)
    return i, j


def pair_dual_max(task: Task, kind: NormKind, data: Dataset, distinct: bool = True) -> float:
    """Max of the dual norm over pair matrices built from the sample.

    ``distinct=True`` scans ``i != j``; otherwise ``i == j`` is included too
    (only matters for similarity).
    """
    if data.n < 1 or (distinct and data.n < 2):
        raise ValueError("not enough points")
    i, j = _all_pairs(data.n, distinct)
    step = max(1, _MAX_ENTRIES // (data.d * data.d))
    best = 0.0
    for lo in range(0, i.size, step):
        P = _outer_pairs(task, data.X[i[lo:lo + step]], data.X[j[lo:lo + step]])
        best = max(best, float(dual_norm_batch(P, kind).max()))
    return best


def x_star(task: Task, kind: NormKind, domain: Domain) -> float:
    """Supremum of the dual norm of a pair matrix over the input domain.

    ``UnitBox(d)`` is ``[0, 1]^d`` and uses closed forms: ``d`` for
    Frobenius and trace, ``1`` for L1, ``sqrt(d)`` for (2,1). These are the
    same for both tasks (attained at ``x - x' = 1`` resp. ``x = t = 1``).
    ``Empirical(data)`` takes the max over sample pairs.
    """
    kind = NormKind(kind)
    if isinstance(domain, UnitBox):
        d = domain.d
        if d < 1:
            raise ValueError("d must be >= 1")
        return {NormKind.FROBENIUS: float(d), NormKind.L1: 1.0,
                NormKind.L21: math.sqrt(d), NormKind.TRACE: float(d)}[kind]
    if isinstance(domain, Empirical):
        if domain.data.n < 1:
            raise ValueError("empty dataset")
        return pair_dual_max(task, kind, domain.data, distinct=Task(task) is Task.METRIC)
    raise TypeError(f"unknown domain {domain!r}")


def unit_box_sups(task: Task, d: int):
    """``(sup ||.||_inf, sup ||.||_2)`` of ``x - x'`` (metric) or ``x`` (similarity) on ``[0,1]^d``."""
    return 1.0, math.sqrt(d)


def sample_sups(task: Task, data: Dataset):
    """Empirical counterparts of :func:`unit_box_sups`."""
    X = data.X
    if Task(task) is Task.SIMILARITY:
        return float(np.abs(X).max()), float(np.linalg.norm(X, axis=1).max())
    i, j = _all_pairs(data.n, True)
    V = X[i] - X[j]
    return float(np.abs(V).max()), float(np.linalg.norm(V, axis=1).max())


def rademacher_upper_bound(kind: NormKind, task: Task, sup_inf: float, sup_fro: float,
                           n: int, d: int) -> float:
    """Closed-form upper bound on the block Rademacher complexity.

    Frobenius: ``2 sup_fro^2 / sqrt(n)``; L1: ``4 sup_inf^2 sqrt(e ln d / n)``;
    (2,1): ``4 sup_inf sup_fro sqrt(e ln d / n)``. Trace has no refined bound
    and reuses the Frobenius one (the spectral norm is dominated by Frobenius).
    """
    kind = NormKind(kind)
    if n < 2:
        raise ValueError("n must be >= 2")
    if kind in (NormKind.FROBENIUS, NormKind.TRACE):
        return 2.0 * sup_fro ** 2 / math.sqrt(n)
    if d < 2:
        raise ValueError(f"{kind.value} bound needs d >= 2 (Khinchin exponent 4 ln d must exceed 2)")
    root = math.sqrt(math.e * math.log(d) / n)
    if kind is NormKind.L1:
        return 4.0 * sup_inf ** 2 * root
    return 4.0 * sup_inf * sup_fro * root
