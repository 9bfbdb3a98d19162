"""Exhaustive runtime checks of the supporting inequalities and identities.

* Khinchin-Kahane moment comparison for Rademacher sums.
* The permutation representation of an order-two U-statistic as an average
  of block estimators.
* Margin conditions satisfied by a minimizer of the regularized problem.
"""
import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np

from .pairwise import Dataset, Model, Task, score_matrix

PASS_SLACK = -1e-9
KHINCHIN_MAX_LEN = 20
USTAT_SIZES = range(2, 9)
USTAT_TOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    lhs: float
    rhs: float
    slack: float
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _result(lhs, rhs, detail, slack=None):
    slack = rhs - lhs if slack is None else slack
    return CheckResult(bool(slack >= PASS_SLACK), float(lhs), float(rhs), float(slack), detail)


def _all_signs(n):
    if n == 0:
        return np.ones((1, 0))
    idx = np.arange(1 << n)
    return ((idx[:, None] >> np.arange(n)) & 1) * 2.0 - 1.0


def khinchin_check(f, p: float, q: float) -> CheckResult:
    """Compare the ``q``-th and ``p``-th moments of ``sum_i sigma_i f_i``.

    ``lhs = (E|S|^q)^(1/q)`` and ``rhs = sqrt((q-1)/(p-1)) (E|S|^p)^(1/p)``,
    both by enumerating all ``2^len(f)`` sign vectors.
    """
    f = np.asarray(f, dtype=float).ravel()
    if f.size > KHINCHIN_MAX_LEN:
        raise ValueError(f"len(f)={f.size} exceeds {KHINCHIN_MAX_LEN}")
    if not np.all(np.isfinite(f)):
        raise ValueError("f has non-finite entries")
    if not (1 < p < q < math.inf):
        raise ValueError(f"need 1 < p < q < inf, got p={p}, q={q}")
    S = np.abs(_all_signs(f.size) @ f)
    lhs = np.mean(S ** q) ** (1.0 / q)
    rhs = math.sqrt((q - 1.0) / (p - 1.0)) * np.mean(S ** p) ** (1.0 / p)
    return _result(lhs, rhs, f"n={f.size} p={p} q={q}")


def ustat_permutation_check(values, n: int) -> CheckResult:
    """Average of the block estimator over all ``n!`` orderings vs the U-statistic.

    ``values[i][j]`` is a symmetric pair function on ``n`` points (diagonal
    ignored). Passes iff the two sides agree within 1e-12.
    """
    if n not in USTAT_SIZES:
        raise ValueError(f"unsupported n={n}; need {USTAT_SIZES.start} <= n <= {USTAT_SIZES.stop - 1}")
    Q = np.asarray(values, dtype=float)
    if Q.shape != (n, n):
        raise ValueError(f"table must be {n}x{n}, got {Q.shape}")
    if not np.all(np.isfinite(Q)):
        raise ValueError("table has non-finite entries")
    off = ~np.eye(n, dtype=bool)
    if not np.array_equal(Q[off], Q.T[off]):
        raise ValueError("pair table is not symmetric")
    m = n // 2
    perms = np.array(list(itertools.permutations(range(n))))
    blocks = Q[perms[:, :m], perms[:, m:2 * m]]
    lhs = math.fsum(blocks.ravel()) / (len(perms) * m)
    rhs = math.fsum(Q[off]) / (n * (n - 1))
    diff = abs(lhs - rhs)
    # identity, not inequality: slack is the tolerance left over
    slack = USTAT_TOL - diff
    return CheckResult(bool(slack >= 0), lhs, rhs, slack,
                       f"n={n} permutations={len(perms)} |diff|={diff:.3e}")


def margin_check(task: Task, model: Model, data: Dataset, tol: float = 0.0) -> CheckResult:
    """Check ``min_{i!=j}(score - b) <= 1 + tol`` and ``max_{i!=j}(score - b) >= -1 - tol``.

    ``lhs``/``rhs`` hold the min and max margins; ``slack`` is the smaller
    of the two condition slacks.
    """
    if data.n < 2:
        raise ValueError(f"need at least 2 points, got {data.n}")
    S = score_matrix(task, model.M, data.X) - model.b
    off = ~np.eye(data.n, dtype=bool)
    lo, hi = float(S[off].min()), float(S[off].max())
    slack = min(1.0 + tol - lo, hi + 1.0 + tol)
    return _result(lo, hi, f"min(score-b)={lo:.6g} max(score-b)={hi:.6g} tol={tol}", slack=slack)


def offset_check(model: Model, x_hat: float, norm_value: float, tol: float = 0.0) -> CheckResult:
    """``|b| <= 1 + x_hat * ||M|| + tol`` with ``x_hat`` the max pair dual norm."""
    rhs = 1.0 + x_hat * norm_value + tol
    return _result(abs(model.b), rhs, f"|b|={abs(model.b):.6g} bound={rhs:.6g}")
