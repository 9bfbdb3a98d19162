"""Regularized metric / similarity learning by projected subgradient descent.

Minimizes ``E_z(M, b) + lam * ||M||^2`` over symmetric ``M`` and offset ``b``
for any of the four norms. After the descent the offset is re-optimized
exactly for the chosen ``M`` (the objective is piecewise linear and convex in
``b``), which places ``b`` on a hinge breakpoint and so makes the margin
conditions ``min(score - b) <= 1`` and ``max(score - b) >= -1`` hold exactly.
"""
import json
from dataclasses import dataclass, field

import numpy as np

from .norms import NormKind, matrix_norm, norm_subgradient, project_norm_ball
from .pairwise import (Dataset, Model, Task, empirical_risk, relation_matrix,
                       score_matrix)


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 2000
    step_scale: float = 0.5
    seed: int = 0
    tolerance: float = 1e-4
    project: bool = True
    # iterations without a best-objective improvement above `tolerance` before stopping
    patience: int = 400

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.step_scale > 0:
            raise ValueError("step_scale must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")


@dataclass
class FitResult:
    model: Model
    objective_trace: list = field(repr=False)
    final_objective: float
    iterations_run: int


def _check_lambda(lam):
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")


def objective(task: Task, kind: NormKind, lam: float, model: Model, data: Dataset) -> float:
    """``empirical_risk + lam * ||M||^2``."""
    _check_lambda(lam)
    return empirical_risk(task, model, data) + lam * matrix_norm(model.M, kind) ** 2


class _PairProblem:
    """Cached pair structures for fast loss / subgradient evaluation."""

    def __init__(self, task, data):
        self.task = Task(task)
        self.X = data.X
        self.R = relation_matrix(data.y)
        n = data.n
        self.offdiag = ~np.eye(n, dtype=bool)
        self.npairs = n * (n - 1)
        # hinge argument is c0 + sgn * (S - b)
        self.sgn = self.R if self.task is Task.METRIC else -self.R

    def loss_and_grad(self, M, b):
        S = score_matrix(self.task, M, self.X)
        a = 1.0 + self.sgn * (S - b)
        active = (a > 0) & self.offdiag
        loss = float(np.where(active, a, 0.0).sum() / self.npairs)
        # dLoss/dS_ij; kink (a == 0) contributes 0
        W = np.where(active, self.sgn, 0.0) / self.npairs
        gb = -float(W.sum())
        if self.task is Task.METRIC:
            L = np.diag(W.sum(axis=0) + W.sum(axis=1)) - W - W.T
            gM = self.X.T @ L @ self.X
        else:
            gM = self.X.T @ ((W + W.T) / 2.0) @ self.X
        return loss, (gM + gM.T) / 2.0, gb

    def loss(self, M, b):
        S = score_matrix(self.task, M, self.X)
        a = 1.0 + self.sgn * (S - b)
        return float(np.where(self.offdiag, np.maximum(a, 0.0), 0.0).sum() / self.npairs)


def optimal_offset(task: Task, M, data: Dataset) -> float:
    """Exact minimizer of the empirical risk over ``b`` for fixed ``M``.

    Each pair loss ``(c + s * b)_+`` has slope ``s = -sgn`` and a breakpoint
    at ``score + sgn``; the total slope rises by one at every breakpoint, so
    a minimizer is the ``P``-th smallest breakpoint where ``P`` counts the
    pairs with negative slope (the smallest one when ``P == 0``).
    """
    prob = _PairProblem(task, data)
    S = score_matrix(task, np.asarray(M, dtype=float), data.X)
    sgn = prob.sgn[prob.offdiag]
    bp = S[prob.offdiag] + sgn
    P = int(np.count_nonzero(sgn > 0))
    k = max(P - 1, 0)
    return float(np.partition(bp, k)[k])


def fit(task: Task, kind: NormKind, lam: float, data: Dataset,
        config: SolverConfig = SolverConfig()) -> FitResult:
    """Solve the regularized problem from ``(M, b) = (0, 0)``.

    Steps are ``step_scale / sqrt(t)``; the running average of the iterates is
    tracked alongside the raw iterates and the best candidate by objective is
    returned, after exact re-optimization of its offset. With
    ``config.project`` every iterate stays in the ball ``||M|| <= 1/sqrt(lam)``.
    """
    _check_lambda(lam)
    task, kind = Task(task), NormKind(kind)
    if data.n < 2:
        raise ValueError(f"need at least 2 points, got {data.n}")
    prob = _PairProblem(task, data)
    d = data.d
    radius = 1.0 / np.sqrt(lam)

    def obj(M, b, loss=None):
        if loss is None:
            loss = prob.loss(M, b)
        return loss + lam * matrix_norm(M, kind) ** 2

    M, b = np.zeros((d, d)), 0.0
    M_avg, b_avg = M.copy(), 0.0
    best = (obj(M, b), M.copy(), b)
    trace = []
    stale, t = 0, 0
    for t in range(1, config.max_iters + 1):
        loss, gM, gb = prob.loss_and_grad(M, b)
        nrm = matrix_norm(M, kind)
        current = loss + lam * nrm ** 2
        trace.append(current)
        improved = current < best[0] - config.tolerance
        if current < best[0]:
            best = (current, M.copy(), b)

        gM = gM + 2.0 * lam * nrm * norm_subgradient(M, kind)
        eta = config.step_scale / np.sqrt(t)
        M = M - eta * gM
        if config.project:
            M = project_norm_ball(M, kind, radius)
        b = b - eta * gb

        M_avg += (M - M_avg) / t
        b_avg += (b - b_avg) / t
        if t % 10 == 0 or t == config.max_iters:
            avg_obj = obj(M_avg, b_avg)
            if avg_obj < best[0] - config.tolerance:
                improved = True
            if avg_obj < best[0]:
                best = (avg_obj, M_avg.copy(), b_avg)

        stale = 0 if improved else stale + 1
        if stale >= config.patience:
            break

    _, M_best, _ = best
    M_best = (M_best + M_best.T) / 2.0
    b_opt = optimal_offset(task, M_best, data)
    final = obj(M_best, b_opt)
    return FitResult(Model(M_best, b_opt), trace, float(final), t)


def model_to_json(model: Model, task: Task, kind: NormKind, lam: float) -> dict:
    return {
        "d": model.d,
        "b": model.b,
        "M": [float(v) for v in model.M.ravel()],
        "task": Task(task).value,
        "norm": NormKind(kind).value,
        "lambda": float(lam),
    }


def model_from_json(obj: dict):
    """Inverse of :func:`model_to_json`; returns ``(model, task, kind, lam)``."""
    try:
        d = int(obj["d"])
        flat = np.asarray(obj["M"], dtype=float)
        if flat.size != d * d:
            raise ValueError(f"M has {flat.size} entries, expected {d * d}")
        model = Model(flat.reshape(d, d), float(obj["b"]))
        return model, Task(obj["task"]), NormKind(obj["norm"]), float(obj["lambda"])
    except KeyError as exc:
        raise ValueError(f"model JSON is missing field {exc}") from None


def save_model(path, model, task, kind, lam):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(model, task, kind, lam), fh, indent=2)
        fh.write("\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_from_json(json.load(fh))
