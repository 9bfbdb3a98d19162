"""Generalization bounds for regularized metric / similarity learning.

With probability ``1 - delta`` the gap between true and empirical risk of the
regularized solution is at most

    4 R_n / sqrt(lam)
  + 4 (3 + 2 X / sqrt(lam)) / sqrt(n)
  + 2 (1 + X / sqrt(lam)) sqrt(2 ln(1/delta) / n)

where ``R_n`` is the block Rademacher complexity and ``X`` the supremum of the
dual norm of a pair matrix. Logarithms are natural and ``e`` is Euler's number.
"""
import math
from dataclasses import asdict, dataclass

from .norms import NormKind
from .pairwise import Task
from .rademacher import rademacher_upper_bound


@dataclass(frozen=True)
class BoundReport:
    task: Task
    kind: NormKind
    n: int
    d: int
    lam: float
    delta: float
    r_n: float
    r_n_source: str
    x_star: float
    term_rademacher: float
    term_sqrt_n: float
    term_confidence: float
    total: float
    b_lambda: float
    formula: str
    note: str = ""

    def to_dict(self) -> dict:
        out = {("lambda" if k == "lam" else k): v for k, v in asdict(self).items()}
        out["task"] = Task(self.task).value
        out["kind"] = NormKind(self.kind).value
        out["log"] = "natural"
        out["euler_e"] = math.e
        return out


def _validate(lam, n, delta):
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")


def b_lambda(x_star: float, lam: float) -> float:
    """Uniform bound ``2 (1 + X / sqrt(lam))`` on the pair loss over the feasible set."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if x_star < 0:
        raise ValueError("x_star must be nonnegative")
    return 2.0 * (1.0 + x_star / math.sqrt(lam))


def confidence_term(x_star, lam, n, delta):
    return b_lambda(x_star, lam) * math.sqrt(2.0 * math.log(1.0 / delta) / n)


def theorem_bound(task: Task, r_n: float, x_star: float, lam: float, n: int, delta: float,
                  *, kind: NormKind = NormKind.FROBENIUS, d: int = 0,
                  r_n_source: str = "given") -> BoundReport:
    """Three-term bound for any plug-in ``r_n`` (Monte Carlo, exact or closed form).

    ``kind`` and ``d`` are only recorded in the report.
    """
    _validate(lam, n, delta)
    sl = math.sqrt(lam)
    term_rad = 4.0 * r_n / sl
    term_n = 4.0 * (3.0 + 2.0 * x_star / sl) / math.sqrt(n)
    term_conf = confidence_term(x_star, lam, n, delta)
    return BoundReport(
        task=Task(task), kind=NormKind(kind), n=n, d=d, lam=lam, delta=delta,
        r_n=r_n, r_n_source=r_n_source, x_star=x_star,
        term_rademacher=term_rad, term_sqrt_n=term_n, term_confidence=term_conf,
        total=term_rad + term_n + term_conf, b_lambda=b_lambda(x_star, lam),
        formula="theorem",
    )


def example_x_star(kind: NormKind, sup_inf: float, sup_fro: float) -> float:
    kind = NormKind(kind)
    if kind in (NormKind.FROBENIUS, NormKind.TRACE):
        return sup_fro ** 2
    if kind is NormKind.L1:
        return sup_inf ** 2
    return sup_inf * sup_fro


def example_bound(kind: NormKind, task: Task, sup_inf: float, sup_fro: float, lam: float,
                  n: int, d: int, delta: float) -> BoundReport:
    """Per-norm specialized bound with the printed constants.

    The report splits it as: ``term_rademacher`` = the combined main term
    (``16 X / sqrt(n lam)`` for Frobenius, ``8 X (1 + 2 sqrt(e ln d)) / sqrt(n lam)``
    for L1 and (2,1)), ``term_sqrt_n`` = ``12 / sqrt(n)``, plus the confidence
    term. Trace uses the Frobenius specialization.
    """
    _validate(lam, n, delta)
    kind = NormKind(kind)
    X = example_x_star(kind, sup_inf, sup_fro)
    snl = math.sqrt(n * lam)
    note = ""
    if kind in (NormKind.FROBENIUS, NormKind.TRACE):
        main = 16.0 * X / snl
        if kind is NormKind.TRACE:
            note = "trace norm: Frobenius specialization used (no refined estimate)"
    else:
        if d < 2:
            raise ValueError(f"{kind.value} bound needs d >= 2")
        main = 8.0 * X * (1.0 + 2.0 * math.sqrt(math.e * math.log(d))) / snl
    r_n = rademacher_upper_bound(kind, task, sup_inf, sup_fro, n, d)
    term_n = 12.0 / math.sqrt(n)
    term_conf = confidence_term(X, lam, n, delta)
    return BoundReport(
        task=Task(task), kind=kind, n=n, d=d, lam=lam, delta=delta,
        r_n=r_n, r_n_source="closed_form", x_star=X,
        term_rademacher=main, term_sqrt_n=term_n, term_confidence=term_conf,
        total=main + term_n + term_conf, b_lambda=b_lambda(X, lam),
        formula=f"example:{kind.value}", note=note,
    )
