"""Command line interface.

Exit codes: 0 on success, 1 on invalid input, 2 when an experiment records
bound violations or an oracle check fails.
"""
import argparse
import json
import sys

import numpy as np

from . import bounds, oracles, rademacher
from .harness import ExperimentConfig, report_json, run_experiment, scaling_study
from .norms import NormKind
from .pairwise import Task, block_risk, empirical_risk, load_csv
from .solver import SolverConfig, fit, load_model, save_model

EXIT_OK, EXIT_INVALID, EXIT_VIOLATION = 0, 1, 2
DUALS = [k.dual_name for k in NormKind]


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def cmd_train(args):
    data = load_csv(args.data)
    cfg = SolverConfig(max_iters=args.max_iters, step_scale=args.step_scale, seed=args.seed,
                       tolerance=args.tolerance, project=not args.no_project)
    res = fit(args.task, args.norm, args.lam, data, cfg)
    save_model(args.out, res.model, args.task, args.norm, args.lam)
    _emit({"final_objective": res.final_objective, "iterations_run": res.iterations_run,
           "b": res.model.b, "out": args.out})
    return EXIT_OK


def cmd_risk(args):
    data = load_csv(args.data)
    model, task, kind, lam = load_model(args.model)
    _emit({"task": task.value, "norm": kind.value, "lambda": lam, "n": data.n,
           "empirical_risk": empirical_risk(task, model, data),
           "block_risk": block_risk(task, model, data)})
    return EXIT_OK


def cmd_rademacher(args):
    data = load_csv(args.data)
    kind = NormKind.from_dual(args.dual)
    blocks = rademacher.build_blocks(args.task, data)
    if args.exact:
        est = rademacher.exact_rademacher(blocks, kind)
    else:
        est = rademacher.empirical_rademacher(blocks, kind, args.draws, args.seed)
    _emit({**est.to_dict(), "m": blocks.m, "task": Task(args.task).value})
    return EXIT_OK


def cmd_bound(args):
    task, kind = Task(args.task), NormKind(args.norm)
    sup_inf, sup_fro = rademacher.unit_box_sups(task, args.d)
    xs = args.xstar if args.xstar is not None else rademacher.x_star(task, kind, rademacher.UnitBox(args.d))
    if args.rn is not None:
        rn, source = args.rn, "given"
    else:
        rn = rademacher.rademacher_upper_bound(kind, task, sup_inf, sup_fro, args.n, args.d)
        source = "closed_form_unit_box"
    rep = bounds.theorem_bound(task, rn, xs, args.lam, args.n, args.delta,
                               kind=kind, d=args.d, r_n_source=source)
    _emit(rep.to_dict())
    return EXIT_OK


def cmd_experiment(args):
    cfg = ExperimentConfig.from_dict(_read_json(args.config))
    report = run_experiment(cfg, workers=args.workers)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(report_json(report))
    agg = report["aggregate"]
    sys.stdout.write(json.dumps(agg) + "\n")
    return EXIT_VIOLATION if agg["violations"] > 0 else EXIT_OK


def cmd_scaling(args):
    raw = dict(_read_json(args.config))
    dims = raw.pop("dims", [4, 16, 64, 256])
    kinds = raw.pop("kinds", ["fro", "l1", "l21"])
    table = scaling_study(ExperimentConfig.from_dict(raw), dims, kinds)
    table.to_csv(args.out)
    sys.stdout.write(json.dumps({"slopes": table.slopes, "rows": len(table.rows)}) + "\n")
    return EXIT_OK


def cmd_oracle(args):
    if args.check == "khinchin":
        f = [float(v) for v in args.f.split(",") if v.strip()]
        res = oracles.khinchin_check(f, args.p, args.q)
    elif args.check == "ustat":
        if args.table:
            table = np.loadtxt(args.table, delimiter=",", ndmin=2)
        else:
            rng = np.random.default_rng(args.seed)
            A = rng.normal(size=(args.n, args.n))
            table = A + A.T
        res = oracles.ustat_permutation_check(table, table.shape[0])
    else:
        data = load_csv(args.data)
        model, task, _, _ = load_model(args.model)
        res = oracles.margin_check(task, model, data, tol=args.tol)
    _emit(res.to_dict())
    return EXIT_OK if res.passed else EXIT_VIOLATION


def build_parser():
    p = argparse.ArgumentParser(prog="metric-bounds",
                                description="Regularized metric/similarity learning and its generalization bounds.")
    sub = p.add_subparsers(dest="command", required=True)
    tasks = [t.value for t in Task]
    norms = [k.value for k in NormKind]

    t = sub.add_parser("train", help="fit a model on a CSV dataset")
    t.add_argument("--data", required=True)
    t.add_argument("--task", choices=tasks, required=True)
    t.add_argument("--norm", choices=norms, required=True)
    t.add_argument("--lambda", dest="lam", type=float, required=True)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", required=True)
    t.add_argument("--max-iters", type=int, default=2000)
    t.add_argument("--step-scale", type=float, default=0.5)
    t.add_argument("--tolerance", type=float, default=1e-4)
    t.add_argument("--no-project", action="store_true")
    t.set_defaults(func=cmd_train)

    r = sub.add_parser("risk", help="empirical and block risk of a saved model")
    r.add_argument("--data", required=True)
    r.add_argument("--model", required=True)
    r.set_defaults(func=cmd_risk)

    rc = sub.add_parser("rademacher", help="block Rademacher complexity of a sample")
    rc.add_argument("--data", required=True)
    rc.add_argument("--task", choices=tasks, required=True)
    rc.add_argument("--dual", choices=DUALS, required=True)
    rc.add_argument("--draws", type=int, default=100_000)
    rc.add_argument("--seed", type=int, default=0)
    rc.add_argument("--exact", action="store_true")
    rc.set_defaults(func=cmd_rademacher)

    b = sub.add_parser("bound", help="evaluate the generalization bound")
    b.add_argument("--norm", choices=norms, required=True)
    b.add_argument("--task", choices=tasks, required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--lambda", dest="lam", type=float, required=True)
    b.add_argument("--delta", type=float, required=True)
    b.add_argument("--rn", type=float)
    b.add_argument("--xstar", type=float)
    b.set_defaults(func=cmd_bound)

    e = sub.add_parser("experiment", help="gap-vs-bound experiment from a JSON config")
    e.add_argument("--config", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--workers", type=int, default=1)
    e.set_defaults(func=cmd_experiment)

    s = sub.add_parser("scaling", help="dimension scaling study to CSV")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_scaling)

    o = sub.add_parser("oracle", help="exhaustive verification checks")
    osub = o.add_subparsers(dest="check", required=True)
    ok = osub.add_parser("khinchin")
    ok.add_argument("--f", required=True, help="comma separated coefficients")
    ok.add_argument("--p", type=float, default=2.0)
    ok.add_argument("--q", type=float, default=4.0)
    ou = osub.add_parser("ustat")
    ou.add_argument("--table", help="CSV file with a symmetric n x n pair table")
    ou.add_argument("--n", type=int, default=4, help="size of a random table when --table is absent")
    ou.add_argument("--seed", type=int, default=0)
    om = osub.add_parser("margin")
    om.add_argument("--data", required=True)
    om.add_argument("--model", required=True)
    om.add_argument("--tol", type=float, default=1e-3)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        return args.func(args)
    except (ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
