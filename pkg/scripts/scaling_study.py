"""Block complexity against dimension: CSV table plus gnuplot data blocks per norm.

The .dat file holds one blank-line separated block per norm kind with columns
``d r_n_hat r_n_closed_form example_bound_total``; plot with e.g.
``plot 'scaling.dat' index 0 using 1:2 with lp`` on log-log axes.
"""
import argparse
import json
import sys

from metric_bounds.harness import ExperimentConfig, scaling_study


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--config", default="configs/scaling.json")
    p.add_argument("--out", default="scaling.csv")
    p.add_argument("--plot-data", default="scaling.dat")
    args = p.parse_args(argv)

    with open(args.config) as fh:
        raw = json.load(fh)
    dims = raw.pop("dims", [4, 16, 64, 256])
    kinds = raw.pop("kinds", ["fro", "l1", "l21"])
    table = scaling_study(ExperimentConfig.from_dict(raw), dims, kinds)
    table.to_csv(args.out)

    with open(args.plot_data, "w") as fh:
        for kind in kinds:
            fh.write(f"# kind={kind} slope={table.slopes.get(kind, float('nan')):.4f}\n")
            fh.write("# d r_n_hat r_n_closed_form example_bound_total\n")
            for row in table.rows:
                if row["kind"] == kind:
                    fh.write(f"{row['d']} {row['r_n_hat']!r} {row['r_n_closed_form']!r} "
                             f"{row['example_bound_total']!r}\n")
            fh.write("\n\n")

    for row in table.rows:
        print(f"d={row['d']:<5d} {row['kind']:4s} x_star={row['x_star']:<8.4g} "
              f"R_hat={row['r_n_hat']:.4f} closed={row['r_n_closed_form']:.4f}")
    for kind, s in table.slopes.items():
        print(f"log-log slope {kind}: {s:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
