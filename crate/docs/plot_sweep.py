#!/usr/bin/env python3
"""Plot a gtsim sweep CSV: mean tests per algorithm with +/- one standard
deviation error bars, overlaid with the closed-form upper bounds and the
Monte-Carlo lower bound.

Usage: python3 plot_sweep.py sweep.csv [out.png]
"""
import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main() -> None:
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    path = sys.argv[1]
    out = sys.argv[2] if len(sys.argv) > 2 else path.rsplit(".", 1)[0] + ".png"

    series = defaultdict(lambda: defaultdict(list))
    lower = {"p": [], "lb": []}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            alg = row["alg"]
            p = float(row["p"])
            series[alg]["p"].append(p)
            series[alg]["mean"].append(float(row["mean_tests"]))
            series[alg]["std"].append(float(row["std_tests"]))
            series[alg]["ub"].append(float(row["ub"]))
            if p not in lower["p"]:
                lower["p"].append(p)
                lower["lb"].append(float(row["lb"]))

    fig, ax = plt.subplots(figsize=(7, 4.5))
    colors = {"binary-splitting": "tab:blue", "graph-aware": "tab:orange"}
    for alg, data in sorted(series.items()):
        color = colors.get(alg)
        ax.errorbar(
            data["p"], data["mean"], yerr=data["std"], color=color,
            marker="o", markersize=3, capsize=2, label=f"{alg} (empirical)",
        )
        ax.plot(data["p"], data["ub"], color=color, linestyle="--", alpha=0.7,
                label=f"{alg} (upper bound)")
    ax.plot(lower["p"], lower["lb"], color="tab:green", linestyle=":",
            label="entropy lower bound (MC)")
    ax.set_xlabel("seed probability p")
    ax.set_ylabel("tests")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
