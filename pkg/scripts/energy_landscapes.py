"""Plot total potential energy against beta for soft and stiff springs side by side.

    python scripts/energy_landscapes.py [--k 1 20] [--out landscapes.png]
"""
import argparse
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from tenstab import TiltConfig, find_equilibria_1d, reference_reduced_model, total_energy


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=float, nargs="+", default=[1.0, 20.0])
    ap.add_argument("--out", default="landscapes.png")
    args = ap.parse_args()

    betas = np.linspace(-math.pi / 2, math.pi / 2, 721)
    fig, axes = plt.subplots(1, len(args.k), figsize=(5 * len(args.k), 4), squeeze=False)
    for ax, k in zip(axes[0], args.k):
        model = reference_reduced_model(k)
        u = [total_energy(model, TiltConfig(0.0, b)).u_total for b in betas]
        ax.plot(betas, u)
        for eq in find_equilibria_1d(model):
            ax.plot(eq.cfg.beta, eq.u_total, "o", color="tab:red")
            print(f"k={k:g}: {eq.classification} at beta={eq.cfg.beta:.6f} rad, "
                  f"U={eq.u_total:.4f} N mm")
        ax.axvline(0.0, color="0.6", lw=0.8)
        ax.set_title(f"k = {k:g} N/mm")
        ax.set_xlabel("beta [rad]")
        ax.set_ylabel("U_total [N mm]")
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
