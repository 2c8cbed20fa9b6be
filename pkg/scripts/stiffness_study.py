"""Deflection of the stable rest pose versus spring stiffness, plus the
stiffness needed to hold a few deflection bounds.

    python scripts/stiffness_study.py [--geometric]
"""
import argparse

import numpy as np

from tenstab import GeometricModel, MechanismGeometry, critical_stiffness, reference_reduced_model
from tenstab.stability import reduced_critical_stiffness, stiffness_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--geometric", action="store_true",
                    help="use the preset geometry instead of the reduced closed form")
    ap.add_argument("--beta-max", type=float, default=0.3)
    args = ap.parse_args()

    model = GeometricModel(MechanismGeometry(), 1.0) if args.geometric else reference_reduced_model(1.0)
    ks = np.unique(np.round(np.geomspace(0.5, 100, 16), 3))
    res = stiffness_sweep(model, ks, beta_max=args.beta_max)
    print(f"{'k [N/mm]':>10} {'beta* [rad]':>12} {'beta* [deg]':>12} {'U* [N mm]':>12}  within")
    for r in res.rows:
        print(f"{r.k:10.3f} {r.beta_star:12.6f} {np.degrees(r.beta_star):12.4f} "
              f"{r.u_star:12.4f}  {r.within_operational_range}")

    print()
    for tol in (0.3, 0.1, 0.05, 0.01):
        k_star = critical_stiffness(model, tol, k_bracket=(0.01, 1e4))
        line = f"|beta*| <= {tol:<5g} rad needs k >= {k_star:.4f} N/mm"
        if not args.geometric:
            line += f"  (closed form {reduced_critical_stiffness(model, tol):.4f})"
        print(line)


if __name__ == "__main__":
    main()
