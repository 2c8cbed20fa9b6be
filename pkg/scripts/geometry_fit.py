"""Fit the reduced coefficients (A, B, C) for a range of axial offsets.

For equally spaced, aligned attachments the spring part is exactly
``B - C cos(beta)`` with B = 1.5 (r^2 + p^2 + b^2) and C = 1.5 (r^2 - 2 p b),
so the fit residual stays at round-off. The table shows which offsets come
closest to the reference coefficients.

    python scripts/geometry_fit.py
"""
import numpy as np

from tenstab import GeometricModel, MechanismGeometry, fit_reduced_coefficients
from tenstab.energy import REFERENCE_COEFFICIENTS


def main():
    samples = np.linspace(-np.pi / 2, np.pi / 2, 25)
    ref_a, ref_b, ref_c = REFERENCE_COEFFICIENTS
    print(f"reference: A={ref_a} B={ref_b} C={ref_c}")
    print(f"{'base_off':>9} {'plat_off':>9} {'A':>9} {'B':>10} {'C':>10} {'residual':>10}")
    for off in (0.0, 3.0, 5.0, 6.6, 8.0, 10.0):
        geom = MechanismGeometry(base_offset=off, platform_offset=off)
        fit = fit_reduced_coefficients(GeometricModel(geom, 1.0), samples)
        print(f"{off:9.2f} {off:9.2f} {fit.A:9.4f} {fit.B:10.4f} {fit.C:10.4f} "
              f"{fit.residual:10.2e}")


if __name__ == "__main__":
    main()
