"""Power-iteration ratios on the Brownian covariance of a grid, against Jacobi.

    python3 scripts/power_example.py --grid 1,2,3 --steps 8
"""
import argparse

import numpy as np

from klpca.brownian import BrownianGrid, min_kernel_matrix
from klpca.linalg import jacobi_eigh, power_ratio_history


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--grid", default="1,2,3")
    parser.add_argument("--steps", type=int, default=8)
    args = parser.parse_args()

    K = min_kernel_matrix(BrownianGrid([float(v) for v in args.grid.split(",")]))
    x0 = np.zeros(K.shape[0])
    x0[0] = 1.0
    spec = jacobi_eigh(K)
    top = spec.eigenvalues[0]
    print(f"Jacobi: lambda_1 = {top:.10f}, vector {np.round(spec.eigenvectors[:, 0], 4)}")
    for n, r in enumerate(power_ratio_history(K, x0, args.steps), start=1):
        print(f"n = {n:3d}   ratio = {r:.10f}   error = {abs(r - top):.3e}")


if __name__ == "__main__":
    main()
