"""Reproduce every number of the worked 2x2x3 example and print it next to the reference."""

from tensornorm import bounds
from tensornorm.core import contract, example_1, flatten_biquadratic, slice_matrices
from tensornorm.eig import spectral_radius
from tensornorm.msolve import spectral_norm_routes

REFERENCE = {
    "spectral norm": 6.7673,
    "largest M-eigenvalue": 45.7959,
    "rho(flattening, axis 3)": 53.1980,
    "upper bound, axis 3": 7.2937,
    "upper bound, axis 2": 8.2529,
    "upper bound, axis 1": 7.8874,
    "slice radius, second index 1": 45.3417,
    "slice radius, second index 2": 21.0,
    "slice radius, first index 1": 31.5089,
    "slice radius, first index 2": 36.6023,
    "lower bound, second-index slices": 6.7336,
    "lower bound, first-index slices": 6.0500,
}


def main():
    A = example_1()
    T = contract(A, 3)
    r = spectral_norm_routes(A, tol=1e-12)
    radii = [spectral_radius(s) for mode in bounds.MODES for s in slice_matrices(T, mode)]
    got = [
        r.value,
        r.meig_value**2,
        spectral_radius(flatten_biquadratic(T)),
        *(bounds.upper_flatten(A, k) for k in (3, 2, 1)),
        *radii,
        *(bounds.lower_slice(A, 3, m) for m in bounds.MODES),
    ]
    width = max(map(len, REFERENCE))
    worst = 0.0
    for (name, ref), val in zip(REFERENCE.items(), got):
        worst = max(worst, abs(val - ref))
        print(f"{name.ljust(width)}  {val:10.4f}  reference {ref:10.4f}")
    print(f"largest deviation {worst:.2e}")


if __name__ == "__main__":
    main()
