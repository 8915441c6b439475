"""Compare the mixed-data CMI estimators on models with known ground truth.

Run with ``python demos/compare_estimators.py``. Each line shows the mean and
standard deviation over a handful of draws next to the analytic value.
"""

import numpy as np

from mixcit import EstimatorConfig, MixcitError, ModelSpec, estimate, generate, ground_truth

REPS = 10
CASES = [
    ("indepz-est", {"c": 5, "d": 1}, 2000),
    ("indepz-est", {"c": 5, "d": 3}, 1000),
    ("mixture-est", {"p": 0.3}, 2000),
    ("confgauss-est", {"m": 9}, 1000),
]
ESTIMATORS = [("ms", 0.01), ("ms", 0.2), ("zmadg", 0.1), ("msinf", 0.1), ("msinf", 0.2)]


def main():
    for family, params, n in CASES:
        truth = ground_truth(ModelSpec(family, n, params))
        print(f"\n{family} {params} n={n}  truth {truth:.4f} nats")
        for kind, k_c in ESTIMATORS:
            vals = []
            try:
                for rep in range(REPS):
                    sample = generate(ModelSpec(family, n, params, seed=rep))
                    vals.append(estimate(sample.dataset, sample.partition, EstimatorConfig(kind, k_c=k_c)).value)
            except MixcitError as exc:
                # ZMADG needs continuous entropies; tied numeric values make them undefined
                print(f"  {kind:6s} k_c={k_c:<5} undefined: {exc}")
                continue
            vals = np.array(vals)
            print(f"  {kind:6s} k_c={k_c:<5} mean {vals.mean():+.4f}  sd {vals.std(ddof=1):.4f}  "
                  f"bias {vals.mean() - truth:+.4f}")
    # With d=3 binary Z components the MS estimator sees the categorical
    # parts at distance 1 and collapses to zero, while the 0-inf metric keeps
    # every neighbourhood inside its cluster.


if __name__ == "__main__":
    main()
