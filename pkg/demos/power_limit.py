"""
From CA to log-ratio analysis by a power transform
==================================================

For a positive table, the CA index of the powered table n_ij**alpha,
divided by alpha, approaches the uniformly weighted log-ratio index as
alpha goes to zero. The error shrinks in proportion to alpha.
"""
import numpy as np

from sica import CountTable, lra_index, power_index_ratio, to_correspondence

rng = np.random.default_rng(0)
t = CountTable(rng.uniform(1, 100, size=(5, 4)))
lam = lra_index(to_correspondence(t)).values

for alpha in (1e-1, 1e-2, 1e-3, 1e-4):
    err = np.abs(power_index_ratio(t, alpha).values - lam).max()
    print(f"alpha={alpha:.0e}  max error={err:.3e}  error/alpha={err / alpha:.3f}")
