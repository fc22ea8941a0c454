"""
Marginal-free CA of the rodent data
===================================

Sinkhorn scaling of the 28 x 9 rodent abundance table splits it into four
blocks of sites and species. CA of the scaled table has three singular
values equal to one, one per extra block, and the remaining values are the
spectra of the blocks analysed separately.
"""
import numpy as np

from sica import load_fixture, mfca

t = load_fixture("rodent")
res = mfca(t, iters=500)

for b in res.partition.blocks:
    species = [t.col_labels[j] for j in b.cols]
    print(f"{len(b.rows):2d} sites, species {species}, 100*c = {100 * b.col_marginal:.2f}")

print("global spectrum:", np.round(res.decomposition.sigmas, 4))
for k, d in enumerate(res.block_decompositions, 1):
    print(f"block {k} spectrum:", np.round(d.sigmas, 4))

# the second-to-last iterate gives the same spectrum
prev = mfca(t, iters=500, which=-2)
print("max change:", np.abs(prev.decomposition.sigmas - res.decomposition.sigmas).max())
