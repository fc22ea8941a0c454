"""
Taxicab CA next to ordinary CA
==============================

Taxicab CA replaces squared residuals with absolute ones. Each axis is a
pair of sign vectors, so the first axis of the presence/absence rodent
table reads directly as a split of sites and species into two camps.
An exhaustive search over all column sign patterns confirms the axis.
"""
import numpy as np

from sica import ca_decompose, load_fixture, sign_transform, tca_decompose, tca_oracle, to_correspondence
from sica.taxicab import tca_axes

t = load_fixture("rodent")
p = to_correspondence(sign_transform(t))

print("CA:", np.round(ca_decompose(p).sigmas, 4))
print("TCA:", np.round(tca_decompose(p).sigmas, 4))

ax = tca_axes(p, 1)[0]
print("species on the negative side:", [c for c, s in zip(t.col_labels, ax.v) if s < 0])
print("sites on the negative side:", [r for r, s in zip(t.row_labels, ax.u) if s < 0])
print("oracle agrees:", tca_oracle(p).lam == ax.lam)
