"""
When Sinkhorn scaling does not converge
=======================================

The 2 x 2 table [[0, 2], [1, 30]] has a zero pattern that no bistochastic
matrix can match exactly: the only candidates are permutation matrices,
which would need the 30 to vanish. Scaling drives that cell towards zero
slowly, and after 500 iterations it is still about 0.004.

The rodent table is worse. Its zeros split it into four independent blocks
and the iteration ends up flipping between two matrices, visible as a
period-two pattern in the distance to bistochasticity.
"""
import numpy as np

from sica import detect_blocks, load_fixture, scale
from sica.sinkhorn import trace_to_csv

s = scale(load_fixture("example3"), iters=500)
print(s.status)
print(np.round(s.d, 7))
print(trace_to_csv(s, last=3))

# the 0.004 cell is below the block threshold: two 1 x 1 blocks remain
print("blocks:", detect_blocks(s).k)

r = scale(load_fixture("rodent"), iters=500)
print(r.status)
print(trace_to_csv(r, last=4))
