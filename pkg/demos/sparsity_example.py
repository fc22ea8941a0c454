"""
Three ways to measure sparsity
==============================

A 6 x 5 binary table with four zeros looks only mildly sparse. Merging
proportional rows and columns leaves its CA unchanged and reveals a 2 x 2
table with one zero. Measured against the sparsest bistochastic 2 x 2
matrix, that table is half as sparse as it could be.
"""
from sica import load_fixture, merge_equivalent, sparsity_report

t = load_fixture("example1")
print(t.values.astype(int))

# rows 1, 4, 5, 6 are identical, as are columns 1, 2 and 5
merged = merge_equivalent(t)
print("merged table:\n", merged.merged.values.astype(int))
print("row groups:", merged.row_groups)
print("column groups:", merged.col_groups)

rep = sparsity_report(t)
print(rep.summary())
print("exact:", rep.apparent, rep.ca_sparsity, rep.adjusted)
