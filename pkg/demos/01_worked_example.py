"""The 11-node worked example: an EEP check and the spectrum behind it.

Run:  python demos/01_worked_example.py
"""
import numpy as np

from blindeep import Graph, Partition, laplacian, structural_eigenpairs, verify

edges = [(1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5), (3, 6), (3, 7),
         (4, 5), (4, 8), (4, 9), (5, 10), (5, 11), (6, 7)]
g = Graph.from_edges(11, [(u - 1, v - 1) for u, v in edges])
cells = Partition(((0, 1), (2, 3, 4), tuple(range(5, 11))))

print(verify(g, cells).text())

# Vertices 4 and 5 are adjacent while 3 is not, so these cells are external
# but not fully equitable.  Still, every vertex of a cell sees the same
# number of neighbours in each other cell, which is all the check asks for.
lam = np.linalg.eigvalsh(laplacian(g).astype(float))
struct = structural_eigenpairs(g, cells)[0]
print("\nLaplacian spectrum:", np.round(lam, 3))
print("cell-constant eigenvalues:", np.round(struct, 3))
ranks = [int(np.argmin(np.abs(lam - s))) + 1 for s in struct]
print("their positions in the spectrum:", ranks)

# Only the first of them is among the three smallest.  A low-pass filter
# favours the three smallest, so the top-3 covariance eigenvectors are not
# constant on the cells and blind recovery of this graph is out of reach.
print("\nbottom three are cell-constant:", ranks == [1, 2, 3])
