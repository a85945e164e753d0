"""(m, alpha) preferential attachment multigraphs through trees.

Each arrival sends m edges to existing vertices chosen with probability
proportional to ``alpha + degree``.  Merging blocks of m consecutive vertices
of a preferential attachment tree with fitness
``(w(S), 0, ..., 0, m + alpha, ...)`` reproduces the graph degrees.

Run with ``python demos/multigraph_coupling.py``.
"""
import numpy as np

from wrtlab import certify_pagraph_coupling, coupled_degree_limits, max_degree_exponent

for alpha in (0.0, 1.0, 0.5):
    cert = certify_pagraph_coupling([1, 1], 2, alpha, 4)
    print(f"alpha = {alpha}: {cert.outcomes} degree outcomes, max |diff| = "
          f"{cert.max_abs_diff:.1e}, pass = {cert.passed}")

rng = np.random.default_rng(4)
for alpha in (0.0, 1.0):
    slope, _ = max_degree_exponent([1, 1], 2, alpha, [10**3, 10**4, 10**5], 10, rng)
    print(f"max degree exponent, alpha = {alpha}: {slope:.3f} (predicted {1 / (2 + alpha / 2):.3f})")

rep = coupled_degree_limits([1, 2, 1], 2, 0.5, 10**4, 1000, rng, k_max=1)
mean, var = rep.split_moments()
print("\nseed split fractions against Dirichlet(d + alpha)")
for j in range(3):
    print(f"  vertex {j + 1}: mean {rep.split[:, j].mean():.3f} ({mean[j]:.3f}), "
          f"variance {rep.split[:, j].var():.4f} ({var[j]:.4f})")
