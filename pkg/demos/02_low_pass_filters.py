"""How low-pass are the two benchmark filters?

The ratio eta compares the strongest response outside the r smallest
Laplacian eigenvalues with the weakest response inside them; small is good.

Run:  python demos/02_low_pass_filters.py
"""
import numpy as np

from blindeep import GraphFilter, generate_planted_eep, laplacian, low_pass_ratio, benchmark_config
from blindeep.pipeline import STRONG, WEAK, low_pass_summary

cfg = benchmark_config()
inst = generate_planted_eep(cfg.sizes, cfg.design(), cfg.p_intra, seed=0)
g = inst.graph
print(f"planted instance: n={g.n}, cells={inst.truth.sizes}, max degree={g.max_degree}")
for row in low_pass_summary(g, [STRONG, WEAK], r=3):
    print(f"  {row['filter']:<24} eta = {row['eta']:.4f}")

lam = np.linalg.eigvalsh(laplacian(g).astype(float))
print("\nheat filter, eta against sigma (r = 3):")
for sigma in (0.005, 0.01, 0.02, 0.05):
    lp = low_pass_ratio(GraphFilter.heat(sigma), lam, 3)
    closed = np.exp(-sigma * (lam[3] - lam[2]))
    print(f"  sigma={sigma:<5} eta={lp.eta:.4f}  closed form {closed:.4f}")
