"""Sample covariance error shrinks like 1/sqrt(m).

Quadrupling m should roughly halve the median spectral-norm error.

Run:  python demos/04_concentration.py
"""
from blindeep import (build_filter_matrix, chain_design, deviation_scan, filter_from_spec,
                      generate_planted_eep)
from blindeep.pipeline import STRONG

sizes = [20, 20, 20]
inst = generate_planted_eep(sizes, chain_design(sizes, 2), 0.5, seed=0)
fm = build_filter_matrix(filter_from_spec(STRONG, inst.graph), inst.graph)
scan = deviation_scan(fm, 0.01, (100, 400, 1600, 6400), range(20), r=3)

print(f"effective rank b = {scan.rows[0].effective_rank:.2f}")
for m, med in scan.medians().items():
    print(f"m={m:>5}  median ||S_hat - S|| = {med:.4f}")
print("consecutive ratios:", ", ".join(f"{x:.2f}" for x in scan.ratios()))
