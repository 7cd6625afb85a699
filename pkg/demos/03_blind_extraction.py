"""Recover planted cells from filtered signals alone.

Each solver sees only the signal matrix, never the graph.  Accuracy climbs
with the number of samples m.

Run:  python demos/03_blind_extraction.py
"""
from blindeep import (be_eeps, build_filter_matrix, chain_design, filter_from_spec,
                      generate_planted_eep, sample_observations)
from blindeep.pipeline import STRONG

sizes = [40, 40, 40]
inst = generate_planted_eep(sizes, chain_design(sizes, 2), 0.7, seed=1)
fm = build_filter_matrix(filter_from_spec(STRONG, inst.graph), inst.graph)

print(f"{'m':>6} {'solver':>8} {'F_c':>10} {'gamma':>7} {'matched':>8}")
for m in (10, 30, 100, 300):
    batch = sample_observations(fm, m, noise_var=0.01, seed=m)
    for solver in ("kmeans", "psnmf", "penalty"):
        rep = be_eeps(batch, 3, {"solver": solver, "seed": 0}, truth=inst).report
        print(f"{m:>6} {solver:>8} {rep.cost_fc:>10.4f} {rep.group_accuracy:>7.3f} "
              f"{rep.matched_accuracy:>8.3f}")
