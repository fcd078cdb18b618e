"""MaxWalkSat: more flips buy a better assignment.

Run:  python3 demos/03_maxwalksat.py
"""

from deepsp import WalkSatConfig, generate_random_3sat, maxwalksat

f = generate_random_3sat(n=10_000, alpha=4.2, rng_seed=3)
print(f"N={f.num_vars}, M={f.num_clauses}")

for cutoff in (10_000, 100_000, 1_000_000):
    res = maxwalksat(f, WalkSatConfig(cutoff=cutoff, noise_p=0.5, rng_seed=3))
    print(
        f"cutoff={cutoff:>9,}: unsat={res.best_unsat:4d}"
        f"  1-rho={res.best_unsat / f.num_clauses:.4f}"
        f"  flips={res.flips_used:,}"
    )
