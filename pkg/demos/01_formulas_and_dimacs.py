"""Random 3-SAT instances, DIMACS I/O, and what a random assignment achieves.

Run:  python3 demos/01_formulas_and_dimacs.py
"""

import numpy as np

from deepsp import emit_dimacs, evaluate, generate_random_3sat, parse_dimacs

# a small instance at clause density alpha = M/N = 4.2
f = generate_random_3sat(n=200, alpha=4.2, rng_seed=0)
print(f"generated: {f.num_vars} variables, {f.num_clauses} clauses")

# DIMACS round trip is exact
text = emit_dimacs(f)
print("header line:", text.splitlines()[0])
assert parse_dimacs(text) == f

# a uniform random assignment satisfies each 3-clause with probability 7/8
rng = np.random.default_rng(1)
rhos = []
for _ in range(50):
    assignment = rng.random(f.num_vars) < 0.5
    sat, rho = evaluate(f, assignment)
    rhos.append(rho)
print(f"random assignments: mean rho = {np.mean(rhos):.4f} (7/8 = {7 / 8:.4f})")
