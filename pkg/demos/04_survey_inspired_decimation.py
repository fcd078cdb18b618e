"""Survey-inspired decimation end to end.

SID alternates: run SP to convergence, fix the most-biased 0.5% of variables,
simplify, repeat.  Once the surveys collapse to the trivial all-zero fixed
point, MaxWalkSat finishes the residual formula.

Run:  python3 demos/04_survey_inspired_decimation.py   (about a minute)
"""

from deepsp import SidConfig, WalkSatConfig, evaluate, generate_random_3sat, sid_solve

# alpha 4.1 keeps the demo quick; at this small N the harder 4.2 instances
# sometimes push SP past the iteration cap mid-decimation
f = generate_random_3sat(n=3000, alpha=4.1, rng_seed=5)
cfg = SidConfig(
    t_max=1024,
    epsilon=0.01,
    decimation_fraction=0.005,
    walksat_cfg=WalkSatConfig(cutoff=100_000, rng_seed=5),
    rng_seed=5,
)
out = sid_solve(f, cfg)

print(f"status: {out.status.value}")
print(f"rounds of SP: {out.rounds}")
print(f"fixed by decimation: {out.fixed_by_decimation}")
print(f"fixed by walksat/random: {out.fixed_by_walksat}")
if out.assignment is not None:
    sat, rho = evaluate(f, out.assignment)
    print(f"unsatisfied clauses: {f.num_clauses - sat} (rho={rho:.4f})")
