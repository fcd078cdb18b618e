"""Survey propagation across the convergence transition.

Below the transition the surveys settle quickly; near alpha ~ 4.36 and above
they keep oscillating and the run stops at the iteration cap.  The fraction of
still-moving messages and their mean residual are the interesting diagnostics
on the non-converged side.

Run:  python3 demos/02_survey_propagation.py   (about a minute)
"""

from deepsp import FactorGraph, compute_marginals, generate_random_3sat, run_sp

N = 3000

for alpha in (4.1, 4.2, 4.5):
    f = generate_random_3sat(N, alpha, rng_seed=7)
    g = FactorGraph(f)
    state, out = run_sp(g, t_max=1024, epsilon=0.01, rng_seed=7)
    line = f"alpha={alpha}: converged={out.converged} t*={out.t_star}"
    if not out.converged:
        line += (
            f" unconverged_messages={out.frac_unconverged_messages:.2f}"
            f" mean_residual={out.instance_eps:.3f}"
        )
    else:
        marg = compute_marginals(g, state)
        line += f" mean_bias={marg.bias.mean():.3f}"
    print(line)
