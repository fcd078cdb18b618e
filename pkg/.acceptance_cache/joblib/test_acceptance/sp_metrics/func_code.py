# first line: 56
@memory.cache
def sp_metrics(n, alpha, seed, t_max=T_MAX, epsilon=EPS):
    f = generate_random_3sat(n, alpha, seed)
    g = FactorGraph(f)
    _, out = run_sp(g, t_max=t_max, epsilon=epsilon, rng_seed=seed)
    return {
        "converged": out.converged,
        "t_star": out.t_star,
        "frac_unconverged": out.frac_unconverged_messages,
        "instance_eps": out.instance_eps,
        "contradiction": out.contradiction,
    }
