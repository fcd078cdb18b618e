# first line: 70
@memory.cache
def deepsp_metrics(n, alpha, seed, weights, biases, t_max=T_MAX, epsilon=EPS,
                   scale_counts=True):
    f = generate_random_3sat(n, alpha, seed)
    model = MlpModel([w.copy() for w in weights], [b.copy() for b in biases])
    res = deepsp_solve(f, model, t_max=t_max, epsilon=epsilon, rng_seed=seed,
                       scale_counts=scale_counts)
    out = res.sp_outcome
    return {
        "converged": out.converged,
        "t_star": out.t_star,
        "frac_unconverged": out.frac_unconverged_messages,
        "instance_eps": out.instance_eps,
        "one_minus_rho": res.one_minus_rho,
        "omega": res.omega,
    }
