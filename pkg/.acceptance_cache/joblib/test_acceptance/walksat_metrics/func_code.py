# first line: 86
@memory.cache
def walksat_metrics(n, alpha, seed, cutoff):
    f = generate_random_3sat(n, alpha, seed)
    res = maxwalksat(f, WalkSatConfig(cutoff=cutoff, rng_seed=seed))
    return {"one_minus_rho": res.best_unsat / f.num_clauses}
