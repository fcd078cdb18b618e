# first line: 93
@memory.cache
def sid_sample(n, alpha, seed, t_max=T_MAX, epsilon=EPS):
    """One SID-solved instance as (features, solution); None if SID fails."""
    res = _sid_samples(n, alpha, seed, SidConfig(t_max=t_max, epsilon=epsilon))
    if res is None:
        return None
    feats, sol = res
    return feats, sol.copy()
