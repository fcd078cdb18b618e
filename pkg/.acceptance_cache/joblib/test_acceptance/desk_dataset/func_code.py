# first line: 93
@memory.cache
def desk_dataset():
    """>= 50 SID-solved training instances at alpha = 4.2, N = 5000, plus 10
    held-out validation instances at alpha = 4.23."""
    spec = DatasetSpec(
        n=5000,
        alpha_train=4.2,
        num_train_instances=50,
        alpha_val=4.23,
        num_val_instances=10,
        sid_cfg=SidConfig(t_max=T_MAX, epsilon=EPS),
        seed=11,
    )
    X, T, val = build_dataset(spec)
    return X, T, [(v.features, v.solution) for v in val]
