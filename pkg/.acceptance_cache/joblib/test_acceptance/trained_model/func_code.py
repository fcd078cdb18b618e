# first line: 150
@memory.cache
def trained_model(max_steps=2000, eval_every=25, scale_counts=True):
    X, T, val_pairs = desk_dataset(scale_counts=scale_counts)
    val = [ValInstance(5000, 4.23, 0, f, s) for f, s in val_pairs]
    model, history = train_model(
        X, T, val, cfg=TrainConfig(rng_seed=3, epochs=1),
        eval_every=eval_every, max_steps=max_steps,
    )
    return model.weights, model.biases, history
