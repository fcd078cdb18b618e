"""Dataset construction, ensemble sweeps and experiment statistics."""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .formula import FactorGraph, generate_random_3sat
from .mlp import MlpModel, TrainConfig, forward, train
from .pipeline import assignment_agreement, deepsp_solve, extract_features
from .sid import SidConfig, SidStatus, sid_solve
from .sp import DEFAULT_EPSILON, DEFAULT_T_MAX, run_sp

RUNS_SCHEMA = "deepsp-runs-v1"
SWEEP_SCHEMA = "deepsp-sweep-v1"
CURVE_SCHEMA = "deepsp-curve-v1"

RUNS_COLUMNS = [
    "instance_id", "n", "alpha", "seed", "converged", "t_star",
    "frac_unconverged_messages", "instance_eps", "one_minus_rho", "omega",
    "agreement",
]
SWEEP_COLUMNS = [
    "n", "alpha", "instances", "filtered", "nu",
    "t_star_frac_mean", "t_star_frac_std",
    "frac_unconv_mean", "frac_unconv_std",
    "eps_mean", "eps_std", "eps_count",
    "one_minus_rho_mean", "one_minus_rho_std",
    "omega_mean", "omega_std",
]


def pearson(xs, ys) -> float:
    """Sample Pearson correlation coefficient."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.size < 2:
        raise ValueError("need two equal-length samples of size >= 2")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    denom = math.sqrt(float((dx * dx).sum()) * float((dy * dy).sum()))
    if denom == 0.0:
        raise ValueError("undefined correlation: zero variance")
    return float((dx * dy).sum() / denom)


def num_workers() -> int:
    return max(1, int(os.environ.get("DEEPSP_THREADS", "1")))


# -- dataset -----------------------------------------------------------------


@dataclass
class ValInstance:
    n: int
    alpha: float
    seed: int
    features: np.ndarray  # (n, 4)
    solution: np.ndarray  # (n,) bool


@dataclass
class DatasetSpec:
    n: int = 5000
    alpha_train: float = 4.2
    num_train_instances: int = 50
    alpha_val: float = 4.23
    num_val_instances: int = 10
    sid_cfg: SidConfig = field(default_factory=SidConfig)
    seed: int = 1
    scale_counts: bool = False  # mean-degree scaling of the count features


DESK_DATASET = DatasetSpec()
PAPER_DATASET = DatasetSpec(
    n=10_000, num_train_instances=400, num_val_instances=36
)


def _sid_samples(n, alpha, seed, sid_cfg, scale_counts=False):
    """Generate + SID-solve one instance; None if SID fails."""
    f = generate_random_3sat(n, alpha, seed)
    cfg = replace(sid_cfg, rng_seed=seed)
    out = sid_solve(f, cfg)
    if out.status is not SidStatus.SOLVED:
        return None
    feats = extract_features(
        out.initial_graph, out.initial_state, scale_counts=scale_counts
    )
    return feats, out.assignment.copy()


def build_dataset(spec: DatasetSpec):
    """SID-solve training and validation instances, keep per-variable samples.

    Features come from the first (pre-decimation) SP state of each original
    formula; targets are the SID solution bits.  Failed instances are
    regenerated with fresh seeds.  A failure rate above 50% over the whole
    build aborts with a diagnostic (a runaway rate above 80% aborts early;
    individual unlucky prefixes are tolerated since ~25-30% of instances
    near the threshold legitimately fail).

    Returns (X, T, val_instances).
    """
    rng = np.random.default_rng([spec.seed, 0xDA])
    feats_list, targets_list, val = [], [], []
    attempts = failures = 0

    def solve_batch(count, alpha, collect_val):
        nonlocal attempts, failures
        got = 0
        jobs_pending = count
        workers = num_workers()
        while got < count:
            seeds = [int(rng.integers(2**31 - 1)) for _ in range(jobs_pending)]
            args = [(spec.n, alpha, s, spec.sid_cfg, spec.scale_counts) for s in seeds]
            if workers > 1:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    results = list(pool.map(_sid_samples_star, args))
            else:
                results = [_sid_samples(*a) for a in args]
            for s, res in zip(seeds, results):
                attempts += 1
                if res is None:
                    failures += 1
                    if attempts >= 40 and failures * 5 > attempts * 4:
                        raise RuntimeError(
                            f"runaway SID failure rate {failures}/{attempts}"
                        )
                    continue
                if got >= count:
                    break
                feats, sol = res
                if collect_val:
                    val.append(ValInstance(spec.n, alpha, s, feats, sol))
                else:
                    feats_list.append(feats)
                    targets_list.append(sol.astype(np.float64))
                got += 1
            jobs_pending = count - got

    solve_batch(spec.num_train_instances, spec.alpha_train, collect_val=False)
    solve_batch(spec.num_val_instances, spec.alpha_val, collect_val=True)
    if failures * 2 > attempts:
        raise RuntimeError(f"SID failure rate {failures}/{attempts} exceeds 50%")
    X = np.concatenate(feats_list, axis=0)
    T = np.concatenate(targets_list)
    return X, T, val


def _sid_samples_star(args):
    return _sid_samples(*args)


def accuracy_eval(model: MlpModel, val: list[ValInstance], as_distance: bool = False) -> float:
    """Mean per-instance agreement between the SID solution and the
    thresholded classifier output on the stored features.

    as_distance=True returns the mean normalized Hamming distance instead.
    """
    if not val:
        raise ValueError("empty validation set")
    accs = []
    for inst in val:
        pred = forward(model, inst.features) >= 0.5
        accs.append(assignment_agreement(inst.solution, pred))
    ac = float(np.mean(accs))
    return 1.0 - ac if as_distance else ac


def train_model(
    X, T, val: list[ValInstance] | None = None,
    cfg: TrainConfig | None = None,
    eval_every: int = 10,
    max_steps: int | None = None,
):
    """Train the classifier, tracking validation accuracy along the way.

    Returns (model, history) with history rows (step, loss, val_accuracy).
    """
    cfg = cfg or TrainConfig()
    eval_fn = (lambda m, step: accuracy_eval(m, val)) if val else None
    return train(X, T, cfg, eval_fn=eval_fn, eval_every=eval_every, max_steps=max_steps)


# -- sweeps ------------------------------------------------------------------


@dataclass
class SweepSpec:
    n_list: list[int] = field(default_factory=lambda: [10_000])
    alpha_grid: list[float] = field(default_factory=lambda: [4.1, 4.2, 4.3, 4.4, 4.5])
    instances_per_point: int = 10
    t_max: int = DEFAULT_T_MAX
    epsilon: float = DEFAULT_EPSILON
    filter: str = "all"  # all | converged_only | nonconverged_only
    seed: int = 1
    scale_counts: bool = False  # must match the supplied model's training

    def __post_init__(self):
        if list(self.alpha_grid) != sorted(self.alpha_grid):
            raise ValueError("alpha grid must be sorted ascending")
        if self.filter not in ("all", "converged_only", "nonconverged_only"):
            raise ValueError(f"unknown filter {self.filter!r}")


@dataclass
class RunReport:
    instance_id: int
    n: int
    alpha: float
    seed: int
    converged: bool
    t_star: int
    frac_unconverged_messages: float
    instance_eps: float
    one_minus_rho: float = float("nan")
    omega: float = float("nan")
    agreement: float = float("nan")


def run_instance(n, alpha, seed, t_max=DEFAULT_T_MAX, epsilon=DEFAULT_EPSILON,
                 model: MlpModel | None = None, instance_id: int = 0,
                 scale_counts: bool = False) -> RunReport:
    """Generate one instance, run SP (and the one-shot solver if a model is
    given) and report the per-run metrics."""
    f = generate_random_3sat(n, alpha, seed)
    if model is not None:
        res = deepsp_solve(f, model, t_max=t_max, epsilon=epsilon, rng_seed=seed,
                           scale_counts=scale_counts)
        out = res.sp_outcome
        return RunReport(
            instance_id, n, alpha, seed, out.converged, out.t_star,
            out.frac_unconverged_messages, out.instance_eps,
            one_minus_rho=res.one_minus_rho, omega=res.omega,
        )
    g = FactorGraph(f)
    _, out = run_sp(g, t_max=t_max, epsilon=epsilon, rng_seed=seed)
    return RunReport(
        instance_id, n, alpha, seed, out.converged, out.t_star,
        out.frac_unconverged_messages, out.instance_eps,
    )


def _run_instance_star(args):
    return run_instance(*args)


def sweep(spec: SweepSpec, model: MlpModel | None = None):
    """Run the grid; returns (reports, aggregate rows per grid point).

    Per-point statistics honor the configured convergence filter except nu,
    which is always the plain fraction of non-converged instances, and the
    eps columns, which average only runs with a non-trivial residual.
    """
    reports: list[RunReport] = []
    jobs = []
    iid = 0
    for n in spec.n_list:
        for alpha in spec.alpha_grid:
            for k in range(spec.instances_per_point):
                seed = int(
                    np.random.default_rng([spec.seed, n, int(round(alpha * 1000)), k]).integers(2**31 - 1)
                )
                jobs.append((n, alpha, seed, spec.t_max, spec.epsilon, model, iid,
                             spec.scale_counts))
                iid += 1
    workers = num_workers()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run_instance_star, jobs))
    else:
        reports = [run_instance(*j) for j in jobs]

    aggregates = []
    for n in spec.n_list:
        for alpha in spec.alpha_grid:
            rows = [r for r in reports if r.n == n and r.alpha == alpha]
            nu = float(np.mean([not r.converged for r in rows]))
            if spec.filter == "converged_only":
                sel = [r for r in rows if r.converged]
            elif spec.filter == "nonconverged_only":
                sel = [r for r in rows if not r.converged]
            else:
                sel = rows
            eps_rows = [r.instance_eps for r in sel if r.instance_eps > 0]
            t_frac = [r.t_star / spec.t_max for r in sel]
            aggregates.append(
                {
                    "n": n,
                    "alpha": alpha,
                    "instances": len(rows),
                    "filtered": len(sel),
                    "nu": nu,
                    "t_star_frac_mean": _mean(t_frac),
                    "t_star_frac_std": _std(t_frac),
                    "frac_unconv_mean": _mean([r.frac_unconverged_messages for r in sel]),
                    "frac_unconv_std": _std([r.frac_unconverged_messages for r in sel]),
                    "eps_mean": _mean(eps_rows),
                    "eps_std": _std(eps_rows),
                    "eps_count": len(eps_rows),
                    "one_minus_rho_mean": _mean([r.one_minus_rho for r in sel]),
                    "one_minus_rho_std": _std([r.one_minus_rho for r in sel]),
                    "omega_mean": _mean([r.omega for r in sel]),
                    "omega_std": _std([r.omega for r in sel]),
                }
            )
    return reports, aggregates


def _finite(vals):
    return [v for v in vals if not math.isnan(v)]


def _mean(vals):
    vals = _finite(vals)
    return float(np.mean(vals)) if vals else float("nan")


def _std(vals):
    vals = _finite(vals)
    return float(np.std(vals, ddof=1)) if len(vals) > 1 else (0.0 if vals else float("nan"))


# -- CSV output ---------------------------------------------------------------


def _check_or_write_header(path, schema, columns):
    if os.path.exists(path) and os.path.getsize(path) > 0:
        with open(path) as fh:
            first = fh.readline().strip()
        if first != f"# {schema}":
            raise ValueError(f"{path} has schema {first!r}, expected {schema}")
        return False
    with open(path, "w") as fh:
        fh.write(f"# {schema}\n")
        fh.write(",".join(columns) + "\n")
    return True


def write_runs_csv(path, reports: list[RunReport]) -> None:
    _check_or_write_header(path, RUNS_SCHEMA, RUNS_COLUMNS)
    with open(path, "a", newline="") as fh:
        w = csv.writer(fh)
        for r in reports:
            w.writerow(
                [
                    r.instance_id, r.n, r.alpha, r.seed, int(r.converged), r.t_star,
                    r.frac_unconverged_messages, r.instance_eps,
                    r.one_minus_rho, r.omega, r.agreement,
                ]
            )


def write_sweep_csv(path, aggregates) -> None:
    _check_or_write_header(path, SWEEP_SCHEMA, SWEEP_COLUMNS)
    with open(path, "a", newline="") as fh:
        w = csv.writer(fh)
        for row in aggregates:
            w.writerow([row[c] for c in SWEEP_COLUMNS])


def write_training_curve_csv(path, history) -> None:
    _check_or_write_header(path, CURVE_SCHEMA, ["step", "loss", "val_accuracy"])
    with open(path, "a", newline="") as fh:
        w = csv.writer(fh)
        for step, lo, acc in history:
            w.writerow([step, lo, acc])
