"""Command-line entry point: one subcommand per pipeline stage."""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .formula import FactorGraph, emit_dimacs, generate_random_3sat, parse_dimacs
from .harness import (
    DatasetSpec,
    SweepSpec,
    accuracy_eval,
    build_dataset,
    sweep,
    train_model,
    write_runs_csv,
    write_sweep_csv,
    write_training_curve_csv,
)
from .mlp import TrainConfig, load_model, save_model
from .pipeline import deepsp_solve
from .sid import SidConfig, SidStatus, sid_solve
from .sp import run_sp
from .walksat import WalkSatConfig, maxwalksat


class UsageError(Exception):
    pass


def _print_config(args: argparse.Namespace) -> None:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    print(f"# deepsp {__version__} config: {json.dumps(cfg, default=str)}")


def _load_cnf(path):
    if not os.path.exists(path):
        raise UsageError(f"CNF file not found: {path}")
    with open(path) as fh:
        return parse_dimacs(fh)


def _write_solution(path, assignment) -> None:
    line = " ".join(
        str(i + 1 if v else -(i + 1)) for i, v in enumerate(assignment)
    )
    with open(path, "w") as fh:
        fh.write(line + "\n")


def cmd_gen(args):
    f = generate_random_3sat(args.n, args.alpha, args.seed)
    text = emit_dimacs(f)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"wrote {f.num_clauses} clauses over {f.num_vars} vars to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_sp(args):
    f = _load_cnf(args.cnf)
    g = FactorGraph(f)
    trace = [] if args.trace else None
    if trace is not None:
        from .sp import init_messages, sp_sweep

        state = init_messages(g, args.seed, t_max=args.tmax, epsilon=args.eps)
        converged = False
        while state.t < args.tmax:
            max_delta, _ = sp_sweep(state)
            frac = float(np.mean(np.abs(state.eta - state.eta_prev) >= args.eps))
            trace.append((state.t, max_delta, frac))
            if max_delta < args.eps:
                converged = True
                break
        deltas = state.deltas
        bad = deltas >= args.eps
        report = {
            "converged": converged,
            "t_star": state.t,
            "frac_unconverged_messages": 0.0 if converged else float(bad.mean()),
            "instance_eps": 0.0 if converged or not bad.any() else float(deltas[bad].mean()),
            "contradiction": state.contradiction,
        }
        with open(args.trace, "w") as fh:
            fh.write("sweep,max_delta,frac_unconverged\n")
            for row in trace:
                fh.write(",".join(str(x) for x in row) + "\n")
    else:
        _, out = run_sp(g, t_max=args.tmax, epsilon=args.eps, rng_seed=args.seed)
        report = {
            "converged": out.converged,
            "t_star": out.t_star,
            "frac_unconverged_messages": out.frac_unconverged_messages,
            "instance_eps": out.instance_eps,
            "contradiction": out.contradiction,
        }
    print(json.dumps(report))
    return 0


def cmd_walksat(args):
    f = _load_cnf(args.cnf)
    cfg = WalkSatConfig(
        cutoff=args.cutoff, noise_p=args.noise, rng_seed=args.seed, restarts=args.restarts
    )
    res = maxwalksat(f, cfg)
    one_minus_rho = res.best_unsat / f.num_clauses
    print(
        json.dumps(
            {
                "best_unsat": res.best_unsat,
                "one_minus_rho": one_minus_rho,
                "flips_used": res.flips_used,
            }
        )
    )
    if args.solution:
        _write_solution(args.solution, res.best_assignment)
    return 0


def cmd_sid(args):
    f = _load_cnf(args.cnf)
    cfg = SidConfig(
        t_max=args.tmax,
        epsilon=args.eps,
        decimation_fraction=args.delta,
        trivial_threshold=args.trivial_threshold,
        walksat_cfg=WalkSatConfig(cutoff=args.cutoff, noise_p=args.noise, rng_seed=args.seed),
        rng_seed=args.seed,
    )
    out = sid_solve(f, cfg)
    print(
        json.dumps(
            {
                "status": out.status.value,
                "unsat_count": out.unsat_count if out.status is SidStatus.SOLVED else None,
                "fixed_by_decimation": out.fixed_by_decimation,
                "fixed_by_walksat": out.fixed_by_walksat,
                "rounds": out.rounds,
            }
        )
    )
    if args.solution and out.assignment is not None:
        _write_solution(args.solution, out.assignment)
    return 0


def cmd_deepsp(args):
    f = _load_cnf(args.cnf)
    if not os.path.exists(args.model):
        raise UsageError(f"model file not found: {args.model}")
    model = load_model(args.model)
    res = deepsp_solve(
        f,
        model,
        t_max=args.tmax,
        epsilon=args.eps,
        rng_seed=args.seed,
        eta_one_tol=args.eta_one_tol,
        scale_counts=args.scale_features,
    )
    print(
        json.dumps(
            {
                "one_minus_rho": res.one_minus_rho,
                "rho": res.rho,
                "omega": res.omega,
                "converged": res.sp_outcome.converged,
                "t_star": res.sp_outcome.t_star,
                "instance_eps": res.sp_outcome.instance_eps,
            }
        )
    )
    if args.solution:
        _write_solution(args.solution, res.assignment)
    return 0


def cmd_train(args):
    spec = DatasetSpec(
        n=args.n,
        alpha_train=args.alpha_train,
        num_train_instances=args.train_instances,
        alpha_val=args.alpha_val,
        num_val_instances=args.val_instances,
        seed=args.seed,
        scale_counts=args.scale_features,
    )
    if args.preset == "paper":
        spec = DatasetSpec(
            n=10_000, num_train_instances=400, num_val_instances=36, seed=args.seed,
            scale_counts=args.scale_features,
        )
    X, T, val = build_dataset(spec)
    cfg = TrainConfig(learning_rate=args.lr, epochs=args.epochs, rng_seed=args.seed)
    model, history = train_model(X, T, val, cfg, max_steps=args.max_steps)
    save_model(model, args.out)
    if args.curve:
        write_training_curve_csv(args.curve, history)
    print(
        json.dumps(
            {
                "samples": len(X),
                "steps": history[-1][0] if history else None,
                "final_accuracy": accuracy_eval(model, val),
                "model": args.out,
            }
        )
    )
    return 0


def cmd_sweep(args):
    model = load_model(args.model) if args.model else None
    if args.preset == "desk":
        spec = SweepSpec(
            n_list=[5000],
            alpha_grid=[4.1, 4.2, 4.3, 4.4, 4.5],
            instances_per_point=args.instances or 10,
            seed=args.seed,
            scale_counts=args.scale_features,
        )
    else:
        spec = SweepSpec(
            n_list=[args.n],
            alpha_grid=[float(a) for a in args.alphas.split(",")],
            instances_per_point=args.instances or 10,
            t_max=args.tmax,
            epsilon=args.eps,
            filter=args.filter,
            seed=args.seed,
            scale_counts=args.scale_features,
        )
    reports, aggregates = sweep(spec, model)
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    write_runs_csv(os.path.join(out_dir, "runs.csv"), reports)
    write_sweep_csv(os.path.join(out_dir, "sweep.csv"), aggregates)
    for row in aggregates:
        print(json.dumps(row))
    return 0


def cmd_eval(args):
    model = load_model(args.model)
    spec = DatasetSpec(
        n=args.n,
        num_train_instances=1,
        alpha_val=args.alpha_val,
        num_val_instances=args.val_instances,
        seed=args.seed,
        scale_counts=args.scale_features,
    )
    # only the validation side is needed; build one training instance cheaply
    _, _, val = build_dataset(spec)
    print(
        json.dumps(
            {
                "accuracy": accuracy_eval(model, val),
                "hamming": accuracy_eval(model, val, as_distance=True),
                "instances": len(val),
            }
        )
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="deepsp", description=__doc__)
    p.add_argument("--version", action="version", version=f"deepsp {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out=False):
        sp.add_argument("--seed", type=int, default=0, help="master RNG seed")
        sp.add_argument("--threads", type=int, default=None, help="worker pool size (overrides DEEPSP_THREADS)")
        if out:
            sp.add_argument("--out", default=None, help="output path")

    g = sub.add_parser("gen", help="generate a random 3-SAT instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--alpha", type=float, required=True)
    common(g, out=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("sp", help="run survey propagation on a CNF file")
    s.add_argument("--cnf", required=True)
    s.add_argument("--tmax", type=int, default=1024)
    s.add_argument("--eps", type=float, default=0.01)
    s.add_argument("--trace", default=None, help="per-sweep trace CSV path")
    common(s)
    s.set_defaults(func=cmd_sp)

    w = sub.add_parser("walksat", help="MaxWalkSat local search")
    w.add_argument("--cnf", required=True)
    w.add_argument("--cutoff", type=int, default=100_000)
    w.add_argument("--noise", type=float, default=0.5)
    w.add_argument("--restarts", type=int, default=1)
    w.add_argument("--solution", default=None, help="write best assignment here")
    common(w)
    w.set_defaults(func=cmd_walksat)

    d = sub.add_parser("sid", help="survey-inspired decimation")
    d.add_argument("--cnf", required=True)
    d.add_argument("--tmax", type=int, default=1024)
    d.add_argument("--eps", type=float, default=0.01)
    d.add_argument("--delta", type=float, default=0.005)
    d.add_argument("--trivial-threshold", type=float, default=0.01)
    d.add_argument("--cutoff", type=int, default=100_000)
    d.add_argument("--noise", type=float, default=0.5)
    d.add_argument("--solution", default=None)
    common(d)
    d.set_defaults(func=cmd_sid)

    ds = sub.add_parser("deepsp", help="one-shot neural assignment")
    ds.add_argument("--cnf", required=True)
    ds.add_argument("--model", required=True)
    ds.add_argument("--tmax", type=int, default=1024)
    ds.add_argument("--eps", type=float, default=0.01)
    ds.add_argument("--eta-one-tol", type=float, default=1e-9)
    ds.add_argument("--solution", default=None)
    ds.add_argument("--scale-features", action="store_true",
                   help="mean-degree scaling of the count features")
    common(ds)
    ds.set_defaults(func=cmd_deepsp)

    t = sub.add_parser("train", help="build a SID dataset and train the classifier")
    t.add_argument("--preset", choices=["desk", "paper"], default="desk")
    t.add_argument("--n", type=int, default=5000)
    t.add_argument("--alpha-train", type=float, default=4.2)
    t.add_argument("--alpha-val", type=float, default=4.23)
    t.add_argument("--train-instances", type=int, default=50)
    t.add_argument("--val-instances", type=int, default=10)
    t.add_argument("--lr", type=float, default=1e-3)
    t.add_argument("--epochs", type=int, default=1)
    t.add_argument("--max-steps", type=int, default=None)
    t.add_argument("--curve", default=None, help="training-curve CSV path")
    t.add_argument("--scale-features", action="store_true",
                   help="mean-degree scaling of the count features")
    t.add_argument("--out", required=True, help="model output path")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--threads", type=int, default=None)
    t.set_defaults(func=cmd_train)

    sw = sub.add_parser("sweep", help="ensemble sweep over (n, alpha)")
    sw.add_argument("--preset", choices=["desk"], default=None)
    sw.add_argument("--n", type=int, default=10_000)
    sw.add_argument("--alphas", default="4.1,4.2,4.3,4.4,4.5")
    sw.add_argument("--instances", type=int, default=None)
    sw.add_argument("--tmax", type=int, default=1024)
    sw.add_argument("--eps", type=float, default=0.01)
    sw.add_argument("--filter", choices=["all", "converged_only", "nonconverged_only"], default="all")
    sw.add_argument("--model", default=None)
    sw.add_argument("--scale-features", action="store_true",
                   help="mean-degree scaling of the count features")
    common(sw, out=True)
    sw.set_defaults(func=cmd_sweep)

    e = sub.add_parser("eval", help="accuracy of a trained model on fresh SID validation data")
    e.add_argument("--model", required=True)
    e.add_argument("--n", type=int, default=5000)
    e.add_argument("--alpha-val", type=float, default=4.23)
    e.add_argument("--val-instances", type=int, default=5)
    e.add_argument("--scale-features", action="store_true",
                   help="mean-degree scaling of the count features")
    common(e)
    e.set_defaults(func=cmd_eval)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; the contract here is 1
        return 0 if exc.code in (0, None) else 1
    if getattr(args, "threads", None):
        os.environ["DEEPSP_THREADS"] = str(args.threads)
    _print_config(args)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # program fault, not experiment data
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
