"""Survey-inspired decimation: SP + bias-ordered fixing + WalkSAT residual."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .formula import CnfFormula, FactorGraph, evaluate
from .sp import DEFAULT_EPSILON, DEFAULT_T_MAX, SurveyState, compute_marginals, run_sp
from .walksat import WalkSatConfig, WalkSatResult, maxwalksat


class SidStatus(Enum):
    SOLVED = "Solved"
    CONTRADICTION_FAILURE = "ContradictionFailure"
    CONVERGENCE_FAILURE = "ConvergenceFailure"


@dataclass
class SidConfig:
    t_max: int = DEFAULT_T_MAX
    epsilon: float = DEFAULT_EPSILON
    decimation_fraction: float = 0.005
    trivial_threshold: float = DEFAULT_EPSILON
    walksat_cfg: WalkSatConfig = field(default_factory=WalkSatConfig)
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.decimation_fraction <= 1.0:
            raise ValueError("decimation_fraction must be in (0,1]")


@dataclass
class SidOutcome:
    status: SidStatus
    assignment: np.ndarray | None
    unsat_count: int
    fixed_by_decimation: int
    fixed_by_walksat: int
    rounds: int
    # SP state of the very first run on the undecimated formula; the training
    # pipeline extracts its per-variable features from here.
    initial_state: SurveyState | None = None
    initial_graph: FactorGraph | None = None


@dataclass
class SimplifyResult:
    formula: CnfFormula | None  # None when no clause survives
    kept_vars: np.ndarray  # new index -> old index
    forced_unsat: int  # clauses emptied by the partial assignment


def simplify(f: CnfFormula, partial: dict[int, bool]) -> SimplifyResult:
    """Apply a partial assignment: drop satisfied clauses, strip falsified
    literals, count clauses that end up empty as permanently unsatisfied.

    Remaining variables are reindexed densely; kept_vars maps back.
    """
    fixed = np.full(f.num_vars, -1, dtype=np.int8)
    for v, val in partial.items():
        fixed[v] = 1 if val else 0

    lit_fixed = fixed[f.lit_var] >= 0
    lit_true = (fixed[f.lit_var] == 1) ^ f.lit_neg  # only meaningful where fixed

    starts = [0]
    vs: list[int] = []
    ns: list[bool] = []
    forced_unsat = 0
    for c in range(f.num_clauses):
        lo, hi = f.clause_start[c], f.clause_start[c + 1]
        sat = False
        keep = []
        for p in range(lo, hi):
            if lit_fixed[p]:
                if lit_true[p]:
                    sat = True
                    break
            else:
                keep.append(p)
        if sat:
            continue
        if not keep:
            forced_unsat += 1
            continue
        for p in keep:
            vs.append(int(f.lit_var[p]))
            ns.append(bool(f.lit_neg[p]))
        starts.append(len(vs))

    kept_mask = np.ones(f.num_vars, dtype=bool)
    kept_mask[fixed >= 0] = False
    kept_vars = np.flatnonzero(kept_mask)
    if len(starts) == 1:
        return SimplifyResult(None, kept_vars, forced_unsat)

    remap = np.full(f.num_vars, -1, dtype=np.int64)
    remap[kept_vars] = np.arange(len(kept_vars))
    new_f = CnfFormula(
        max(len(kept_vars), 1),
        np.asarray(starts),
        remap[np.asarray(vs, dtype=np.int64)],
        np.asarray(ns),
    )
    return SimplifyResult(new_f, kept_vars, forced_unsat)


def sid_solve(f: CnfFormula, cfg: SidConfig) -> SidOutcome:
    """Decimate by SP bias until the surveys collapse to the trivial fixed
    point, then hand the residual formula to MaxWalkSat."""
    rng = np.random.default_rng([cfg.rng_seed, 0xD])
    assignment = np.zeros(f.num_vars, dtype=np.bool_)
    assigned = np.zeros(f.num_vars, dtype=bool)

    current = f
    to_orig = np.arange(f.num_vars, dtype=np.int64)
    fixed_by_decimation = 0
    fixed_by_walksat = 0
    rounds = 0
    initial_state = None
    initial_graph = None

    while True:
        if current is None or current.num_clauses == 0:
            # no constraints left; unfixed variables get random values
            free = np.flatnonzero(~assigned)
            assignment[free] = rng.random(len(free)) < 0.5
            fixed_by_walksat += len(free)
            break

        g = FactorGraph(current)
        state, outcome = run_sp(
            g, t_max=cfg.t_max, epsilon=cfg.epsilon, rng_seed=cfg.rng_seed + rounds
        )
        if rounds == 0:
            initial_state, initial_graph = state, g
        rounds += 1

        if outcome.contradiction:
            return SidOutcome(
                SidStatus.CONTRADICTION_FAILURE, None, current.num_clauses,
                fixed_by_decimation, fixed_by_walksat, rounds,
                initial_state, initial_graph,
            )
        if not outcome.converged:
            return SidOutcome(
                SidStatus.CONVERGENCE_FAILURE, None, current.num_clauses,
                fixed_by_decimation, fixed_by_walksat, rounds,
                initial_state, initial_graph,
            )

        if np.all(state.eta < cfg.trivial_threshold):
            # trivial fixed point: SP carries no information, local search
            # finishes the residual formula
            ws_cfg = WalkSatConfig(
                cutoff=cfg.walksat_cfg.cutoff,
                noise_p=cfg.walksat_cfg.noise_p,
                rng_seed=cfg.walksat_cfg.rng_seed + rounds,
                restarts=cfg.walksat_cfg.restarts,
            )
            res = maxwalksat(current, ws_cfg)
            assignment[to_orig] = res.best_assignment
            assigned[to_orig] = True
            fixed_by_walksat += len(to_orig)
            free = np.flatnonzero(~assigned)
            assignment[free] = rng.random(len(free)) < 0.5
            fixed_by_walksat += len(free)
            break

        marg = compute_marginals(g, state)
        order = np.lexsort((np.arange(current.num_vars), -marg.bias))
        n_fix = int(np.ceil(cfg.decimation_fraction * current.num_vars))
        chosen = order[:n_fix]
        partial = {
            int(v): bool(marg.s_plus[v] > marg.s_minus[v]) for v in chosen
        }
        for v, val in partial.items():
            ov = to_orig[v]
            assignment[ov] = val
            assigned[ov] = True
        fixed_by_decimation += len(partial)

        simp = simplify(current, partial)
        to_orig = to_orig[simp.kept_vars]
        current = simp.formula
        if current is not None and current.num_vars != len(simp.kept_vars):
            # all-clauses-gone corner handled above; sanity
            raise AssertionError("variable remap out of sync")

    unsat = f.num_clauses - evaluate(f, assignment)[0]
    return SidOutcome(
        SidStatus.SOLVED, assignment, unsat,
        fixed_by_decimation, fixed_by_walksat, rounds,
        initial_state, initial_graph,
    )
