"""MaxWalkSat: biased random walk with break-count greedy flips."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .formula import CnfFormula, FactorGraph, evaluate, unsat_clause_count


@dataclass
class WalkSatConfig:
    cutoff: int = 100_000
    noise_p: float = 0.5
    rng_seed: int = 0
    restarts: int = 1

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        if not 0.0 <= self.noise_p <= 1.0:
            raise ValueError("noise_p must be in [0,1]")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass
class WalkSatResult:
    best_assignment: np.ndarray
    best_unsat: int
    flips_used: int


@njit(cache=True)
def _run_walk(
    seed,
    cutoff,
    noise_p,
    restarts,
    clause_start,
    lit_var,
    lit_neg,
    edge_clause,
    var_edges,
    var_start,
    best_assign,
):
    np.random.seed(seed)
    n = len(var_start) - 1
    m = len(clause_start) - 1
    assign = np.zeros(n, dtype=np.bool_)
    num_true = np.zeros(m, dtype=np.int32)
    unsat_list = np.zeros(m, dtype=np.int32)
    unsat_pos = np.zeros(m, dtype=np.int32)
    best_unsat = m + 1
    flips_used = 0

    for _restart in range(restarts):
        for i in range(n):
            assign[i] = np.random.randint(2) == 1
        num_true[:] = 0
        for e in range(len(lit_var)):
            if assign[lit_var[e]] != lit_neg[e]:
                num_true[edge_clause[e]] += 1
        unsat_count = 0
        for c in range(m):
            if num_true[c] == 0:
                unsat_list[unsat_count] = c
                unsat_pos[c] = unsat_count
                unsat_count += 1
            else:
                unsat_pos[c] = -1
        if unsat_count < best_unsat:
            best_unsat = unsat_count
            best_assign[:] = assign

        for _flip in range(cutoff):
            if unsat_count == 0:
                break
            c = unsat_list[np.random.randint(unsat_count)]
            lo, hi = clause_start[c], clause_start[c + 1]
            if np.random.random() < noise_p:
                pick = lo + np.random.randint(hi - lo)
            else:
                # flip the variable of c breaking the fewest clauses
                best_brk = 2_147_483_647
                pick = lo
                ties = 0
                for p in range(lo, hi):
                    v = lit_var[p]
                    brk = 0
                    for qq in range(var_start[v], var_start[v + 1]):
                        q = var_edges[qq]
                        b = edge_clause[q]
                        if num_true[b] == 1 and assign[v] != lit_neg[q]:
                            brk += 1
                    if brk < best_brk:
                        best_brk = brk
                        pick = p
                        ties = 1
                    elif brk == best_brk:
                        ties += 1
                        if np.random.randint(ties) == 0:
                            pick = p
            v = lit_var[pick]
            assign[v] = not assign[v]
            flips_used += 1
            for qq in range(var_start[v], var_start[v + 1]):
                q = var_edges[qq]
                b = edge_clause[q]
                if assign[v] != lit_neg[q]:
                    num_true[b] += 1
                    if num_true[b] == 1:
                        # b leaves the unsat list (swap-remove)
                        pos = unsat_pos[b]
                        last = unsat_list[unsat_count - 1]
                        unsat_list[pos] = last
                        unsat_pos[last] = pos
                        unsat_pos[b] = -1
                        unsat_count -= 1
                else:
                    num_true[b] -= 1
                    if num_true[b] == 0:
                        unsat_list[unsat_count] = b
                        unsat_pos[b] = unsat_count
                        unsat_count += 1
            if unsat_count < best_unsat:
                best_unsat = unsat_count
                best_assign[:] = assign
        if best_unsat == 0:
            break
    return best_unsat, flips_used


def maxwalksat(f: CnfFormula, cfg: WalkSatConfig) -> WalkSatResult:
    """Minimize the number of unsatisfied clauses by stochastic local search.

    Each step picks a random unsatisfied clause and flips either a random
    variable of it (with probability noise_p) or the one that breaks the
    fewest currently satisfied clauses.  Tracks the best assignment seen.
    """
    g = FactorGraph(f)
    best_assign = np.zeros(f.num_vars, dtype=np.bool_)
    best_unsat, flips = _run_walk(
        cfg.rng_seed & 0x7FFFFFFF,
        cfg.cutoff,
        cfg.noise_p,
        cfg.restarts,
        g.clause_start,
        g.edge_var,
        g.edge_neg,
        g.edge_clause,
        g.var_edges,
        g.var_start,
        best_assign,
    )
    sat, _ = evaluate(f, best_assign)
    assert f.num_clauses - sat == best_unsat, "incremental bookkeeping drifted"
    return WalkSatResult(best_assignment=best_assign, best_unsat=int(best_unsat), flips_used=int(flips))
