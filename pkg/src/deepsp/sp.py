"""Survey propagation: message state, asynchronous sweeps, marginals."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .formula import FactorGraph

DEFAULT_T_MAX = 1024
DEFAULT_EPSILON = 1e-2


@dataclass
class SurveyState:
    """All surveys eta[e] on the edges of one factor graph plus bookkeeping."""

    graph: FactorGraph
    eta: np.ndarray
    eta_prev: np.ndarray
    t: int = 0
    t_max: int = DEFAULT_T_MAX
    epsilon: float = DEFAULT_EPSILON
    rng_seed: int = 0
    contradiction: bool = False

    @property
    def deltas(self) -> np.ndarray:
        return np.abs(self.eta - self.eta_prev)

    @property
    def converged_flags(self) -> np.ndarray:
        return self.deltas < self.epsilon


@dataclass
class SpRunOutcome:
    converged: bool
    t_star: int
    frac_unconverged_messages: float
    instance_eps: float
    contradiction: bool = False


@dataclass
class SpMarginals:
    pi_plus: np.ndarray
    pi_minus: np.ndarray
    s_minus: np.ndarray
    s_plus: np.ndarray
    s_zero: np.ndarray
    contradiction: np.ndarray  # per-variable flag

    @property
    def bias(self) -> np.ndarray:
        return 1.0 - np.minimum(self.s_minus, self.s_plus)


def init_messages(
    g: FactorGraph,
    rng_seed: int,
    t_max: int = DEFAULT_T_MAX,
    epsilon: float = DEFAULT_EPSILON,
) -> SurveyState:
    """Fresh state with i.i.d. uniform surveys on every edge."""
    rng = np.random.default_rng([rng_seed, 0])
    eta = rng.random(g.num_edges)
    return SurveyState(
        graph=g,
        eta=eta,
        eta_prev=eta.copy(),
        t=0,
        t_max=t_max,
        epsilon=epsilon,
        rng_seed=rng_seed,
    )


@njit(cache=True, fastmath=True)
def _update_edge(eta, e, edge_clause, clause_start, edge_var, edge_neg, var_edges, var_start, var_mid):
    """One SP-UPDATE for edge e (clause a -> variable i). Returns (eta_new,
    contradiction_flag).

    For each other variable j of clause a, accumulate the cavity products of
    (1 - eta) over j's other occurrences, split by whether the occurrence sign
    agrees with j's sign in a.  Empty products are 1.  var_edges groups each
    variable's unnegated occurrences before its negated ones, so the two
    products are tight loops.
    """
    a = edge_clause[e]
    prod = 1.0
    contradiction = False
    for p in range(clause_start[a], clause_start[a + 1]):
        if p == e:
            continue
        j = edge_var[p]
        p_pos = 1.0  # over clauses where j appears unnegated
        p_neg = 1.0
        for qq in range(var_start[j], var_mid[j]):
            q = var_edges[qq]
            if q != p:
                p_pos *= 1.0 - eta[q]
        for qq in range(var_mid[j], var_start[j + 1]):
            q = var_edges[qq]
            if q != p:
                p_neg *= 1.0 - eta[q]
        if edge_neg[p]:
            p_same, p_opp = p_neg, p_pos
        else:
            p_same, p_opp = p_pos, p_neg
        s_minus = (1.0 - p_opp) * p_same
        denom = p_same + p_opp - p_same * p_opp  # = s_minus + s_plus + s_zero
        if denom <= 0.0:
            contradiction = True
            ratio = 1.0
        else:
            ratio = s_minus / denom
        prod *= ratio
    return prod, contradiction


@njit(cache=True, fastmath=True)
def _sweep_kernel(eta, perm, edge_clause, clause_start, edge_var, edge_neg, var_edges, var_start, var_mid):
    # same update as _update_edge, unrolled here to keep the hot loop flat
    contradiction = False
    for idx in range(len(perm)):
        e = perm[idx]
        a = edge_clause[e]
        prod = 1.0
        for p in range(clause_start[a], clause_start[a + 1]):
            if p == e:
                continue
            j = edge_var[p]
            p_pos = 1.0
            p_neg = 1.0
            for qq in range(var_start[j], var_mid[j]):
                q = var_edges[qq]
                if q != p:
                    p_pos *= 1.0 - eta[q]
            for qq in range(var_mid[j], var_start[j + 1]):
                q = var_edges[qq]
                if q != p:
                    p_neg *= 1.0 - eta[q]
            if edge_neg[p]:
                p_same, p_opp = p_neg, p_pos
            else:
                p_same, p_opp = p_pos, p_neg
            s_minus = (1.0 - p_opp) * p_same
            denom = p_same + p_opp - p_same * p_opp
            if denom <= 0.0:
                contradiction = True
            else:
                prod *= s_minus / denom
        eta[e] = prod
    return contradiction


def sp_update_edge(state: SurveyState, e: int) -> tuple[float, bool]:
    """SP-UPDATE on one edge without writing it back."""
    g = state.graph
    return _update_edge(
        state.eta,
        e,
        g.edge_clause,
        g.clause_start,
        g.edge_var,
        g.edge_neg,
        g.var_edges,
        g.var_start,
        g.var_mid,
    )


def sp_sweep(state: SurveyState) -> tuple[float, bool]:
    """Update every edge once, in place, in a seeded random permutation.

    The permutation is a pure function of (run seed, sweep index).  Returns
    (max |eta_t - eta_{t-1}| over edges, contradiction flag).
    """
    if state.t >= state.t_max:
        raise RuntimeError("iteration cap reached")
    g = state.graph
    perm = np.random.default_rng([state.rng_seed, state.t + 1]).permutation(
        g.num_edges
    ).astype(np.int32)
    np.copyto(state.eta_prev, state.eta)
    contra = _sweep_kernel(
        state.eta,
        perm,
        g.edge_clause,
        g.clause_start,
        g.edge_var,
        g.edge_neg,
        g.var_edges,
        g.var_start,
        g.var_mid,
    )
    state.t += 1
    if contra:
        state.contradiction = True
    max_delta = float(np.max(np.abs(state.eta - state.eta_prev))) if g.num_edges else 0.0
    return max_delta, contra


def run_sp(
    g: FactorGraph,
    t_max: int = DEFAULT_T_MAX,
    epsilon: float = DEFAULT_EPSILON,
    rng_seed: int = 0,
) -> tuple[SurveyState, SpRunOutcome]:
    """Iterate sweeps until no survey moves by more than epsilon, or t_max."""
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    state = init_messages(g, rng_seed, t_max=t_max, epsilon=epsilon)
    converged = False
    while state.t < t_max:
        max_delta, _ = sp_sweep(state)
        if max_delta < epsilon:
            converged = True
            break
    if converged:
        frac_unconv, inst_eps = 0.0, 0.0
    else:
        deltas = state.deltas
        bad = deltas >= epsilon
        n_bad = int(bad.sum())
        frac_unconv = n_bad / g.num_edges
        inst_eps = float(deltas[bad].mean()) if n_bad else 0.0
    outcome = SpRunOutcome(
        converged=converged,
        t_star=state.t,
        frac_unconverged_messages=frac_unconv,
        instance_eps=inst_eps,
        contradiction=state.contradiction,
    )
    return state, outcome


def instance_epsilon(state: SurveyState, epsilon: float | None = None) -> float:
    """Mean final residual over the edges that did not converge (0 if all did).

    Residuals below epsilon are thresholded to zero and excluded.
    """
    eps = state.epsilon if epsilon is None else epsilon
    deltas = state.deltas
    bad = deltas >= eps
    if not bad.any():
        return 0.0
    return float(deltas[bad].mean())


@njit(cache=True)
def _pi_products(eta, edge_neg, var_edges, var_start, n):
    pp = np.ones(n)
    pm = np.ones(n)
    for i in range(n):
        for qq in range(var_start[i], var_start[i + 1]):
            q = var_edges[qq]
            if edge_neg[q]:
                pm[i] *= 1.0 - eta[q]
            else:
                pp[i] *= 1.0 - eta[q]
    return pp, pm


def variable_pis(g: FactorGraph, state: SurveyState) -> tuple[np.ndarray, np.ndarray]:
    """pi^+/pi^- = 1 - prod over the +/- side of (1 - eta); empty product = 1."""
    pp, pm = _pi_products(state.eta, g.edge_neg, g.var_edges, g.var_start, g.num_vars)
    return 1.0 - pp, 1.0 - pm


def compute_marginals(g: FactorGraph, state: SurveyState) -> SpMarginals:
    """Per-variable forced-TRUE / forced-FALSE / free probabilities."""
    pi_plus, pi_minus = variable_pis(g, state)
    denom = 1.0 - pi_plus * pi_minus
    contradiction = denom <= 0.0
    safe = np.where(contradiction, 1.0, denom)
    s_minus = pi_minus * (1.0 - pi_plus) / safe
    s_plus = pi_plus * (1.0 - pi_minus) / safe
    # sentinel for contradictory variables: maximal, sign-neutral bias
    s_minus[contradiction] = 0.5
    s_plus[contradiction] = 0.5
    s_zero = 1.0 - s_minus - s_plus
    return SpMarginals(pi_plus, pi_minus, s_minus, s_plus, s_zero, contradiction)
