"""One-shot neural assignment from survey-propagation features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .formula import CnfFormula, FactorGraph, evaluate
from .mlp import MlpModel, forward
from .sp import (
    DEFAULT_EPSILON,
    DEFAULT_T_MAX,
    SpRunOutcome,
    SurveyState,
    run_sp,
    variable_pis,
)

DEFAULT_ETA_ONE_TOL = 1e-9


@dataclass
class DeepSpResult:
    assignment: np.ndarray
    rho: float
    one_minus_rho: float
    omega: float  # fraction of variables fixed by the unit-propagation rule
    sp_outcome: SpRunOutcome


def extract_features(
    g: FactorGraph, state: SurveyState, scale_counts: bool = False
) -> np.ndarray:
    """Per-variable feature rows [1-pi+, 1-pi-, n+, n-] from the final surveys.

    Extracted whether or not the run converged.  scale_counts=True divides the
    occurrence counts by the mean variable degree (3M/N), putting all four
    features on an O(1) scale — sigmoid layers train much faster on scaled
    counts, so experiments usually want this on (the model must then be
    trained and evaluated with the same setting).
    """
    pi_plus, pi_minus = variable_pis(g, state)
    n_plus = g.n_plus.astype(np.float64)
    n_minus = g.n_minus.astype(np.float64)
    if scale_counts:
        mean_degree = (n_plus.sum() + n_minus.sum()) / max(g.num_vars, 1)
        if mean_degree > 0:
            n_plus = n_plus / mean_degree
            n_minus = n_minus / mean_degree
    return np.column_stack([1.0 - pi_plus, 1.0 - pi_minus, n_plus, n_minus])


def unit_propagation_mask(
    g: FactorGraph, state: SurveyState, eta_one_tol: float = DEFAULT_ETA_ONE_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Variables receiving a certain warning (some eta >= 1 - tol).

    Returns (mask, forced_value); forced TRUE iff n+ > n-, FALSE otherwise.
    """
    near_one = state.eta >= 1.0 - eta_one_tol
    mask = np.zeros(g.num_vars, dtype=bool)
    if near_one.any():
        np.logical_or.at(mask, g.edge_var[near_one], True)
    forced = g.n_plus > g.n_minus
    return mask, forced


def assignment_agreement(a, b) -> float:
    """Fraction of agreeing positions (1 - normalized Hamming distance)."""
    a = np.asarray(a, dtype=np.bool_)
    b = np.asarray(b, dtype=np.bool_)
    if a.shape != b.shape:
        raise ValueError("length mismatch")
    return float(np.mean(a == b))


def deepsp_solve(
    f: CnfFormula,
    model: MlpModel,
    t_max: int = DEFAULT_T_MAX,
    epsilon: float = DEFAULT_EPSILON,
    rng_seed: int = 0,
    eta_one_tol: float = DEFAULT_ETA_ONE_TOL,
    graph: FactorGraph | None = None,
    scale_counts: bool = False,
) -> DeepSpResult:
    """Run SP once (early-stopped on convergence), then fix every variable in
    a single pass: unit-propagation where a warning is certain, otherwise the
    classifier output thresholded at 0.5.  No decimation, no re-running SP.

    scale_counts must match how the model's training features were extracted.
    """
    g = graph if graph is not None else FactorGraph(f)
    state, outcome = run_sp(g, t_max=t_max, epsilon=epsilon, rng_seed=rng_seed)

    eta_snapshot = state.eta.copy()
    feats = extract_features(g, state, scale_counts=scale_counts)
    up_mask, up_forced = unit_propagation_mask(g, state, eta_one_tol)

    assignment = np.empty(f.num_vars, dtype=np.bool_)
    nn_vars = ~up_mask
    if nn_vars.any():
        y = forward(model, feats[nn_vars])
        assignment[nn_vars] = y >= 0.5
    assignment[up_mask] = up_forced[up_mask]

    assert np.array_equal(eta_snapshot, state.eta), "fixing pass mutated SP state"
    sat, rho = evaluate(f, assignment)
    return DeepSpResult(
        assignment=assignment,
        rho=rho,
        one_minus_rho=1.0 - rho,
        omega=float(up_mask.mean()),
        sp_outcome=outcome,
    )
