"""Survey propagation toolkit for random MAX-E-3-SAT.

Core pieces: CNF/factor-graph data model, the SP message-passing engine,
survey-inspired decimation, MaxWalkSat, a small from-scratch MLP, and the
one-shot neural assignment pipeline with its experiment harness.
"""

__version__ = "0.1.0"

from .formula import (
    CnfFormula,
    FactorGraph,
    Literal,
    build_factor_graph,
    emit_dimacs,
    evaluate,
    generate_random_3sat,
    generate_random_ksat,
    parse_dimacs,
)
from .harness import DatasetSpec, RunReport, SweepSpec, build_dataset, pearson, sweep
from .mlp import MlpModel, TrainConfig, forward, init_model, load_model, save_model, train
from .pipeline import DeepSpResult, assignment_agreement, deepsp_solve, extract_features
from .sid import SidConfig, SidOutcome, SidStatus, sid_solve, simplify
from .sp import SpMarginals, SpRunOutcome, SurveyState, compute_marginals, run_sp
from .walksat import WalkSatConfig, WalkSatResult, maxwalksat, unsat_clause_count
