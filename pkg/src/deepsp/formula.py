"""CNF data model, random 3-SAT generation, DIMACS I/O and factor graphs."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np


class DimacsError(ValueError):
    """Raised on malformed DIMACS input."""


@dataclass(frozen=True)
class Literal:
    """A variable occurrence inside a clause. var is 0-based."""

    var: int
    negated: bool

    def to_dimacs(self) -> int:
        return -(self.var + 1) if self.negated else self.var + 1


class CnfFormula:
    """A CNF formula stored in flat CSR form.

    clause_start[c]:clause_start[c+1] indexes the literals of clause c inside
    lit_var / lit_neg.  Immutable after construction; all solver code shares
    formulas read-only.
    """

    def __init__(self, num_vars: int, clause_start, lit_var, lit_neg):
        if num_vars < 1:
            raise ValueError("need at least one variable")
        self.num_vars = int(num_vars)
        self.clause_start = np.ascontiguousarray(clause_start, dtype=np.int64)
        self.lit_var = np.ascontiguousarray(lit_var, dtype=np.int32)
        self.lit_neg = np.ascontiguousarray(lit_neg, dtype=np.bool_)
        if self.clause_start[0] != 0 or self.clause_start[-1] != len(self.lit_var):
            raise ValueError("bad clause index arrays")
        if np.any(np.diff(self.clause_start) < 1):
            raise ValueError("empty clause")
        if len(self.lit_var) and (
            self.lit_var.min() < 0 or self.lit_var.max() >= num_vars
        ):
            raise ValueError("variable index out of range")
        for arr in (self.clause_start, self.lit_var, self.lit_neg):
            arr.setflags(write=False)

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_clauses(cls, num_vars: int, clauses) -> "CnfFormula":
        """Build from an iterable of clauses, each a sequence of Literal."""
        starts = [0]
        vs, ns = [], []
        for clause in clauses:
            for lit in clause:
                vs.append(lit.var)
                ns.append(lit.negated)
            starts.append(len(vs))
        if len(starts) < 2:
            raise ValueError("formula needs at least one clause")
        return cls(num_vars, np.asarray(starts), np.asarray(vs), np.asarray(ns))

    @classmethod
    def from_signed(cls, num_vars: int, clauses) -> "CnfFormula":
        """Build from clauses of signed 1-based DIMACS-style integers."""
        return cls.from_clauses(
            num_vars,
            [[Literal(abs(v) - 1, v < 0) for v in cl] for cl in clauses],
        )

    # -- views -------------------------------------------------------------

    @property
    def num_clauses(self) -> int:
        return len(self.clause_start) - 1

    @property
    def num_literals(self) -> int:
        return len(self.lit_var)

    def clause(self, c: int) -> list[Literal]:
        lo, hi = self.clause_start[c], self.clause_start[c + 1]
        return [Literal(int(self.lit_var[p]), bool(self.lit_neg[p])) for p in range(lo, hi)]

    def clauses_signed(self) -> list[list[int]]:
        return [
            [lit.to_dimacs() for lit in self.clause(c)] for c in range(self.num_clauses)
        ]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CnfFormula)
            and self.num_vars == other.num_vars
            and np.array_equal(self.clause_start, other.clause_start)
            and np.array_equal(self.lit_var, other.lit_var)
            and np.array_equal(self.lit_neg, other.lit_neg)
        )

    def __repr__(self) -> str:
        return f"CnfFormula(N={self.num_vars}, M={self.num_clauses})"


def validate_exact_k(f: CnfFormula, k: int = 3) -> None:
    """Check the MAX-E-k-SAT ensemble invariants: arity k, distinct vars."""
    lens = np.diff(f.clause_start)
    if np.any(lens != k):
        raise ValueError(f"clause with arity != {k}")
    for c in range(f.num_clauses):
        lo, hi = f.clause_start[c], f.clause_start[c + 1]
        if len(set(f.lit_var[lo:hi].tolist())) != hi - lo:
            raise DimacsError(f"clause {c} repeats a variable")


# -- DIMACS ----------------------------------------------------------------


def parse_dimacs(text, strict: bool = True) -> CnfFormula:
    """Parse DIMACS CNF from a string, bytes or text stream.

    With strict=True (the default for this problem class) clauses that repeat
    a variable are rejected.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii")
    if isinstance(text, str):
        text = io.StringIO(text)

    num_vars = num_clauses = -1
    clauses: list[list[int]] = []
    pending: list[int] = []
    for line in text:
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"malformed header: {line!r}")
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError as exc:
                raise DimacsError(f"malformed header: {line!r}") from exc
            continue
        if num_vars < 0:
            raise DimacsError("clause before 'p cnf' header")
        for tok in line.split():
            v = int(tok)
            if v == 0:
                clauses.append(pending)
                pending = []
            else:
                if abs(v) > num_vars:
                    raise DimacsError(f"variable {abs(v)} out of range (N={num_vars})")
                pending.append(v)
    if pending:
        raise DimacsError("unterminated clause at end of input")
    if num_vars < 1:
        raise DimacsError("missing 'p cnf' header")
    if len(clauses) != num_clauses:
        raise DimacsError(f"header says M={num_clauses}, found {len(clauses)} clauses")
    if strict:
        for c, cl in enumerate(clauses):
            if len({abs(v) for v in cl}) != len(cl):
                raise DimacsError(f"clause {c} repeats a variable")
    return CnfFormula.from_signed(num_vars, clauses)


def emit_dimacs(f: CnfFormula) -> str:
    """Serialize to DIMACS CNF, preserving clause and literal order."""
    out = [f"p cnf {f.num_vars} {f.num_clauses}"]
    for cl in f.clauses_signed():
        out.append(" ".join(str(v) for v in cl) + " 0")
    return "\n".join(out) + "\n"


# -- generation --------------------------------------------------------------


def generate_random_ksat(n: int, alpha: float, rng_seed: int, k: int = 3) -> CnfFormula:
    """Uniform random k-SAT: M=round(alpha*n) clauses, each over k distinct
    variables with independent fair negations. Sampling is with replacement
    across clauses."""
    if n < k:
        raise ValueError(f"need n >= {k}")
    m = int(round(alpha * n))
    if m < 1:
        raise ValueError("alpha too small: no clauses")
    rng = np.random.default_rng(rng_seed)
    vars_ = np.empty((m, k), dtype=np.int32)
    for c in range(m):
        vars_[c] = rng.choice(n, size=k, replace=False)
    neg = rng.random((m, k)) < 0.5
    starts = np.arange(m + 1, dtype=np.int64) * k
    return CnfFormula(n, starts, vars_.ravel(), neg.ravel())


def generate_random_3sat(n: int, alpha: float, rng_seed: int) -> CnfFormula:
    return generate_random_ksat(n, alpha, rng_seed, k=3)


# -- evaluation --------------------------------------------------------------


def evaluate(f: CnfFormula, assignment) -> tuple[int, float]:
    """Count satisfied clauses; returns (satisfied_count, rho)."""
    assignment = np.asarray(assignment, dtype=np.bool_)
    if assignment.shape != (f.num_vars,):
        raise ValueError("assignment length does not match formula")
    lit_true = assignment[f.lit_var] ^ f.lit_neg
    sat = np.logical_or.reduceat(lit_true, f.clause_start[:-1])
    count = int(sat.sum())
    return count, count / f.num_clauses


def unsat_clause_count(f: CnfFormula, assignment) -> int:
    sat, _ = evaluate(f, assignment)
    return f.num_clauses - sat


# -- factor graph ------------------------------------------------------------


class FactorGraph:
    """Bipartite clause/variable incidence with per-edge signs.

    Edge ids coincide with flat literal positions of the owning formula, so
    eta[e] addresses the survey on the e-th literal occurrence.  var_edges
    groups edge ids by variable (CSR via var_start).
    """

    def __init__(self, f: CnfFormula):
        self.formula = f
        self.num_vars = f.num_vars
        self.num_clauses = f.num_clauses
        self.num_edges = f.num_literals
        self.edge_var = f.lit_var
        self.edge_neg = f.lit_neg
        self.clause_start = f.clause_start.astype(np.int32)
        self.edge_clause = np.repeat(
            np.arange(f.num_clauses, dtype=np.int32), np.diff(f.clause_start)
        )
        # per-variable edge lists, unnegated occurrences first (the sweep
        # kernel relies on this grouping to split the cavity products)
        key = self.edge_var.astype(np.int64) * 2 + self.edge_neg
        self.var_edges = np.argsort(key, kind="stable").astype(np.int32)
        counts = np.bincount(self.edge_var, minlength=f.num_vars)
        self.var_start = np.zeros(f.num_vars + 1, dtype=np.int32)
        np.cumsum(counts, out=self.var_start[1:])
        self.n_plus = np.bincount(
            self.edge_var[~self.edge_neg], minlength=f.num_vars
        ).astype(np.int64)
        self.n_minus = np.bincount(
            self.edge_var[self.edge_neg], minlength=f.num_vars
        ).astype(np.int64)
        self.var_mid = (self.var_start[:-1] + self.n_plus).astype(np.int32)
        for arr in (self.edge_clause, self.var_edges, self.var_start, self.var_mid):
            arr.setflags(write=False)

    def degree(self, i: int) -> int:
        return int(self.var_start[i + 1] - self.var_start[i])

    def pos_clauses(self, i: int) -> list[int]:
        """Clause ids where variable i appears unnegated (the + side)."""
        es = self.var_edges[self.var_start[i] : self.var_start[i + 1]]
        return [int(self.edge_clause[e]) for e in es if not self.edge_neg[e]]

    def neg_clauses(self, i: int) -> list[int]:
        es = self.var_edges[self.var_start[i] : self.var_start[i + 1]]
        return [int(self.edge_clause[e]) for e in es if self.edge_neg[e]]


def build_factor_graph(f: CnfFormula) -> FactorGraph:
    return FactorGraph(f)
