"""Linear model container, solution record and LP-format export."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Hashable

import numpy as np
import scipy.sparse as sp

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
TIMEOUT = "timeout-incumbent"

SENSES = ("<=", ">=", "=")
FEAS_TOL = 1e-6
INT_TOL = 1e-6


class ModelError(ValueError):
    pass


class UnboundedError(ArithmeticError):
    pass


class LPTimeout(TimeoutError):
    """The LP engine hit its time limit before finishing."""


@dataclass
class Constraint:
    indices: np.ndarray
    coefs: np.ndarray
    sense: str
    rhs: float
    tag: Hashable = None


@dataclass
class LinearModel:
    """Minimize ``objective @ x`` subject to sparse rows and per-variable bounds."""

    objective: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    lo: list = field(default_factory=list)
    hi: list = field(default_factory=list)
    integrality: list = field(default_factory=list)
    var_tags: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    rounding: Callable | None = None

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    @property
    def n_rows(self) -> int:
        return len(self.constraints)

    def add_var(self, tag=None, cost=0.0, lo=0.0, hi=1.0, integer=True) -> int:
        if lo > hi:
            raise ModelError(f"empty bounds for {tag}: [{lo}, {hi}]")
        self.objective.append(float(cost))
        self.lo.append(float(lo))
        self.hi.append(float(hi))
        self.integrality.append(bool(integer))
        self.var_tags.append(tag)
        return len(self.objective) - 1

    def add_constraint(self, indices, coefs, sense, rhs, tag=None) -> int:
        if sense not in SENSES:
            raise ModelError(f"unknown relation {sense!r}")
        idx = np.asarray(indices, dtype=np.int64)
        val = np.asarray(coefs, dtype=np.float64)
        if idx.shape != val.shape:
            raise ModelError("indices and coefficients differ in length")
        if idx.size and (idx.min() < 0 or idx.max() >= self.n_vars):
            raise ModelError(f"constraint {tag} references an undeclared variable")
        self.constraints.append(Constraint(idx, val, sense, float(rhs), tag))
        return len(self.constraints) - 1

    # ----------------------------------------------------------- views
    def arrays(self):
        c = np.asarray(self.objective, dtype=np.float64)
        lo = np.asarray(self.lo, dtype=np.float64)
        hi = np.asarray(self.hi, dtype=np.float64)
        integ = np.asarray(self.integrality, dtype=bool)
        return c, lo, hi, integ

    def matrix(self) -> sp.csr_matrix:
        if not self.constraints:
            return sp.csr_matrix((0, self.n_vars))
        indptr = np.zeros(self.n_rows + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([r.indices.shape[0] for r in self.constraints])
        idx = np.concatenate([r.indices for r in self.constraints])
        val = np.concatenate([r.coefs for r in self.constraints])
        return sp.csr_matrix((val, idx, indptr), shape=(self.n_rows, self.n_vars))

    def senses(self) -> np.ndarray:
        return np.array([r.sense for r in self.constraints], dtype=object)

    def rhs(self) -> np.ndarray:
        return np.array([r.rhs for r in self.constraints], dtype=np.float64)

    def without_rows(self, drop) -> "LinearModel":
        drop = set(drop)
        return LinearModel(
            list(self.objective),
            [r for k, r in enumerate(self.constraints) if k not in drop],
            list(self.lo),
            list(self.hi),
            list(self.integrality),
            list(self.var_tags),
            list(self.notes),
            self.rounding,
        )

    def without_duplicate_rows(self) -> "LinearModel":
        seen = set()
        drop = []
        for k, r in enumerate(self.constraints):
            order = np.argsort(r.indices, kind="stable")
            key = (r.indices[order].tobytes(), r.coefs[order].tobytes(), r.sense, r.rhs)
            if key in seen:
                drop.append(k)
            else:
                seen.add(key)
        return self.without_rows(drop) if drop else self

    # ----------------------------------------------------------- checks
    def violations(self, x, tol: float = FEAS_TOL) -> list:
        """Indices of rows (and ``-1`` for bounds/integrality) that ``x`` violates."""
        x = np.asarray(x, dtype=np.float64)
        bad = []
        _, lo, hi, integ = self.arrays()
        if np.any(x < lo - tol) or np.any(x > hi + tol):
            bad.append(-1)
        elif np.any(np.abs(x[integ] - np.round(x[integ])) > INT_TOL):
            bad.append(-1)
        for k, r in enumerate(self.constraints):
            lhs = float(r.coefs @ x[r.indices]) if r.indices.size else 0.0
            if r.sense == "<=" and lhs > r.rhs + tol:
                bad.append(k)
            elif r.sense == ">=" and lhs < r.rhs - tol:
                bad.append(k)
            elif r.sense == "=" and abs(lhs - r.rhs) > tol:
                bad.append(k)
        return bad

    def is_feasible(self, x, tol: float = FEAS_TOL) -> bool:
        return not self.violations(x, tol)

    def objective_value(self, x) -> float:
        return float(np.asarray(self.objective, dtype=np.float64) @ np.asarray(x, dtype=np.float64))

    def integral_objective(self) -> bool:
        """True when every feasible integer point has an integer objective."""
        c, _, _, integ = self.arrays()
        return bool(np.all(integ[c != 0]) and np.all(np.abs(c - np.round(c)) < 1e-12))

    # ----------------------------------------------------------- export
    def write_lp(self, path) -> None:
        Path(path).write_text(self.to_lp_text(), encoding="utf-8")

    def to_lp_text(self) -> str:
        names = [_lp_name(t, j, "x") for j, t in enumerate(self.var_tags)]
        out = ["\\ fihkit model", "Minimize", " obj: " + _lp_expr(range(self.n_vars), self.objective, names)]
        out.append("Subject To")
        for k, r in enumerate(self.constraints):
            rel = {"<=": "<=", ">=": ">=", "=": "="}[r.sense]
            out.append(f" {_lp_name(r.tag, k, 'c')}: {_lp_expr(r.indices, r.coefs, names)} {rel} {_num(r.rhs)}")
        out.append("Bounds")
        for j in range(self.n_vars):
            hi = "+inf" if np.isinf(self.hi[j]) else _num(self.hi[j])
            out.append(f" {_num(self.lo[j])} <= {names[j]} <= {hi}")
        binaries = [names[j] for j in range(self.n_vars) if self.integrality[j] and self.lo[j] == 0 and self.hi[j] == 1]
        generals = [names[j] for j in range(self.n_vars) if self.integrality[j] and not (self.lo[j] == 0 and self.hi[j] == 1)]
        if binaries:
            out.append("Binaries")
            out.extend(" " + n for n in binaries)
        if generals:
            out.append("Generals")
            out.extend(" " + n for n in generals)
        out.append("End")
        return "\n".join(out) + "\n"


def _num(v) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() else repr(v)


def _lp_name(tag, k, prefix) -> str:
    if tag is None:
        return f"{prefix}{k}"
    if isinstance(tag, tuple):
        raw = "_".join(str(p) if not isinstance(p, tuple) else "-".join(map(str, p)) for p in tag)
    else:
        raw = str(tag)
    return f"{prefix}{k}_" + re.sub(r"[^A-Za-z0-9_.-]", "_", raw)


def _lp_expr(indices, coefs, names) -> str:
    terms = []
    for j, c in zip(indices, coefs):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        terms.append(f"{sign} {_num(abs(c))} {names[int(j)]}")
    if not terms:
        return "0 " + (names[0] if names else "")
    text = " ".join(terms)
    return text[2:] if text.startswith("+ ") else text


@dataclass
class Solution:
    status: str
    values: np.ndarray
    objective_value: float
    nodes: int = 0
    trace: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status in (OPTIMAL, TIMEOUT)
