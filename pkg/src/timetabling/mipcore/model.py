"""A small mixed-integer linear program container.

Models are always minimisation problems. Variables and constraints keep their
insertion order, which fixes the order of everything written to disk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

FEAS_TOL = 1e-6
INT_TOL = 1e-5


class ModelError(ValueError):
    pass


class MissingVariableError(ModelError):
    pass


class VarKind(str, Enum):
    BINARY = "binary"
    INTEGER = "integer"
    CONTINUOUS = "continuous"


class Sense(str, Enum):
    LE = "<="
    EQ = "="
    GE = ">="


@dataclass
class Variable:
    name: str
    kind: VarKind = VarKind.CONTINUOUS
    lower: float = 0.0
    upper: float = math.inf
    priority: int = 0  # branching hint for solve_exact; higher branches first

    def __post_init__(self):
        self.kind = VarKind(self.kind)
        if self.kind is VarKind.BINARY:
            if self.lower < 0 or self.upper > 1:
                raise ModelError(f"binary {self.name} must have bounds within [0, 1]")
        if self.lower > self.upper:
            raise ModelError(f"{self.name}: lower bound {self.lower} > upper {self.upper}")

    @property
    def is_integral(self) -> bool:
        return self.kind is not VarKind.CONTINUOUS


@dataclass
class LinearConstraint:
    name: str
    terms: list[tuple[float, str]]
    sense: Sense
    rhs: float

    def activity(self, values: Mapping[str, float]) -> float:
        return sum(c * values[v] for c, v in self.terms)

    def satisfied(self, values: Mapping[str, float], tol: float = FEAS_TOL) -> bool:
        lhs = self.activity(values)
        if self.sense is Sense.LE:
            return lhs <= self.rhs + tol
        if self.sense is Sense.GE:
            return lhs >= self.rhs - tol
        return abs(lhs - self.rhs) <= tol


@dataclass
class SolveResult:
    status: str  # optimal | feasible | infeasible | unbounded | limit
    objective: float | None = None
    assignment: dict[str, float] = field(default_factory=dict)
    proof_gap: float = math.inf
    nodes: int = 0
    incumbents: list[float] = field(default_factory=list)
    message: str = ""

    @property
    def has_solution(self) -> bool:
        return self.objective is not None


class Model:
    """Variables, linear constraints and a linear objective to minimise."""

    def __init__(self, name: str = "model"):
        self.name = name
        self.variables: dict[str, Variable] = {}
        self.constraints: list[LinearConstraint] = []
        self.objective: dict[str, float] = {}
        self._cnames: set[str] = set()

    def __repr__(self):
        return (f"Model({self.name!r}, vars={len(self.variables)}, "
                f"rows={len(self.constraints)}, nnz={self.num_nonzeros})")

    @property
    def direction(self) -> str:
        return "minimize"

    def add_var(self, name: str, kind: VarKind | str = VarKind.CONTINUOUS,
                lower: float = 0.0, upper: float = math.inf, priority: int = 0) -> str:
        if name in self.variables:
            raise ModelError(f"duplicate variable name {name!r}")
        self.variables[name] = Variable(name, VarKind(kind), lower, upper, priority)
        return name

    def add_binary(self, name: str, priority: int = 0) -> str:
        return self.add_var(name, VarKind.BINARY, 0, 1, priority)

    def add_integer(self, name: str, lower: float = 0, upper: float = math.inf,
                    priority: int = 0) -> str:
        return self.add_var(name, VarKind.INTEGER, lower, upper, priority)

    def add_constraint(self, name: str, terms: Iterable[tuple[float, str]],
                       sense: Sense | str, rhs: float) -> LinearConstraint:
        if name in self._cnames:
            raise ModelError(f"duplicate constraint name {name!r}")
        seen = set()
        clean = []
        for coef, var in terms:
            if var not in self.variables:
                raise MissingVariableError(f"constraint {name}: unknown variable {var!r}")
            if var in seen:
                raise ModelError(f"constraint {name}: variable {var!r} appears twice")
            if not math.isfinite(coef):
                raise ModelError(f"constraint {name}: non-finite coefficient on {var}")
            seen.add(var)
            if coef != 0:
                clean.append((float(coef), var))
        if not math.isfinite(rhs):
            raise ModelError(f"constraint {name}: non-finite right-hand side")
        con = LinearConstraint(name, clean, Sense(sense), float(rhs))
        self.constraints.append(con)
        self._cnames.add(name)
        return con

    def set_objective(self, terms: Iterable[tuple[float, str]]) -> None:
        self.objective = {}
        for coef, var in terms:
            self.add_objective_term(coef, var)

    def add_objective_term(self, coef: float, var: str) -> None:
        if var not in self.variables:
            raise MissingVariableError(f"objective: unknown variable {var!r}")
        if not math.isfinite(coef):
            raise ModelError(f"objective: non-finite coefficient on {var}")
        total = self.objective.get(var, 0.0) + coef
        if total == 0:
            self.objective.pop(var, None)
        else:
            self.objective[var] = float(total)

    def fixed(self, values: Mapping[str, float]) -> "Model":
        """Copy with the given variables fixed at their values."""
        out = Model(self.name)
        for var in self.variables.values():
            if var.name in values:
                v = values[var.name]
                out.variables[var.name] = Variable(var.name, var.kind, v, v, var.priority)
            else:
                out.variables[var.name] = Variable(var.name, var.kind, var.lower, var.upper,
                                                   var.priority)
        out.constraints = list(self.constraints)
        out.objective = dict(self.objective)
        out._cnames = set(self._cnames)
        return out

    @property
    def num_nonzeros(self) -> int:
        return sum(len(c.terms) for c in self.constraints)

    def objective_value(self, values: Mapping[str, float]) -> float:
        return sum(c * values[v] for v, c in self.objective.items())


@dataclass
class Evaluation:
    feasible: bool
    violated: list[str]
    objective: float

    def __iter__(self):
        return iter((self.feasible, self.violated, self.objective))


def evaluate(model: Model, assignment: Mapping[str, float], tol: float = FEAS_TOL) -> Evaluation:
    """Check an assignment against bounds, integrality and every constraint.

    ``violated`` lists constraint names, plus ``bound:<var>`` and
    ``integrality:<var>`` entries for variables outside their domain.
    """
    missing = [v for v in model.variables if v not in assignment]
    if missing:
        raise MissingVariableError(f"assignment lacks {len(missing)} variable(s), e.g. {missing[0]!r}")
    violated = []
    for var in model.variables.values():
        val = assignment[var.name]
        if val < var.lower - tol or val > var.upper + tol:
            violated.append(f"bound:{var.name}")
        elif var.is_integral and abs(val - round(val)) > INT_TOL:
            violated.append(f"integrality:{var.name}")
    violated.extend(c.name for c in model.constraints if not c.satisfied(assignment, tol))
    return Evaluation(not violated, violated, model.objective_value(assignment))
