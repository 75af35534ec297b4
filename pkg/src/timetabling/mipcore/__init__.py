from .bnb import Limits, UnsupportedModelError, solve_exact
from .external import ExternalConfig, SolverFailure, VerificationError, solve_external
from .lpfile import LPNameError, LPParseError, read_lp, write_lp
from .model import (
    FEAS_TOL,
    INT_TOL,
    Evaluation,
    LinearConstraint,
    MissingVariableError,
    Model,
    ModelError,
    Sense,
    SolveResult,
    Variable,
    VarKind,
    evaluate,
)
from .solution import SolutionParseError, parse_solution, write_solution

__all__ = [
    "FEAS_TOL", "INT_TOL", "Evaluation", "ExternalConfig", "LPNameError", "LPParseError",
    "Limits", "LinearConstraint", "MissingVariableError", "Model", "ModelError", "Sense",
    "SolutionParseError", "SolveResult", "SolverFailure", "UnsupportedModelError",
    "Variable", "VarKind", "VerificationError", "evaluate", "parse_solution", "read_lp",
    "solve_exact", "solve_external", "write_lp", "write_solution",
]
