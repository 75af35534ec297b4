"""Line-oriented solution files: one ``name value`` pair per line, ``#`` comments.

A comment of the form ``# status: optimal`` carries the solver's claim about
the solution; it is informational and never replaces verification.
"""

from __future__ import annotations

import logging
import re
from typing import Mapping

from .lpfile import fmt_num
from .model import FEAS_TOL, Model

log = logging.getLogger(__name__)

_STATUS_RE = re.compile(r"^#\s*status\s*[:=]\s*(\w+)", re.I)


class SolutionParseError(ValueError):
    pass


def read_status(text: str) -> str | None:
    for line in text.splitlines():
        m = _STATUS_RE.match(line.strip())
        if m:
            return m.group(1).lower()
    return None


def parse_solution(text: str, model: Model, *, warnings: list[str] | None = None) -> dict[str, float]:
    """Read values for ``model``'s variables.

    Variables absent from ``text`` default to 0 and names unknown to the model
    are skipped; both produce a warning, collected into ``warnings`` if given.
    """
    notes = warnings if warnings is not None else []
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SolutionParseError(f"line {lineno}: expected 'name value', got {raw!r}")
        name, sval = parts
        try:
            val = float(sval)
        except ValueError:
            raise SolutionParseError(f"line {lineno}: non-numeric value {sval!r} for {name}") from None
        var = model.variables.get(name)
        if var is None:
            notes.append(f"unknown variable {name!r} ignored")
            continue
        if val < var.lower - FEAS_TOL or val > var.upper + FEAS_TOL:
            raise SolutionParseError(
                f"line {lineno}: {name}={sval} outside bounds [{var.lower}, {var.upper}]")
        values[name] = val
    missing = [v for v in model.variables if v not in values]
    if missing:
        notes.append(f"{len(missing)} variable(s) missing from solution, set to 0")
        for v in missing:
            values[v] = 0.0
    for n in notes:
        log.warning(n)
    return {v: values[v] for v in model.variables}


def write_solution(assignment: Mapping[str, float], model: Model, *,
                   status: str | None = None, objective: float | None = None) -> str:
    lines = []
    if status:
        lines.append(f"# status: {status}")
    if objective is not None:
        lines.append(f"# objective: {fmt_num(objective)}")
    for name in model.variables:
        lines.append(f"{name} {fmt_num(assignment.get(name, 0.0))}")
    return "\n".join(lines) + "\n"
