"""Run an external MIP solver through LP/solution files.

The command template gets ``{lp}``, ``{sol}`` and ``{threads}`` substituted;
for example ``gurobi_cl Threads={threads} ResultFile={sol} {lp}``. Solver
tuning (e.g. ``Heuristics=0 FlowCoverCuts=1``) belongs in that template; this
adapter never sets solver parameters itself.

Whatever the solver claims, the returned objective is recomputed from the
solution and the solution is checked against every constraint.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .lpfile import write_lp
from .model import Model, SolveResult, evaluate
from .solution import parse_solution, read_status


class SolverFailure(RuntimeError):
    def __init__(self, msg: str, returncode: int | None = None, output: str = ""):
        super().__init__(msg)
        self.returncode = returncode
        self.output = output


class VerificationError(RuntimeError):
    def __init__(self, msg: str, violated: list[str]):
        super().__init__(msg)
        self.violated = violated


@dataclass
class ExternalConfig:
    command_template: str
    workdir: str | os.PathLike | None = None
    threads: int | None = None
    timeout: float | None = None


def solve_external(model: Model, config: ExternalConfig) -> SolveResult:
    tpl = config.command_template
    if "{lp}" not in tpl or "{sol}" not in tpl:
        raise ValueError("command template needs {lp} and {sol} placeholders")
    threads = config.threads or int(os.environ.get("TT_THREADS", "1"))

    with tempfile.TemporaryDirectory(dir=config.workdir) as tmp:
        lp_path = Path(tmp) / "model.lp"
        sol_path = Path(tmp) / "model.sol"
        lp_path.write_text(write_lp(model))
        cmd = tpl.format(lp=shlex.quote(str(lp_path)), sol=shlex.quote(str(sol_path)),
                         threads=threads)
        try:
            proc = subprocess.run(cmd, shell=True, capture_output=True, text=True,
                                  timeout=config.timeout, cwd=config.workdir)
        except subprocess.TimeoutExpired as exc:
            raise SolverFailure(f"solver timed out after {config.timeout}s",
                                output=str(exc.stdout or "")) from exc
        output = (proc.stdout or "") + (proc.stderr or "")
        if proc.returncode != 0:
            raise SolverFailure(f"solver exited with status {proc.returncode}",
                                proc.returncode, output)
        if not sol_path.exists():
            raise SolverFailure("solver produced no solution file", proc.returncode, output)
        text = sol_path.read_text()

    claimed = read_status(text)
    if claimed == "infeasible":
        return SolveResult("infeasible", proof_gap=0.0, message=output)
    notes: list[str] = []
    assignment = parse_solution(text, model, warnings=notes)
    ev = evaluate(model, assignment)
    if not ev.feasible:
        raise VerificationError(f"external solution violates {len(ev.violated)} constraint(s), "
                                f"first {ev.violated[0]!r}", ev.violated)
    status = "optimal" if claimed == "optimal" else "feasible"
    return SolveResult(status, ev.objective, assignment,
                       0.0 if status == "optimal" else float("inf"),
                       message="; ".join(notes))
