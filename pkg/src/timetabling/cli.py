"""Batch pipeline: check data, refine groups, build and solve the timetable model.

Every subcommand works on a directory of CSV tables (``--data``, default the
output directory) and writes into ``--out``. A typical run::

    timetabling gen --seed 1 --out run
    timetabling subgroup --out run
    timetabling build --out run
    timetabling solve --out run
    timetabling validate --out run
    timetabling report --out run

Exit codes: 0 success, 1 data or validation errors, 2 infeasible, 3 a solver
limit was hit, 64 usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass
from functools import partial
from pathlib import Path

from .gen import (GenerationError, generate_with_witness, read_witness, registrar_shape,
                  scale_shape, toy_shape, witness_timetable, write_generated)
from .ingest import IngestError, groups_csv, has_errors, parse_instance, validate_instance
from .mipcore import (ExternalConfig, Limits, SolverFailure, VerificationError, parse_solution,
                      read_lp, solve_exact, solve_external, write_lp, write_solution)
from .model import Instance, InstanceError
from .subgroup import (IpaBuildError, IpaInfeasibleError, NoProgressError, SubgroupError,
                       run_subgroup)
from .tip import (DecodeError, TipBuildError, TipIndex, Timetable, Weights, build_tip,
                  decode_solution, encode_timetable)
from .validate import audit, violations_csv

log = logging.getLogger("timetabling")

EXIT_OK, EXIT_DATA, EXIT_INFEASIBLE, EXIT_LIMIT, EXIT_USAGE = 0, 1, 2, 3, 64

DAY_NAMES = {"M": "Monday", "T": "Tuesday", "W": "Wednesday", "R": "Thursday", "F": "Friday"}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    data: Path
    out: Path
    groups: Path | None = None
    sections: Path | None = None
    rooms: Path | None = None
    availability: Path | None = None
    weights: Path | None = None
    capacity_mode: str = "hard"
    solver: str = "internal"
    command: str | None = None
    max_seconds: float | None = None
    max_nodes: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.capacity_mode not in ("hard", "soft"):
            raise UsageError(f"--mode must be hard or soft, not {self.capacity_mode!r}")
        if self.solver not in ("internal", "external"):
            raise UsageError(f"--solver must be internal or external, not {self.solver!r}")
        if self.solver == "external" and not self.command:
            raise UsageError("--solver external needs a --cmd template")

    def table(self, name: str) -> Path:
        given = getattr(self, name)
        return Path(given) if given is not None else self.data / f"{name}.csv"

    def group_table(self) -> Path:
        """Refined groups when a subgroup pass has run, the raw table otherwise."""
        if self.groups is not None:
            return Path(self.groups)
        refined = self.data / "groups_refined.csv"
        return refined if refined.exists() else self.data / "groups.csv"

    def load_weights(self) -> Weights:
        return Weights.load(self.weights) if self.weights else Weights()

    def limits(self) -> Limits:
        return Limits(self.max_nodes, self.max_seconds)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", type=Path, help="directory with the CSV tables (default: --out)")
    common.add_argument("--groups", type=Path)
    common.add_argument("--sections", type=Path)
    common.add_argument("--rooms", type=Path)
    common.add_argument("--availability", type=Path)
    common.add_argument("--weights", type=Path, help="key=value penalty weights")
    common.add_argument("--mode", choices=("hard", "soft"), default="hard",
                        help="section capacities as hard rows or penalised overflow")
    common.add_argument("--solver", choices=("internal", "external"), default="internal")
    common.add_argument("--cmd", help="external solver template with {lp}, {sol}, {threads}")
    common.add_argument("--max-seconds", type=float)
    common.add_argument("--max-nodes", type=int)
    common.add_argument("--out", type=Path, default=Path("."))
    common.add_argument("--seed", type=int, default=0)

    p = _Parser(prog="timetabling", description="Course timetabling pipeline.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.add_parser("check-data", parents=[common], help="list data issues")
    sub.add_parser("subgroup", parents=[common], help="split groups until they fit sections")
    sub.add_parser("build", parents=[common], help="write model.lp and its index map")
    sp = sub.add_parser("solve", parents=[common], help="solve, decode and audit")
    sp.add_argument("--start", type=Path, help="meetings CSV used as the first incumbent")
    vp = sub.add_parser("validate", parents=[common], help="audit a solution file")
    vp.add_argument("--solution", type=Path)
    rp = sub.add_parser("report", parents=[common], help="weekly grids per group, professor, room")
    rp.add_argument("--solution", type=Path)
    gp = sub.add_parser("gen", parents=[common], help="write a generated instance")
    gp.add_argument("--shape", choices=("toy", "registrar", "scale"), default="toy")
    return p


def _config(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(data=ns.data if ns.data is not None else ns.out, out=ns.out,
                     groups=ns.groups, sections=ns.sections, rooms=ns.rooms,
                     availability=ns.availability, weights=ns.weights, capacity_mode=ns.mode,
                     solver=ns.solver, command=ns.cmd, max_seconds=ns.max_seconds,
                     max_nodes=ns.max_nodes, seed=ns.seed)


# ---------------------------------------------------------------------------

def _load(cfg: RunConfig, refined: bool = True) -> Instance:
    courses = cfg.data / "courses.csv"
    group_path = cfg.group_table() if refined else cfg.table("groups")
    return parse_instance(group_path, cfg.table("sections"), cfg.table("rooms"),
                          cfg.table("availability"), courses if courses.exists() else None)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _index_json(index: TipIndex) -> str:
    ent = index.entities()
    body = {"capacity_mode": index.capacity_mode,
            "variables": {name: list(ent[name]) for name in sorted(ent)}}
    return json.dumps(body, indent=1, sort_keys=True) + "\n"


def _read_index(path: Path) -> TipIndex:
    body = json.loads(path.read_text())
    return TipIndex.from_entities({k: tuple(v) for k, v in body["variables"].items()},
                                  body.get("capacity_mode", "hard"))


def _timetable_csv(tt: Timetable) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["section_id", "day", "period", "room_id"])
    for s in sorted(tt.meetings):
        for d, t, r in tt.meetings[s]:
            wr.writerow([s, d, t, r])
    return buf.getvalue()


def _enrollments_csv(assignment: dict[tuple[str, str], int]) -> str:
    rows = sorted(k for k, v in assignment.items() if v)
    return "group_id,section_id\n" + "".join(f"{g},{s}\n" for g, s in rows)


def _read_enrollments(path: Path) -> dict[str, set[str]]:
    out: dict[str, set[str]] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(row["group_id"], set()).add(row["section_id"])
    return out


def _build(cfg: RunConfig):
    inst = _load(cfg)
    model, index = build_tip(inst, weights=cfg.load_weights(), capacity_mode=cfg.capacity_mode)
    _write(cfg.out / "model.lp", write_lp(model))
    _write(cfg.out / "model.index.json", _index_json(index))
    return inst, model, index


def _audit_files(cfg: RunConfig, inst: Instance, tt: Timetable, claimed: float) -> bool:
    rep = audit(inst, tt, cfg.load_weights(), claimed, cfg.capacity_mode)
    _write(cfg.out / "audit.txt", rep.summary())
    _write(cfg.out / "violations.csv", violations_csv(rep.violations))
    print(rep.summary(), end="")
    return rep.ok


# ---------------------------------------------------------------------------

def cmd_check_data(cfg: RunConfig, ns) -> int:
    inst = _load(cfg, refined=False)
    issues = validate_instance(inst)
    for issue in issues:
        print(issue)
    if not issues:
        print("no issues")
    return EXIT_DATA if has_errors(issues) else EXIT_OK


def cmd_subgroup(cfg: RunConfig, ns) -> int:
    inst = _load(cfg, refined=False)
    res = run_subgroup(inst, solve=partial(solve_exact, limits=cfg.limits(), cache={}))
    refined = inst.with_groups(res.final_groups)
    _write(cfg.out / "groups_refined.csv", groups_csv(refined.groups.values()))
    _write(cfg.out / "subgroup_log.csv", res.iteration_log())
    _write(cfg.out / "enrollments.csv", _enrollments_csv(res.final_assignment))
    print(f"{len(inst.groups)} groups -> {len(res.final_groups)} after {res.iterations} iteration(s)")
    return EXIT_OK


def cmd_build(cfg: RunConfig, ns) -> int:
    _, model, _ = _build(cfg)
    print(f"model.lp: {len(model.constraints)} rows, {len(model.variables)} columns, "
          f"{model.num_nonzeros} nonzeros")
    return EXIT_OK


def cmd_solve(cfg: RunConfig, ns) -> int:
    inst, model, index = _build(cfg)
    if cfg.solver == "external":
        threads = int(os.environ.get("TT_THREADS", "1"))
        res = solve_external(model, ExternalConfig(cfg.command, threads=threads,
                                                   timeout=cfg.max_seconds))
    else:
        start = None
        if ns.start is not None:
            enr_path = cfg.data / "enrollments.csv"
            enr = _read_enrollments(enr_path) if enr_path.exists() else {}
            tt0 = witness_timetable(inst, read_witness(ns.start), enr)
            start = encode_timetable(model, index, tt0)
            if start is None:
                log.warning("start timetable does not fit the model; ignored")
        res = solve_exact(model, cfg.limits(), start=start)
    print(f"status: {res.status}")
    if res.status == "infeasible":
        return EXIT_INFEASIBLE
    if not res.has_solution:
        print(res.message or "no solution found")
        return EXIT_LIMIT
    _write(cfg.out / "solution.sol", write_solution(res.assignment, model, status=res.status,
                                                    objective=res.objective))
    tt = decode_solution(inst, index, res.assignment)
    _write(cfg.out / "timetable.csv", _timetable_csv(tt))
    ok = _audit_files(cfg, inst, tt, res.objective)
    if not ok:
        return EXIT_DATA
    return EXIT_LIMIT if res.status == "limit" else EXIT_OK


def _decoded(cfg: RunConfig, ns) -> tuple[Instance, Timetable, float]:
    inst = _load(cfg)
    model = read_lp((cfg.out / "model.lp").read_text())
    index = _read_index(cfg.out / "model.index.json")
    sol = ns.solution if ns.solution is not None else cfg.out / "solution.sol"
    assignment = parse_solution(Path(sol).read_text(), model)
    return inst, decode_solution(inst, index, assignment), model.objective_value(assignment)


def cmd_validate(cfg: RunConfig, ns) -> int:
    inst, tt, claimed = _decoded(cfg, ns)
    return EXIT_OK if _audit_files(cfg, inst, tt, claimed) else EXIT_DATA


def grid_rows(title: str, cells: dict[tuple[str, int], list[str]], inst: Instance) -> list[list[str]]:
    """Days down, periods across; the corner names the subject."""
    grid = inst.grid
    rows = [[title, *map(str, grid.periods)]]
    for d in grid.days:
        rows.append([DAY_NAMES.get(d, d), *(" / ".join(cells.get((d, t), [])) for t in grid.periods)])
    return rows


def weekly_grids(inst: Instance, tt: Timetable) -> dict[str, list[list[str]]]:
    """File stem -> grid rows for every group, professor and room."""
    course = {s: inst.sections[s].course for s in tt.meetings}
    by_group: dict[str, dict] = {g: {} for g in inst.groups}
    by_prof: dict[str, dict] = {p: {} for p in inst.professors}
    by_room: dict[str, dict] = {r: {} for r in inst.rooms}
    for g, secs in tt.enrollments.items():
        for s in sorted(secs):
            for d, t, _ in tt.meetings.get(s, []):
                by_group.setdefault(g, {}).setdefault((d, t), []).append(course[s])
    for s in sorted(tt.meetings):
        sec = inst.sections[s]
        for d, t, r in tt.meetings[s]:
            for p in (sec.prof, *sec.coprofs):
                by_prof.setdefault(p, {}).setdefault((d, t), []).append(f"{s}@{r}")
            by_room.setdefault(r, {}).setdefault((d, t), []).append(s)
    out = {}
    for g in sorted(by_group):
        size = inst.groups[g].size if g in inst.groups else ""
        out[f"group_{g}"] = grid_rows(f"Group {g} (size {size})", by_group[g], inst)
    for p in sorted(by_prof):
        out[f"prof_{p}"] = grid_rows(f"Professor {p}", by_prof[p], inst)
    for r in sorted(by_room):
        out[f"room_{r}"] = grid_rows(f"Room {r}", by_room[r], inst)
    return out


def cmd_report(cfg: RunConfig, ns) -> int:
    inst, tt, _ = _decoded(cfg, ns)
    grids = weekly_grids(inst, tt)
    for stem, rows in grids.items():
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        _write(cfg.out / "reports" / f"{stem}.csv", buf.getvalue())
    print(f"{len(grids)} weekly grids in {cfg.out / 'reports'}")
    return EXIT_OK


def cmd_gen(cfg: RunConfig, ns) -> int:
    shapes = {"toy": toy_shape, "registrar": registrar_shape, "scale": scale_shape}
    params = shapes[ns.shape](cfg.seed)
    gen = generate_with_witness(params)
    write_generated(gen, cfg.out)
    _write(cfg.out / "params.json", json.dumps(gen.params.to_dict(), indent=1, sort_keys=True) + "\n")
    inst = gen.instance
    print(f"{len(inst.groups)} groups, {len(inst.sections)} sections, {len(inst.rooms)} rooms, "
          f"{len(inst.professors)} professors -> {cfg.out}")
    return EXIT_OK


COMMANDS = {"check-data": cmd_check_data, "subgroup": cmd_subgroup, "build": cmd_build,
            "solve": cmd_solve, "validate": cmd_validate, "report": cmd_report, "gen": cmd_gen}


def run(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command is None:
            parser.print_usage(sys.stderr)
            raise UsageError("a subcommand is required")
        cfg = _config(ns)
    except UsageError as exc:
        print(f"timetabling: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[ns.command](cfg, ns)
    except (IngestError, InstanceError, TipBuildError, IpaBuildError, GenerationError,
            DecodeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (IpaInfeasibleError, NoProgressError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SubgroupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (SolverFailure, VerificationError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
