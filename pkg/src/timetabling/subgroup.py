"""Refine student groups until every group fits into section capacities.

``build_ipa`` writes the bin-packing program that assigns whole groups to
sections and minimises total over-enrolment. ``run_subgroup`` solves it,
splits the largest group in the most overbooked section by the overflow and
repeats until nothing is over capacity.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Iterable

from .mipcore import Model, SolveResult, solve_exact
from .model import Group, Instance, group_section_options

log = logging.getLogger(__name__)


class IpaBuildError(ValueError):
    pass


class SubgroupError(RuntimeError):
    pass


class IpaInfeasibleError(SubgroupError):
    pass


class IterationLimitError(SubgroupError):
    pass


class NoProgressError(SubgroupError):
    pass


@dataclass
class IpaIndex:
    x_vars: dict[tuple[str, str], str]
    t_vars: dict[str, str]


@dataclass
class SplitRecord:
    iteration: int
    z: int
    section: str
    group: str
    sizes: tuple[int, int]
    new_ids: tuple[str, str]


@dataclass
class SubgroupResult:
    final_groups: list[Group]
    iterations: int
    history: list[SplitRecord]
    final_assignment: dict[tuple[str, str], int]
    z_trace: list[int] = field(default_factory=list)
    parents: dict[str, str] = field(default_factory=dict)

    def origin(self, group_id: str) -> str:
        """The original group a refined group descends from."""
        while group_id in self.parents:
            group_id = self.parents[group_id]
        return group_id

    def iteration_log(self) -> str:
        lines = ["iter,z,section,group,part"]
        for rec in self.history:
            lines.append(f"{rec.iteration},{rec.z},{rec.section},{rec.group},{rec.sizes[1]}")
        lines.append(f"{self.iterations},{self.z_trace[-1] if self.z_trace else 0},,,")
        return "\n".join(lines) + "\n"


def build_ipa(inst: Instance, groups: Iterable[Group]) -> tuple[Model, IpaIndex]:
    groups = sorted(groups, key=lambda g: g.id)
    if not groups:
        raise IpaBuildError("no groups to assign")
    sections = inst.sorted_sections()
    by_course: dict[str, list[str]] = {}
    for s in sections:
        by_course.setdefault(s.course, []).append(s.id)
    for g in groups:
        for c in sorted(g.curriculum):
            if not by_course.get(c):
                raise IpaBuildError(f"course {c} needed by group {g.id} has no sections")

    pairs = group_section_options(inst, groups)
    model = Model("ipa")
    x_vars: dict[tuple[str, str], str] = {}
    for g in groups:
        for s in sections:
            if (g.id, s.id) in pairs:
                x_vars[g.id, s.id] = model.add_binary(f"x({g.id},{s.id})")
    t_vars: dict[str, str] = {}
    for s in sections:
        load = sum(g.size for g in groups if (g.id, s.id) in pairs)
        t_vars[s.id] = model.add_integer(f"t({s.id})", 0, max(0, load - s.capacity))

    for g in groups:
        for c in sorted(g.curriculum):
            model.add_constraint(f"assign({g.id},{c})",
                                 [(1, x_vars[g.id, s]) for s in by_course[c]], "=", 1)
    for s in sections:
        terms = [(g.size, x_vars[g.id, s.id]) for g in groups if (g.id, s.id) in x_vars]
        model.add_constraint(f"cap({s.id})", terms + [(-1, t_vars[s.id])], "<=", s.capacity)
    for g in groups:
        for s0 in sections:
            if s0.is_lab or s0.labtie is None or (g.id, s0.id) not in x_vars:
                continue
            for s1 in sections:
                if s1.is_lab and s1.labtie == s0.labtie and (g.id, s1.id) in x_vars:
                    model.add_constraint(f"labtie({g.id},{s0.id},{s1.id})",
                                         [(1, x_vars[g.id, s0.id]), (-1, x_vars[g.id, s1.id])],
                                         ">=", 0)
    model.set_objective((1, v) for v in t_vars.values())
    return model, IpaIndex(x_vars, t_vars)


def split_group(g: Group, part: int, taken: Iterable[str] = ()) -> tuple[Group, Group]:
    """Split ``g`` into groups of sizes ``size - part`` and ``part``."""
    if not 1 <= part < g.size:
        raise SubgroupError(f"cannot split group {g.id} of size {g.size} off {part}")
    taken = set(taken)
    k = 1
    while f"{g.id}.{k}" in taken or f"{g.id}.{k + 1}" in taken:
        k += 2
    a = Group(f"{g.id}.{k}", g.size - part, g.curriculum, lineage=g.id)
    b = Group(f"{g.id}.{k + 1}", part, g.curriculum, lineage=g.id)
    return a, b


def run_subgroup(inst: Instance, solve: Callable[[Model], SolveResult] | None = None,
                 max_iter: int = 200, groups: Iterable[Group] | None = None) -> SubgroupResult:
    """Split groups until the assignment program reaches zero over-enrolment.

    Every program must be solved to proven optimality. Ties go to the smallest
    section id, then the smallest group id. The default solver keeps block
    optima between iterations, since a split only touches the blocks of the
    split group's courses.
    """
    if solve is None:
        solve = partial(solve_exact, cache={})
    current = sorted(groups if groups is not None else inst.groups.values(), key=lambda g: g.id)
    history: list[SplitRecord] = []
    z_trace: list[int] = []
    parents: dict[str, str] = {}
    used_ids = {g.id for g in current}

    for it in range(max_iter + 1):
        model, index = build_ipa(inst, current)
        res = solve(model)
        if res.status == "infeasible":
            raise IpaInfeasibleError("assignment program is infeasible; check labtie structure")
        if res.status != "optimal":
            raise SubgroupError(f"assignment program not solved to optimality ({res.status})")
        z = round(res.objective)
        if z_trace and z > z_trace[-1]:
            raise SubgroupError(f"over-enrolment rose from {z_trace[-1]} to {z}")
        z_trace.append(z)
        log.info("iteration %d: %d groups, z=%d", it, len(current), z)
        assignment = {k: int(round(res.assignment[v])) for k, v in index.x_vars.items()}
        if z == 0:
            return SubgroupResult(current, it, history, assignment, z_trace, parents)
        if it == max_iter:
            break

        t = {s: int(round(res.assignment[v])) for s, v in index.t_vars.items()}
        worst = max(t.values())
        r = min(s for s, v in t.items() if v == worst)
        sizes = {g.id: g for g in current}
        enrolled = sorted((sizes[g] for (g, s), v in assignment.items() if s == r and v),
                          key=lambda g: (-g.size, g.id))
        target = next((g for g in enrolled if g.size >= 2), None)
        if target is None:
            raise NoProgressError(f"section {r} is over capacity but holds only singleton groups")
        part = worst if target.size > worst else target.size // 2
        a, b = split_group(target, part, used_ids)
        used_ids |= {a.id, b.id}
        parents[a.id] = parents[b.id] = target.id
        history.append(SplitRecord(it, z, r, target.id, (a.size, b.size), (a.id, b.id)))
        current = sorted([g for g in current if g.id != target.id] + [a, b], key=lambda g: g.id)

    raise IterationLimitError(f"over-enrolment still {z_trace[-1]} after {max_iter} iterations")
