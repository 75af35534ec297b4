"""Seeded synthetic instances that are feasible by construction.

The generator first lays out a hidden timetable and only then derives the
tables from it. All sections of a course meet at the same slots (in different
rooms, with different professors), and courses that share a group never
overlap. Any assignment of groups to sections that respects capacities and
labties is therefore clash-free, so every zero-overflow refinement found by
the subgroup pass completes the hidden meetings to a feasible timetable.
"""

from __future__ import annotations

import csv
import io
import math
import random
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .ingest import write_instance
from .model import Course, Group, Instance, Mandate, Professor, Room, Section, TimeGrid
from .tip import Timetable


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class GenParams:
    n_groups: int = 2
    group_size_range: tuple[int, int] = (5, 20)
    n_courses: int = 2
    sections_per_course_range: tuple[int, int] = (1, 3)
    capacity_range: tuple[int, int] = (8, 30)
    n_professors: int = 3
    n_rooms: int = 3
    room_type_count: int = 1
    lab_fraction: float = 0.0
    availability_block_fraction: float = 0.2
    curriculum_size_range: tuple[int, int] = (1, 2)
    seed: int = 0
    course_periods_range: tuple[int, int] = (2, 3)
    capacity_slack: float = 1.1
    mandate_fraction: float = 0.0
    coprof_fraction: float = 0.0
    link_fraction: float = 0.0
    adjunct_fraction: float = 0.0
    dense: bool = False
    n_programs: int = 0  # >0: groups draw curricula from this many shared programs
    max_tries: int = 300
    restarts: int = 20  # whole-attempt retries when greedy placement dead-ends

    def __post_init__(self):
        for name in ("group_size_range", "sections_per_course_range", "capacity_range",
                     "curriculum_size_range", "course_periods_range"):
            lo, hi = getattr(self, name)
            if not 1 <= lo <= hi:
                raise ValueError(f"{name} must satisfy 1 <= lo <= hi, got {(lo, hi)}")
        for name in ("lab_fraction", "availability_block_fraction", "mandate_fraction",
                     "coprof_fraction", "link_fraction", "adjunct_fraction"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if min(self.n_groups, self.n_courses, self.n_professors, self.n_rooms, self.room_type_count) < 1:
            raise ValueError("counts must be positive")
        if self.course_periods_range[1] > 5:
            raise ValueError("a lecture meets at most once a day, so at most 5 periods")
        if self.restarts < 1 or self.max_tries < 1:
            raise ValueError("restarts and max_tries must be positive")
        if self.capacity_slack < 1:
            raise ValueError("capacity_slack must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


def registrar_shape(seed: int) -> GenParams:
    """33 groups of 1..60 students over sections seating 8..30."""
    return GenParams(n_groups=33, group_size_range=(1, 60), n_courses=40,
                     sections_per_course_range=(1, 30), capacity_range=(8, 30),
                     n_professors=150, n_rooms=60, room_type_count=2, lab_fraction=0.1,
                     availability_block_fraction=0.2, curriculum_size_range=(4, 6),
                     course_periods_range=(2, 4), n_programs=10, seed=seed)


def toy_shape(seed: int) -> GenParams:
    """Small enough for the built-in branch and bound to prove optimality."""
    return GenParams(n_groups=3, group_size_range=(4, 20), n_courses=3,
                     sections_per_course_range=(1, 2), capacity_range=(10, 20),
                     n_professors=3, n_rooms=2, room_type_count=1, lab_fraction=0.0,
                     availability_block_fraction=0.5, curriculum_size_range=(2, 3),
                     course_periods_range=(2, 3), mandate_fraction=0.2,
                     coprof_fraction=0.2, adjunct_fraction=0.3, seed=seed)


def scale_shape(seed: int) -> GenParams:
    """About 25k rows and 30k columns once built: a build-only size, not a solve target."""
    return GenParams(n_groups=16, group_size_range=(5, 25), n_courses=18,
                     sections_per_course_range=(1, 6), capacity_range=(10, 30),
                     n_professors=30, n_rooms=14, room_type_count=2, lab_fraction=0.15,
                     availability_block_fraction=0.2, curriculum_size_range=(3, 5),
                     course_periods_range=(2, 4), mandate_fraction=0.1, coprof_fraction=0.1,
                     link_fraction=0.05, adjunct_fraction=0.2, n_programs=4, seed=seed)


@dataclass
class Generated:
    instance: Instance
    witness: dict[str, list[tuple[str, int, str]]]
    params: GenParams = field(default_factory=GenParams)


def _beta_int(rng: random.Random, lo: int, hi: int, a: float, b: float) -> int:
    return lo + int(round((hi - lo) * rng.betavariate(a, b)))


def _dense_courses(grid: TimeGrid) -> list[tuple[int, list[tuple[str, int]]]]:
    """Courses tiling the week: per period, one course on M/W/F and one on T/R."""
    out = []
    for t in grid.periods:
        for days in (("M", "W", "F"), ("T", "R")):
            out.append((len(days), [(d, t) for d in days]))
    return out


def generate_with_witness(params: GenParams) -> Generated:
    # greedy placement can dead-end; restart with derived streams, deterministically
    last = None
    for attempt in range(params.restarts):
        rng = random.Random(params.seed if attempt == 0 else f"{params.seed}/{attempt}")
        try:
            return _attempt(params, rng)
        except GenerationError as exc:
            last = exc
    raise last


def _attempt(params: GenParams, rng: random.Random) -> Generated:
    grid = TimeGrid()

    # courses and curricula
    dense_pat = _dense_courses(grid) if params.dense else None
    n_lect = len(dense_pat) if dense_pat else params.n_courses
    width = len(str(n_lect))
    lectures = [f"C{i:0{width}d}" for i in range(1, n_lect + 1)]
    periods = {c: (dense_pat[i][0] if dense_pat else rng.randint(*params.course_periods_range))
               for i, c in enumerate(lectures)}
    lab_of: dict[str, str] = {}
    if not params.dense:
        for c in lectures:
            if rng.random() < params.lab_fraction:
                lab_of[c] = c + "L"
                periods[c + "L"] = rng.choice((2, 3))
    is_lab = {c: c in lab_of.values() for c in periods}

    def draw_curriculum() -> list[str]:
        k = min(rng.randint(*params.curriculum_size_range), n_lect)
        return rng.sample(lectures, k)

    programs = [draw_curriculum() for _ in range(params.n_programs)] if not params.dense else []
    gw = len(str(params.n_groups))
    groups: list[Group] = []
    for i in range(1, params.n_groups + 1):
        size = _beta_int(rng, *params.group_size_range, 1.2, 2.6)
        if params.dense:
            chosen = list(lectures)
        elif programs:
            chosen = rng.choice(programs)
        else:
            chosen = draw_curriculum()
        curr = set(chosen) | {lab_of[c] for c in chosen if c in lab_of}
        groups.append(Group(f"G{i:0{gw}d}", size, frozenset(curr)))

    courses = sorted(periods)
    demand = {c: sum(g.size for g in groups if c in g.curriculum) for c in courses}
    lo_cap, hi_cap = params.capacity_range
    cap = {}
    n_sec = {}
    for c in lectures:
        cap[c] = hi_cap - int(round((hi_cap - lo_cap) * rng.betavariate(1.0, 3.0)))
        n = max(params.sections_per_course_range[0], math.ceil(demand[c] * params.capacity_slack / cap[c]))
        if n > params.sections_per_course_range[1]:
            # raise the shared capacity rather than fail when the range allows it
            need = math.ceil(demand[c] * params.capacity_slack / params.sections_per_course_range[1])
            if need > hi_cap:
                raise GenerationError(f"course {c}: demand {demand[c]} needs more than "
                                      f"{params.sections_per_course_range[1]} sections")
            cap[c], n = need, params.sections_per_course_range[1]
        n_sec[c] = n
        if c in lab_of:
            cap[lab_of[c]], n_sec[lab_of[c]] = cap[c], n

    # room types
    lect_types = ["LEC"] + [f"SEM{i}" for i in range(1, params.room_type_count - (1 if lab_of else 0))]
    ctype = {c: ("LAB" if is_lab[c] else rng.choice(lect_types)) for c in courses}
    types = sorted(set(ctype.values()))
    if len(types) > params.n_rooms:
        raise GenerationError("fewer rooms than room types")
    use = {rt: sum(n_sec[c] * periods[c] for c in courses if ctype[c] == rt) for rt in types}
    peak = {rt: max(n_sec[c] for c in courses if ctype[c] == rt) for rt in types}
    n_of = {rt: peak[rt] for rt in types}
    spare = params.n_rooms - sum(n_of.values())
    if spare < 0:
        raise GenerationError(f"{params.n_rooms} rooms cannot host simultaneous sections ({sum(n_of.values())} needed)")
    total_use = sum(use.values())
    for rt in types:
        n_of[rt] += int(spare * use[rt] / total_use)
    left = params.n_rooms - sum(n_of.values())
    for rt in sorted(types, key=lambda r: -use[r])[:left]:
        n_of[rt] += 1
    rooms: list[Room] = []
    for rt in types:
        for k in range(1, n_of[rt] + 1):
            rooms.append(Room(f"{rt}{k:02d}", rng.randint(hi_cap, hi_cap + 10), rt))
    rooms_by_type = {rt: [r.id for r in rooms if r.room_type == rt] for rt in types}

    pw = len(str(params.n_professors))
    profs = [f"P{i:0{pw}d}" for i in range(1, params.n_professors + 1)]

    # hidden timetable
    neighbours: dict[str, set[str]] = defaultdict(set)
    for g in groups:
        for a in g.curriculum:
            neighbours[a] |= g.curriculum - {a}
    course_slots: dict[str, list[tuple[str, int]]] = {}
    room_busy: set[tuple[str, str, int]] = set()
    prof_busy: dict[str, set[tuple[str, int]]] = defaultdict(set)
    load: dict[str, int] = defaultdict(int)
    meetings: dict[str, list[tuple[str, int, str]]] = {}
    sec_prof: dict[str, str] = {}
    lecture_of = {lab: lec for lec, lab in lab_of.items()}
    sw = max(len(str(n)) for n in n_sec.values())

    def sec_ids(c):
        return [f"{c}_{k:0{sw}d}" for k in range(1, n_sec[c] + 1)]

    def pattern(c):
        blocked = {s for n in neighbours[c] for s in course_slots.get(n, ())}
        k = periods[c]
        if is_lab[c]:
            lec = course_slots.get(lecture_of[c], [])
            opts = []
            for d in grid.days:
                for block in grid.blocks():
                    for i in range(len(block) - k + 1):
                        run = [(d, t) for t in block[i:i + k]]
                        if any(s in blocked for s in run):
                            continue
                        edge = {(d, run[0][1] - 1), (d, run[-1][1] + 1)} - {(d, block[0] - 1), (d, block[-1] + 1)}
                        if edge & set(lec):
                            continue
                        opts.append(run)
            return rng.choice(opts) if opts else None
        days = [d for d in grid.days if any((d, t) not in blocked for t in grid.periods)]
        if len(days) < k:
            return None
        chosen = sorted(rng.sample(days, k), key=grid.day_index)
        return [(d, rng.choice([t for t in grid.periods if (d, t) not in blocked])) for d in chosen]

    order = sorted(lectures, key=lambda c: (-len(neighbours[c]) - n_sec[c], c))
    order = [x for c in order for x in ([c, lab_of[c]] if c in lab_of else [c])]
    for i, c in enumerate(order):
        for _ in range(params.max_tries):
            pat = dense_pat[lectures.index(c)][1] if dense_pat else pattern(c)
            if pat is None:
                break
            plan = _place(c, pat, sec_ids(c), is_lab[c], rooms_by_type[ctype[c]], room_busy,
                          prof_busy, load, profs, rng)
            if plan is not None:
                break
            if dense_pat:
                pat = None
                break
        else:
            plan = None
        if pat is None or plan is None:
            raise GenerationError(f"could not place course {c} in the hidden timetable")
        course_slots[c] = pat
        for sid, (prof, meets) in plan.items():
            sec_prof[sid] = prof
            meetings[sid] = meets
            load[prof] += len(meets)
            for d, t, r in meets:
                room_busy.add((r, d, t))
                prof_busy[prof].add((d, t))

    # decorations that the hidden timetable already satisfies
    sections: list[Section] = []
    present: dict[str, set[tuple[str, int]]] = {p: set(s) for p, s in prof_busy.items()}
    link_id = 0
    tie_id = 0
    link_of: dict[str, int] = {}
    tie_of: dict[str, int] = {}
    for c in lectures:
        ids = sec_ids(c)
        if len(ids) >= 2 and rng.random() < params.link_fraction:
            link_id += 1
            link_of[ids[0]] = link_of[ids[1]] = link_id
        if c in lab_of:
            for a, b in zip(ids, sec_ids(lab_of[c])):
                tie_id += 1
                tie_of[a] = tie_of[b] = tie_id
    adjuncts = {p for p in profs if p in load and rng.random() < params.adjunct_fraction}
    for c in courses:
        for sid in sec_ids(c):
            meets = meetings[sid]
            mandates: tuple[Mandate, ...] = ()
            if rng.random() < params.mandate_fraction:
                d, t, _ = rng.choice(meets)
                mandates = (Mandate(d, t) if rng.random() < 0.5 else Mandate(d, None),)
            coprofs: tuple[str, ...] = ()
            if rng.random() < params.coprof_fraction:
                times = {(d, t) for d, t, _ in meets}
                free = [p for p in profs if p != sec_prof[sid] and not (prof_busy[p] & times)]
                if free:
                    p = rng.choice(free)
                    coprofs = (p,)
                    present.setdefault(p, set()).update(times)
            sections.append(Section(sid, sec_prof[sid], c, periods[c], is_lab[c], cap[c], ctype[c],
                                    None, tie_of.get(sid), mandates, coprofs,
                                    sec_prof[sid] in adjuncts, link_of.get(sid)))

    professors: list[Professor] = []
    for p in profs:
        here = present.get(p, set())
        grid_rows = []
        for d in grid.days:
            row = []
            for t in grid.periods:
                if (d, t) in here or rng.random() >= params.availability_block_fraction:
                    row.append(1)
                else:
                    row.append(rng.choice((0, -1, -2)))
            grid_rows.append(tuple(row))
        professors.append(Professor(p, tuple(grid_rows), p in adjuncts))

    inst = Instance({r.id: r for r in rooms}, {p.id: p for p in professors},
                    {c: Course(c, periods[c]) for c in courses},
                    {s.id: s for s in sections}, {g.id: g for g in groups}, grid)
    for s in meetings:
        meetings[s].sort(key=lambda m: (grid.day_index(m[0]), m[1], m[2]))
    return Generated(inst, dict(sorted(meetings.items())), params)


def _place(course, pat, ids, lab, type_rooms, room_busy, prof_busy, load, profs, rng):
    """Rooms and professors for every section of a course at the given slots."""
    plan = {}
    taken_rooms: set[tuple[str, str, int]] = set()
    taken_profs: set[str] = set()
    times = set(pat)
    for sid in ids:
        free_profs = [p for p in profs if p not in taken_profs and not (prof_busy[p] & times)]
        if not free_profs:
            return None
        low = min(load[p] for p in free_profs)
        prof = rng.choice([p for p in free_profs if load[p] == low])
        meets = []
        if lab:
            ok = [r for r in type_rooms
                  if all((r, d, t) not in room_busy and (r, d, t) not in taken_rooms for d, t in pat)]
            if not ok:
                return None
            r = rng.choice(ok)
            meets = [(d, t, r) for d, t in pat]
        else:
            for d, t in pat:
                ok = [r for r in type_rooms if (r, d, t) not in room_busy and (r, d, t) not in taken_rooms]
                if not ok:
                    return None
                meets.append((d, t, rng.choice(ok)))
        for d, t, r in meets:
            taken_rooms.add((r, d, t))
        taken_profs.add(prof)
        plan[sid] = (prof, meets)
    return plan


def generate(params: GenParams) -> Instance:
    return generate_with_witness(params).instance


def witness_timetable(inst: Instance, meetings: dict[str, list[tuple[str, int, str]]],
                      enrollments: dict[tuple[str, str], int] | dict[str, set[str]]) -> Timetable:
    """Hidden meetings plus any group-to-section assignment."""
    if enrollments and isinstance(next(iter(enrollments)), tuple):
        enr: dict[str, set[str]] = defaultdict(set)
        for (g, s), v in enrollments.items():  # type: ignore[misc]
            if v:
                enr[g].add(s)
    else:
        enr = {g: set(v) for g, v in enrollments.items()}  # type: ignore[union-attr]
    grid_of = defaultdict(set)
    for s, meets in meetings.items():
        for d, t, _ in meets:
            grid_of[inst.sections[s].prof].add((d, t))
    return Timetable({s: list(m) for s, m in meetings.items()}, dict(enr), dict(grid_of), {})


def witness_csv(meetings: dict[str, list[tuple[str, int, str]]]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["section_id", "day", "period", "room_id"])
    for s in sorted(meetings):
        for d, t, r in meetings[s]:
            wr.writerow([s, d, t, r])
    return buf.getvalue()


def read_witness(path) -> dict[str, list[tuple[str, int, str]]]:
    out: dict[str, list[tuple[str, int, str]]] = defaultdict(list)
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out[row["section_id"]].append((row["day"], int(row["period"]), row["room_id"]))
    return dict(out)


def write_generated(gen: Generated, directory) -> Path:
    d = Path(directory)
    write_instance(gen.instance, d)
    (d / "witness.csv").write_text(witness_csv(gen.witness), encoding="utf-8")
    return d


__all__ = ["GenParams", "Generated", "GenerationError", "generate", "generate_with_witness",
           "registrar_shape", "scale_shape", "toy_shape", "read_witness", "witness_csv",
           "witness_timetable", "write_generated"]
