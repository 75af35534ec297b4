"""Check a decoded timetable directly, without the integer program.

Every hard family is re-checked by counting and set intersection over the
timetable's meetings and enrolments; the soft penalty is recomputed the same
way. Nothing here reads model variables, so the checks can be used as an
oracle for the model builder and for solutions from outside solvers.
"""

from __future__ import annotations

import csv
import io
import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .model import Instance, compatible_rooms, fulltime_professors
from .tip import Timetable, Weights

FAMILIES = tuple(f"H{i}" for i in range(1, 15))
AUDIT_TOL = 1e-6


class TimetableError(ValueError):
    """The timetable refers to unknown entities or impossible placements."""


@dataclass(frozen=True)
class Violation:
    family: str
    subject: tuple[str, ...]
    detail: str

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown constraint family {self.family!r}")


def check_structure(inst: Instance, tt: Timetable) -> None:
    grid = inst.grid
    for s, meets in tt.meetings.items():
        if s not in inst.sections:
            raise TimetableError(f"meetings for unknown section {s!r}")
        ok_rooms = {r.id for r in compatible_rooms(inst, inst.sections[s])}
        seen = set()
        for d, t, r in meets:
            if d not in grid.days or t not in grid.periods:
                raise TimetableError(f"section {s} meets outside the grid at {d}{t}")
            if r not in ok_rooms:
                raise TimetableError(f"section {s} placed in unsuitable room {r!r}")
            if (d, t, r) in seen:
                raise TimetableError(f"section {s} listed twice at {d}{t} in {r}")
            seen.add((d, t, r))
    for g, secs in tt.enrollments.items():
        if g not in inst.groups:
            raise TimetableError(f"enrolment for unknown group {g!r}")
        for s in secs:
            if s not in inst.sections:
                raise TimetableError(f"group {g} enrolled in unknown section {s!r}")
            if inst.sections[s].course not in inst.groups[g].curriculum:
                raise TimetableError(f"group {g} enrolled in {s}, whose course it does not take")
    for s in tt.over_capacity:
        if s not in inst.sections:
            raise TimetableError(f"over-capacity count for unknown section {s!r}")


def _slots(tt: Timetable, s: str) -> list[tuple[str, int]]:
    return [(d, t) for d, t, _ in tt.meetings.get(s, [])]


def _load(inst: Instance, tt: Timetable) -> dict[str, int]:
    load: Counter[str] = Counter()
    for g, secs in tt.enrollments.items():
        for s in secs:
            load[s] += inst.groups[g].size
    return load


def check_hard(inst: Instance, tt: Timetable, capacity_mode: str = "hard") -> list[Violation]:
    """All hard-constraint violations, in family order."""
    check_structure(inst, tt)
    grid = inst.grid
    secs = inst.sorted_sections()
    out: list[Violation] = []

    def bad(fam: str, subject, detail: str) -> None:
        out.append(Violation(fam, tuple(subject), detail))

    # H1
    for s in secs:
        n = len(tt.meetings.get(s.id, []))
        if n != s.periods:
            bad("H1", [s.id], f"meets {n} times, needs {s.periods}")
    # H2
    for a, b in itertools.combinations(secs, 2):
        if a.link is not None and a.link == b.link:
            if Counter(_slots(tt, a.id)) != Counter(_slots(tt, b.id)):
                bad("H2", [a.id, b.id], f"linked by {a.link} but meet at different times")
    # H3
    room_use: dict[tuple[str, int, str], list[str]] = defaultdict(list)
    for s in secs:
        for d, t, r in tt.meetings.get(s.id, []):
            room_use[d, t, r].append(s.id)
    for (d, t, r), who in sorted(room_use.items()):
        if len(who) > 1:
            bad("H3", [r, *who], f"room {r} double-booked at {d}{t}")
    # H4
    for s in secs:
        slots = Counter(_slots(tt, s.id))
        days = {d for d, _ in slots}
        for md in s.mandates:
            if md.period is None and md.day not in days:
                bad("H4", [s.id], f"mandated day {md.day} not used")
            elif md.period is not None and slots[md.day, md.period] != 1:
                bad("H4", [s.id], f"mandated slot {md} not used exactly once")
    # H5
    for s in secs:
        if not s.is_lab:
            per_day = Counter(d for d, _ in _slots(tt, s.id))
            for d, n in sorted(per_day.items()):
                if n > 1:
                    bad("H5", [s.id], f"meets {n} times on {d}")
    # H6
    blocks = grid.blocks()
    for s in secs:
        if not s.is_lab:
            continue
        by_day: dict[str, list[tuple[int, str]]] = defaultdict(list)
        for d, t, r in tt.meetings.get(s.id, []):
            by_day[d].append((t, r))
        for d, meets in sorted(by_day.items()):
            periods = sorted(t for t, _ in meets)
            rooms = {r for _, r in meets}
            if len(meets) != s.periods:
                bad("H6", [s.id], f"{len(meets)} of {s.periods} lab periods on {d}")
            elif len(rooms) > 1:
                bad("H6", [s.id], f"lab split over rooms {sorted(rooms)} on {d}")
            elif not any(all(p in b for p in periods) for b in blocks) or \
                    periods != list(range(periods[0], periods[0] + len(periods))):
                bad("H6", [s.id], f"lab periods {periods} on {d} not contiguous before/after lunch")
    # H7
    prof_use: dict[tuple[str, str, int], list[str]] = defaultdict(list)
    for s in secs:
        for d, t in _slots(tt, s.id):
            prof_use[s.prof, d, t].append(s.id)
    for (p, d, t), who in sorted(prof_use.items()):
        if len(who) > 1:
            bad("H7", [p, *who], f"professor {p} teaches {len(who)} meetings at {d}{t}")
    # H8
    for s in secs:
        for p in s.coprofs:
            for d, t in sorted(set(_slots(tt, s.id))):
                if prof_use.get((p, d, t)):
                    bad("H8", [p, s.id, *prof_use[p, d, t]],
                        f"co-professor {p} of {s.id} is teaching at {d}{t}")
    # H9
    for g in inst.sorted_groups():
        taken = Counter(inst.sections[s].course for s in tt.enrollments.get(g.id, ()))
        for c in sorted(g.curriculum):
            if taken[c] != 1:
                bad("H9", [g.id, c], f"enrolled in {taken[c]} sections of {c}")
    # H10
    for g in inst.sorted_groups():
        busy: dict[tuple[str, int], list[str]] = defaultdict(list)
        for s in sorted(tt.enrollments.get(g.id, ())):
            for slot in _slots(tt, s):
                busy[slot].append(s)
        for (d, t), who in sorted(busy.items(), key=lambda kv: (grid.day_index(kv[0][0]), kv[0][1])):
            if len(who) > 1:
                bad("H10", [g.id, *who], f"group {g.id} has {len(who)} meetings at {d}{t}")
    # H11
    for g in inst.sorted_groups():
        mine = tt.enrollments.get(g.id, set())
        for s1 in sorted(mine):
            lab = inst.sections[s1]
            if not lab.is_lab or lab.labtie is None:
                continue
            for s0 in secs:
                if (not s0.is_lab and s0.labtie == lab.labtie and s0.course in inst.groups[g.id].curriculum
                        and s0.id not in mine):
                    bad("H11", [g.id, s1, s0.id], f"in lab {s1} but not in tied section {s0.id}")
    # H12
    if capacity_mode == "hard":
        load = _load(inst, tt)
        for s in secs:
            if load[s.id] > s.capacity:
                bad("H12", [s.id], f"load {load[s.id]} exceeds capacity {s.capacity}")
    # H13 and H14
    lunch = grid.lunch_boundary[0]
    for g in inst.sorted_groups():
        mine = sorted(tt.enrollments.get(g.id, ()))
        tied = [inst.sections[s] for s in mine if inst.sections[s].labtie is not None]
        for a, b in itertools.combinations(tied, 2):
            if a.labtie != b.labtie:
                continue
            per_day = Counter(d for s in (a, b) for d, _ in _slots(tt, s.id))
            for d, n in sorted(per_day.items()):
                if n > 4:
                    bad("H13", [g.id, a.id, b.id], f"{n} tied periods on {d}")
        for a, b in itertools.permutations(tied, 2):
            if a.labtie != b.labtie:
                continue
            sa, sb = set(_slots(tt, a.id)), set(_slots(tt, b.id))
            for d, t in sorted(sa, key=lambda x: (grid.day_index(x[0]), x[1])):
                if t != lunch and (d, t + 1) in sb:
                    out.append(Violation("H14", (g.id, a.id, b.id),
                                         f"{b.id} starts right after {a.id} on {d} period {t}"))
    fam_order = {f: i for i, f in enumerate(FAMILIES)}
    out.sort(key=lambda v: fam_order[v.family])
    return out


@dataclass
class PenaltyBreakdown:
    availability: dict[tuple[str, str, int], float] = field(default_factory=dict)
    first_last: dict[tuple[str, str], float] = field(default_factory=dict)
    meeting_day: dict[str, float] = field(default_factory=dict)
    spread2: dict[tuple[str, str], float] = field(default_factory=dict)
    spread3: dict[tuple[str, str], float] = field(default_factory=dict)
    day_off: dict[str, float] = field(default_factory=dict)
    over_capacity: dict[str, float] = field(default_factory=dict)

    def terms(self) -> dict[str, float]:
        return {"t0": sum(self.availability.values()), "t4": sum(self.first_last.values()),
                "ttue": sum(self.meeting_day.values()), "tgp2": sum(self.spread2.values()),
                "tgp3": sum(self.spread3.values()), "t5": sum(self.day_off.values()),
                "ts": sum(self.over_capacity.values())}

    @property
    def total(self) -> float:
        return sum(self.terms().values())


def score_soft(inst: Instance, tt: Timetable, weights: Weights | None = None,
               capacity_mode: str = "hard") -> PenaltyBreakdown:
    """Recompute every soft penalty from meetings and enrolments."""
    w = weights or Weights()
    grid = inst.grid
    days, periods = grid.days, grid.periods
    pen = PenaltyBreakdown()

    teaching: dict[str, set[tuple[str, int]]] = defaultdict(set)
    present: dict[str, set[tuple[str, int]]] = defaultdict(set)
    for s in inst.sorted_sections():
        for slot in _slots(tt, s.id):
            teaching[s.prof].add(slot)
            present[s.prof].add(slot)
            for p in s.coprofs:
                present[p].add(slot)

    for p in inst.sorted_professors():
        for d in days:
            for t in periods:
                a = p.avail(grid, d, t)
                if a <= 0 and (d, t) in present[p.id]:
                    coef = w.c0 * 10.0 ** (-a)
                    pen.availability[p.id, d, t] = coef * w.adjunct_multiplier if p.is_adjunct else coef
        on_days = {d for d, _ in teaching[p.id]}
        for d in days:
            if (d, periods[0]) in teaching[p.id] and (d, periods[-1]) in teaching[p.id]:
                pen.first_last[p.id, d] = w.d4
        if len(on_days) > len(days) - 1:
            pen.day_off[p.id] = w.d5
    for p in sorted(fulltime_professors(inst)):
        if w.meeting_day not in {d for d, _ in teaching[p]}:
            pen.meeting_day[p] = w.dtue

    for s in inst.sorted_sections():
        if s.is_lab or s.periods not in (2, 3):
            continue
        met = {d for d, _ in _slots(tt, s.id)}
        window = s.periods
        for i in range(len(days) - window + 1):
            run = days[i:i + window]
            if all(d in met for d in run):
                target = pen.spread2 if window == 2 else pen.spread3
                target[s.id, run[0]] = w.dgp2 if window == 2 else w.dgp3

    if capacity_mode == "soft":
        load = _load(inst, tt)
        for s in inst.sorted_sections():
            over = load[s.id] - s.capacity
            if over > 0:
                pen.over_capacity[s.id] = over * (w.ct_lab if s.is_lab else w.ct_regular)
    return pen


@dataclass
class AuditReport:
    ok: bool
    recomputed: float
    claimed: float | None
    violations: list[Violation]
    breakdown: PenaltyBreakdown
    error: str = ""

    def summary(self) -> str:
        head = "ok" if self.ok else "FAILED"
        lines = [f"audit: {head}", f"claimed objective: {self.claimed}",
                 f"recomputed objective: {self.recomputed:.10g}",
                 f"hard violations: {len(self.violations)}"]
        if self.error:
            lines.append(f"structural error: {self.error}")
        for k, v in self.breakdown.terms().items():
            lines.append(f"  {k}: {v:.10g}")
        return "\n".join(lines) + "\n"


def audit(inst: Instance, tt: Timetable, weights: Weights | None = None,
          claimed_objective: float | None = None, capacity_mode: str = "hard") -> AuditReport:
    try:
        violations = check_hard(inst, tt, capacity_mode)
    except TimetableError as exc:
        return AuditReport(False, float("nan"), claimed_objective, [], PenaltyBreakdown(), str(exc))
    pen = score_soft(inst, tt, weights, capacity_mode)
    rec = pen.total
    ok = not violations and claimed_objective is not None and abs(rec - claimed_objective) <= AUDIT_TOL
    return AuditReport(ok, rec, claimed_objective, violations, pen)


def violations_csv(violations: list[Violation]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["family", "subject", "detail"])
    for v in violations:
        wr.writerow([v.family, ";".join(v.subject), v.detail])
    return buf.getvalue()
