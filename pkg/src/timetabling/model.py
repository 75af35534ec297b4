"""Domain types for the timetabling problem and the index sets derived from them."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

DAYS = ("M", "T", "W", "R", "F")
PERIODS = (1, 2, 3, 4, 5, 6, 7)
AVAILABILITY_VALUES = frozenset({1, 0, -1, -2})
MAX_MANDATES = 6
MAX_COPROFS = 6
FULLTIME_HOURS = 9

# Identifiers end up inside LP variable names, so they are restricted to
# characters every CPLEX-LP reader accepts and that our name syntax does not use.
_ID_RE = re.compile(r"^[A-Za-z0-9_.]+$")


class InstanceError(ValueError):
    """Raised when domain objects are inconsistent or reference unknown entities."""


def check_id(value: str, what: str = "identifier") -> str:
    if not isinstance(value, str) or not _ID_RE.match(value):
        raise InstanceError(f"invalid {what} {value!r}: use letters, digits, '_' or '.'")
    return value


@dataclass(frozen=True)
class TimeGrid:
    days: tuple[str, ...] = DAYS
    periods: tuple[int, ...] = PERIODS
    lunch_boundary: tuple[int, int] = (4, 5)

    def __post_init__(self):
        if len(self.days) != 5 or len(set(self.days)) != 5:
            raise InstanceError("time grid needs exactly 5 distinct days")
        if tuple(self.periods) != PERIODS:
            raise InstanceError("time grid needs periods 1..7")
        a, b = self.lunch_boundary
        if b != a + 1 or a not in self.periods or b not in self.periods:
            raise InstanceError(f"bad lunch boundary {self.lunch_boundary}")

    @property
    def slots(self) -> list[tuple[str, int]]:
        return [(d, t) for d in self.days for t in self.periods]

    def day_index(self, day: str) -> int:
        return self.days.index(day)

    def next_day(self, day: str) -> str | None:
        """The following teaching day, or ``None`` for the last day of the week."""
        i = self.days.index(day)
        return self.days[i + 1] if i + 1 < len(self.days) else None

    def blocks(self) -> list[tuple[int, ...]]:
        """Runs of periods not interrupted by lunch, e.g. ``[(1,2,3,4), (5,6,7)]``."""
        cut = self.periods.index(self.lunch_boundary[1])
        return [tuple(self.periods[:cut]), tuple(self.periods[cut:])]


@dataclass(frozen=True)
class Room:
    id: str
    capacity: int
    room_type: str

    def __post_init__(self):
        check_id(self.id, "room id")
        if self.capacity < 0:
            raise InstanceError(f"room {self.id}: negative capacity")
        if not self.room_type:
            raise InstanceError(f"room {self.id}: empty room type")


@dataclass(frozen=True)
class Professor:
    """A professor with a 5x7 availability matrix indexed ``[day][period-1]``.

    1 means available, 0 prefers not, -1 important not to, -2 cannot teach.
    """

    id: str
    availability: tuple[tuple[int, ...], ...] = ((1,) * 7,) * 5
    is_adjunct: bool = False

    def __post_init__(self):
        check_id(self.id, "professor id")
        if len(self.availability) != 5 or any(len(row) != 7 for row in self.availability):
            raise InstanceError(f"professor {self.id}: availability must be 5x7")
        for row in self.availability:
            for v in row:
                if v not in AVAILABILITY_VALUES:
                    raise InstanceError(f"professor {self.id}: availability value {v!r}")

    def avail(self, grid: TimeGrid, day: str, period: int) -> int:
        return self.availability[grid.day_index(day)][period - 1]


@dataclass(frozen=True)
class Course:
    id: str
    periods: int

    def __post_init__(self):
        check_id(self.id, "course id")
        if not 1 <= self.periods <= 5:
            raise InstanceError(f"course {self.id}: periods must be in 1..5")


@dataclass(frozen=True)
class Mandate:
    """A required meeting: a day and period, or a whole day when ``period`` is None."""

    day: str
    period: int | None = None

    def __str__(self):
        return f"{self.day}:{'*' if self.period is None else self.period}"


@dataclass(frozen=True)
class Section:
    id: str
    prof: str
    course: str
    periods: int
    is_lab: bool = False
    capacity: int = 0
    room_type: str = ""
    final_exam: str | None = None
    labtie: int | None = None
    mandates: tuple[Mandate, ...] = ()
    coprofs: tuple[str, ...] = ()
    is_adjunct_taught: bool = False
    link: int | None = None

    def __post_init__(self):
        check_id(self.id, "section id")
        if not 1 <= self.periods <= 5:
            raise InstanceError(f"section {self.id}: periods must be in 1..5")
        if self.capacity < 0:
            raise InstanceError(f"section {self.id}: negative capacity")
        if len(self.mandates) > MAX_MANDATES:
            raise InstanceError(f"section {self.id}: more than {MAX_MANDATES} mandates")
        if len(self.coprofs) > MAX_COPROFS:
            raise InstanceError(f"section {self.id}: more than {MAX_COPROFS} co-professors")
        for name, v in (("labtie", self.labtie), ("link", self.link)):
            if v is not None and v <= 0:
                raise InstanceError(f"section {self.id}: {name} must be a positive integer")


@dataclass(frozen=True)
class Group:
    id: str
    size: int
    curriculum: frozenset[str]
    lineage: str | None = None

    def __post_init__(self):
        check_id(self.id, "group id")
        if self.size < 1:
            raise InstanceError(f"group {self.id}: size must be >= 1")
        if not self.curriculum:
            raise InstanceError(f"group {self.id}: empty curriculum")
        object.__setattr__(self, "curriculum", frozenset(self.curriculum))


@dataclass(frozen=True)
class Instance:
    """The full problem. Mappings are keyed by id and must not be mutated."""

    rooms: Mapping[str, Room]
    professors: Mapping[str, Professor]
    courses: Mapping[str, Course]
    sections: Mapping[str, Section]
    groups: Mapping[str, Group]
    grid: TimeGrid = field(default_factory=TimeGrid)

    def __post_init__(self):
        for kind, table in (("room", self.rooms), ("professor", self.professors),
                            ("course", self.courses), ("section", self.sections),
                            ("group", self.groups)):
            for key, obj in table.items():
                if key != obj.id:
                    raise InstanceError(f"{kind} keyed {key!r} has id {obj.id!r}")
        types = self.room_types
        for s in self.sections.values():
            if s.prof not in self.professors:
                raise InstanceError(f"section {s.id}: unknown professor {s.prof!r}")
            if s.course not in self.courses:
                raise InstanceError(f"section {s.id}: unknown course {s.course!r}")
            if s.room_type not in types:
                raise InstanceError(f"section {s.id}: unknown room type {s.room_type!r}")
            for p in s.coprofs:
                if p not in self.professors:
                    raise InstanceError(f"section {s.id}: unknown co-professor {p!r}")
            for m in s.mandates:
                if m.day not in self.grid.days or (m.period is not None
                                                   and m.period not in self.grid.periods):
                    raise InstanceError(f"section {s.id}: mandate {m} outside the time grid")
        for g in self.groups.values():
            for c in g.curriculum:
                if c not in self.courses:
                    raise InstanceError(f"group {g.id}: unknown course {c!r}")

    @property
    def room_types(self) -> frozenset[str]:
        return frozenset(r.room_type for r in self.rooms.values())

    def sorted_sections(self) -> list[Section]:
        return [self.sections[k] for k in sorted(self.sections)]

    def sorted_rooms(self) -> list[Room]:
        return [self.rooms[k] for k in sorted(self.rooms)]

    def sorted_professors(self) -> list[Professor]:
        return [self.professors[k] for k in sorted(self.professors)]

    def sorted_groups(self) -> list[Group]:
        return [self.groups[k] for k in sorted(self.groups)]

    def sections_of_course(self, course: str) -> list[Section]:
        return [s for s in self.sorted_sections() if s.course == course]

    def sections_of_prof(self, prof: str) -> list[Section]:
        return [s for s in self.sorted_sections() if s.prof == prof]

    def with_groups(self, groups: Iterable[Group]) -> "Instance":
        return Instance(self.rooms, self.professors, self.courses, self.sections,
                        {g.id: g for g in groups}, self.grid)


def forbidden_lab_triples(grid: TimeGrid) -> set[tuple[int, int, int]]:
    """Period triples a three-period lab may not occupy."""
    allowed = {w for block in grid.blocks()
               for w in zip(block, block[1:], block[2:])}
    return set(itertools.combinations(grid.periods, 3)) - allowed


def forbidden_lab_pairs(grid: TimeGrid) -> set[tuple[int, int]]:
    """Period pairs a two-period lab may not occupy (non-adjacent or split by lunch)."""
    allowed = {w for block in grid.blocks() for w in zip(block, block[1:])}
    return set(itertools.combinations(grid.periods, 2)) - allowed


def teaching_load(inst: Instance) -> dict[str, int]:
    load = {p: 0 for p in inst.professors}
    for s in inst.sections.values():
        load[s.prof] += s.periods
    return load


def fulltime_professors(inst: Instance, threshold: int = FULLTIME_HOURS) -> set[str]:
    return {p for p, hours in teaching_load(inst).items() if hours >= threshold}


def compatible_rooms(inst: Instance, section: Section) -> list[Room]:
    return [r for r in inst.sorted_rooms()
            if r.room_type == section.room_type and section.capacity <= r.capacity]


def candidate_assignments(inst: Instance) -> set[tuple[str, str, int, str]]:
    """All (section, day, period, room) tuples with a suitable room."""
    out = set()
    for s in inst.sections.values():
        for r in compatible_rooms(inst, s):
            out.update((s.id, d, t, r.id) for d, t in inst.grid.slots)
    return out


def group_section_options(inst: Instance, groups: Iterable[Group]) -> set[tuple[str, str]]:
    """Pairs (group, section) where the section's course is in the group's curriculum."""
    by_course: dict[str, list[str]] = {}
    for s in inst.sections.values():
        by_course.setdefault(s.course, []).append(s.id)
    return {(g.id, s) for g in groups for c in g.curriculum for s in by_course.get(c, ())}
