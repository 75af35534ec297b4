"""Read and write the registrar tables, and check them for obvious infeasibility.

Files are UTF-8 CSV with a header row:

* ``groups.csv``: ``group_id,size,course_1,...`` with a variable-width tail
* ``sections.csv``: ``section_id,prof,course,periods,lab,capacity,room_type,
  labtie,link,adjunct,mandates,coprofs`` (``final`` is accepted and kept)
* ``rooms.csv``: ``room_id,capacity,room_type``
* ``availability.csv``: ``prof,day,p1..p7``, one row per professor and day,
  blank cells meaning 1
* ``courses.csv`` (optional): ``course_id,periods``
"""

from __future__ import annotations

import csv
import io
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .model import (
    AVAILABILITY_VALUES,
    Course,
    Group,
    Instance,
    InstanceError,
    Mandate,
    Professor,
    Room,
    Section,
    TimeGrid,
    compatible_rooms,
)
from .tip import Weights

log = logging.getLogger(__name__)

SECTION_COLUMNS = ("section_id", "prof", "course", "periods", "lab", "capacity", "room_type",
                   "labtie", "link", "adjunct", "mandates", "coprofs")
SECTION_REQUIRED = SECTION_COLUMNS[:7]
SECTION_EXTRA = ("final",)
ROOM_COLUMNS = ("room_id", "capacity", "room_type")
COURSE_COLUMNS = ("course_id", "periods")

ISSUE_CODES = {
    "demand-exceeds-capacity": "sections of a course cannot seat every group that needs it",
    "room-type-overload": "more sections need a room type in one slot, or in the week, than rooms allow",
    "mandate-collision": "one professor is mandated into the same slot twice",
    "too-many-mandates": "a section has more mandates than meetings",
    "periods-mismatch": "section periods differ from its course",
    "labtie-structure": "a labtie id is not shared by exactly one lab and at least one lecture",
    "link-periods-mismatch": "linked sections differ in periods",
    "four-period-lab-mandate": "a four-period lab is mandated after lunch",
    "adjunct-no-availability": "an adjunct's professor has no fully available slot",
    "course-without-sections": "a course needed by a group has no sections",
    "no-compatible-room": "no room of the section's type is large enough",
    "lab-too-long": "a lab does not fit between the start of day, lunch and the end of day",
    "coprof-is-prof": "a section lists its own professor as co-professor",
    "mandate-outside-availability": "a mandate falls in a slot the professor marked unavailable",
}


class IngestError(InstanceError):
    pass


class ParseError(IngestError):
    def __init__(self, path, line: int, column: int, msg: str):
        super().__init__(f"{path}:{line}:{column}: {msg}")
        self.path, self.line, self.column = str(path), line, column


class UnresolvedReferenceError(IngestError):
    def __init__(self, kind: str, name: str, where: str):
        super().__init__(f"{where}: unresolved {kind} {name!r}")
        self.kind, self.name = kind, name


@dataclass(frozen=True)
class DataIssue:
    severity: str
    code: str
    message: str
    subject: str

    def __post_init__(self):
        if self.severity not in ("error", "warning"):
            raise ValueError(f"bad severity {self.severity!r}")
        if self.code not in ISSUE_CODES:
            raise ValueError(f"unknown issue code {self.code!r}")

    def __str__(self):
        return f"{self.severity}: [{self.code}] {self.subject}: {self.message}"


def _rows(path) -> list[list[str]]:
    p = Path(path)
    if not p.exists():
        raise IngestError(f"{p}: no such file")
    with p.open(newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def _header(path, rows, required: Iterable[str], known: Iterable[str], warnings: list[str]) -> dict[str, int]:
    if not rows:
        raise ParseError(path, 1, 1, "missing header row")
    head = [h.strip() for h in rows[0]]
    cols = {h: i for i, h in enumerate(head) if h}
    for i, name in enumerate(required):
        if name not in cols:
            raise ParseError(path, 1, len(head) + 1, f"missing column {name!r}")
    known = set(known)
    for h in head:
        if h and h not in known:
            msg = f"{path}: ignoring unknown column {h!r}"
            warnings.append(msg)
            log.warning(msg)
    return cols


def _cell(row: list[str], cols: dict[str, int], name: str) -> str:
    i = cols.get(name)
    if i is None or i >= len(row):
        return ""
    return row[i].strip()


def _int(path, line: int, col: int, text: str, what: str, lo: int | None = None) -> int:
    try:
        v = int(text)
    except ValueError:
        raise ParseError(path, line, col, f"{what} must be an integer, got {text!r}") from None
    if lo is not None and v < lo:
        raise ParseError(path, line, col, f"{what} must be >= {lo}, got {v}")
    return v


def _flag(path, line: int, col: int, text: str, what: str) -> bool:
    t = text.upper()
    if t in ("Y", "YES"):
        return True
    if t in ("", "N", "NO"):
        return False
    raise ParseError(path, line, col, f"{what} must be Y or N, got {text!r}")


def _data(rows):
    for line, row in enumerate(rows[1:], 2):
        if any(c.strip() for c in row):
            yield line, row


def _wrap(path, line: int, col: int, fn, *args):
    try:
        return fn(*args)
    except InstanceError as exc:
        raise ParseError(path, line, col, str(exc)) from None
    except ValueError as exc:
        raise ParseError(path, line, col, str(exc)) from None


def read_rooms(path, warnings: list[str]) -> dict[str, Room]:
    rows = _rows(path)
    cols = _header(path, rows, ROOM_COLUMNS, ROOM_COLUMNS, warnings)
    rooms: dict[str, Room] = {}
    for line, row in _data(rows):
        rid = _cell(row, cols, "room_id")
        cap = _int(path, line, cols["capacity"] + 1, _cell(row, cols, "capacity"), "capacity", 1)
        room = _wrap(path, line, 1, Room, rid, cap, _cell(row, cols, "room_type"))
        if rid in rooms:
            raise ParseError(path, line, 1, f"duplicate room {rid!r}")
        rooms[rid] = room
    return rooms


def read_availability(path, grid: TimeGrid, warnings: list[str]) -> dict[str, tuple[tuple[int, ...], ...]]:
    rows = _rows(path)
    pcols = [f"p{t}" for t in grid.periods]
    cols = _header(path, rows, ("prof", "day", *pcols), ("prof", "day", *pcols), warnings)
    grids: dict[str, list[list[int]]] = {}
    seen = set()
    for line, row in _data(rows):
        prof = _cell(row, cols, "prof")
        day = _cell(row, cols, "day")
        if day not in grid.days:
            raise ParseError(path, line, cols["day"] + 1, f"unknown day {day!r}")
        if (prof, day) in seen:
            raise ParseError(path, line, 1, f"duplicate row for {prof} on {day}")
        seen.add((prof, day))
        g = grids.setdefault(prof, [[1] * len(grid.periods) for _ in grid.days])
        for j, name in enumerate(pcols):
            text = _cell(row, cols, name)
            if text == "":
                continue
            v = _int(path, line, cols[name] + 1, text, "availability")
            if v not in AVAILABILITY_VALUES:
                raise ParseError(path, line, cols[name] + 1,
                                 f"availability must be one of 1, 0, -1, -2, got {v}")
            g[grid.day_index(day)][j] = v
    return {p: tuple(tuple(r) for r in g) for p, g in grids.items()}


def _mandates(path, line: int, col: int, text: str) -> tuple[Mandate, ...]:
    out = []
    for tok in filter(None, (t.strip() for t in text.split(";"))):
        day, sep, per = tok.partition(":")
        if not sep:
            raise ParseError(path, line, col, f"mandate {tok!r} must look like d:t or d:*")
        if per == "*":
            out.append(_wrap(path, line, col, Mandate, day, None))
        else:
            out.append(_wrap(path, line, col, Mandate, day, _int(path, line, col, per, "mandate period")))
    return tuple(out)


def read_sections(path, warnings: list[str]) -> list[Section]:
    rows = _rows(path)
    cols = _header(path, rows, SECTION_REQUIRED, SECTION_COLUMNS + SECTION_EXTRA, warnings)
    secs: list[Section] = []
    seen = set()
    for line, row in _data(rows):
        c = {k: _cell(row, cols, k) for k in SECTION_COLUMNS + SECTION_EXTRA}
        col = {k: cols.get(k, 0) + 1 for k in SECTION_COLUMNS}
        opt_int = lambda k: _int(path, line, col[k], c[k], k) if c[k] else None  # noqa: E731
        sec = _wrap(path, line, 1, Section,
                    c["section_id"], c["prof"], c["course"],
                    _int(path, line, col["periods"], c["periods"], "periods", 1),
                    _flag(path, line, col["lab"], c["lab"], "lab"),
                    _int(path, line, col["capacity"], c["capacity"], "capacity", 1),
                    c["room_type"], c["final"] or None, opt_int("labtie"),
                    _mandates(path, line, col["mandates"], c["mandates"]),
                    tuple(dict.fromkeys(p.strip() for p in c["coprofs"].split(";") if p.strip())),
                    _flag(path, line, col["adjunct"], c["adjunct"], "adjunct"),
                    opt_int("link"))
        if sec.id in seen:
            raise ParseError(path, line, 1, f"duplicate section {sec.id!r}")
        seen.add(sec.id)
        secs.append(sec)
    if not secs:
        raise IngestError(f"{path}: no sections")
    return secs


def read_groups(path, warnings: list[str]) -> list[tuple[int, str, int, list[str]]]:
    rows = _rows(path)
    if not rows:
        raise ParseError(path, 1, 1, "missing header row")
    head = [h.strip() for h in rows[0]]
    if head[:2] != ["group_id", "size"]:
        raise ParseError(path, 1, 1, "header must start with group_id,size")
    out = []
    seen = set()
    for line, row in _data(rows):
        gid = row[0].strip()
        if gid in seen:
            raise ParseError(path, line, 1, f"duplicate group {gid!r}")
        seen.add(gid)
        size = _int(path, line, 2, row[1].strip() if len(row) > 1 else "", "size", 1)
        courses = [c.strip() for c in row[2:] if c.strip()]
        if not courses:
            raise ParseError(path, line, 3, f"group {gid} needs at least one course")
        out.append((line, gid, size, courses))
    if not out:
        raise IngestError(f"{path}: no groups")
    return out


def read_courses(path, warnings: list[str]) -> dict[str, int]:
    rows = _rows(path)
    cols = _header(path, rows, COURSE_COLUMNS, COURSE_COLUMNS, warnings)
    out: dict[str, int] = {}
    for line, row in _data(rows):
        cid = _cell(row, cols, "course_id")
        if cid in out:
            raise ParseError(path, line, 1, f"duplicate course {cid!r}")
        out[cid] = _int(path, line, cols["periods"] + 1, _cell(row, cols, "periods"), "periods", 1)
    return out


def parse_instance(groups_path, sections_path, rooms_path, availability_path,
                   courses_path=None, warnings: list[str] | None = None) -> Instance:
    """Load the four tables (plus optional course periods) into an Instance.

    Without ``courses.csv`` a course's period count is the most common value
    among its sections, the smaller one on ties.
    """
    warnings = [] if warnings is None else warnings
    grid = TimeGrid()
    rooms = read_rooms(rooms_path, warnings)
    sections = read_sections(sections_path, warnings)
    avail = read_availability(availability_path, grid, warnings)
    group_rows = read_groups(groups_path, warnings)

    types = {r.room_type for r in rooms.values()}
    for s in sections:
        if s.room_type not in types:
            raise UnresolvedReferenceError("room type", s.room_type, f"section {s.id}")

    if courses_path is not None:
        periods = read_courses(courses_path, warnings)
        for s in sections:
            if s.course not in periods:
                raise UnresolvedReferenceError("course", s.course, f"section {s.id}")
    else:
        by_course: dict[str, Counter] = defaultdict(Counter)
        for s in sections:
            by_course[s.course][s.periods] += 1
        periods = {c: min(cnt, key=lambda k: (-cnt[k], k)) for c, cnt in by_course.items()}
    courses = {c: Course(c, n) for c, n in sorted(periods.items())}

    groups: dict[str, Group] = {}
    for line, gid, size, curr in group_rows:
        for c in curr:
            if c not in courses:
                raise UnresolvedReferenceError("course", c, f"{groups_path}:{line}: group {gid}")
        groups[gid] = _wrap(groups_path, line, 1, Group, gid, size, frozenset(curr))

    adjunct_profs = {s.prof for s in sections if s.is_adjunct_taught}
    names = list(avail)
    for s in sections:
        names += [s.prof, *s.coprofs]
    profs: dict[str, Professor] = {}
    for name in dict.fromkeys(names):
        if name not in avail:
            msg = f"professor {name!r} has no availability rows; assuming fully available"
            warnings.append(msg)
            log.warning(msg)
        profs[name] = _wrap(availability_path, 1, 1, Professor, name,
                            avail.get(name, ((1,) * len(grid.periods),) * len(grid.days)),
                            name in adjunct_profs)
    return Instance(dict(sorted(rooms.items())), dict(sorted(profs.items())), courses,
                    {s.id: s for s in sorted(sections, key=lambda s: s.id)},
                    dict(sorted(groups.items())), grid)


def parse_weights(path) -> Weights:
    return Weights.load(path)


def load_dir(directory, warnings: list[str] | None = None) -> Instance:
    d = Path(directory)
    courses = d / "courses.csv"
    return parse_instance(d / "groups.csv", d / "sections.csv", d / "rooms.csv",
                          d / "availability.csv", courses if courses.exists() else None, warnings)


# writing

def _csv(rows: Iterable[Iterable[object]]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    for r in rows:
        wr.writerow(list(r))
    return buf.getvalue()


def groups_csv(groups: Iterable[Group]) -> str:
    groups = sorted(groups, key=lambda g: g.id)
    width = max((len(g.curriculum) for g in groups), default=1)
    head = ["group_id", "size", *(f"course_{i}" for i in range(1, width + 1))]
    return _csv([head] + [[g.id, g.size, *sorted(g.curriculum)] for g in groups])


def sections_csv(inst: Instance) -> str:
    rows = [list(SECTION_COLUMNS) + ["final"]]
    for s in inst.sorted_sections():
        rows.append([s.id, s.prof, s.course, s.periods, "Y" if s.is_lab else "N", s.capacity,
                     s.room_type, "" if s.labtie is None else s.labtie,
                     "" if s.link is None else s.link, "Y" if s.is_adjunct_taught else "N",
                     ";".join(str(m) for m in s.mandates), ";".join(s.coprofs),
                     s.final_exam or ""])
    return _csv(rows)


def rooms_csv(inst: Instance) -> str:
    return _csv([list(ROOM_COLUMNS)] + [[r.id, r.capacity, r.room_type] for r in inst.sorted_rooms()])


def availability_csv(inst: Instance) -> str:
    grid = inst.grid
    rows = [["prof", "day", *(f"p{t}" for t in grid.periods)]]
    for p in inst.sorted_professors():
        for i, d in enumerate(grid.days):
            rows.append([p.id, d, *("" if v == 1 else v for v in p.availability[i])])
    return _csv(rows)


def courses_csv(inst: Instance) -> str:
    return _csv([list(COURSE_COLUMNS)] + [[c.id, c.periods] for _, c in sorted(inst.courses.items())])


def write_instance(inst: Instance, directory) -> dict[str, Path]:
    """Write normalised tables; reading them back gives an equal instance."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    files = {"groups.csv": groups_csv(inst.groups.values()), "sections.csv": sections_csv(inst),
             "rooms.csv": rooms_csv(inst), "availability.csv": availability_csv(inst),
             "courses.csv": courses_csv(inst)}
    out = {}
    for name, text in files.items():
        (d / name).write_text(text, encoding="utf-8")
        out[name] = d / name
    return out


# checks

def validate_instance(inst: Instance) -> list[DataIssue]:
    """Necessary conditions for a feasible timetable, as a list of issues."""
    grid = inst.grid
    issues: list[DataIssue] = []

    def add(sev: str, code: str, subject: str, msg: str) -> None:
        issues.append(DataIssue(sev, code, msg, subject))

    secs = inst.sorted_sections()
    by_course: dict[str, list[Section]] = defaultdict(list)
    for s in secs:
        by_course[s.course].append(s)

    # (a) demand against seats, and courses with nothing offered
    demand: Counter[str] = Counter()
    for g in inst.groups.values():
        for c in g.curriculum:
            demand[c] += g.size
    for c in sorted(demand):
        seats = sum(s.capacity for s in by_course.get(c, []))
        if not by_course.get(c):
            add("error", "course-without-sections", c, f"needed by {demand[c]} students, no sections")
        elif demand[c] > seats:
            add("error", "demand-exceeds-capacity", c, f"demand {demand[c]} exceeds capacity {seats}")

    # (b) room types: forced by mandates in one slot, and total weekly use
    rooms_of_type = Counter(r.room_type for r in inst.rooms.values())
    slot_demand: Counter[tuple[str, str, int]] = Counter()
    for s in secs:
        for m in {m for m in s.mandates if m.period is not None}:
            slot_demand[s.room_type, m.day, m.period] += 1
    for (rt, d, t), n in sorted(slot_demand.items()):
        if n > rooms_of_type[rt]:
            add("error", "room-type-overload", rt,
                f"{n} sections mandated at {d}:{t} but only {rooms_of_type[rt]} rooms")
    week: Counter[str] = Counter()
    for s in secs:
        week[s.room_type] += s.periods
    for rt, n in sorted(week.items()):
        if n > rooms_of_type[rt] * len(grid.slots):
            add("error", "room-type-overload", rt,
                f"{n} section periods need {rt} rooms, only {rooms_of_type[rt] * len(grid.slots)} room slots")
    for s in secs:
        if not compatible_rooms(inst, s):
            add("error", "no-compatible-room", s.id,
                f"no {s.room_type} room seats {s.capacity}")

    # (c) mandates per professor and per section
    for p in inst.sorted_professors():
        taken: dict[tuple[str, int], str] = {}
        for s in secs:
            if s.prof != p.id and p.id not in s.coprofs:
                continue
            for m in dict.fromkeys(m for m in s.mandates if m.period is not None):
                key = (m.day, m.period)
                if key in taken and taken[key] != s.id:
                    add("error", "mandate-collision", p.id,
                        f"sections {taken[key]} and {s.id} both mandated at {m}")
                taken.setdefault(key, s.id)
                if p.avail(grid, m.day, m.period) < 1:
                    add("warning", "mandate-outside-availability", s.id,
                        f"mandate {m} is outside {p.id}'s availability")
    for s in secs:
        if len(s.mandates) > s.periods:
            add("error", "too-many-mandates", s.id,
                f"{len(s.mandates)} mandates for {s.periods} periods")

    # (d) periods agree with the course
    for s in secs:
        want = inst.courses[s.course].periods
        if s.periods != want:
            add("error", "periods-mismatch", s.id,
                f"has {s.periods} periods but course {s.course} has {want}")

    # (e) labtie structure
    ties: dict[int, list[Section]] = defaultdict(list)
    for s in secs:
        if s.labtie is not None:
            ties[s.labtie].append(s)
    for tie, members in sorted(ties.items()):
        labs = sum(s.is_lab for s in members)
        if labs != 1 or len(members) - labs < 1:
            add("error", "labtie-structure", str(tie),
                f"{labs} lab(s) and {len(members) - labs} lecture(s) share labtie {tie}")

    # (f) linked sections agree on periods
    links: dict[int, list[Section]] = defaultdict(list)
    for s in secs:
        if s.link is not None:
            links[s.link].append(s)
    for link, members in sorted(links.items()):
        if len({s.periods for s in members}) > 1:
            add("error", "link-periods-mismatch", str(link),
                "periods " + ", ".join(f"{s.id}={s.periods}" for s in members))

    # (g) four-period labs live before lunch
    longest = max(len(b) for b in grid.blocks())
    before = grid.blocks()[0]
    for s in secs:
        if not s.is_lab:
            continue
        if s.periods > longest:
            add("error", "lab-too-long", s.id, f"{s.periods}-period lab fits in no block")
        if s.periods == 4:
            for m in s.mandates:
                if m.period is not None and m.period not in before:
                    add("error", "four-period-lab-mandate", s.id, f"mandate {m} is after lunch")

    # (h) adjuncts with nowhere to go
    for s in secs:
        if s.is_adjunct_taught:
            p = inst.professors[s.prof]
            if not any(v == 1 for row in p.availability for v in row):
                add("warning", "adjunct-no-availability", s.id,
                    f"adjunct professor {p.id} has no available slot")

    for s in secs:
        if s.prof in s.coprofs:
            add("error", "coprof-is-prof", s.id, f"{s.prof} is both professor and co-professor")
    return issues


def has_errors(issues: Iterable[DataIssue]) -> bool:
    return any(i.severity == "error" for i in issues)

