"""The timetabling integer program: construction, closed-form sizes and decoding.

Variable names follow ``z(sec,d,t,room)``, ``w(prof,d,t)``, ``x(grp,sec)``,
``u(grp,d,t,sec)``; auxiliaries are prefixed ``y1 y2 y3 t4 ttue t5 ygp1 tgp2
tgp3 t0 ts``. Rows are emitted family by family, each in the order sections,
days, periods, rooms with ids sorted, so the model is a pure function of the
instance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Mapping

from .mipcore import INT_TOL, Model, solve_exact
from .model import (
    Group,
    Instance,
    Section,
    compatible_rooms,
    forbidden_lab_pairs,
    forbidden_lab_triples,
    fulltime_professors,
)


class TipBuildError(ValueError):
    pass


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class Weights:
    c0: float = 1000.0
    d4: float = 50.0
    dtue: float = 20.0
    dgp2: float = 1.0
    dgp3: float = 1.0
    d5: float = 100.0
    ct_regular: float = 200.0
    ct_lab: float = 1e6
    adjunct_multiplier: float = 10.0
    meeting_day: str = "T"

    def __post_init__(self):
        for f in fields(self):
            if f.name != "meeting_day" and getattr(self, f.name) < 0:
                raise ValueError(f"weight {f.name} must be non-negative")
        if self.adjunct_multiplier < 1:
            raise ValueError("adjunct_multiplier must be >= 1")

    def scaled(self, k: float) -> "Weights":
        vals = {f.name: getattr(self, f.name) * k for f in fields(self)
                if f.name not in ("meeting_day", "adjunct_multiplier")}
        return Weights(**vals, adjunct_multiplier=self.adjunct_multiplier,
                       meeting_day=self.meeting_day)

    @classmethod
    def from_text(cls, text: str) -> "Weights":
        known = {f.name: f.type for f in fields(cls)}
        vals: dict[str, object] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = (p.strip() for p in line.partition("="))
            if not sep:
                raise ValueError(f"weights line {lineno}: expected key=value")
            if key not in known:
                raise ValueError(f"weights line {lineno}: unknown key {key!r}")
            vals[key] = value if key == "meeting_day" else float(value)
        return cls(**vals)

    @classmethod
    def load(cls, path: str | Path) -> "Weights":
        return cls.from_text(Path(path).read_text())

    def to_text(self) -> str:
        return "".join(f"{f.name}={getattr(self, f.name)}\n" for f in fields(self))


@dataclass
class TipIndex:
    z: dict[tuple[str, str, int, str], str] = field(default_factory=dict)
    w: dict[tuple[str, str, int], str] = field(default_factory=dict)
    x: dict[tuple[str, str], str] = field(default_factory=dict)
    u: dict[tuple[str, str, int, str], str] = field(default_factory=dict)
    aux: dict[str, dict[tuple, str]] = field(default_factory=dict)
    capacity_mode: str = "hard"

    def entities(self) -> dict[str, tuple]:
        """Variable name -> (family, key...) for every indexed variable."""
        out: dict[str, tuple] = {}
        for fam in ("z", "w", "x", "u"):
            for key, name in getattr(self, fam).items():
                out[name] = (fam, *key)
        for fam, table in self.aux.items():
            for key, name in table.items():
                out[name] = (fam, *key) if isinstance(key, tuple) else (fam, key)
        return out

    @classmethod
    def from_entities(cls, ent: Mapping[str, tuple], capacity_mode: str = "hard") -> "TipIndex":
        idx = cls(capacity_mode=capacity_mode)
        for name, (fam, *key) in ent.items():
            table = getattr(idx, fam) if fam in ("z", "w", "x", "u") else idx.aux.setdefault(fam, {})
            table[tuple(key) if len(key) > 1 else key[0]] = name
        return idx


@dataclass
class Timetable:
    meetings: dict[str, list[tuple[str, int, str]]] = field(default_factory=dict)
    enrollments: dict[str, set[str]] = field(default_factory=dict)
    prof_grid: dict[str, set[tuple[str, int]]] = field(default_factory=dict)
    over_capacity: dict[str, int] = field(default_factory=dict)


AUX_FAMILIES = ("y1", "y2", "y3", "t4", "ttue", "t5", "ygp1", "tgp2", "tgp3", "t0", "ts")


def availability_weight(inst: Instance, prof: str, day: str, period: int, weights: Weights) -> float:
    p = inst.professors[prof]
    coef = weights.c0 * 10.0 ** (-p.avail(inst.grid, day, period))
    return coef * weights.adjunct_multiplier if p.is_adjunct else coef


def labtie_pairs(sections: Iterable[Section], ordered: bool) -> list[tuple[str, str]]:
    secs = sorted((s for s in sections if s.labtie is not None), key=lambda s: s.id)
    combos = itertools.permutations(secs, 2) if ordered else itertools.combinations(secs, 2)
    return [(a.id, b.id) for a, b in combos if a.labtie == b.labtie]


def build_tip(inst: Instance, groups: Iterable[Group] | None = None,
              weights: Weights | None = None, capacity_mode: str = "hard") -> tuple[Model, TipIndex]:
    if capacity_mode not in ("hard", "soft"):
        raise ValueError(f"capacity_mode must be 'hard' or 'soft', not {capacity_mode!r}")
    weights = weights or Weights()
    groups = sorted(groups if groups is not None else inst.groups.values(), key=lambda g: g.id)
    grid = inst.grid
    days, periods = grid.days, grid.periods
    if weights.meeting_day not in days:
        raise TipBuildError(f"meeting day {weights.meeting_day!r} is not a teaching day")
    sections = inst.sorted_sections()
    profs = inst.sorted_professors()
    rooms = inst.sorted_rooms()

    rooms_of = {s.id: [r.id for r in compatible_rooms(inst, s)] for s in sections}
    for s in sections:
        if not rooms_of[s.id]:
            raise TipBuildError(f"section {s.id} has no compatible room "
                                f"(type {s.room_type}, capacity {s.capacity})")
    by_course: dict[str, list[str]] = {}
    for s in sections:
        by_course.setdefault(s.course, []).append(s.id)
    for g in groups:
        for c in g.curriculum:
            if not by_course.get(c):
                raise TipBuildError(f"course {c} needed by group {g.id} has no sections")
    sec = {s.id: s for s in sections}
    opts = {g.id: sorted(s for c in g.curriculum for s in by_course[c]) for g in groups}
    fulltime = fulltime_professors(inst)
    pairs_b = sorted(forbidden_lab_pairs(grid))
    triples_a = sorted(forbidden_lab_triples(grid))

    m = Model("tip")
    idx = TipIndex(capacity_mode=capacity_mode, aux={k: {} for k in AUX_FAMILIES})
    aux = idx.aux

    # major variables
    for s in sections:
        for d in days:
            for t in periods:
                for r in rooms_of[s.id]:
                    idx.z[s.id, d, t, r] = m.add_binary(f"z({s.id},{d},{t},{r})", priority=1)
    for p in profs:
        for d in days:
            for t in periods:
                idx.w[p.id, d, t] = m.add_binary(f"w({p.id},{d},{t})")
    for g in groups:
        for s in opts[g.id]:
            idx.x[g.id, s] = m.add_binary(f"x({g.id},{s})", priority=2)
    for g in groups:
        for s in opts[g.id]:
            for d in days:
                for t in periods:
                    idx.u[g.id, d, t, s] = m.add_binary(f"u({g.id},{d},{t},{s})")

    # auxiliary variables
    labs = [s for s in sections if s.is_lab]
    spread = [s for s in sections if not s.is_lab and 2 <= s.periods <= 3]
    for s in labs:
        for d in days:
            aux["y1"][s.id, d] = m.add_binary(f"y1({s.id},{d})")
    for s in labs:
        for d in days:
            for r in rooms_of[s.id]:
                aux["y2"][s.id, d, r] = m.add_binary(f"y2({s.id},{d},{r})")
    for p in profs:
        for d in days:
            aux["y3"][p.id, d] = m.add_binary(f"y3({p.id},{d})")
    for p in profs:
        for d in days:
            aux["t4"][p.id, d] = m.add_binary(f"t4({p.id},{d})")
    for p in profs:
        if p.id in fulltime:
            aux["ttue"][p.id] = m.add_binary(f"ttue({p.id})")
    for p in profs:
        aux["t5"][p.id] = m.add_binary(f"t5({p.id})")
    for s in spread:
        for d in days:
            aux["ygp1"][s.id, d] = m.add_binary(f"ygp1({s.id},{d})")
    for s in spread:
        if s.periods == 2:
            for d in days[:-1]:
                aux["tgp2"][s.id, d] = m.add_binary(f"tgp2({s.id},{d})")
    for s in spread:
        if s.periods == 3:
            for d in days[:-2]:
                aux["tgp3"][s.id, d] = m.add_binary(f"tgp3({s.id},{d})")
    for p in profs:
        for d in days:
            for t in periods:
                if p.avail(grid, d, t) <= 0:
                    aux["t0"][p.id, d, t] = m.add_binary(f"t0({p.id},{d},{t})")
    if capacity_mode == "soft":
        for s in sections:
            load = sum(g.size for g in groups if s.id in opts[g.id])
            aux["ts"][s.id] = m.add_integer(f"ts({s.id})", 0, max(0, load - s.capacity))

    z = idx.z

    def zs_slot(s: str, d: str, t: int) -> list[tuple[float, str]]:
        return [(1, z[s, d, t, r]) for r in rooms_of[s]]

    def zs_day(s: str, d: str) -> list[tuple[float, str]]:
        return [(1, z[s, d, t, r]) for t in periods for r in rooms_of[s]]

    # H1 weekly meeting count
    for s in sections:
        m.add_constraint(f"h1({s.id})", [(1, z[s.id, d, t, r]) for d in days for t in periods
                                         for r in rooms_of[s.id]], "=", s.periods)
    # H2 linked sections meet together
    linked = [(a.id, b.id) for a, b in itertools.combinations(sections, 2)
              if a.link is not None and a.link == b.link]
    for a, b in linked:
        for d in days:
            for t in periods:
                m.add_constraint(f"h2({a},{b},{d},{t})",
                                 zs_slot(a, d, t) + [(-c, v) for c, v in zs_slot(b, d, t)], "=", 0)
    # H3 one section per room and slot
    for d in days:
        for t in periods:
            for r in rooms:
                terms = [(1, z[s.id, d, t, r.id]) for s in sections if r.id in rooms_of[s.id]]
                if terms:
                    m.add_constraint(f"h3({d},{t},{r.id})", terms, "<=", 1)
    # H4 mandates
    for s in sections:
        for i, md in enumerate(s.mandates, 1):
            if md.period is None:
                m.add_constraint(f"h4({s.id},{md.day},{i})", zs_day(s.id, md.day), ">=", 1)
            else:
                m.add_constraint(f"h4({s.id},{md.day},{md.period},{i})",
                                 zs_slot(s.id, md.day, md.period), "=", 1)
    # H5 non-labs meet at most once a day
    for s in sections:
        if not s.is_lab:
            for d in days:
                m.add_constraint(f"h5({s.id},{d})", zs_day(s.id, d), "<=", 1)
    # H6 labs: one day, one room, contiguous, no lunch inside
    for s in labs:
        n = s.periods
        for d in days:
            y1 = aux["y1"][s.id, d]
            m.add_constraint(f"h6a({s.id},{d})", zs_day(s.id, d) + [(-n, y1)], "<=", 0)
            m.add_constraint(f"h6b({s.id},{d})", zs_day(s.id, d) + [(-n, y1)], ">=", 0)
        for d in days:
            for r in rooms_of[s.id]:
                y2 = aux["y2"][s.id, d, r]
                row = [(1, z[s.id, d, t, r]) for t in periods]
                m.add_constraint(f"h6c({s.id},{d},{r})", row + [(-n, y2)], "<=", 0)
                m.add_constraint(f"h6d({s.id},{d},{r})", row + [(-n, y2)], ">=", 0)
        for d in days:
            for r in rooms_of[s.id]:
                if n == 2:
                    for a, b in pairs_b:
                        m.add_constraint(f"h6p({s.id},{d},{r},{a},{b})",
                                         [(1, z[s.id, d, a, r]), (1, z[s.id, d, b, r])], "<=", 1)
                elif n == 3:
                    for a, b, c in triples_a:
                        m.add_constraint(f"h6t({s.id},{d},{r},{a},{b},{c})",
                                         [(1, z[s.id, d, a, r]), (1, z[s.id, d, b, r]),
                                          (1, z[s.id, d, c, r])], "<=", 2)
                elif n == 4:
                    m.add_constraint(f"h6q({s.id},{d},{r})",
                                     [(1, z[s.id, d, t, r]) for t in (5, 6, 7)], "=", 0)
    # H7 professor schedule: w equals the number of own meetings
    own = {p.id: [s for s in sections if s.prof == p.id] for p in profs}
    for p in profs:
        for d in days:
            for t in periods:
                terms = [(1, z[s.id, d, t, r]) for s in own[p.id] for r in rooms_of[s.id]]
                m.add_constraint(f"h7({p.id},{d},{t})", terms + [(-1, idx.w[p.id, d, t])], "=", 0)
    # H8 co-professors stay free for their co-taught sections
    for s in sections:
        for p in s.coprofs:
            for d in days:
                for t in periods:
                    m.add_constraint(f"h8({p},{d},{t},{s.id})",
                                     [(1, idx.w[p, d, t])] + zs_slot(s.id, d, t), "<=", 1)
    # H9 one section per needed course
    for g in groups:
        for c in sorted(g.curriculum):
            m.add_constraint(f"h9({g.id},{c})", [(1, idx.x[g.id, s]) for s in by_course[c]], "=", 1)
    # H10 group timetables
    u = idx.u
    for g in groups:
        for s in opts[g.id]:
            m.add_constraint(f"h10a({g.id},{s})",
                             [(1, u[g.id, d, t, s]) for d in days for t in periods]
                             + [(-sec[s].periods, idx.x[g.id, s])], "=", 0)
    for g in groups:
        for s in opts[g.id]:
            for d in days:
                for t in periods:
                    m.add_constraint(f"h10b({g.id},{d},{t},{s})",
                                     [(1, u[g.id, d, t, s]), (-1, idx.x[g.id, s])]
                                     + [(-c, v) for c, v in zs_slot(s, d, t)], ">=", -1)
    for g in groups:
        need = sum(inst.courses[c].periods for c in g.curriculum)
        m.add_constraint(f"h10c({g.id})", [(1, u[g.id, d, t, s]) for s in opts[g.id]
                                           for d in days for t in periods], "=", need)
    for g in groups:
        for d in days:
            for t in periods:
                m.add_constraint(f"h10d({g.id},{d},{t})",
                                 [(1, u[g.id, d, t, s]) for s in opts[g.id]], "<=", 1)
    # H11 lab enrolment implies tied lecture enrolment
    for g in groups:
        for s0 in opts[g.id]:
            if sec[s0].is_lab or sec[s0].labtie is None:
                continue
            for s1 in opts[g.id]:
                if sec[s1].is_lab and sec[s1].labtie == sec[s0].labtie:
                    m.add_constraint(f"h11({g.id},{s0},{s1})",
                                     [(1, idx.x[g.id, s0]), (-1, idx.x[g.id, s1])], ">=", 0)
    # H12 section capacity
    for s in sections:
        terms = [(g.size, idx.x[g.id, s.id]) for g in groups if (g.id, s.id) in idx.x]
        if capacity_mode == "soft":
            terms.append((-1, aux["ts"][s.id]))
        if terms:
            m.add_constraint(f"h12({s.id})", terms, "<=", s.capacity)
    # H13 at most four tied hours a day
    for g in groups:
        mine = [sec[s] for s in opts[g.id]]
        for s0, s1 in labtie_pairs(mine, ordered=False):
            for d in days:
                m.add_constraint(f"h13({g.id},{s0},{s1},{d})",
                                 [(1, u[g.id, d, t, s]) for s in (s0, s1) for t in periods], "<=", 4)
    # H14 a break between tied sections
    lunch = grid.lunch_boundary[0]
    for g in groups:
        mine = [sec[s] for s in opts[g.id]]
        for s0, s1 in labtie_pairs(mine, ordered=True):
            for d in days:
                for t0 in periods[:-1]:
                    if t0 == lunch:
                        continue
                    m.add_constraint(f"h14({g.id},{s0},{s1},{d},{t0})",
                                     [(1, u[g.id, d, t0, s0]), (1, u[g.id, d, t0 + 1, s1])], "<=", 1)

    # S1/S2 spread two- and three-period sections over non-consecutive days
    for s in spread:
        for d in days:
            m.add_constraint(f"s1({s.id},{d})",
                             [(1, aux["ygp1"][s.id, d])] + [(-c, v) for c, v in zs_day(s.id, d)],
                             "=", 0)
    for s in spread:
        if s.periods == 2:
            for d in days[:-1]:
                nd = grid.next_day(d)
                m.add_constraint(f"s2({s.id},{d})",
                                 [(1, aux["ygp1"][s.id, d]), (1, aux["ygp1"][s.id, nd]),
                                  (-1, aux["tgp2"][s.id, d])], "<=", 1)
    for s in spread:
        if s.periods == 3:
            for d in days[:-2]:
                d1 = grid.next_day(d)
                d2 = grid.next_day(d1)
                m.add_constraint(f"s3({s.id},{d})",
                                 [(1, aux["ygp1"][s.id, dd]) for dd in (d, d1, d2)]
                                 + [(-1, aux["tgp3"][s.id, d])], "<=", 2)
    # S3 a day without teaching
    for p in profs:
        for d in days:
            wd = [(1, idx.w[p.id, d, t]) for t in periods]
            y3 = aux["y3"][p.id, d]
            m.add_constraint(f"s4a({p.id},{d})", wd + [(-len(periods), y3)], "<=", 0)
            m.add_constraint(f"s4b({p.id},{d})", wd + [(-1, y3)], ">=", 0)
    for p in profs:
        m.add_constraint(f"s4c({p.id})", [(1, aux["y3"][p.id, d]) for d in days]
                         + [(-1, aux["t5"][p.id])], "<=", len(days) - 1)
    # S4 not both first and last period
    first, last = periods[0], periods[-1]
    for p in profs:
        for d in days:
            m.add_constraint(f"s5({p.id},{d})", [(1, idx.w[p.id, d, first]), (1, idx.w[p.id, d, last]),
                                                 (-1, aux["t4"][p.id, d])], "<=", 1)
    # S5 full-time professors teach on the meeting day
    for p in profs:
        if p.id in fulltime:
            m.add_constraint(f"s6({p.id})", [(1, aux["y3"][p.id, weights.meeting_day]),
                                             (1, aux["ttue"][p.id])], ">=", 1)
    # S6 availability, for main and co-professors
    for (p, d, t), var in aux["t0"].items():
        m.add_constraint(f"s7({p},{d},{t})", [(1, idx.w[p, d, t]), (-1, var)], "<=", 0)
    for s in sections:
        for p in s.coprofs:
            for d in days:
                for t in periods:
                    if (p, d, t) in aux["t0"]:
                        m.add_constraint(f"s8({p},{d},{t},{s.id})",
                                         zs_slot(s.id, d, t) + [(-1, aux["t0"][p, d, t])], "<=", 0)

    obj: list[tuple[float, str]] = []
    for (p, d, t), var in aux["t0"].items():
        obj.append((availability_weight(inst, p, d, t, weights), var))
    obj += [(weights.d4, v) for v in aux["t4"].values()]
    obj += [(weights.dtue, v) for v in aux["ttue"].values()]
    obj += [(weights.dgp2, v) for v in aux["tgp2"].values()]
    obj += [(weights.dgp3, v) for v in aux["tgp3"].values()]
    obj += [(weights.d5, v) for v in aux["t5"].values()]
    for s, var in aux["ts"].items():
        obj.append((weights.ct_lab if sec[s].is_lab else weights.ct_regular, var))
    m.set_objective((c, v) for c, v in obj if c != 0)
    return m, idx


@dataclass(frozen=True)
class TipCounts:
    rows: int
    columns: int
    nonzeros: int
    z: int
    w: int
    x: int
    u: int


def tip_counts(inst: Instance, groups: Iterable[Group] | None = None,
               capacity_mode: str = "hard") -> TipCounts:
    """Model size from set cardinalities alone, without building the model."""
    groups = list(groups if groups is not None else inst.groups.values())
    D, T = len(inst.grid.days), len(inst.grid.periods)
    slots = D * T
    S = list(inst.sections.values())
    P = list(inst.professors.values())
    nR = {s.id: len(compatible_rooms(inst, s)) for s in S}
    course_secs: dict[str, list[Section]] = {}
    for s in S:
        course_secs.setdefault(s.course, []).append(s)
    Wg = {g.id: [s for c in g.curriculum for s in course_secs.get(c, [])] for g in groups}
    nW = sum(len(v) for v in Wg.values())
    H = fulltime_professors(inst)
    n_blocked = sum(1 for p in P for row in p.availability for v in row if v <= 0)
    labs = [s for s in S if s.is_lab]
    nonlab = [s for s in S if not s.is_lab]
    spread2 = [s for s in nonlab if s.periods == 2]
    spread3 = [s for s in nonlab if s.periods == 3]
    secs_per_room = {r: 0 for r in inst.rooms}
    for s in S:
        for r in compatible_rooms(inst, s):
            secs_per_room[r.id] += 1
    n_pairs_b = len(forbidden_lab_pairs(inst.grid))
    n_triples_a = len(forbidden_lab_triples(inst.grid))
    lunch_gaps = T - 2  # t0 in 1..T-1 except the lunch boundary
    soft = capacity_mode == "soft"

    n_z = slots * sum(nR.values())
    n_w = slots * len(P)
    n_u = slots * nW
    cols = (n_z + n_w + nW + n_u + D * len(labs) + D * sum(nR[s.id] for s in labs)
            + 2 * D * len(P) + len(H) + len(P) + D * (len(spread2) + len(spread3))
            + (D - 1) * len(spread2) + (D - 2) * len(spread3) + n_blocked
            + (len(S) if soft else 0))

    rows = nnz = 0

    def add(r: int, per_row: int) -> None:
        nonlocal rows, nnz
        rows += r
        nnz += r * per_row

    for s in S:
        add(1, slots * nR[s.id])                                   # H1
    for a, b in itertools.combinations(S, 2):
        if a.link is not None and a.link == b.link:
            add(slots, nR[a.id] + nR[b.id])                         # H2
    for r, k in secs_per_room.items():
        if k:
            add(slots, k)                                          # H3
    for s in S:
        for md in s.mandates:
            add(1, nR[s.id] * (T if md.period is None else 1))     # H4
    for s in nonlab:
        add(D, T * nR[s.id])                                       # H5
    for s in labs:
        add(2 * D, T * nR[s.id] + 1)                               # H6 day
        add(2 * D * nR[s.id], T + 1)                               # H6 room
        if s.periods == 2:
            add(D * nR[s.id] * n_pairs_b, 2)
        elif s.periods == 3:
            add(D * nR[s.id] * n_triples_a, 3)
        elif s.periods == 4:
            add(D * nR[s.id], 3)
    for p in P:
        add(slots, 1 + sum(nR[s.id] for s in S if s.prof == p.id))  # H7
    for s in S:
        add(slots * len(s.coprofs), 1 + nR[s.id])                   # H8
    for g in groups:
        add(len(g.curriculum), 0)                                  # H9 (nnz below)
    nnz += nW
    add(nW, slots + 1)                                             # H10a
    for g in groups:
        for s in Wg[g.id]:
            add(slots, 2 + nR[s.id])                               # H10b
    for g in groups:
        add(1, slots * len(Wg[g.id]))                              # H10c
        add(slots, len(Wg[g.id]))                                  # H10d
    for g in groups:
        mine = Wg[g.id]
        for s0 in mine:
            if s0.is_lab or s0.labtie is None:
                continue
            add(sum(1 for s1 in mine if s1.is_lab and s1.labtie == s0.labtie), 2)   # H11
    for s in S:
        k = sum(1 for g in groups if s in Wg[g.id])
        if k or soft:
            add(1, k + (1 if soft else 0))                         # H12
    for g in groups:
        add(D * len(labtie_pairs(Wg[g.id], ordered=False)), 2 * T)  # H13
        add(D * lunch_gaps * len(labtie_pairs(Wg[g.id], ordered=True)), 2)  # H14
    for s in spread2 + spread3:
        add(D, 1 + T * nR[s.id])                                   # S1
    add((D - 1) * len(spread2), 3)                                 # S2
    add((D - 2) * len(spread3), 4)
    add(2 * D * len(P), T + 1)                                     # S3
    add(len(P), D + 1)
    add(D * len(P), 3)                                             # S4
    add(len(H), 2)                                                 # S5
    add(n_blocked, 2)                                              # S6
    for s in S:
        for p in s.coprofs:
            blocked = sum(1 for row in inst.professors[p].availability for v in row if v <= 0)
            add(blocked, nR[s.id] + 1)
    return TipCounts(rows, cols, nnz, n_z, n_w, nW, n_u)


def decode_solution(inst: Instance, index: TipIndex, assignment: Mapping[str, float]) -> Timetable:
    def on(name: str) -> bool:
        v = assignment.get(name, 0.0)
        if abs(v - round(v)) > INT_TOL:
            raise DecodeError(f"{name} has fractional value {v}")
        return round(v) >= 1

    grid = inst.grid
    tt = Timetable()
    for (s, d, t, r), name in index.z.items():
        if on(name):
            tt.meetings.setdefault(s, []).append((d, t, r))
    for s in tt.meetings:
        tt.meetings[s].sort(key=lambda m: (grid.day_index(m[0]), m[1], m[2]))
    for (g, s), name in index.x.items():
        if on(name):
            tt.enrollments.setdefault(g, set()).add(s)
    for (p, d, t), name in index.w.items():
        if on(name):
            tt.prof_grid.setdefault(p, set()).add((d, t))
    for s, name in index.aux.get("ts", {}).items():
        v = assignment.get(name, 0.0)
        if abs(v - round(v)) > INT_TOL:
            raise DecodeError(f"{name} has fractional value {v}")
        if round(v) > 0:
            tt.over_capacity[s] = int(round(v))
    return tt


def encode_timetable(model: Model, index: TipIndex, tt: Timetable,
                     max_seconds: float = 30.0) -> dict[str, float] | None:
    """Full variable assignment for a timetable, or None if it does not fit the model.

    Meetings and enrollments fix the ``z`` and ``x`` columns; the remaining
    columns (attendance, professor grid, penalty indicators) are completed by
    a small solve that picks their cheapest consistent values. The result can
    seed ``solve_exact(start=...)``.
    """
    values: dict[str, float] = {}
    meets = {(s, d, t, r) for s, ms in tt.meetings.items() for d, t, r in ms}
    for key, name in index.z.items():
        values[name] = 1.0 if key in meets else 0.0
    if len(meets) != sum(1 for k in index.z if k in meets):
        return None
    for (g, s), name in index.x.items():
        values[name] = 1.0 if s in tt.enrollments.get(g, ()) else 0.0
    if any((g, s) not in index.x for g, ss in tt.enrollments.items() for s in ss):
        return None
    res = solve_exact(model.fixed(values), max_seconds=max_seconds)
    return dict(res.assignment) if res.has_solution else None
