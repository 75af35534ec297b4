import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from builders import instance
from timetabling.model import (
    Group, InstanceError, Mandate, Professor, Room, Section, TimeGrid, candidate_assignments,
    compatible_rooms, forbidden_lab_pairs, forbidden_lab_triples, fulltime_professors,
    group_section_options, teaching_load,
)

GRID = TimeGrid()


def _crosses_lunch(lo, hi):
    return lo <= 4 < hi


def test_forbidden_triples_count_and_members():
    A = forbidden_lab_triples(GRID)
    assert len(A) == 32
    assert (3, 4, 5) in A
    assert (1, 2, 3) not in A
    # independent enumeration: runs of three adjacent periods not spanning lunch
    allowed = {(a, a + 1, a + 2) for a in range(1, 6) if not _crosses_lunch(a, a + 2)}
    assert allowed == {(1, 2, 3), (2, 3, 4), (5, 6, 7)}
    assert A == {c for c in itertools.combinations(range(1, 8), 3) if c not in allowed}


def test_forbidden_pairs_count_and_members():
    B = forbidden_lab_pairs(GRID)
    assert len(B) == 16
    assert (4, 5) in B
    assert (2, 3) not in B
    complement = set(itertools.combinations(range(1, 8), 2)) - B
    assert complement == {(a, a + 1) for a in range(1, 7) if a != 4}


def test_grid_rejects_bad_lunch():
    with pytest.raises(InstanceError):
        TimeGrid(lunch_boundary=(4, 6))


def _prof_inst(periods):
    secs = [Section(f"S{i}", "P", f"C{i}", n, room_type="CLASS") for i, n in enumerate(periods)]
    return instance(secs, [Group("G", 1, {"C0"})])


@pytest.mark.parametrize("periods, full", [((3, 3, 4), True), ((3,), False), ((3, 3, 3), True),
                                           ((4, 4), False)])
def test_fulltime(periods, full):
    assert ("P" in fulltime_professors(_prof_inst(periods))) is full


@given(st.lists(st.integers(1, 5), min_size=1, max_size=6))
def test_fulltime_depends_only_on_total(periods):
    inst = _prof_inst(periods)
    assert teaching_load(inst)["P"] == sum(periods)
    assert ("P" in fulltime_professors(inst)) == (sum(periods) >= 9)


def _y_inst(sec_cap, room_cap, sec_type="CLASSROOM", room_type="CLASSROOM"):
    rooms = [Room("F101", room_cap, room_type), Room("X1", 5, sec_type)]
    sec = Section("S1", "P", "C", 3, capacity=sec_cap, room_type=sec_type)
    return instance([sec], [Group("G", 1, {"C"})], rooms=rooms)


def test_candidate_assignments_examples():
    Y = candidate_assignments(_y_inst(26, 30))
    assert {(d, t) for s, d, t, r in Y if r == "F101"} == set(GRID.slots)
    assert len([k for k in Y if k[3] == "F101"]) == 35
    assert not [k for k in candidate_assignments(_y_inst(21, 15, "PHYSLAB", "CHEMLAB"))
                if k[3] == "F339" or k[3] == "F101"]
    assert not [k for k in candidate_assignments(_y_inst(30, 21)) if k[3] == "F101"]


@given(st.integers(0, 60), st.integers(0, 60), st.integers(0, 30))
def test_candidate_assignments_monotone_in_room_capacity(sec_cap, room_cap, extra):
    small = candidate_assignments(_y_inst(sec_cap, room_cap))
    big = candidate_assignments(_y_inst(sec_cap, room_cap + extra))
    assert small <= big


def _w_inst(curricula):
    secs = [Section(f"S{c}{i}", "P", c, 3, room_type="CLASS") for c in "ABC" for i in range(3)]
    groups = [Group(f"G{i}", 5, set(cur)) for i, cur in enumerate(curricula)]
    return instance(secs, groups), groups


def test_group_section_options_examples():
    inst, groups = _w_inst(["A", "A"])
    W = group_section_options(inst, groups)
    assert sorted(s for g, s in W if g == "G0") == ["SA0", "SA1", "SA2"]
    assert {s for g, s in W if g == "G0"} == {s for g, s in W if g == "G1"}
    assert group_section_options(inst, []) == set()


@given(st.sets(st.sampled_from("ABC"), min_size=1), st.sampled_from("ABC"))
def test_group_section_options_monotone(cur, extra):
    inst, _ = _w_inst(["A"])
    before = group_section_options(inst, [Group("G", 3, cur)])
    after = group_section_options(inst, [Group("G", 3, cur | {extra})])
    assert before <= after


def test_compatible_rooms_type_and_capacity():
    inst = _y_inst(26, 30)
    assert [r.id for r in compatible_rooms(inst, inst.sections["S1"])] == ["F101"]


def test_instance_checks_references():
    sec = Section("S1", "P", "C", 3, room_type="NOPE")
    with pytest.raises(InstanceError):
        instance([sec], [Group("G", 1, {"C"})])
    with pytest.raises(InstanceError):
        Section("S 1", "P", "C", 3)
    with pytest.raises(InstanceError):
        Professor("P", ((1,) * 7,) * 4)
    with pytest.raises(InstanceError):
        Section("S1", "P", "C", 3, mandates=(Mandate("M", 1),) * 7)
