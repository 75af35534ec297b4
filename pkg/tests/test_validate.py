import copy

import pytest
from hypothesis import given
from hypothesis import strategies as st

from builders import MUTATIONS, instance, lab_sec
from builders import perturbation_base as base
from timetabling.model import Group, Instance, Professor, Room
from timetabling.tip import Timetable, Weights
from timetabling.validate import (
    FAMILIES, TimetableError, audit, check_hard, check_structure, score_soft, violations_csv,
)


def test_base_is_clean():
    inst, tt = base()
    assert check_hard(inst, tt) == []
    assert score_soft(inst, tt).total == 0


def test_every_family_has_a_mutation():
    assert sorted(MUTATIONS, key=FAMILIES.index) == list(FAMILIES)


@pytest.mark.parametrize("family", FAMILIES)
def test_perturbation_triggers_only_its_family(family):
    inst, tt = base()
    bad = copy.deepcopy(tt)
    MUTATIONS[family](bad)
    found = {v.family for v in check_hard(inst, bad)}
    assert found == {family}


def test_lab_across_lunch_is_h6():
    sec = lab_sec("Z", "P9", "CZ", 3, is_lab=True)
    inst3 = instance([sec], [Group("G", 1, {"CZ"})], rooms=[Room("LAB1", 40, "LAB")])
    lunch = Timetable({"Z": [("M", t, "LAB1") for t in (3, 4, 5)]}, {"G": {"Z"}})
    assert [v.family for v in check_hard(inst3, lunch)] == ["H6"]
    fine = Timetable({"Z": [("M", t, "LAB1") for t in (5, 6, 7)]}, {"G": {"Z"}})
    assert check_hard(inst3, fine) == []


def test_room_double_booking_counts_once():
    inst, tt = base()
    MUTATIONS["H3"](tt)
    h3 = [v for v in check_hard(inst, tt) if v.family == "H3"]
    assert len(h3) == 1 and h3[0].subject[0] == "R1"


def test_soft_capacity_is_not_a_violation():
    inst, tt = base()
    MUTATIONS["H12"](tt)
    assert check_hard(inst, tt, capacity_mode="soft") == []
    pen = score_soft(inst, tt, capacity_mode="soft")
    assert pen.over_capacity == {"E": 1 * Weights().ct_regular}


def test_structure_errors():
    inst, tt = base()
    tt.meetings["K"] = [("T", 1, "R1")]
    with pytest.raises(TimetableError):
        check_structure(inst, tt)
    rep = audit(inst, tt, claimed_objective=0)
    assert not rep.ok and rep.error


def _with_prof(inst, prof):
    profs = dict(inst.professors)
    profs[prof.id] = prof
    return Instance(inst.rooms, profs, inst.courses, inst.sections, inst.groups)


def test_first_and_last_period_once():
    inst, tt = base()
    tt.meetings["A"] = [("M", 1, "R1"), ("W", 1, "R1")]
    tt.meetings["D"] = [("M", 7, "R1")]
    tt.meetings["B"] = [("M", 1, "R2"), ("W", 1, "R2")]
    pen = score_soft(inst, tt)
    assert pen.first_last == {("P1", "M"): 50.0}
    assert pen.total == 50.0


@pytest.mark.parametrize("adjunct, factor", [(False, 1), (True, 10)])
def test_blocked_slot_penalty(adjunct, factor):
    inst, tt = base()
    grid = [[1] * 7 for _ in range(5)]
    grid[4][1] = -2  # Friday period 2, where D meets
    inst = _with_prof(inst, Professor("P1", tuple(map(tuple, grid)), is_adjunct=adjunct))
    pen = score_soft(inst, tt)
    assert pen.availability == {("P1", "F", 2): 1000 * 100 * factor}
    # the co-professor of D is charged the same way
    inst = _with_prof(inst, Professor("P5", tuple(map(tuple, grid))))
    assert ("P5", "F", 2) in score_soft(inst, tt).availability


def test_spread_and_day_off_and_meeting_day():
    inst, tt = base()
    tt.meetings["A"] = [("M", 1, "R1"), ("T", 1, "R1")]
    tt.meetings["B"] = [("M", 1, "R2"), ("T", 1, "R2")]
    pen = score_soft(inst, tt)
    assert set(pen.spread2) == {("A", "M"), ("B", "M")}
    assert pen.day_off == {} and pen.meeting_day == {}


def test_audit_examples():
    inst, tt = base()
    assert audit(inst, tt, claimed_objective=0).ok
    assert not audit(inst, tt, claimed_objective=1).ok
    MUTATIONS["H9"](tt)
    rep = audit(inst, tt, claimed_objective=0)
    assert not rep.ok and [v.family for v in rep.violations] == ["H9"]
    assert "audit: FAILED" in rep.summary()


def test_violations_csv():
    inst, tt = base()
    MUTATIONS["H7"](tt)
    text = violations_csv(check_hard(inst, tt))
    assert text.splitlines()[0] == "family,subject,detail"
    assert text.splitlines()[1].startswith("H7,P2;")


def _penalised():
    inst, tt = base()
    grid = [[0] * 7 for _ in range(5)]
    inst = _with_prof(inst, Professor("P1", tuple(map(tuple, grid)), is_adjunct=True))
    tt.meetings["A"] = [("M", 1, "R1"), ("T", 1, "R1")]
    tt.meetings["B"] = [("M", 1, "R2"), ("T", 1, "R2")]
    tt.meetings["D"] = [("M", 7, "R1")]
    return inst, tt


WEIGHT_NAMES = ["c0", "d4", "dtue", "dgp2", "dgp3", "d5", "ct_regular", "ct_lab",
                "adjunct_multiplier"]


@given(st.sampled_from(WEIGHT_NAMES), st.floats(1, 100), st.floats(0, 100))
def test_monotone_in_each_weight(name, value, extra):
    inst, tt = _penalised()
    lo = Weights(**{name: value})
    hi = Weights(**{name: value + extra})
    assert score_soft(inst, tt, hi, "soft").total >= score_soft(inst, tt, lo, "soft").total


def test_breakdown_total_is_sum_of_terms():
    inst, tt = _penalised()
    pen = score_soft(inst, tt)
    assert pen.total == sum(pen.terms().values()) > 0
