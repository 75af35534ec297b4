import functools
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import instance, one_section, toy_pipeline
from timetabling.gen import GenParams, generate_with_witness
from timetabling.mipcore import evaluate, write_lp
from timetabling.model import Group, Instance, Professor, Room, Section
from timetabling.tip import (
    DecodeError, TipBuildError, TipIndex, Timetable, Weights, build_tip, decode_solution,
    encode_timetable, tip_counts,
)
from timetabling.validate import audit, score_soft


def _prefix_count(model, prefix):
    return sum(1 for c in model.constraints if c.name.startswith(prefix + "("))


def test_major_variable_count():
    model, idx = build_tip(one_section())
    assert (len(idx.z), len(idx.w), len(idx.x), len(idx.u)) == (35, 35, 1, 35)
    assert len(idx.z) + len(idx.w) + len(idx.x) + len(idx.u) == 106


def test_two_period_lab_pair_rows():
    model, _ = build_tip(one_section(periods=2, lab=True))
    assert _prefix_count(model, "h6p") == 5 * 16


def test_three_period_lab_triple_rows():
    model, _ = build_tip(one_section(periods=3, lab=True))
    assert _prefix_count(model, "h6t") == 5 * 32


def test_availability_coefficient():
    inst = one_section()
    avail = [[1] * 7 for _ in range(5)]
    avail[0][0] = -2
    prof = Professor("P1", tuple(map(tuple, avail)))
    inst = Instance(inst.rooms, {"P1": prof}, inst.courses, inst.sections, inst.groups)
    model, idx = build_tip(inst)
    assert set(idx.aux["t0"]) == {("P1", "M", 1)}
    assert model.objective[idx.aux["t0"]["P1", "M", 1]] == 1000 * 100
    adj = Professor("P1", prof.availability, is_adjunct=True)
    inst = Instance(inst.rooms, {"P1": adj}, inst.courses, inst.sections, inst.groups)
    model, idx = build_tip(inst, weights=Weights(adjunct_multiplier=3))
    assert model.objective[idx.aux["t0"]["P1", "M", 1]] == 1000 * 100 * 3


def test_variable_names_are_parseable():
    model, idx = build_tip(one_section())
    assert idx.z["S1", "M", 3, "R1"] == "z(S1,M,3,R1)"
    assert idx.u["G1", "F", 7, "S1"] == "u(G1,F,7,S1)"
    ent = idx.entities()
    assert ent["x(G1,S1)"] == ("x", "G1", "S1")
    back = TipIndex.from_entities(ent)
    assert back.z == idx.z and back.aux["t5"] == idx.aux["t5"]
    write_lp(model)  # no reserved characters


def test_no_compatible_room():
    sec = Section("S1", "P", "C", 3, capacity=50, room_type="CLASS")
    inst = instance([sec], [Group("G", 5, {"C"})], rooms=[Room("R", 20, "CLASS")])
    with pytest.raises(TipBuildError, match="S1"):
        build_tip(inst)


def test_bad_capacity_mode_and_meeting_day():
    with pytest.raises(ValueError):
        build_tip(one_section(), capacity_mode="loose")
    with pytest.raises(TipBuildError):
        build_tip(one_section(), weights=Weights(meeting_day="X"))


def test_weights_text_round_trip():
    w = Weights(c0=7, dtue=0.5, meeting_day="W")
    assert Weights.from_text(w.to_text()) == w
    assert Weights.from_text("# comment\nd4 = 3\n").d4 == 3
    with pytest.raises(ValueError):
        Weights.from_text("nope=1\n")
    with pytest.raises(ValueError):
        Weights(d5=-1)


def _count_inst(seed, **kw):
    base = dict(n_groups=3, n_courses=4, sections_per_course_range=(1, 2), n_professors=4,
                n_rooms=3, room_type_count=2, lab_fraction=0.4, availability_block_fraction=0.3,
                curriculum_size_range=(1, 3), mandate_fraction=0.3, coprof_fraction=0.3,
                link_fraction=0.3, seed=seed)
    base.update(kw)
    return generate_with_witness(GenParams(**base)).instance


@settings(max_examples=15)
@given(st.integers(0, 10**5), st.sampled_from(["hard", "soft"]))
def test_counts_match_formulas(seed, mode):
    inst = _count_inst(seed)
    model, idx = build_tip(inst, capacity_mode=mode)
    want = tip_counts(inst, capacity_mode=mode)
    assert (len(model.constraints), len(model.variables), model.num_nonzeros) == \
        (want.rows, want.columns, want.nonzeros)
    assert (len(idx.z), len(idx.w), len(idx.x), len(idx.u)) == (want.z, want.w, want.x, want.u)
    assert len(idx.w) == 35 * len(inst.professors)
    assert len(idx.u) == 35 * len(idx.x)


def test_decode_examples():
    empty = Instance({}, {}, {}, {}, {})
    assert decode_solution(empty, TipIndex(), {}) == Timetable()
    model, idx = build_tip(one_section())
    point = {v: 0.0 for v in model.variables}
    point[idx.z["S1", "M", 3, "R1"]] = 1
    assert decode_solution(one_section(), idx, point).meetings == {"S1": [("M", 3, "R1")]}
    point[idx.x["G1", "S1"]] = 0.5
    with pytest.raises(DecodeError):
        decode_solution(one_section(), idx, point)


@functools.lru_cache(maxsize=None)
def _solved(seed, mode="hard", scale=1.0):
    return toy_pipeline(seed, mode, Weights().scaled(scale) if scale != 1.0 else None)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_solved_toy_structure(seed):
    run = _solved(seed)
    res, inst, idx = run["result"], run["inst"], run["index"]
    assert res.status == "optimal"
    a = res.assignment
    tt = decode_solution(inst, idx, a)
    for s in inst.sorted_sections():
        assert len(tt.meetings[s.id]) == s.periods
    per_slot = Counter((g, d, t) for (g, d, t, s), v in idx.u.items() if a[v] > 0.5)
    assert max(per_slot.values()) <= 1
    for (g, s), v in idx.x.items():
        ones = sum(a[idx.u[g, d, t, s]] > 0.5 for d in inst.grid.days for t in inst.grid.periods)
        assert ones == (inst.sections[s].periods if a[v] > 0.5 else 0)
    for (p, d, t), v in idx.w.items():
        teaching = sum(a[n] > 0.5 for (s, dd, tt_, r), n in idx.z.items()
                       if inst.sections[s].prof == p and (dd, tt_) == (d, t))
        assert round(a[v]) == teaching
    rep = audit(inst, tt, claimed_objective=res.objective)
    assert rep.ok, rep.summary()
    assert score_soft(inst, tt).total == res.objective


@pytest.mark.parametrize("seed", [0, 1])
def test_soft_capacity_agrees_with_hard(seed):
    hard, soft = _solved(seed), _solved(seed, "soft")
    assert soft["result"].status == "optimal"
    a = soft["result"].assignment
    assert all(a[v] == 0 for v in soft["index"].aux["ts"].values())
    assert soft["result"].objective == hard["result"].objective


@pytest.mark.parametrize("seed", [0, 1])
def test_weight_scaling_keeps_argmin(seed):
    base, big = _solved(seed), _solved(seed, scale=3.0)
    assert big["result"].objective == pytest.approx(3 * base["result"].objective)
    # the scaled optimum is optimal for the original weights too
    ev = evaluate(base["model"], big["result"].assignment)
    assert ev.feasible and ev.objective == pytest.approx(base["result"].objective)


@pytest.mark.parametrize("seed", [0, 3])
def test_encoded_witness_prices_like_the_validator(seed):
    run = _solved(seed)
    point = encode_timetable(run["model"], run["index"], run["witness"])
    assert point is not None
    ev = evaluate(run["model"], point)
    assert ev.feasible
    assert ev.objective == score_soft(run["inst"], run["witness"]).total
    assert run["result"].objective <= ev.objective
