import itertools
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import instance, worked_example
from timetabling.ingest import validate_instance
from timetabling.mipcore import VarKind, evaluate, solve_exact
from timetabling.model import Group, Room, Section
from timetabling.subgroup import (
    IpaBuildError, IterationLimitError, SubgroupError, build_ipa, run_subgroup, split_group,
)


def packable(sizes, caps):
    """Brute-force bin packing: can every item go into some bin without overflow?"""
    for pick in itertools.product(range(len(caps)), repeat=len(sizes)):
        load = Counter()
        for z, b in zip(sizes, pick):
            load[b] += z
        if all(load[b] <= c for b, c in enumerate(caps)):
            return True
    return False


def test_worked_example_ipa_shape():
    inst = worked_example()
    model, index = build_ipa(inst, inst.groups.values())
    senses = Counter(c.sense.value for c in model.constraints)
    assert senses == {"=": 3, "<=": 3}
    kinds = Counter(v.kind for v in model.variables.values())
    assert kinds == {VarKind.BINARY: 9, VarKind.INTEGER: 3}
    assert set(index.x_vars) == {(g, s) for g in ("g1", "g2", "g3") for s in ("S1", "S2", "S3")}


def test_worked_example_optimum_by_enumeration():
    inst = worked_example()
    sizes = [g.size for g in inst.sorted_groups()]
    best = min(sum(max(0, sum(z for z, p in zip(sizes, pick) if p == j) - 30) for j in range(3))
               for pick in itertools.product(range(3), repeat=3))
    assert best == 15
    model, _ = build_ipa(inst, inst.groups.values())
    assert solve_exact(model).objective == best


def test_worked_example_refinement():
    res = run_subgroup(worked_example())
    assert res.z_trace[-1] == 0 and res.iterations <= 4
    assert len(res.final_groups) <= 5
    sizes = sorted(g.size for g in res.final_groups)
    assert sizes == [4, 11, 15, 30, 30]
    assert packable(sizes, [30, 30, 30])
    assert [h.sizes for h in res.history] == [(30, 11), (30, 4)]
    assert res.iteration_log().splitlines()[1] == "0,15,S1,g2,11"


def test_fitting_groups_need_no_iterations():
    inst = instance([Section("S1", "P", "C", 3, capacity=20, room_type="CLASS")],
                    [Group("G", 12, {"C"})])
    model, _ = build_ipa(inst, inst.groups.values())
    assert solve_exact(model).objective == 0
    res = run_subgroup(inst)
    assert (res.iterations, res.z_trace, res.history) == (0, [0], [])


def _tied():
    secs = [Section("L1", "P", "LEC", 3, capacity=30, room_type="CLASS", labtie=1),
            Section("L2", "P", "LEC", 3, capacity=30, room_type="CLASS", labtie=2),
            Section("B1", "Q", "LAB", 2, is_lab=True, capacity=30, room_type="CLASS", labtie=1),
            Section("B2", "Q", "LAB", 2, is_lab=True, capacity=30, room_type="CLASS", labtie=2)]
    return instance(secs, [Group("G", 10, {"LEC", "LAB"})])


def test_labtie_implication_holds_on_every_feasible_point():
    model, index = build_ipa(_tied(), _tied().groups.values())
    xs = list(index.x_vars.values())
    t_full = {v: model.variables[v].upper for v in index.t_vars.values()}
    feasible = 0
    for bits in itertools.product((0, 1), repeat=len(xs)):
        point = dict(zip(xs, bits)) | t_full
        if evaluate(model, point).feasible:
            feasible += 1
            for tie in (1, 2):
                if point[index.x_vars["G", f"B{tie}"]]:
                    assert point[index.x_vars["G", f"L{tie}"]] == 1
    assert feasible == 2


def test_course_without_sections():
    inst = instance([Section("S1", "P", "C", 3, room_type="CLASS")],
                    [Group("G", 5, {"C", "D"})])
    with pytest.raises(IpaBuildError):
        build_ipa(inst, inst.groups.values())


@pytest.mark.parametrize("size, part, want", [(41, 11, (30, 11)), (2, 1, (1, 1))])
def test_split_group(size, part, want):
    g = Group("g", size, {"A", "B"})
    a, b = split_group(g, part)
    assert (a.size, b.size) == want
    assert a.curriculum == b.curriculum == g.curriculum
    assert a.lineage == b.lineage == "g"
    assert (a.id, b.id) == ("g.1", "g.2")


@pytest.mark.parametrize("part", [0, 5, 7])
def test_split_group_guard(part):
    with pytest.raises(SubgroupError):
        split_group(Group("g", 5, {"A"}), part)


def test_split_ids_avoid_taken():
    a, b = split_group(Group("g", 5, {"A"}), 2, taken={"g.1", "g.2"})
    assert (a.id, b.id) == ("g.3", "g.4")


def test_iteration_limit():
    with pytest.raises(IterationLimitError):
        run_subgroup(worked_example(), max_iter=1)


@st.composite
def small_instances(draw):
    """One to three courses, each with enough seats in total for its demand."""
    n_courses = draw(st.integers(1, 3))
    courses = [f"C{i}" for i in range(n_courses)]
    groups = []
    for i in range(draw(st.integers(1, 5))):
        cur = draw(st.sets(st.sampled_from(courses), min_size=1))
        groups.append(Group(f"g{i}", draw(st.integers(1, 40)), cur))
    secs = []
    for c in courses:
        demand = sum(g.size for g in groups if c in g.curriculum)
        caps = draw(st.lists(st.integers(1, 30), min_size=1, max_size=3))
        while sum(caps) < demand:
            caps.append(30)
        secs += [Section(f"{c}s{j}", "P", c, 2, capacity=k, room_type="CLASS")
                 for j, k in enumerate(caps)]
    return instance(secs, groups)


@settings(max_examples=30)
@given(small_instances())
def test_refinement_properties(inst):
    res = run_subgroup(inst)
    assert res.z_trace[-1] == 0
    assert all(a >= b for a, b in zip(res.z_trace, res.z_trace[1:]))
    by_origin = Counter()
    for g in res.final_groups:
        root = inst.groups[res.origin(g.id)]
        assert g.curriculum == root.curriculum
        assert g.size >= 1
        by_origin[root.id] += g.size
    assert by_origin == {g.id: g.size for g in inst.groups.values()}
    # idempotence: the refined groups pack without further splitting
    model, _ = build_ipa(inst, res.final_groups)
    assert solve_exact(model).objective == 0


@settings(max_examples=20)
@given(st.integers(0, 10**6))
def test_short_capacity_means_positive_overflow(seed):
    rng = random.Random(seed)
    groups = [Group(f"g{i}", rng.randint(1, 30), {"C"}) for i in range(rng.randint(1, 4))]
    demand = sum(g.size for g in groups)
    caps = [rng.randint(1, 20) for _ in range(rng.randint(1, 3))]
    secs = [Section(f"s{j}", "P", "C", 2, capacity=k, room_type="CLASS") for j, k in enumerate(caps)]
    inst = instance(secs, groups, rooms=[Room("R", 40, "CLASS")])
    short = any(i.code == "demand-exceeds-capacity" for i in validate_instance(inst))
    assert short == (demand > sum(caps))
    if short:
        model, _ = build_ipa(inst, groups)
        assert solve_exact(model).objective > 0
