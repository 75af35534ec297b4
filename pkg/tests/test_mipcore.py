import itertools
import math
import random
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import brute_force, random_binary_model, worked_example
from timetabling.mipcore import (
    ExternalConfig, Limits, LPNameError, MissingVariableError, Model, SolutionParseError,
    SolverFailure, UnsupportedModelError, VerificationError, evaluate, parse_solution, read_lp,
    solve_exact, solve_external, write_lp, write_solution,
)
from timetabling.subgroup import build_ipa


# evaluate

def test_evaluate_empty_model():
    assert tuple(evaluate(Model(), {})) == (True, [], 0)


def test_evaluate_reports_violated_row():
    m = Model()
    m.add_binary("x")
    m.add_constraint("atleast", [(1, "x")], ">=", 1)
    assert tuple(evaluate(m, {"x": 0})) == (False, ["atleast"], 0)


def test_evaluate_objective_and_missing():
    m = Model()
    m.add_binary("x")
    m.add_binary("y")
    m.set_objective([(3, "x"), (2, "y")])
    assert evaluate(m, {"x": 1, "y": 1}).objective == 5
    with pytest.raises(MissingVariableError):
        evaluate(m, {"x": 1})


def test_evaluate_flags_bounds_and_integrality():
    m = Model()
    m.add_integer("k", 0, 3)
    assert evaluate(m, {"k": 4}).violated == ["bound:k"]
    assert evaluate(m, {"k": 1.5}).violated == ["integrality:k"]


# LP files

def _one_binary():
    m = Model("one")
    m.add_binary("x")
    m.set_objective([(1, "x")])
    m.add_constraint("c1", [(1, "x")], ">=", 0)
    return m


def test_write_lp_skeleton_and_determinism():
    text = write_lp(_one_binary())
    for head in ("Minimize", "Subject To", "Binaries", "End"):
        assert head in text
    assert write_lp(_one_binary()) == text


def test_write_lp_rejects_reserved_names():
    m = Model()
    m.add_binary("x[1]")
    with pytest.raises(LPNameError):
        write_lp(m)


@given(st.lists(st.integers(-50, 50), min_size=2, max_size=5),
       st.lists(st.integers(-50, 50), min_size=2, max_size=5))
def test_write_lp_injective_in_coefficients(a, b):
    def model(coefs):
        m = Model()
        for i in range(5):
            m.add_integer(f"v{i}", 0, 9)
        m.add_constraint("r", [(c, f"v{i}") for i, c in enumerate(coefs)], "<=", 7)
        return m
    same = [c for c in a if c] == [c for c in b if c] and \
        [i for i, c in enumerate(a) if c] == [i for i, c in enumerate(b) if c]
    assert (write_lp(model(a)) == write_lp(model(b))) == same


def test_ipa_lp_round_trip():
    model, _ = build_ipa(worked_example(), worked_example().groups.values())
    back = read_lp(write_lp(model))
    assert len(back.constraints) == 6
    assert {c.sense.value for c in back.constraints} == {"=", "<="}
    # the header comment carries the model name, which LP files do not store
    assert write_lp(back).split("Minimize")[1] == write_lp(model).split("Minimize")[1]


def test_ipa_lp_readable_by_highs(tmp_path):
    highspy = pytest.importorskip("highspy")
    model, _ = build_ipa(worked_example(), worked_example().groups.values())
    path = tmp_path / "ipa.lp"
    path.write_text(write_lp(model))
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    assert h.readModel(str(path)) == highspy.HighsStatus.kOk
    lp = h.getLp()
    assert (lp.num_row_, lp.num_col_) == (6, 12)
    h.run()
    assert h.getInfo().objective_function_value == pytest.approx(15)


# solution files

def test_parse_solution_examples():
    m = _one_binary()
    assert parse_solution("x 1\n", m) == {"x": 1.0}
    notes = []
    assert parse_solution("", m, warnings=notes) == {"x": 0.0} and notes
    with pytest.raises(SolutionParseError):
        parse_solution("x one\n", m)
    with pytest.raises(SolutionParseError):
        parse_solution("x 2\n", m)


def test_solution_round_trip():
    m = _one_binary()
    text = write_solution({"x": 1}, m, status="optimal", objective=1)
    assert text.startswith("# status: optimal")
    assert parse_solution(text, m) == {"x": 1.0}


# exact solver

def test_forced_overflow():
    m = Model()
    m.add_binary("x1")
    m.add_binary("x2")
    m.add_integer("t", 0, 10)
    m.set_objective([(1, "t")])
    m.add_constraint("cap", [(1, "x1"), (1, "x2"), (-1, "t")], "<=", 1)
    m.add_constraint("f1", [(1, "x1")], "=", 1)
    m.add_constraint("f2", [(1, "x2")], "=", 1)
    res = solve_exact(m)
    assert res.status == "optimal" and res.proof_gap == 0
    assert res.assignment["t"] == 1 and res.objective == 1


def test_knapsack_matches_enumeration():
    rng = random.Random(12)
    weight = [rng.randint(3, 20) for _ in range(12)]
    value = [rng.randint(1, 30) for _ in range(12)]
    cap = sum(weight) // 2
    m = Model("knap")
    for i in range(12):
        m.add_binary(f"k{i}")
    m.set_objective((-value[i], f"k{i}") for i in range(12))
    m.add_constraint("w", [(weight[i], f"k{i}") for i in range(12)], "<=", cap)
    best = max(sum(v for v, b in zip(value, bits) if b)
               for bits in itertools.product((0, 1), repeat=12)
               if sum(w for w, b in zip(weight, bits) if b) <= cap)
    res = solve_exact(m)
    assert res.status == "optimal" and res.objective == -best


def test_infeasible_binary():
    m = Model()
    m.add_binary("x")
    m.add_constraint("lo", [(1, "x")], ">=", 1)
    m.add_constraint("hi", [(1, "x")], "<=", 0)
    assert solve_exact(m).status == "infeasible"


def test_continuous_rejected():
    m = Model()
    m.add_var("y", "continuous", 0, 1)
    with pytest.raises(UnsupportedModelError):
        solve_exact(m)


def test_infinite_integer_bound_rejected():
    m = Model()
    m.add_integer("k")
    with pytest.raises(UnsupportedModelError):
        solve_exact(m)


def _hard_model():
    return random_binary_model(random.Random(3), max_vars=18, max_rows=3)


def test_node_limit_reports_limit():
    res = solve_exact(_hard_model(), Limits(max_nodes=2))
    assert res.status in ("limit", "optimal", "infeasible")
    if res.status == "limit" and res.has_solution:
        assert res.proof_gap >= 0
        assert evaluate(_hard_model(), res.assignment).feasible


def test_determinism_of_incumbent_sequence():
    a = solve_exact(_hard_model())
    b = solve_exact(_hard_model())
    assert (a.incumbents, a.assignment, a.nodes) == (b.incumbents, b.assignment, b.nodes)


def test_start_seeds_incumbent_and_rejects_infeasible():
    m = Model()
    for i in range(4):
        m.add_binary(f"b{i}")
    m.set_objective((-(i + 1), f"b{i}") for i in range(4))
    m.add_constraint("one", [(1, f"b{i}") for i in range(4)], "<=", 1)
    res = solve_exact(m, start={"b0": 1, "b1": 0, "b2": 0, "b3": 0})
    assert res.status == "optimal" and res.objective == -4
    assert res.incumbents[0] == -1
    with pytest.raises(ValueError):
        solve_exact(m, start={f"b{i}": 1 for i in range(4)})


def test_block_cache_reuse():
    m = worked_example()
    model, _ = build_ipa(m, m.groups.values())
    cache = {}
    first = solve_exact(model, cache=cache)
    assert cache
    again = solve_exact(model, cache=cache)
    assert (first.objective, first.assignment) == (again.objective, again.assignment)


@settings(max_examples=60)
@given(st.integers(0, 10**6))
def test_matches_enumeration(seed):
    model = random_binary_model(random.Random(seed), max_vars=12, max_rows=8)
    want_status, want_obj = brute_force(model)
    res = solve_exact(model)
    assert res.status == want_status
    if want_status == "optimal":
        assert res.objective == pytest.approx(want_obj)
        ev = evaluate(model, res.assignment)
        assert ev.feasible and ev.objective == pytest.approx(res.objective)


def _tied_ipa(sizes, n_pairs, cap_lec, cap_lab):
    """Identical lecture/lab pairs tied one to one, with overflow variables."""
    m = Model("tied")
    lec = [f"L{j}" for j in range(n_pairs)]
    lab = [f"B{j}" for j in range(n_pairs)]
    for g in range(len(sizes)):
        for s in lec + lab:
            m.add_binary(f"x{g}_{s}")
    for s in lec + lab:
        m.add_integer(f"t_{s}", 0, sum(sizes))
    for g in range(len(sizes)):
        m.add_constraint(f"a{g}", [(1, f"x{g}_{s}") for s in lec], "=", 1)
        m.add_constraint(f"b{g}", [(1, f"x{g}_{s}") for s in lab], "=", 1)
        for j in range(n_pairs):
            m.add_constraint(f"tie{g}_{j}", [(1, f"x{g}_L{j}"), (-1, f"x{g}_B{j}")], ">=", 0)
    for s, cap in [(s, cap_lec) for s in lec] + [(s, cap_lab) for s in lab]:
        m.add_constraint(f"cap_{s}", [(z, f"x{g}_{s}") for g, z in enumerate(sizes)]
                         + [(-1, f"t_{s}")], "<=", cap)
    m.set_objective((1, f"t_{s}") for s in lec + lab)
    return m


@settings(max_examples=25)
@given(st.lists(st.integers(1, 30), min_size=2, max_size=6), st.integers(2, 3),
       st.integers(5, 40), st.integers(5, 40))
def test_symmetric_tied_packing(sizes, n_pairs, cap_lec, cap_lab):
    best = math.inf
    for pick in itertools.product(range(n_pairs), repeat=len(sizes)):
        load = [sum(z for z, p in zip(sizes, pick) if p == j) for j in range(n_pairs)]
        best = min(best, sum(max(0, x - cap_lec) + max(0, x - cap_lab) for x in load))
    res = solve_exact(_tied_ipa(sizes, n_pairs, cap_lec, cap_lab))
    assert res.status == "optimal" and res.objective == best


# external adapter

def _prepared(tmp_path, text):
    path = tmp_path / "prepared.sol"
    path.write_text(text)
    return path


def test_external_copy_command(tmp_path):
    m = _one_binary()
    sol = _prepared(tmp_path, "# status: optimal\n# objective: 99\nx 0\n")
    res = solve_external(m, ExternalConfig(f"cp {sol} {{sol}} # {{lp}}"))
    assert res.status == "optimal" and res.objective == 0


def test_external_failure(tmp_path):
    with pytest.raises(SolverFailure) as err:
        solve_external(_one_binary(), ExternalConfig("echo boom; exit 1 # {lp} {sol}"))
    assert err.value.returncode == 1 and "boom" in err.value.output


def test_external_violating_solution(tmp_path):
    m = _one_binary()
    m.add_constraint("need", [(1, "x")], ">=", 1)
    sol = _prepared(tmp_path, "x 0\n")
    with pytest.raises(VerificationError):
        solve_external(m, ExternalConfig(f"cp {sol} {{sol}} # {{lp}}"))


def test_external_runs_a_real_reader(tmp_path):
    # a stand-in solver: a python one-liner that reads the LP and writes x=1
    script = tmp_path / "fake.py"
    script.write_text("import sys\nassert 'Minimize' in open(sys.argv[1]).read()\n"
                      "open(sys.argv[2], 'w').write('x 1\\n')\n")
    res = solve_external(_one_binary(), ExternalConfig(f"{sys.executable} {script} {{lp}} {{sol}}"))
    assert res.status == "feasible" and res.objective == 1
