import csv
import subprocess
import sys

import pytest

from builders import instance
from timetabling.cli import EXIT_DATA, EXIT_INFEASIBLE, EXIT_LIMIT, EXIT_OK, EXIT_USAGE, run
from timetabling.ingest import write_instance
from timetabling.model import Group, Mandate, Room, Section


def pipeline(out, seed=1, mode="hard"):
    codes = {}
    for cmd in (["gen", "--seed", str(seed)], ["check-data"], ["subgroup"], ["build"],
                ["solve", "--start", str(out / "witness.csv")], ["validate"], ["report"]):
        codes[cmd[0]] = run(cmd + ["--out", str(out), "--mode", mode])
    return codes


@pytest.fixture(scope="module")
def solved(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    return out, pipeline(out)


def test_pipeline_exits_zero(solved):
    out, codes = solved
    assert set(codes.values()) == {EXIT_OK}
    assert (out / "audit.txt").read_text().startswith("audit: ok")
    assert (out / "violations.csv").read_text() == "family,subject,detail\n"
    for name in ("model.lp", "model.index.json", "solution.sol", "timetable.csv",
                 "groups_refined.csv", "subgroup_log.csv", "enrollments.csv"):
        assert (out / name).exists()


def test_report_grids_are_week_shaped(solved):
    out, _ = solved
    reports = sorted((out / "reports").iterdir())
    kinds = {p.name.split("_")[0] for p in reports}
    assert kinds == {"group", "prof", "room"}
    for path in reports:
        rows = list(csv.reader(path.open()))
        assert len(rows) == 6 and all(len(r) == 8 for r in rows)
        assert rows[0][1:] == [str(t) for t in range(1, 8)]
        assert [r[0] for r in rows[1:]] == ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday"]
    group = next(p for p in reports if p.name.startswith("group_"))
    cells = [c for row in list(csv.reader(group.open()))[1:] for c in row[1:] if c]
    assert cells  # every group attends something


def test_validate_flags_a_tampered_solution(solved, tmp_path):
    out, _ = solved
    lines = (out / "solution.sol").read_text().splitlines()
    flipped = [ln.replace(" 1", " 0") if ln.startswith("z(") and ln.endswith(" 1") else ln
               for ln in lines]
    bad = tmp_path / "bad.sol"
    bad.write_text("\n".join(flipped) + "\n")
    assert run(["validate", "--out", str(out), "--solution", str(bad)]) == EXIT_DATA


def test_external_solver_round_trip(solved):
    out, _ = solved
    cmd = f"cp {out / 'solution.sol'} {{sol}} # {{lp}}"
    assert run(["solve", "--out", str(out), "--solver", "external", "--cmd", cmd]) == EXIT_OK


def test_soft_mode_pipeline(tmp_path):
    codes = pipeline(tmp_path, seed=0, mode="soft")
    assert set(codes.values()) == {EXIT_OK}


def test_pipeline_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    pipeline(a, seed=5)
    pipeline(b, seed=5)
    files = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    assert files
    for rel in files:
        assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel


def test_check_data_on_sample(sample_dir, capsys):
    assert run(["check-data", "--data", str(sample_dir)]) == EXIT_DATA
    assert "demand-exceeds-capacity" in capsys.readouterr().out


def test_limit_exit(tmp_path):
    run(["gen", "--seed", "2", "--out", str(tmp_path)])
    run(["subgroup", "--out", str(tmp_path)])
    assert run(["solve", "--out", str(tmp_path), "--max-nodes", "5"]) == EXIT_LIMIT


def test_infeasible_exit(tmp_path):
    # two courses whose only sections are mandated into the same slot for one group
    secs = [Section(f"S{i}", f"P{i}", f"C{i}", 1, capacity=10, room_type="CLASS",
                    mandates=(Mandate("M", 1),)) for i in range(2)]
    inst = instance(secs, [Group("G", 5, {"C0", "C1"})],
                    rooms=[Room("R1", 10, "CLASS"), Room("R2", 10, "CLASS")])
    write_instance(inst, tmp_path)
    assert run(["check-data", "--out", str(tmp_path)]) == EXIT_OK
    assert run(["solve", "--out", str(tmp_path)]) == EXIT_INFEASIBLE


@pytest.mark.parametrize("argv", [["bogus"], [], ["solve", "--solver", "external"],
                                  ["build", "--mode", "loose"]])
def test_usage_errors(argv):
    assert run(argv) == EXIT_USAGE


def test_missing_files(tmp_path):
    assert run(["build", "--out", str(tmp_path)]) == EXIT_DATA


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "timetabling.cli", "nonsense"],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_USAGE
    assert "usage" in proc.stderr
