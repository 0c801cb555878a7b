import pytest

from mcdep.cli import run
from mcdep.errors import InvalidArgumentError, ParseError
from mcdep.fileio import gen_lrp, parse_instance_text, serialize_instance
from mcdep.report import parse_machine_block
from tests.conftest import FIXTURES, GOLDEN, LRP_T2_SEED


# --- parsing ---------------------------------------------------------------------


def test_parse_empty_file_errors_at_line_one():
    with pytest.raises(ParseError) as err:
        parse_instance_text("")
    assert err.value.line == 1
    with pytest.raises(ParseError):
        parse_instance_text("# only a comment\n\n")


def test_parse_unknown_kind():
    with pytest.raises(ParseError) as err:
        parse_instance_text("kind mystery\n")
    assert "unknown kind" in str(err.value)


def test_parse_reports_line_numbers():
    text = "kind lrp\nk 1\nlocation 0 0 0 1 1\nwat 3\n"
    with pytest.raises(ParseError) as err:
        parse_instance_text(text)
    assert err.value.line == 4
    assert "unknown key 'wat'" in str(err.value)


def test_parse_duplicate_ids_rejected():
    text = "kind lrp\nk 1\nlocation 0 0 0 1 1\nlocation 0 1 1 1 1\n"
    with pytest.raises(ParseError) as err:
        parse_instance_text(text)
    assert err.value.line == 4


def test_parse_invariant_violation_names_the_rule():
    text = "kind lrp\nk 5\n" + "".join(
        f"location {i} {i} 0 1 1\n" for i in range(4)
    )
    with pytest.raises(InvalidArgumentError) as err:
        parse_instance_text(text)
    assert "k must satisfy 1 <= k <= |locations|" in str(err.value)


@pytest.mark.filterwarnings("ignore:k=1 is not lower")
def test_parse_comments_and_numbers():
    text = (
        "# a comment line\n"
        "kind lrp   # trailing comment\n"
        "k 1\n"
        "location 0 0.5 1 2 0\n"
        "client 0 3 4\n"
    )
    loaded = parse_instance_text(text)
    assert loaded.kind == "lrp"
    assert loaded.data.locations[0].x == 0.5
    assert loaded.weights == (1.0, 1.0)  # alpha defaults to ones


def test_parse_schedpack_fixture(sp_t1):
    assert sp_t1.kind == "schedpack"
    data = sp_t1.data
    assert data.machines == 2 and data.week_hours == 8
    assert data.demand == (3, 2)
    assert data.products[1].operations == ((1, 2), (0, 2))


def test_parse_rejects_bad_schedpack_operation():
    text = "kind schedpack\nmachines 1\nweek_hours 8\nproduct 0 1 nope\n"
    with pytest.raises(ParseError) as err:
        parse_instance_text(text)
    assert err.value.line == 4


def test_widths_follow_fixture_sizes(lrp_t1):
    widths = [c.encoding_width for c in lrp_t1.problem.components]
    assert widths == [8, 10]


# --- round-trips --------------------------------------------------------------------


def test_gen_round_trip_byte_identical():
    text = gen_lrp(LRP_T2_SEED)
    assert serialize_instance(parse_instance_text(text)) == text


def test_gen_matches_committed_gap_fixture():
    committed = (FIXTURES / "lrp-t2.txt").read_text()
    assert gen_lrp(LRP_T2_SEED) == committed


def test_committed_fixtures_are_canonical():
    for name in (
        "lrp-t1.txt",
        "lrp-t2.txt",
        "sp-t1.txt",
        "synthetic-control.txt",
        "synthetic-path3.txt",
        "synthetic-parity.txt",
    ):
        text = (FIXTURES / name).read_text()
        assert serialize_instance(parse_instance_text(text)) == text, name


def test_gen_is_deterministic_and_validates():
    assert gen_lrp(5) == gen_lrp(5)
    assert gen_lrp(5) != gen_lrp(6)
    with pytest.raises(InvalidArgumentError):
        gen_lrp(0, locations=2, clients=2, k=3)


# --- CLI --------------------------------------------------------------------------


def _fixture(name: str) -> str:
    return str(FIXTURES / name)


def test_cli_usage_error_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["solve", _fixture("lrp-t1.txt")])  # missing required --solver
    assert exc.value.code == 1


def test_cli_unknown_subcommand_exits_one():
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 1


def test_cli_parse_error_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("kind lrp\nwat 1\n")
    assert run(["analyze", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_cli_validation_error_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("kind lrp\nk 5\nlocation 0 0 0 1 1\n")
    assert run(["analyze", str(bad)]) == 2


def test_cli_missing_file_exits_two(tmp_path):
    assert run(["analyze", str(tmp_path / "nope.txt")]) == 2


def test_cli_analyze_lrp_report_and_dot(tmp_path, capsys):
    dot_path = tmp_path / "graph.dot"
    code = run(
        ["analyze", _fixture("lrp-t1.txt"), "--budget", "65536", "--dot", str(dot_path)]
    )
    out = capsys.readouterr().out
    assert code == 0
    block = parse_machine_block(out)
    assert block["pair.FLP->VRP.verdict"] == "dependent"
    assert block["pair.FLP->VRP.label"] == "feasibility"
    assert block["pair.FLP->VRP.omitted_fitness"] == "true"
    assert block["pair.VRP->FLP.label"] == "feasibility"
    assert block["connected"] == "true"
    assert block["multicomponent"] == "true"
    assert block["mode"] == "exhaustive"
    assert dot_path.read_text() == (GOLDEN / "lrp-t1.dot").read_text()


def test_cli_analyze_budget_exceeded_exits_three(capsys):
    assert run(["analyze", _fixture("lrp-t1.txt"), "--budget", "4"]) == 3
    block = parse_machine_block(capsys.readouterr().out)
    assert block["partial"] == "true"


def test_cli_analyze_schedpack(capsys, tmp_path):
    dot_path = tmp_path / "sp.dot"
    code = run(["analyze", _fixture("sp-t1.txt"), "--dot", str(dot_path)])
    out = capsys.readouterr().out
    assert code == 0
    block = parse_machine_block(out)
    assert block["stream.JSSP->BPP.verdict"] == "time_dependent"
    assert block["stream.JSSP->JSSP.verdict"] == "time_dependent"
    assert block["multicomponent"] == "true"
    assert dot_path.read_text() == (GOLDEN / "sp-t1-compressed.dot").read_text()


def test_cli_decide_negative_threshold_is_no(capsys):
    assert run(["decide", _fixture("lrp-t1.txt"), "--k", "-1"]) == 0
    block = parse_machine_block(capsys.readouterr().out)
    assert block["verdict"] == "no"


def test_cli_decide_yes_with_witness(capsys, golden_values):
    z = golden_values["lrp_t1"]["optimum_value"]
    assert run(["decide", _fixture("lrp-t1.txt"), "--k", z]) == 0
    block = parse_machine_block(capsys.readouterr().out)
    assert block["verdict"] == "yes"
    assert block["witness"] == ",".join(
        str(v) for v in golden_values["lrp_t1"]["optimum_configs"]
    )


def test_cli_decide_budget_exceeded_exits_three(capsys):
    assert run(["decide", _fixture("lrp-t1.txt"), "--k", "0", "--budget", "16"]) == 3


def test_cli_solve_oracle_vs_coop(capsys, golden_values):
    assert run(["solve", _fixture("lrp-t2.txt"), "--solver", "oracle"]) == 0
    oracle_block = parse_machine_block(capsys.readouterr().out)
    assert run(["solve", _fixture("lrp-t2.txt"), "--solver", "coop", "--seed", "0"]) == 0
    coop_block = parse_machine_block(capsys.readouterr().out)
    assert float(coop_block["value"]) >= float(oracle_block["value"]) - 1e-9
    assert oracle_block["value"] == golden_values["lrp_t2"]["optimum_value"]


def test_cli_solve_schedpack_oracle(capsys, golden_values):
    assert run(["solve", _fixture("sp-t1.txt"), "--solver", "oracle"]) == 0
    block = parse_machine_block(capsys.readouterr().out)
    assert block["value"] == golden_values["sp_t1"]["optimum_value"]
    assert block["complete"] == "true"


def test_cli_solve_schedpack_rejects_coop(capsys):
    assert run(["solve", _fixture("sp-t1.txt"), "--solver", "coop"]) == 2


def test_cli_solve_unsatisfiable_demand_exits_four(tmp_path, capsys):
    # an operation longer than the window can never run, so the demand can
    # never be exhausted: the heuristic returns an incomplete episode (exit 4)
    # while the exhaustive solver reports the contradiction as validation
    stuck = tmp_path / "stuck.txt"
    stuck.write_text(
        "kind schedpack\n"
        "machines 1\n"
        "week_hours 8\n"
        "product 0 1 0,10\n"
        "demand 0 1\n"
        "container 10 1\n"
        "alpha 1 1\n"
    )
    assert run(["solve", str(stuck), "--solver", "isolated"]) == 4
    block = parse_machine_block(capsys.readouterr().out)
    assert block["complete"] == "false"
    assert run(["solve", str(stuck), "--solver", "oracle"]) == 2


def test_cli_timegraph_goldens(capsys):
    assert run(["timegraph", _fixture("sp-t1.txt"), "--horizon", "3"]) == 0
    out = capsys.readouterr().out
    assert out == (GOLDEN / "sp-t1-expanded-h3.dot").read_text()
    assert (
        run(["timegraph", _fixture("sp-t1.txt"), "--horizon", "3", "--compressed"]) == 0
    )
    out = capsys.readouterr().out
    assert out == (GOLDEN / "sp-t1-compressed.dot").read_text()


def test_cli_timegraph_rejects_composite(capsys):
    assert run(["timegraph", _fixture("lrp-t1.txt"), "--horizon", "3"]) == 2


def test_cli_gen_writes_canonical_file(tmp_path, capsys):
    out_path = tmp_path / "gen.txt"
    assert run(["gen", "--kind", "lrp", "--seed", "9", "--out", str(out_path)]) == 0
    text = out_path.read_text()
    assert serialize_instance(parse_instance_text(text)) == text
    assert run(["gen", "--kind", "lrp", "--seed", "9"]) == 0
    assert capsys.readouterr().out == text


def test_cli_seed_env_override(capsys, monkeypatch):
    monkeypatch.setenv("MCDEP_SEED", "7")
    assert run(["solve", _fixture("synthetic-path3.txt"), "--solver", "coop"]) == 0
    env_block = parse_machine_block(capsys.readouterr().out)
    assert env_block["seed"] == "7"
    monkeypatch.delenv("MCDEP_SEED")
    assert (
        run(["solve", _fixture("synthetic-path3.txt"), "--solver", "coop", "--seed", "7"])
        == 0
    )
    flag_block = parse_machine_block(capsys.readouterr().out)
    assert flag_block == env_block


def test_cli_jobs_flag_never_changes_output(capsys):
    runs = []
    for jobs in ("1", "4"):
        assert run(["analyze", _fixture("lrp-t2.txt"), "--jobs", jobs]) == 0
        runs.append(capsys.readouterr().out)
    assert runs[0] == runs[1]
