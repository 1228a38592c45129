"""Command-line behavior: exit codes, output bytes, seed handling."""

from fractions import Fraction

import pytest

from stackel.cli import main, parse_theta
from stackel.games import GameTree, Node, export_tree


def run_cli(*argv):
    return main(list(argv))


def make_tree(path):
    # leader picks between two leaves; follower minimax floor is 1 cent
    tree = GameTree(
        root="r",
        nodes={
            "r": Node("r", "leader", (("a", "x"), ("b", "y")), None),
            "x": Node("x", "leaf", (), (5, 5)),
            "y": Node("y", "leaf", (), (3, 1)),
        },
    )
    export_tree(tree, path)
    return tree


def test_parse_theta_accepts_cents_and_inf():
    assert parse_theta("7") == 7
    assert parse_theta(" INF ") == float("inf")
    assert parse_theta("infinity") == float("inf")
    with pytest.raises(ValueError):
        parse_theta("7.5")
    with pytest.raises(ValueError):
        parse_theta("-1")


def test_bridge_solve_prints_regime(capsys):
    assert run_cli("bridge", "solve", "--theta", "2", "--regime") == 0
    out = capsys.readouterr().out
    assert "regime: mixture" in out
    assert "block length: 9 steps (18 s)" in out
    assert "punishment(theta=2): leader=$0.054000 follower=$0.020000" in out


def test_bridge_solve_uncapped_matches_equilibrium(capsys):
    assert run_cli("bridge", "solve", "--theta", "inf") == 0
    out = capsys.readouterr().out
    assert "equilibrium: leader=$0.110000 follower=$0.100000" in out
    assert "punishment(theta=inf): leader=$0.110000 follower=$0.100000" in out


def test_bad_theta_is_a_parse_error(capsys):
    assert run_cli("bridge", "solve", "--theta", "abc") == 3
    assert "theta must be integer cents or inf" in capsys.readouterr().err


def test_unknown_flag_is_a_parse_error():
    assert run_cli("bridge", "solve", "--theta", "2", "--no-such-flag") == 3


def test_help_exits_clean():
    assert run_cli("--help") == 0


def test_solve_writes_policy_and_frontiers(tmp_path, capsys):
    tree_path = tmp_path / "tree.txt"
    make_tree(tree_path)
    policy_path = tmp_path / "policy.json"
    csv_path = tmp_path / "front.csv"
    code = run_cli(
        "solve",
        "--tree", str(tree_path),
        "--theta", "5",
        "--out", str(policy_path),
        "--frontier-csv", str(csv_path),
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "leader=$0.050000 follower=$0.050000" in out
    first = policy_path.read_bytes()
    assert b'"a": "1"' in first
    assert csv_path.read_text().splitlines()[0] == (
        "kind,node_id,leader_lo,follower_lo,leader_hi,follower_hi"
    )
    # identical invocation, identical bytes
    run_cli("solve", "--tree", str(tree_path), "--theta", "5", "--out", str(policy_path))
    assert policy_path.read_bytes() == first


def test_solve_infeasible_cap_exits_two(tmp_path, capsys):
    tree_path = tmp_path / "tree.txt"
    make_tree(tree_path)
    code = run_cli(
        "solve", "--tree", str(tree_path), "--theta", "0", "--out", str(tmp_path / "p.json")
    )
    assert code == 2
    assert "below the minimal achievable follower value" in capsys.readouterr().err


def test_solve_missing_tree_exits_three(tmp_path):
    code = run_cli(
        "solve",
        "--tree", str(tmp_path / "nope.txt"),
        "--theta", "1",
        "--out", str(tmp_path / "p.json"),
    )
    assert code == 3


def test_simulate_writes_parseable_log_and_stats_reads_it(tmp_path, capsys):
    logs = tmp_path / "logs"
    for group in ("control", "experimental"):
        for human in ("always-bully", "adaptive:1"):
            code = run_cli(
                "simulate",
                "--human", human,
                "--group", group,
                "--episodes", "4",
                "--seed", "3",
                "--theta", "2",
                "--out", str(logs),
            )
            assert code == 0
    capsys.readouterr()
    assert (logs / "session-control-always-bully-3.jsonl").exists()
    code = run_cli("stats", "--logs", str(logs), "--fisher")
    assert code == 0
    out = capsys.readouterr().out
    assert "control: 2 sessions, 2 with a bullied episode" in out
    assert "fisher p = " in out


def test_stats_reports_degenerate_fisher_without_failing(tmp_path, capsys):
    logs = tmp_path / "logs"
    for group in ("control", "experimental"):
        assert run_cli(
            "simulate",
            "--human", "always-bully",
            "--group", group,
            "--episodes", "4",
            "--seed", "3",
            "--theta", "2",
            "--out", str(logs),
        ) == 0
    capsys.readouterr()
    assert run_cli("stats", "--logs", str(logs), "--fisher") == 0
    assert "fisher p undefined" in capsys.readouterr().out


def test_simulate_reruns_are_byte_identical(tmp_path):
    logs_a = tmp_path / "a"
    logs_b = tmp_path / "b"
    for logs in (logs_a, logs_b):
        args = (
            "simulate",
            "--human", "adaptive:1",
            "--group", "experimental",
            "--episodes", "4",
            "--seed", "11",
            "--theta", "2",
            "--out", str(logs),
        )
        assert run_cli(*args) == 0
    name = "session-experimental-adaptive-1-11.jsonl"
    assert (logs_a / name).read_bytes() == (logs_b / name).read_bytes()


def test_env_seed_overrides_flag(tmp_path, monkeypatch):
    monkeypatch.setenv("STACKEL_SEED", "99")
    logs = tmp_path / "logs"
    code = run_cli(
        "simulate",
        "--human", "always-fair",
        "--group", "control",
        "--episodes", "2",
        "--out", str(logs),
        "--seed", "1",
    )
    assert code == 0
    assert (logs / "session-control-always-fair-99.jsonl").exists()


def test_bad_env_seed_is_a_parse_error(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("STACKEL_SEED", "not-a-number")
    code = run_cli(
        "simulate",
        "--human", "always-fair",
        "--group", "control",
        "--episodes", "1",
        "--out", str(tmp_path),
    )
    assert code == 3
    assert "STACKEL_SEED" in capsys.readouterr().err


def test_stats_on_empty_dir_exits_three(tmp_path, capsys):
    assert run_cli("stats", "--logs", str(tmp_path)) == 3
    assert "no session logs" in capsys.readouterr().err


def test_stats_persistence_csv(tmp_path, capsys):
    logs = tmp_path / "logs"
    for seed in (0, 1):
        assert run_cli(
            "simulate",
            "--human", "adaptive:1",
            "--group", "experimental",
            "--episodes", "4",
            "--seed", str(seed),
            "--theta", "2",
            "--out", str(logs),
        ) == 0
    curve_path = tmp_path / "curves.csv"
    assert run_cli(
        "stats", "--logs", str(logs), "--persistence-csv", str(curve_path)
    ) == 0
    lines = curve_path.read_text().splitlines()
    assert lines[0] == "group,k,fraction"
    assert lines[1].startswith("experimental,1,")
