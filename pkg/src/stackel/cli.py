"""Command-line front door.

One binary, five commands: solve arbitrary leader-follower trees, solve
the bridge game, run scripted sessions, summarize logged sessions, and
serve the live game.  Identical invocations write identical bytes, so
every artifact a command produces can be diffed across runs.

Exit codes: 0 success, 2 infeasible punishment cap, 3 for anything that
failed to parse (flags, files, specs).
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import click

from .bridge import (
    HUMAN_CLOSE,
    STARTS,
    BridgeConfig,
    BridgeConfigError,
    solve_bridge,
)
from .frontier import (
    InfeasibleCap,
    _cents_to_dollars,
    export_frontier_csv,
    extract_punishment,
    solve_frontier,
    unroll_policy,
)
from .games import PolicyError, TreeFormatError, import_tree
from .harness import (
    GROUPS,
    SessionRecord,
    bully_persistence,
    export_episodes_jsonl,
    make_human,
    read_episodes_jsonl,
    run_session,
)
from .stats import ContingencyTable

INFEASIBLE_EXIT = 2
PARSE_EXIT = 3


def parse_theta(text: str):
    """Integer cents, or inf for an uncapped (equilibrium) solve."""
    lowered = text.strip().lower()
    if lowered in ("inf", "+inf", "infinity"):
        return float("inf")
    try:
        value = int(lowered)
    except ValueError:
        raise ValueError(f"theta must be integer cents or inf, got {text!r}") from None
    if value < 0:
        raise ValueError("theta must be nonnegative")
    return value


def effective_seed(flag_value: int) -> int:
    env = os.environ.get("STACKEL_SEED")
    if env is None:
        return flag_value
    try:
        return int(env)
    except ValueError:
        raise ValueError(f"STACKEL_SEED must be an integer, got {env!r}") from None


def _load_config(config_path) -> BridgeConfig:
    if config_path is None:
        return BridgeConfig()
    return BridgeConfig.from_file(config_path)


def _dollars(cents) -> str:
    return "$" + _cents_to_dollars(cents)


@click.group()
def cli() -> None:
    """Stackelberg punishment solver and bridge negotiation testbed."""


@cli.command("solve")
@click.option("--tree", "tree_path", required=True, help="game tree file")
@click.option("--theta", "theta_text", required=True, help="cap in cents, or inf")
@click.option("--out", "out_path", required=True, help="policy JSON destination")
@click.option("--frontier-csv", "csv_path", default=None, help="also dump all frontiers")
def solve_cmd(tree_path, theta_text, out_path, csv_path) -> None:
    """Solve a tree and write the committed leader policy."""
    theta = parse_theta(theta_text)
    tree = import_tree(tree_path)
    frontiers = solve_frontier(tree)
    target = extract_punishment(frontiers[tree.root], theta)
    policy = unroll_policy(tree, frontiers, target)
    payload = {
        "theta": "inf" if theta == float("inf") else str(theta),
        "target": {"leader": str(target.leader), "follower": str(target.follower)},
        "policy": {
            str(nid): {action: str(weight) for action, weight in dist.items()}
            for nid, dist in policy.items()
        },
    }
    with open(out_path, "w") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")
    if csv_path is not None:
        export_frontier_csv(frontiers, csv_path)
    click.echo(f"target: leader={_dollars(target.leader)} follower={_dollars(target.follower)}")
    click.echo(f"policy written to {out_path}")


@cli.group("bridge")
def bridge_group() -> None:
    """Operations on the one-lane-bridge game."""


@bridge_group.command("solve")
@click.option("--theta", "theta_text", required=True, help="cap in cents, or inf")
@click.option("--config", "config_path", default=None, help="bridge config JSON")
@click.option("--regime", is_flag=True, help="classify the punishment behavior")
@click.option(
    "--start",
    type=click.Choice(STARTS),
    default=HUMAN_CLOSE,
    show_default=True,
    help="which car begins adjacent to the bridge",
)
def bridge_solve_cmd(theta_text, config_path, regime, start) -> None:
    """Solve the bridge game at a punishment cap."""
    cfg = _load_config(config_path)
    theta = parse_theta(theta_text)
    solution = solve_bridge(cfg, start)
    equilibrium = solution.equilibrium()
    punishment = solution.punishment(theta)
    click.echo(f"start: {start}")
    click.echo(
        "equilibrium: "
        f"leader={_dollars(equilibrium.leader)} follower={_dollars(equilibrium.follower)}"
    )
    click.echo(
        f"punishment(theta={theta_text}): "
        f"leader={_dollars(punishment.leader)} follower={_dollars(punishment.follower)}"
    )
    if regime:
        report = solution.classify_regime(theta)
        click.echo(f"regime: {report.regime}")
        for prob, cls, hold in report.branches:
            click.echo(f"  with probability {prob}: {cls}, human delayed {hold} steps")
        seconds = report.block_steps * cfg.seconds_per_step
        click.echo(f"block length: {report.block_steps} steps ({seconds} s)")


def _human_slug(spec: str) -> str:
    return spec.replace(":", "-").replace(",", "-")


@cli.command("simulate")
@click.option("--human", "human_spec", required=True, help="human model spec")
@click.option("--group", type=click.Choice(GROUPS), required=True)
@click.option("--episodes", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--theta", "theta_text", default=None, help="override config theta")
@click.option("--config", "config_path", default=None, help="bridge config JSON")
@click.option("--out", "out_dir", required=True, help="log directory")
def simulate_cmd(human_spec, group, episodes, seed, theta_text, config_path, out_dir) -> None:
    """Run one scripted session and log its episodes."""
    seed = effective_seed(seed)
    cfg = _load_config(config_path)
    theta = cfg.theta if theta_text is None else parse_theta(theta_text)
    human = make_human(human_spec)
    session = run_session(human, group, episodes=episodes, cfg=cfg, theta=theta, seed=seed)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"session-{group}-{_human_slug(human_spec)}-{seed}.jsonl")
    with open(path, "w") as handle:
        export_episodes_jsonl(session.episodes, handle)
    click.echo(f"wrote {path}")
    click.echo(f"episodes: {len(session.episodes)}  bullied: {session.bullied_episodes()}")


def load_sessions(logs_dir) -> list[SessionRecord]:
    """Rebuild session records from a directory of simulate logs.

    The group and seed ride in the file name (session-GROUP-...-SEED); the
    rest of the record is in the lines themselves.
    """
    root = Path(logs_dir)
    sessions = []
    for path in sorted(root.glob("session-*.jsonl")):
        parts = path.stem.split("-")
        if len(parts) < 3 or parts[1] not in GROUPS:
            raise ValueError(f"cannot recover a group from log name {path.name!r}")
        try:
            seed = int(parts[-1])
        except ValueError:
            raise ValueError(f"cannot recover a seed from log name {path.name!r}") from None
        with open(path) as handle:
            episodes = tuple(read_episodes_jsonl(handle))
        sessions.append(SessionRecord(group=parts[1], seed=seed, theta=None, episodes=episodes))
    if not sessions:
        raise ValueError(f"no session logs (session-*.jsonl) under {logs_dir}")
    return sessions


@cli.command("stats")
@click.option("--logs", "logs_dir", required=True, help="directory of simulate logs")
@click.option("--fisher", is_flag=True, help="once-vs-more contingency test")
@click.option("--persistence-csv", "persistence_path", default=None)
def stats_cmd(logs_dir, fisher, persistence_path) -> None:
    """Summarize logged sessions across groups."""
    sessions = load_sessions(logs_dir)
    for group in GROUPS:
        members = [s for s in sessions if s.group == group]
        engaged = sum(1 for s in members if s.bullied_episodes() > 0)
        click.echo(f"{group}: {len(members)} sessions, {engaged} with a bullied episode")
    if fisher:
        table = ContingencyTable.from_sessions(sessions)
        once, more = table.as_rows()
        click.echo(f"bullied once   control={once[0]} experimental={once[1]}")
        click.echo(f"bullied more   control={more[0]} experimental={more[1]}")
        try:
            click.echo(f"fisher p = {table.p_value():.10g}")
        except ValueError as exc:
            # an empty row or column is a fact about the data, not a failure
            click.echo(f"fisher p undefined: {exc}")
    if persistence_path is not None:
        with open(persistence_path, "w") as handle:
            handle.write("group,k,fraction\n")
            for group in GROUPS:
                members = [s for s in sessions if s.group == group]
                if not any(s.bullied_episodes() > 0 for s in members):
                    continue
                curve = bully_persistence(members)
                for k, fraction in enumerate(curve.fractions, start=1):
                    handle.write(f"{group},{k},{fraction!r}\n")
        click.echo(f"persistence curves written to {persistence_path}")


@cli.command("serve")
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--theta", "theta_text", default=None, help="override config theta")
@click.option("--config", "config_path", default=None, help="bridge config JSON")
@click.option("--out", "out_dir", default="server-logs", show_default=True)
@click.option(
    "--static",
    "static_dir",
    default=None,
    help="browser bundle directory [default: frontend/dist when present]",
)
def serve_cmd(port, host, theta_text, config_path, out_dir, static_dir) -> None:
    """Serve the live bridge game over websockets."""
    import uvicorn

    from .server import build_app

    cfg = _load_config(config_path)
    theta = cfg.theta if theta_text is None else parse_theta(theta_text)
    if static_dir is None and Path("frontend/dist").is_dir():
        static_dir = "frontend/dist"
    app = build_app(cfg=cfg, theta=theta, log_dir=out_dir, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="stackel", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return PARSE_EXIT
    except click.ClickException as exc:
        exc.show()
        return PARSE_EXIT
    except InfeasibleCap as exc:
        click.echo(f"error: {exc}", err=True)
        return INFEASIBLE_EXIT
    except (TreeFormatError, BridgeConfigError, PolicyError, ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return PARSE_EXIT
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
