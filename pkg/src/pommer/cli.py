"""Command-line interface.

Subcommands: run, verify, stats, serve.  Every flag can be defaulted from
an environment variable named POMMER_<FLAG> (dashes become underscores),
e.g. POMMER_TIE_POLICY=competition.  Exit codes: 0 success, 1 usage,
2 verification failure, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .agents import BUILTIN_AGENTS, make_agent
from .replay import ReplayFormatError, load_replay, verify_replay
from .runner import MatchConfig, run_match, stats_report
from .protocol import serve_agent

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY_FAILED = 2
EXIT_RUNTIME = 3

ENV_PREFIX = "POMMER_"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _env(flag: str, fallback=None):
    return os.environ.get(ENV_PREFIX + flag.replace("-", "_").upper(), fallback)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pommer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="play a match and report results")
    run.add_argument("--preset", default=_env("preset", "ffa"),
                     choices=["ffa", "team", "radio", "nips"])
    run.add_argument("--agents", default=_env("agents", "simple,simple,simple,simple"),
                     help="four comma-separated agent names or http URLs")
    run.add_argument("--episodes", type=int, default=int(_env("episodes", 1)))
    run.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    run.add_argument("--record", default=_env("record"), metavar="DIR",
                     help="directory for replay files")
    run.add_argument("--tie-policy", default=_env("tie-policy", "report"),
                     choices=["report", "competition"])
    run.add_argument("--timeout-ms", type=float, default=float(_env("timeout-ms", 100)))
    run.add_argument("--workers", type=int, default=int(_env("workers", 1)))
    run.add_argument("--json", action="store_true", help="machine-readable report on stdout")

    verify = sub.add_parser("verify", help="re-simulate a replay and check its digest")
    verify.add_argument("--replay", default=_env("replay"), required=_env("replay") is None,
                        metavar="FILE")

    stats = sub.add_parser("stats", help="aggregate statistics over recorded replays")
    stats.add_argument("--dir", default=_env("dir"), required=_env("dir") is None,
                       metavar="DIR")
    stats.add_argument("--json", action="store_true")

    serve = sub.add_parser("serve", help="expose a builtin agent over HTTP")
    serve.add_argument("--agent", default=_env("agent", "simple"),
                       choices=sorted(BUILTIN_AGENTS))
    serve.add_argument("--port", type=int, default=int(_env("port", 8551)))
    serve.add_argument("--host", default=_env("host", "127.0.0.1"))
    serve.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    return parser


def cmd_run(args) -> int:
    agents = tuple(a.strip() for a in args.agents.split(","))
    match = MatchConfig(
        preset=args.preset,
        agents=agents,
        episodes=args.episodes,
        seed=args.seed,
        tie_policy=args.tie_policy,
        timeout=args.timeout_ms / 1000.0,
        record_dir=args.record,
        workers=args.workers,
    )
    report = run_match(match)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        for ep in report.episodes:
            label = "tie" if ep.result and ep.result.kind.value == "tie" else None
            if ep.result is None:
                label = f"FAILED ({ep.error})"
            elif label is None:
                label = f"win {sorted(ep.result.winners)}"
            extra = " +collapse" if ep.collapse_used else ""
            print(f"game {ep.game} attempt {ep.attempt}: {label} in {ep.steps} steps{extra}")
        finals = [r for r in report.game_results if r is not None]
        wins = sum(1 for r in finals if r.kind.value == "win")
        print(f"{len(finals)} games, {wins} decided, {len(finals) - wins} tied "
              f"({report.elapsed:.1f}s)")
    return EXIT_OK if all(ep.error is None for ep in report.episodes) else EXIT_RUNTIME


def cmd_verify(args) -> int:
    try:
        replay = load_replay(args.replay)
    except FileNotFoundError:
        print(f"error: no such replay file: {args.replay}", file=sys.stderr)
        return EXIT_RUNTIME
    except ReplayFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if verify_replay(replay):
        print(f"ok: digest {replay.digest:016x} reproduced over {len(replay.steps)} steps")
        return EXIT_OK
    print("verification FAILED: re-simulation does not reproduce the recorded digest")
    return EXIT_VERIFY_FAILED


def cmd_stats(args) -> int:
    directory = Path(args.dir)
    replays = []
    for path in sorted(directory.glob("*.replay.jsonl")):
        try:
            replays.append(load_replay(path))
        except ReplayFormatError as exc:
            print(f"skipping {path.name}: {exc}", file=sys.stderr)
    summary = stats_report(replays)
    print(json.dumps(summary.to_dict(), indent=2) if args.json else summary.to_text())
    return EXIT_OK


def cmd_serve(args) -> int:
    behavior = make_agent(args.agent, seed=args.seed)
    handle = serve_agent(behavior, host=args.host, port=args.port)
    print(f"serving agent {args.agent!r} on {handle.url} (ctrl-c to stop)")
    try:
        handle._thread.join()
    except KeyboardInterrupt:
        handle.close()
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get(ENV_PREFIX + "LOG", "WARNING"))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "stats":
            return cmd_stats(args)
        if args.command == "serve":
            return cmd_serve(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
