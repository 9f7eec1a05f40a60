"""Match orchestration: episodes, seeds, tie policy, statistics.

A match seed deterministically derives every other seed in the run
(per-game, per-rerun-attempt, per-agent RNG), so an entire sweep is
reproducible from one number.  Independent episodes can run across worker
processes; aggregation sorts by episode index so reports never depend on
scheduling.
"""

from __future__ import annotations

import json
import logging
import multiprocessing
import time
from dataclasses import dataclass, field
from pathlib import Path

from .agents import BUILTIN_AGENTS, make_agent
from .boardgen import generate
from .engine import (
    NUM_AGENTS,
    GameConfig,
    MatchResult,
    Mode,
    ResultKind,
    state_digest,
    step,
)
from .observe import observe
from .protocol import (
    AgentEndpoint,
    notify_episode_end,
    notify_init,
    request_all,
)
from .replay import Replay, StepRecord, result_to_dict, verify_replay
from .rng import derive_seed

logger = logging.getLogger("pommer.runner")

PRESETS: dict[str, dict] = {
    "ffa": {"mode": Mode.FFA},
    "team": {"mode": Mode.TEAM},
    # communication is only interesting when you cannot see your teammate
    "radio": {"mode": Mode.TEAM_RADIO, "fog_enabled": True},
    # the partially observable team variant without communication
    "nips": {"mode": Mode.TEAM, "fog_enabled": True},
}

# Seed-stream indices (documented in docs/wire-protocol.md).
_AGENT_SEED_BASE = 0x10
_ATTEMPT_STRIDE = 64
MAX_RERUNS = 16
MAX_FAILURES = 4


@dataclass
class MatchConfig:
    preset: str = "ffa"
    agents: tuple[str, str, str, str] = ("simple", "simple", "simple", "simple")
    episodes: int = 1
    seed: int = 0
    tie_policy: str = "report"  # or "competition"
    timeout: float = 0.1
    record_dir: str | None = None
    workers: int = 1
    game_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}; known: {sorted(PRESETS)}")
        if len(self.agents) != NUM_AGENTS:
            raise ValueError(f"need exactly {NUM_AGENTS} agents")
        if self.tie_policy not in ("report", "competition"):
            raise ValueError("tie_policy must be 'report' or 'competition'")
        if self.episodes < 0:
            raise ValueError("episodes must be >= 0")

    def game_config(self, seed: int, with_collapse: bool = False) -> GameConfig:
        kwargs = dict(PRESETS[self.preset])
        kwargs.update(self.game_overrides)
        kwargs["rng_seed"] = seed
        if with_collapse and "collapse_start" not in self.game_overrides:
            max_steps = kwargs.get("max_steps", 800)
            kwargs["collapse_start"] = max_steps * 5 // 8
            kwargs["collapse_every"] = 30
        return GameConfig(**kwargs)


def build_endpoints(match: MatchConfig) -> list[AgentEndpoint]:
    endpoints = []
    for spec in match.agents:
        if spec.startswith(("http://", "https://")):
            endpoints.append(AgentEndpoint.remote(spec, timeout=match.timeout))
        elif spec in BUILTIN_AGENTS:
            endpoints.append(AgentEndpoint.in_process(make_agent(spec), timeout=match.timeout))
        else:
            raise ValueError(
                f"agent spec {spec!r} is neither a builtin ({sorted(BUILTIN_AGENTS)}) nor a URL"
            )
    return endpoints


@dataclass
class EpisodeOutcome:
    game: int
    attempt: int
    seed: int
    result: MatchResult | None
    steps: int
    digest: int | None
    substitutions: list[int]
    collapse_used: bool = False
    replay_path: str | None = None
    error: str | None = None


def run_episode(
    match: MatchConfig,
    seed: int,
    endpoints: list[AgentEndpoint] | None = None,
    with_collapse: bool = False,
) -> tuple[MatchResult, Replay]:
    """Play one full episode; every step is recorded into the Replay."""
    if endpoints is None:
        endpoints = build_endpoints(match)
    config = match.game_config(seed, with_collapse)
    state = generate(config)
    mode = config.mode
    for i, ep in enumerate(endpoints):
        notify_init(
            ep,
            {
                "agent_id": i,
                "mode": mode.value,
                "rng_seed": derive_seed(seed, _AGENT_SEED_BASE + i),
                "board_size": config.board_size,
                "protocol_version": 1,
            },
        )
    replay = Replay(config=config)
    while state.result is None:
        observations = [
            observe(state, i) if state.agents[i].alive else None
            for i in range(NUM_AGENTS)
        ]
        outcomes = request_all(endpoints, observations, mode, step=state.step)
        inputs = []
        actions, messages, substituted = [], [], []
        for i in range(NUM_AGENTS):
            out = outcomes[i]
            if out is None:
                inputs.append(None)
                actions.append(0)
                messages.append(None)
                substituted.append(False)
            else:
                inputs.append(out.action)
                actions.append(out.action.move)
                messages.append(out.action.message)
                substituted.append(out.substituted)
        state = step(state, inputs)
        replay.steps.append(StepRecord(actions, messages, substituted))
    replay.result = state.result
    replay.digest = state_digest(state)
    for ep in endpoints:
        notify_episode_end(ep, result_to_dict(state.result))
    return state.result, replay


def _play_game(match: MatchConfig, game_index: int) -> list[EpisodeOutcome]:
    """One logical game: a single episode under the report policy, a
    rerun-until-win sequence under the competition policy."""
    endpoints = build_endpoints(match)
    game_seed = derive_seed(match.seed, game_index)
    outcomes: list[EpisodeOutcome] = []
    failures = 0
    attempt = 0
    while True:
        seed = derive_seed(game_seed, attempt * _ATTEMPT_STRIDE)
        with_collapse = match.tie_policy == "competition" and attempt >= 2
        try:
            result, replay = run_episode(match, seed, endpoints, with_collapse)
        except Exception as exc:
            failures += 1
            logger.error("game %d attempt %d failed: %s", game_index, attempt, exc)
            outcomes.append(
                EpisodeOutcome(
                    game=game_index,
                    attempt=attempt,
                    seed=seed,
                    result=None,
                    steps=0,
                    digest=None,
                    substitutions=[0] * NUM_AGENTS,
                    collapse_used=with_collapse,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
            if failures > MAX_FAILURES:
                return outcomes
            attempt += 1
            continue
        subs = [
            sum(1 for rec in replay.steps if rec.substituted[i]) for i in range(NUM_AGENTS)
        ]
        outcome = EpisodeOutcome(
            game=game_index,
            attempt=attempt,
            seed=seed,
            result=result,
            steps=len(replay.steps),
            digest=replay.digest,
            substitutions=subs,
            collapse_used=with_collapse,
        )
        if match.record_dir:
            path = Path(match.record_dir) / f"game{game_index:05d}_a{attempt:02d}.replay.jsonl"
            replay.save(path)
            outcome.replay_path = str(path)
        outcomes.append(outcome)
        if match.tie_policy == "report" or result.kind is ResultKind.WIN:
            return outcomes
        if attempt >= MAX_RERUNS:
            logger.warning("game %d still tied after %d reruns", game_index, attempt)
            return outcomes
        attempt += 1


@dataclass
class MatchReport:
    match: MatchConfig
    episodes: list[EpisodeOutcome]
    elapsed: float

    @property
    def game_results(self) -> list[MatchResult | None]:
        finals: dict[int, MatchResult | None] = {}
        for ep in self.episodes:
            finals[ep.game] = ep.result
        return [finals[g] for g in sorted(finals)]

    def to_dict(self) -> dict:
        return {
            "preset": self.match.preset,
            "agents": list(self.match.agents),
            "seed": self.match.seed,
            "tie_policy": self.match.tie_policy,
            "elapsed_sec": round(self.elapsed, 3),
            "episodes": [
                {
                    "game": ep.game,
                    "attempt": ep.attempt,
                    "seed": ep.seed,
                    "result": result_to_dict(ep.result) if ep.result else None,
                    "steps": ep.steps,
                    "digest": f"{ep.digest:016x}" if ep.digest is not None else None,
                    "substitutions": ep.substitutions,
                    "collapse_used": ep.collapse_used,
                    "replay": ep.replay_path,
                    "error": ep.error,
                }
                for ep in self.episodes
            ],
        }


def run_match(match: MatchConfig) -> MatchReport:
    """Play ``episodes`` logical games under the configured tie policy."""
    start = time.monotonic()
    if match.record_dir:
        Path(match.record_dir).mkdir(parents=True, exist_ok=True)
    games = list(range(match.episodes))
    remote = any(spec.startswith(("http://", "https://")) for spec in match.agents)
    workers = 1 if remote else max(1, match.workers)
    if workers > 1 and len(games) > 1:
        with multiprocessing.get_context("fork").Pool(workers) as pool:
            nested = pool.starmap(_play_game, [(match, g) for g in games])
    else:
        nested = [_play_game(match, g) for g in games]
    episodes = [ep for game_eps in nested for ep in game_eps]
    episodes.sort(key=lambda ep: (ep.game, ep.attempt))
    return MatchReport(match, episodes, time.monotonic() - start)


# ---------------------------------------------------------------------------
# Statistics


@dataclass
class StatsSummary:
    episodes: int = 0
    wins: list[int] = field(default_factory=lambda: [0] * NUM_AGENTS)
    ties: int = 0
    losses: list[int] = field(default_factory=lambda: [0] * NUM_AGENTS)
    substitutions: list[int] = field(default_factory=lambda: [0] * NUM_AGENTS)
    mean_steps: float = 0.0

    @property
    def win_rates(self) -> list[float]:
        if not self.episodes:
            return [0.0] * NUM_AGENTS
        return [w / self.episodes for w in self.wins]

    @property
    def tie_rate(self) -> float:
        return self.ties / self.episodes if self.episodes else 0.0

    def to_dict(self) -> dict:
        return {
            "episodes": self.episodes,
            "wins": self.wins,
            "win_rates": [round(r, 4) for r in self.win_rates],
            "ties": self.ties,
            "tie_rate": round(self.tie_rate, 4),
            "losses": self.losses,
            "substitutions": self.substitutions,
            "mean_steps": round(self.mean_steps, 2),
        }

    def to_text(self) -> str:
        lines = [
            f"episodes: {self.episodes}   ties: {self.ties} ({self.tie_rate:.1%})   "
            f"mean length: {self.mean_steps:.1f} steps",
            "seat   wins   win%    losses   substitutions",
        ]
        for i in range(NUM_AGENTS):
            lines.append(
                f"  {i}    {self.wins[i]:5d}  {self.win_rates[i]:6.1%}  {self.losses[i]:6d}"
                f"   {self.substitutions[i]:6d}"
            )
        return "\n".join(lines)


def stats_report(replays) -> StatsSummary:
    """Aggregate seat-level outcomes over finished replays."""
    summary = StatsSummary()
    total_steps = 0
    for replay in replays:
        if replay.result is None:
            continue
        summary.episodes += 1
        total_steps += len(replay.steps)
        for i in range(NUM_AGENTS):
            summary.substitutions[i] += sum(1 for rec in replay.steps if rec.substituted[i])
        if replay.result.kind is ResultKind.TIE:
            summary.ties += 1
        else:
            for i in range(NUM_AGENTS):
                if i in replay.result.winners:
                    summary.wins[i] += 1
                else:
                    summary.losses[i] += 1
    if summary.episodes:
        summary.mean_steps = total_steps / summary.episodes
    return summary


def verify_report(report: MatchReport) -> bool:
    """Re-verify every recorded replay of a match report."""
    from .replay import load_replay

    ok = True
    for ep in report.episodes:
        if ep.replay_path:
            ok = ok and verify_replay(load_replay(ep.replay_path))
    return ok
