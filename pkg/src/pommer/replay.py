"""Versioned, self-describing replay records.

A replay is JSON-lines text: one header line, one line per step, one final
result line.  It captures everything needed for bit-exact re-simulation --
the seeded config plus the per-step submitted-or-substituted actions -- so
a recorded match can be audited on any implementation of the rules.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .boardgen import generate
from .engine import (
    NUM_AGENTS,
    Action,
    GameConfig,
    MatchResult,
    Mode,
    ResultKind,
    state_digest,
    step,
)

FORMAT_VERSION = 1


class ReplayFormatError(ValueError):
    pass


def config_to_dict(config: GameConfig) -> dict:
    return {
        "mode": config.mode.value,
        "board_size": config.board_size,
        "num_rigid": config.num_rigid,
        "num_wood": config.num_wood,
        "max_steps": config.max_steps,
        "bomb_life": config.bomb_life,
        "initial_ammo": config.initial_ammo,
        "initial_blast": config.initial_blast,
        "flame_life": config.flame_life,
        "fog_enabled": config.fog_enabled,
        "view_radius": config.view_radius,
        "message_words": config.message_words,
        "collapse_start": config.collapse_start,
        "collapse_every": config.collapse_every,
        "rng_seed": config.rng_seed,
    }


def config_from_dict(raw: dict) -> GameConfig:
    data = dict(raw)
    data["mode"] = Mode(data["mode"])
    return GameConfig(**data)


def result_to_dict(result: MatchResult) -> dict:
    return {"kind": result.kind.value, "winners": sorted(result.winners)}


def result_from_dict(raw: dict) -> MatchResult:
    return MatchResult(ResultKind(raw["kind"]), frozenset(raw["winners"]))


@dataclass
class StepRecord:
    actions: list[int]
    messages: list[tuple[int, int] | None]
    substituted: list[bool]

    def to_inputs(self) -> list[Action]:
        return [
            Action(move, self.messages[i])
            for i, move in enumerate(self.actions)
        ]


@dataclass
class Replay:
    config: GameConfig
    steps: list[StepRecord] = field(default_factory=list)
    result: MatchResult | None = None
    digest: int | None = None
    format_version: int = FORMAT_VERSION

    def to_lines(self) -> list[str]:
        lines = [
            json.dumps(
                {
                    "format_version": self.format_version,
                    "kind": "header",
                    "config": config_to_dict(self.config),
                },
                sort_keys=True,
            )
        ]
        for t, record in enumerate(self.steps, start=1):
            lines.append(
                json.dumps(
                    {
                        "kind": "step",
                        "t": t,
                        "actions": record.actions,
                        "messages": [list(m) if m else None for m in record.messages],
                        "substituted": [1 if s else 0 for s in record.substituted],
                    },
                    sort_keys=True,
                )
            )
        lines.append(
            json.dumps(
                {
                    "kind": "end",
                    "result": result_to_dict(self.result) if self.result else None,
                    "digest": f"{self.digest:016x}" if self.digest is not None else None,
                    "steps": len(self.steps),
                },
                sort_keys=True,
            )
        )
        return lines

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(self.to_lines()) + "\n", encoding="utf-8")
        return path


def _parse_line(line: str, lineno: int) -> dict:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ReplayFormatError(f"line {lineno}: not valid JSON: {exc}") from None
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ReplayFormatError(f"line {lineno}: expected a record object with 'kind'")
    return raw


def replay_from_lines(lines) -> Replay:
    records = [
        _parse_line(line, i + 1) for i, line in enumerate(lines) if line.strip()
    ]
    if not records or records[0]["kind"] != "header":
        raise ReplayFormatError("missing header record")
    header = records[0]
    version = header.get("format_version")
    if version != FORMAT_VERSION:
        raise ReplayFormatError(
            f"incompatible replay format_version {version!r}; this build reads {FORMAT_VERSION}"
        )
    try:
        config = config_from_dict(header["config"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ReplayFormatError(f"bad header config: {exc}") from None

    steps: list[StepRecord] = []
    result = None
    digest = None
    for raw in records[1:]:
        if raw["kind"] == "step":
            actions = raw["actions"]
            messages = [tuple(m) if m else None for m in raw["messages"]]
            substituted = [bool(s) for s in raw["substituted"]]
            if not (len(actions) == len(messages) == len(substituted) == NUM_AGENTS):
                raise ReplayFormatError(f"step {raw.get('t')}: malformed 4-seat record")
            steps.append(StepRecord(actions, messages, substituted))
        elif raw["kind"] == "end":
            result = result_from_dict(raw["result"]) if raw.get("result") else None
            digest = int(raw["digest"], 16) if raw.get("digest") else None
        else:
            raise ReplayFormatError(f"unknown record kind {raw['kind']!r}")
    return Replay(config=config, steps=steps, result=result, digest=digest)


def load_replay(path: str | Path) -> Replay:
    return replay_from_lines(Path(path).read_text(encoding="utf-8").splitlines())


def verify_replay(replay: Replay) -> bool:
    """Re-simulate from (config, actions) and compare the final digest."""
    if replay.digest is None or replay.result is None:
        return False
    state = generate(replay.config)
    for record in replay.steps:
        if state.result is not None:
            return False
        state = step(state, record.to_inputs())
    if state.result != replay.result:
        return False
    return state_digest(state) == replay.digest
