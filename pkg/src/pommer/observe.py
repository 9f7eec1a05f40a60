"""Per-agent observations and their canonical wire encoding.

The wire form is UTF-8 JSON with the exact field names below; it is the
contract remote agents program against and is specified normatively in
docs/wire-protocol.md.  Fogged cells read 5 and the bomb maps are zeroed
there; everything else is the rendered board as-is.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields

from .engine import (
    FOG,
    LEGAL_CELL_CODES,
    NUM_AGENTS,
    GameConfig,
    GameState,
    Mode,
    teammate_of,
)

WIRE_VERSION = 1


class WireFormatError(ValueError):
    """A wire payload failed validation; ``field`` names the offender."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class Observation:
    board: list[int]
    bomb_blast_strength: list[int]
    bomb_life: list[int]
    position: tuple[int, int]
    ammo: int
    blast_strength: int
    can_kick: int
    teammate: int
    enemies: list[int]
    step: int
    message: tuple[int, int] | None = None


def route_messages(state: GameState) -> list[tuple[int, int]]:
    """Each agent's inbox: the teammate's previous-step words, else (0, 0).

    (0, 0) covers the first step, a dead or silent teammate, and
    timeout-substituted actions (whose recorded message is the sentinel).
    """
    inboxes = []
    for i in range(NUM_AGENTS):
        mate = state.agents[teammate_of(i)]
        inboxes.append(mate.outbox if mate.alive and mate.outbox else (0, 0))
    return inboxes


def observe(state: GameState, agent_id: int, config: GameConfig | None = None) -> Observation:
    """Build agent ``agent_id``'s view of ``state``.

    A dead observer still gets a final frame (it is simply absent from the
    board).  Pure: never perturbs the state.
    """
    if config is None:
        config = state.config
    if not 0 <= agent_id < NUM_AGENTS:
        raise ValueError(f"agent_id must be in [0, {NUM_AGENTS - 1}], got {agent_id}")
    n = config.board_size
    me = state.agents[agent_id]
    r0, c0 = me.position

    board = list(state.grid)
    blast_map = [0] * (n * n)
    life_map = [0] * (n * n)
    if config.fog_enabled:
        reach = config.view_radius
        for r in range(n):
            dr = r - r0 if r > r0 else r0 - r
            row = r * n
            if dr > reach:
                for c in range(n):
                    board[row + c] = FOG
            else:
                for c in range(n):
                    if (c - c0 if c > c0 else c0 - c) > reach:
                        board[row + c] = FOG
        for b in state.bombs:
            br, bc = b.position
            if abs(br - r0) <= reach and abs(bc - c0) <= reach:
                blast_map[br * n + bc] = b.blast_strength
                life_map[br * n + bc] = b.life
    else:
        for b in state.bombs:
            br, bc = b.position
            blast_map[br * n + bc] = b.blast_strength
            life_map[br * n + bc] = b.life

    if config.mode.is_team:
        mate = teammate_of(agent_id)
        enemies = [i for i in range(NUM_AGENTS) if i != agent_id and i != mate] + [-1]
    else:
        mate = -1
        enemies = [i for i in range(NUM_AGENTS) if i != agent_id]

    message = None
    if config.mode is Mode.TEAM_RADIO:
        message = route_messages(state)[agent_id]

    return Observation(
        board=board,
        bomb_blast_strength=blast_map,
        bomb_life=life_map,
        position=(r0, c0),
        ammo=me.ammo,
        blast_strength=me.blast_strength,
        can_kick=1 if me.can_kick else 0,
        teammate=mate,
        enemies=enemies,
        step=state.step,
        message=message,
    )


# ---------------------------------------------------------------------------
# Wire codec


def observation_to_dict(obs: Observation) -> dict:
    d = {
        "board": list(obs.board),
        "bomb_blast_strength": list(obs.bomb_blast_strength),
        "bomb_life": list(obs.bomb_life),
        "position": list(obs.position),
        "ammo": obs.ammo,
        "blast_strength": obs.blast_strength,
        "can_kick": obs.can_kick,
        "teammate": obs.teammate,
        "enemies": list(obs.enemies),
        "step": obs.step,
    }
    if obs.message is not None:
        d["message"] = list(obs.message)
    return d


def encode_observation(obs: Observation) -> bytes:
    """Canonical encoding: sorted keys, no whitespace, UTF-8."""
    return json.dumps(
        observation_to_dict(obs), sort_keys=True, separators=(",", ":")
    ).encode("utf-8")


def _require_int(value, name: str, lo: int | None = None, hi: int | None = None) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise WireFormatError(name, f"expected an integer, got {value!r}")
    if lo is not None and value < lo or hi is not None and value > hi:
        raise WireFormatError(name, f"value {value} out of range [{lo}, {hi}]")
    return value


def _require_int_list(value, name: str, length: int | None = None) -> list[int]:
    if not isinstance(value, list):
        raise WireFormatError(name, f"expected a list, got {type(value).__name__}")
    if length is not None and len(value) != length:
        raise WireFormatError(name, f"expected length {length}, got {len(value)}")
    for v in value:
        _require_int(v, name)
    return value


def decode_observation(payload: bytes | str) -> Observation:
    """Parse and validate a wire observation; inverse of encode_observation."""
    try:
        raw = json.loads(payload)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise WireFormatError("body", f"not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise WireFormatError("body", "top-level value must be an object")

    required = {f.name for f in fields(Observation)} - {"message"}
    missing = required - raw.keys()
    if missing:
        raise WireFormatError(sorted(missing)[0], "missing field")
    unknown = raw.keys() - required - {"message"}
    if unknown:
        raise WireFormatError(sorted(unknown)[0], "unknown field")

    board = _require_int_list(raw["board"], "board")
    n = int(len(board) ** 0.5)
    if n * n != len(board) or n < 5:
        raise WireFormatError("board", f"length {len(board)} is not a square board")
    for v in board:
        if v not in LEGAL_CELL_CODES:
            raise WireFormatError("board", f"illegal cell code {v}")
    blast_map = _require_int_list(raw["bomb_blast_strength"], "bomb_blast_strength", len(board))
    life_map = _require_int_list(raw["bomb_life"], "bomb_life", len(board))
    for name, values in (("bomb_blast_strength", blast_map), ("bomb_life", life_map)):
        for v in values:
            if v < 0:
                raise WireFormatError(name, f"negative entry {v}")
    position = _require_int_list(raw["position"], "position", 2)
    for v in position:
        _require_int(v, "position", 0, n - 1)
    enemies = _require_int_list(raw["enemies"], "enemies", 3)
    for v in enemies:
        _require_int(v, "enemies", -1, NUM_AGENTS - 1)

    message = None
    if "message" in raw:
        msg = _require_int_list(raw["message"], "message", 2)
        for v in msg:
            _require_int(v, "message", 0, 8)
        message = (msg[0], msg[1])

    return Observation(
        board=board,
        bomb_blast_strength=blast_map,
        bomb_life=life_map,
        position=(position[0], position[1]),
        ammo=_require_int(raw["ammo"], "ammo", 0),
        blast_strength=_require_int(raw["blast_strength"], "blast_strength", 2),
        can_kick=_require_int(raw["can_kick"], "can_kick", 0, 1),
        teammate=_require_int(raw["teammate"], "teammate", -1, NUM_AGENTS - 1),
        enemies=enemies,
        step=_require_int(raw["step"], "step", 0),
        message=message,
    )
