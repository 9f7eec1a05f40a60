"""Game state machine: simultaneous-move resolution, bombs, flames, power-ups.

Everything here is deterministic: ``step`` is a pure function of
``(state, inputs)`` and a single match never touches an RNG.  The one-step
phase order is fixed and observable, so it is part of the contract:

  1.  age flames; expired flames surface any scheduled power-up reveal
  2.  advance kicked bombs (a bomb sliding into a flame detonates this step)
  3.  resolve agent movement, including new kicks (fixpoint bounce rules)
  4.  lay new bombs (no ammo, or cell already bombed -> action degrades to Stop)
  5.  decrement bomb lives (bombs laid this step keep their full life)
  6.  collect detonations (life 0 plus flame-entered) and chain the blast
  7.  apply blast effects; any agent in an active flame cell dies
  8.  power-up pickup for agents standing on power-up cells
  9.  record outgoing messages
  10. collapse the next board ring when the schedule says so
  11. terminal check

Grid cell legend (only the fog value is externally fixed):

  0 passage, 1 rigid wall, 2 wood wall, 3 bomb, 4 flame, 5 fog,
  6 extra-bomb, 7 blast-range, 8 can-kick, 10+id agent (id in 0..3).

When entities share a cell the grid shows the highest-priority one
(agent > flame > bomb > power-up); bombs stay tracked in ``GameState.bombs``
while occluded, e.g. under the agent that just laid them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

Cell = tuple[int, int]

# Cell codes.
PASSAGE = 0
RIGID = 1
WOOD = 2
BOMB = 3
FLAME = 4
FOG = 5
ITEM_EXTRA_BOMB = 6
ITEM_BLAST_RANGE = 7
ITEM_KICK = 8
AGENT_BASE = 10

ITEM_KINDS = (ITEM_EXTRA_BOMB, ITEM_BLAST_RANGE, ITEM_KICK)
LEGAL_CELL_CODES = frozenset(
    (PASSAGE, RIGID, WOOD, BOMB, FLAME, FOG)
    + ITEM_KINDS
    + tuple(AGENT_BASE + i for i in range(4))
)

# Action codes (the integer encoding is the wire encoding).
STOP = 0
UP = 1
LEFT = 2
DOWN = 3
RIGHT = 4
LAY_BOMB = 5

MOVE_DELTAS: dict[int, Cell] = {UP: (-1, 0), LEFT: (0, -1), DOWN: (1, 0), RIGHT: (0, 1)}

NUM_AGENTS = 4
# Agents sit at corners (0,0), (0,n-1), (n-1,0), (n-1,n-1) in id order;
# teammates are the diagonal pairs {0,3} and {1,2}.
TEAMS = ((0, 3), (1, 2))


def teammate_of(agent_id: int) -> int:
    return 3 - agent_id


class Mode(Enum):
    FFA = "ffa"
    TEAM = "team"
    TEAM_RADIO = "team_radio"

    @property
    def is_team(self) -> bool:
        return self is not Mode.FFA


class ContractViolation(ValueError):
    """A caller broke an engine precondition."""


class ConfigError(ValueError):
    """Game configuration failed validation."""


@dataclass(frozen=True)
class GameConfig:
    mode: Mode = Mode.FFA
    board_size: int = 11
    num_rigid: int = 36
    num_wood: int = 36
    max_steps: int = 800
    bomb_life: int = 10
    initial_ammo: int = 1
    initial_blast: int = 2
    flame_life: int = 2
    fog_enabled: bool = False
    view_radius: int = 2
    message_words: int = 8
    collapse_start: int | None = None
    collapse_every: int | None = None
    rng_seed: int = 0

    def __post_init__(self):
        n = self.board_size
        if n < 5 or n % 2 == 0:
            raise ConfigError(f"board_size must be odd and >= 5, got {n}")
        if self.bomb_life < 2:
            raise ConfigError(f"bomb_life must be >= 2, got {self.bomb_life}")
        if self.initial_blast < 2:
            raise ConfigError(f"initial_blast must be >= 2, got {self.initial_blast}")
        if self.initial_ammo < 1:
            raise ConfigError(f"initial_ammo must be >= 1, got {self.initial_ammo}")
        if self.flame_life < 1:
            raise ConfigError(f"flame_life must be >= 1, got {self.flame_life}")
        if self.view_radius < 1:
            raise ConfigError(f"view_radius must be >= 1, got {self.view_radius}")
        if self.message_words < 1:
            raise ConfigError(f"message_words must be >= 1")
        if self.num_rigid < 0 or self.num_rigid % 4 != 0:
            raise ConfigError(f"num_rigid must be >= 0 and divisible by 4")
        if self.num_wood < 0 or self.num_wood % 4 != 0:
            raise ConfigError(f"num_wood must be >= 0 and divisible by 4")
        # Orbits under 90-degree rotation: (n^2 - 1) / 4 total, minus the
        # 3 reserved corner-pocket orbits (corner + its two neighbors).
        available = (n * n - 1) // 4 - 3
        if self.num_rigid // 4 + self.num_wood // 4 > available:
            raise ConfigError(
                f"num_rigid + num_wood = {self.num_rigid + self.num_wood} walls do "
                f"not fit: only {available} free symmetry orbits on a {n}x{n} board"
            )
        if (self.collapse_start is None) != (self.collapse_every is None):
            raise ConfigError("collapse_start and collapse_every must be set together")
        if self.collapse_every is not None and self.collapse_every < 1:
            raise ConfigError("collapse_every must be >= 1")
        if not 0 <= self.rng_seed < 2**64:
            raise ConfigError("rng_seed must be an unsigned 64-bit integer")


@dataclass
class AgentState:
    id: int
    position: Cell
    alive: bool = True
    ammo: int = 1
    max_ammo: int = 1
    blast_strength: int = 2
    can_kick: bool = False
    outbox: tuple[int, int] | None = None

    def copy(self) -> AgentState:
        return AgentState(
            self.id, self.position, self.alive, self.ammo, self.max_ammo,
            self.blast_strength, self.can_kick, self.outbox,
        )


@dataclass
class Bomb:
    position: Cell
    owner: int
    life: int
    blast_strength: int
    velocity: int | None = None  # a direction code (UP/LEFT/DOWN/RIGHT) while sliding

    def copy(self) -> Bomb:
        return Bomb(self.position, self.owner, self.life, self.blast_strength, self.velocity)


@dataclass(frozen=True)
class Action:
    move: int = STOP
    message: tuple[int, int] | None = None

    def __post_init__(self):
        if not STOP <= self.move <= LAY_BOMB:
            raise ContractViolation(f"move code must be in [0, 5], got {self.move}")


class ResultKind(Enum):
    WIN = "win"
    TIE = "tie"


@dataclass(frozen=True)
class MatchResult:
    kind: ResultKind
    winners: frozenset[int] = frozenset()

    @staticmethod
    def win(winners) -> MatchResult:
        return MatchResult(ResultKind.WIN, frozenset(winners))

    @staticmethod
    def tie() -> MatchResult:
        return MatchResult(ResultKind.TIE)


@dataclass
class GameState:
    """Authoritative world snapshot.

    ``grid`` is the rendered board (re-derived after every step); ``rigid``
    and ``wood`` are the wall bookkeeping the renderer draws from, and the
    two must always agree.  ``flames`` maps cell -> remaining life.
    ``hidden_items`` keys are intact wood cells; ``pending_reveals`` holds
    power-ups whose wood burned but whose cell is still on fire.
    """

    config: GameConfig
    step: int
    grid: list[int]
    agents: list[AgentState]
    bombs: list[Bomb]
    flames: dict[Cell, int]
    rigid: set[Cell]
    wood: set[Cell]
    items: dict[Cell, int]
    hidden_items: dict[Cell, int]
    pending_reveals: dict[Cell, int] = field(default_factory=dict)
    collapse_ring: int = 0
    result: MatchResult | None = None

    def copy(self) -> GameState:
        return GameState(
            config=self.config,
            step=self.step,
            grid=list(self.grid),
            agents=[a.copy() for a in self.agents],
            bombs=[b.copy() for b in self.bombs],
            flames=dict(self.flames),
            rigid=set(self.rigid),
            wood=set(self.wood),
            items=dict(self.items),
            hidden_items=dict(self.hidden_items),
            pending_reveals=dict(self.pending_reveals),
            collapse_ring=self.collapse_ring,
            result=self.result,
        )

    def agent_at(self, cell: Cell) -> AgentState | None:
        for a in self.agents:
            if a.alive and a.position == cell:
                return a
        return None

    def bomb_at(self, cell: Cell) -> Bomb | None:
        for b in self.bombs:
            if b.position == cell:
                return b
        return None


def render_grid(state: GameState) -> list[int]:
    """Rebuild the rendered board from the component bookkeeping."""
    n = state.config.board_size
    g = [PASSAGE] * (n * n)
    for r, c in state.rigid:
        g[r * n + c] = RIGID
    for r, c in state.wood:
        g[r * n + c] = WOOD
    for (r, c), kind in state.items.items():
        g[r * n + c] = kind
    for b in state.bombs:
        r, c = b.position
        g[r * n + c] = BOMB
    for r, c in state.flames:
        g[r * n + c] = FLAME
    for a in state.agents:
        if a.alive:
            r, c = a.position
            g[r * n + c] = AGENT_BASE + a.id
    return g


# ---------------------------------------------------------------------------
# Movement resolution


def resolve_movement(
    state: GameState, desired_moves: dict[int, int]
) -> tuple[dict[int, Cell], dict[int, int]]:
    """Resolve simultaneous agent moves to a conflict-free placement.

    ``desired_moves`` maps alive agent ids to action codes (Stop/Bomb mean
    "stay"); alive agents missing from it are treated as Stop.  Returns
    ``(position per agent id, kicked bomb index -> direction)``.  A kicked
    bomb moves one cell immediately (to the checked-free cell beyond) and
    keeps sliding on subsequent steps.

    Bounce rules, iterated to a fixpoint:
      * off-board / rigid / wood targets bounce;
      * moving into a bomb is a kick only if the agent can kick and the
        cell beyond is an empty passage (else bounce);
      * any cell claimed twice -- by agent targets, kick destinations, or a
        stationary agent's own cell -- bounces every mover involved and
        cancels every kick involved;
      * two agents swapping cells both bounce;
      * bouncing an agent re-claims its own cell, which can cascade.
    """
    n = state.config.board_size
    moves = dict(desired_moves)
    for a in state.agents:
        if a.alive and a.id not in moves:
            moves[a.id] = STOP
    pos = {i: state.agents[i].position for i in moves}
    bombs_at = {b.position: bi for bi, b in enumerate(state.bombs)}
    occupied = {a.position for a in state.agents if a.alive}
    flame_cells = state.flames.keys()
    rigid, wood, items = state.rigid, state.wood, state.items

    tgt: dict[int, Cell] = {}
    for i, mv in moves.items():
        d = MOVE_DELTAS.get(mv)
        p = pos[i]
        tgt[i] = p if d is None else (p[0] + d[0], p[1] + d[1])

    # agent id -> (bomb index, destination cell, direction code)
    kicks: dict[int, tuple[int, Cell, int]] = {}
    kick_checked: set[int] = set()

    def bounce(i: int) -> bool:
        if tgt[i] == pos[i]:
            return False
        tgt[i] = pos[i]
        kicks.pop(i, None)
        return True

    changed = True
    while changed:
        changed = False
        for i, t in tgt.items():
            if t == pos[i]:
                continue
            r, c = t
            if not (0 <= r < n and 0 <= c < n) or t in rigid or t in wood:
                changed |= bounce(i)
                continue
            bi = bombs_at.get(t)
            if bi is not None and i not in kicks:
                if i in kick_checked:
                    changed |= bounce(i)
                    continue
                kick_checked.add(i)
                agent = state.agents[i]
                dr, dc = t[0] - pos[i][0], t[1] - pos[i][1]
                beyond = (t[0] + dr, t[1] + dc)
                if (
                    agent.can_kick
                    and 0 <= beyond[0] < n
                    and 0 <= beyond[1] < n
                    and beyond not in rigid
                    and beyond not in wood
                    and beyond not in bombs_at
                    and beyond not in items
                    and beyond not in occupied
                    and beyond not in flame_cells
                ):
                    kicks[i] = (bi, beyond, moves[i])
                else:
                    changed |= bounce(i)

        claims: dict[Cell, list[int]] = {}
        for i, t in tgt.items():
            claims.setdefault(t, []).append(i)
        for i, (_, dest, _) in kicks.items():
            claims.setdefault(dest, []).append(i)
        for cell, claimants in claims.items():
            if len(claimants) > 1:
                for i in set(claimants):
                    changed |= bounce(i)

        ids = list(tgt)
        for x in range(len(ids)):
            i = ids[x]
            if tgt[i] == pos[i]:
                continue
            for y in range(x + 1, len(ids)):
                j = ids[y]
                if tgt[i] == pos[j] and tgt[j] == pos[i]:
                    changed |= bounce(i)
                    changed |= bounce(j)

    kicked = {bi: direction for (bi, _, direction) in kicks.values()}
    return tgt, kicked


def advance_kicked_bombs(state: GameState) -> set[int]:
    """Move every sliding bomb one cell; returns indices detonating on flame.

    A slider halts (velocity cleared, cell kept) when its next cell is
    off-board, a wall, any bomb's current cell, an alive agent, or a
    power-up; two sliders aiming at one cell both halt.  A slider entering
    a flame cell moves there and joins this step's explosion set.
    """
    moving = [bi for bi, b in enumerate(state.bombs) if b.velocity is not None]
    if not moving:
        return set()
    n = state.config.board_size
    occupied = {a.position for a in state.agents if a.alive}
    bomb_cells = {b.position for b in state.bombs}
    targets: dict[int, Cell] = {}
    for bi in moving:
        b = state.bombs[bi]
        dr, dc = MOVE_DELTAS[b.velocity]
        t = (b.position[0] + dr, b.position[1] + dc)
        if (
            not (0 <= t[0] < n and 0 <= t[1] < n)
            or t in state.rigid
            or t in state.wood
            or t in bomb_cells
            or t in occupied
            or t in state.items
        ):
            b.velocity = None
        else:
            targets[bi] = t

    counts: dict[Cell, int] = {}
    for t in targets.values():
        counts[t] = counts.get(t, 0) + 1

    detonating: set[int] = set()
    for bi, t in targets.items():
        b = state.bombs[bi]
        if counts[t] > 1:
            b.velocity = None
            continue
        b.position = t
        if t in state.flames:
            detonating.add(bi)
    return detonating


# ---------------------------------------------------------------------------
# Blast propagation


def compute_blast_set(
    state: GameState, detonating: set[int]
) -> tuple[set[Cell], set[int]]:
    """Chain explosions to closure; returns ``(flame cells, detonated bombs)``.

    Each bomb covers its own cell plus up to ``blast_strength - 1`` cells in
    the four cardinal directions.  A ray stops at the board edge, before a
    rigid wall, and at (including) the first wood or power-up cell.  Bombs
    do not block rays; any bomb covered by flame detonates the same step.
    """
    bombs = state.bombs
    n = state.config.board_size
    rigid, wood, items = state.rigid, state.wood, state.items
    at = {b.position: bi for bi, b in enumerate(bombs)}

    cells: set[Cell] = set()
    det = set(detonating)
    work = list(det)

    def cover(cell: Cell) -> None:
        if cell in cells:
            return
        cells.add(cell)
        bj = at.get(cell)
        if bj is not None and bj not in det:
            det.add(bj)
            work.append(bj)

    while work:
        b = bombs[work.pop()]
        r0, c0 = b.position
        cover((r0, c0))
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            for k in range(1, b.blast_strength):
                r, c = r0 + dr * k, c0 + dc * k
                if not (0 <= r < n and 0 <= c < n):
                    break
                cell = (r, c)
                if cell in rigid:
                    break
                cover(cell)
                if cell in wood or cell in items:
                    break
    return cells, det


def apply_blast(state: GameState, cells: set[Cell], detonated: set[int]) -> None:
    """Apply one step's explosion: deaths, wood, power-ups, ammo returns.

    Also enforces flame lethality for agents standing in flames that
    predate this blast (i.e. agents that walked into fire).
    """
    flame_life = state.config.flame_life
    if detonated:
        for bi in detonated:
            owner = state.agents[state.bombs[bi].owner]
            owner.ammo += 1  # returns even after the owner's death
        state.bombs = [b for bi, b in enumerate(state.bombs) if bi not in detonated]
    for cell in cells:
        if cell in state.wood:
            state.wood.discard(cell)
            kind = state.hidden_items.pop(cell, None)
            if kind is not None:
                state.pending_reveals[cell] = kind
        elif cell in state.items:
            del state.items[cell]
    for a in state.agents:
        if a.alive and (a.position in cells or a.position in state.flames):
            a.alive = False
            a.outbox = None
    for cell in cells:
        state.flames[cell] = flame_life


# ---------------------------------------------------------------------------
# Collapse and termination


def collapse_due(config: GameConfig, step: int) -> bool:
    if config.collapse_start is None or step < config.collapse_start:
        return False
    return (step - config.collapse_start) % config.collapse_every == 0


def apply_collapse(state: GameState) -> None:
    """Turn the outermost live ring rigid, destroying whatever sits on it.

    Bombs destroyed this way return their owner's ammo (they never blow),
    keeping ammo conservation intact.
    """
    n = state.config.board_size
    ring = state.collapse_ring
    if ring > (n - 1) // 2:
        return
    lo, hi = ring, n - 1 - ring
    ring_cells = {(lo, c) for c in range(lo, hi + 1)} | {(hi, c) for c in range(lo, hi + 1)}
    ring_cells |= {(r, lo) for r in range(lo, hi + 1)} | {(r, hi) for r in range(lo, hi + 1)}

    for cell in ring_cells:
        state.wood.discard(cell)
        state.items.pop(cell, None)
        state.hidden_items.pop(cell, None)
        state.pending_reveals.pop(cell, None)
        state.flames.pop(cell, None)
        state.rigid.add(cell)
    survivors = []
    for b in state.bombs:
        if b.position in ring_cells:
            state.agents[b.owner].ammo += 1
        else:
            survivors.append(b)
    state.bombs = survivors
    for a in state.agents:
        if a.alive and a.position in ring_cells:
            a.alive = False
            a.outbox = None
    state.collapse_ring = ring + 1


def check_done(state: GameState) -> MatchResult | None:
    """Terminal rule: last side standing wins; max-steps or joint death ties.

    A winning team lists both ids -- the team wins as a unit even if one
    member died along the way.
    """
    alive = [a.id for a in state.agents if a.alive]
    if state.config.mode is Mode.FFA:
        if len(alive) == 1:
            return MatchResult.win(alive)
        if not alive:
            return MatchResult.tie()
    else:
        alive_teams = [team for team in TEAMS if any(i in alive for i in team)]
        if len(alive_teams) == 1:
            return MatchResult.win(alive_teams[0])
        if not alive_teams:
            return MatchResult.tie()
    if state.step >= state.config.max_steps:
        return MatchResult.tie()
    return None


# ---------------------------------------------------------------------------
# The step function


def _validate_inputs(
    state: GameState, inputs
) -> tuple[dict[int, int], dict[int, tuple[int, int] | None]]:
    if state.result is not None:
        raise ContractViolation("cannot step a finished game")
    if len(inputs) != NUM_AGENTS:
        raise ContractViolation(f"expected {NUM_AGENTS} action slots, got {len(inputs)}")
    radio = state.config.mode is Mode.TEAM_RADIO
    words = state.config.message_words
    moves: dict[int, int] = {}
    messages: dict[int, tuple[int, int] | None] = {}
    for a in state.agents:
        if not a.alive:
            continue
        action = inputs[a.id]
        if action is None:
            action = Action(STOP)
        if action.message is not None:
            if not radio:
                raise ContractViolation(
                    f"agent {a.id} attached a message outside the radio mode"
                )
            w1, w2 = action.message
            if action.message != (0, 0) and not (1 <= w1 <= words and 1 <= w2 <= words):
                raise ContractViolation(
                    f"message words must be in [1, {words}] or the (0, 0) "
                    f"sentinel, got {action.message}"
                )
        moves[a.id] = action.move
        messages[a.id] = action.message
    return moves, messages


def step(state: GameState, inputs) -> GameState:
    """Advance the world one tick; see the module docstring for phase order.

    ``inputs`` is a 4-slot sequence of optional Actions indexed by agent id.
    Slots for dead agents are ignored and ``None`` means Stop.
    """
    moves, messages = _validate_inputs(state, inputs)
    s = state.copy()
    s.step = state.step + 1

    # 1. flames age; fully burnt cells surface their scheduled power-up
    expired = [cell for cell, life in s.flames.items() if life <= 1]
    for cell in expired:
        del s.flames[cell]
        kind = s.pending_reveals.pop(cell, None)
        if kind is not None:
            s.items[cell] = kind
    for cell in s.flames:
        s.flames[cell] -= 1

    # 2. sliding bombs advance
    forced = advance_kicked_bombs(s)

    # 3. simultaneous movement, including new kicks
    positions, kicked = resolve_movement(s, moves)
    for bi, direction in kicked.items():
        b = s.bombs[bi]
        dr, dc = MOVE_DELTAS[direction]
        b.velocity = direction
        b.position = (b.position[0] + dr, b.position[1] + dc)
    for i, cell in positions.items():
        s.agents[i].position = cell

    # 4. lay bombs (degrades to Stop without ammo or on an occupied cell)
    bomb_cells = {b.position for b in s.bombs}
    fresh: set[int] = set()
    for i, mv in moves.items():
        if mv != LAY_BOMB:
            continue
        agent = s.agents[i]
        if agent.ammo < 1 or agent.position in bomb_cells:
            continue
        fresh.add(len(s.bombs))
        s.bombs.append(
            Bomb(agent.position, i, s.config.bomb_life, agent.blast_strength)
        )
        bomb_cells.add(agent.position)
        agent.ammo -= 1

    # 5. tick
    for bi, b in enumerate(s.bombs):
        if bi not in fresh:
            b.life -= 1

    # 6.-7. detonate with chaining, then apply
    due = {bi for bi, b in enumerate(s.bombs) if b.life <= 0} | forced
    if due:
        cells, detonated = compute_blast_set(s, due)
        apply_blast(s, cells, detonated)
    elif s.flames:
        for a in s.agents:  # walked into leftover fire
            if a.alive and a.position in s.flames:
                a.alive = False
                a.outbox = None

    # 8. pickups
    if s.items:
        for a in s.agents:
            if not a.alive:
                continue
            kind = s.items.pop(a.position, None)
            if kind is None:
                continue
            if kind == ITEM_EXTRA_BOMB:
                a.max_ammo += 1
                a.ammo += 1
            elif kind == ITEM_BLAST_RANGE:
                a.blast_strength += 1
            else:
                a.can_kick = True

    # 9. outgoing messages become next step's teammate inbox
    if s.config.mode is Mode.TEAM_RADIO:
        for i, msg in messages.items():
            if s.agents[i].alive:
                s.agents[i].outbox = msg

    # 10. collapse
    if collapse_due(s.config, s.step):
        apply_collapse(s)

    # 11. terminal check
    s.result = check_done(s)
    s.grid = render_grid(s)
    return s


# ---------------------------------------------------------------------------
# Digest

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def state_digest(state: GameState) -> int:
    """64-bit content hash over (step, grid, agents, bombs, flames).

    The byte serialization is canonical (entities sorted by position) and
    documented in docs/wire-protocol.md so other implementations can
    cross-check replays.  FNV-1a 64.
    """
    buf = bytearray()
    buf += state.step.to_bytes(8, "little")
    buf.append(state.config.board_size)
    buf += bytes(state.grid)
    for a in state.agents:
        buf.append(1 if a.alive else 0)
        buf.append(a.position[0])
        buf.append(a.position[1])
        buf += a.ammo.to_bytes(2, "little")
        buf += a.max_ammo.to_bytes(2, "little")
        buf += a.blast_strength.to_bytes(2, "little")
        buf.append(1 if a.can_kick else 0)
    buf.append(len(state.bombs))
    for b in sorted(state.bombs, key=lambda b: b.position):
        buf.append(b.position[0])
        buf.append(b.position[1])
        buf.append(b.owner)
        buf += b.life.to_bytes(2, "little")
        buf += b.blast_strength.to_bytes(2, "little")
        buf.append(0 if b.velocity is None else b.velocity)
    buf.append(len(state.flames))
    for cell in sorted(state.flames):
        buf.append(cell[0])
        buf.append(cell[1])
        buf += state.flames[cell].to_bytes(2, "little")
    h = _FNV_OFFSET
    for byte in buf:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h
