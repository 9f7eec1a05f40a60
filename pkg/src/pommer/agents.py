"""In-process baseline decision sources.

Both behaviors consume only the Observation (never engine internals), own
their RNG, and are deterministic given (observation, rng state).  The
heuristic agent is the benchmark skill floor; its pipeline, in fixed
priority order:

  1. never move onto a cell that is lethal this step or next (flames now,
     plus the chained blast projection of bombs about to expire);
  2. head for the nearest reachable power-up;
  3. lay a bomb next to wood or with an enemy in blast range, but only
     with a safe retreat;
  4. approach the nearest enemy within a search budget;
  5. otherwise make a uniformly random safe move.

If nothing is safe, any action is allowed (it picks the least-soon-lethal
one).
"""

from __future__ import annotations

from collections import deque

from .engine import (
    AGENT_BASE,
    DOWN,
    FLAME,
    ITEM_KINDS,
    LAY_BOMB,
    LEFT,
    MOVE_DELTAS,
    PASSAGE,
    RIGID,
    RIGHT,
    STOP,
    UP,
    WOOD,
    Action,
)
from .observe import Observation
from .rng import SplitMix64

ALL_MOVES = (STOP, UP, LEFT, DOWN, RIGHT, LAY_BOMB)
# Neighbor expansion order everywhere below: the action-number order.
DIRECTIONS = (UP, LEFT, DOWN, RIGHT)

SAFE_HORIZON = 2        # "this step or next"
ENEMY_BFS_BUDGET = 8    # stop chasing beyond this path length
RETREAT_DEPTH = 5       # how far a post-bomb escape may be

NO_DANGER = 1 << 30


def random_act(obs: Observation, rng: SplitMix64) -> Action:
    """Uniform over the six moves; uniform words when the mode has radio."""
    move = rng.randrange(6)
    message = None
    if obs.message is not None:
        message = (rng.randint(1, 8), rng.randint(1, 8))
    return Action(move, message)


def _passable(code: int) -> bool:
    return code == PASSAGE or code in ITEM_KINDS


def _danger_map(obs: Observation, n: int) -> list[int]:
    """Earliest step offset at which each cell becomes flame.

    0 = on fire now, 1 = during the step being chosen, 2 = the step after,
    NO_DANGER = no known threat.  Bomb chains are propagated: a bomb whose
    cell is covered by an earlier blast inherits the earlier time.
    """
    board = obs.board
    life = obs.bomb_life
    danger = [NO_DANGER] * (n * n)
    bombs = [(i, life[i], obs.bomb_blast_strength[i]) for i in range(n * n) if life[i] > 0]
    for i in range(n * n):
        if board[i] == FLAME:
            danger[i] = 0
    if not bombs:
        return danger

    def ray(idx: int, strength: int) -> list[int]:
        r0, c0 = divmod(idx, n)
        cells = [idx]
        for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            for k in range(1, strength):
                r, c = r0 + dr * k, c0 + dc * k
                if not (0 <= r < n and 0 <= c < n):
                    break
                j = r * n + c
                if board[j] == RIGID:
                    break
                cells.append(j)
                if board[j] == WOOD or board[j] in ITEM_KINDS:
                    break
        return cells

    det = {idx: t for idx, t, _ in bombs}
    strengths = {idx: s for idx, _, s in bombs}
    rays = {idx: ray(idx, s) for idx, _, s in bombs}
    changed = True
    while changed:
        changed = False
        for idx in det:
            for j in rays[idx]:
                if j in det and det[j] > det[idx]:
                    det[j] = det[idx]
                    changed = True
    for idx in det:
        t = det[idx]
        for j in rays[idx]:
            if t < danger[j]:
                danger[j] = t
    return danger


def _first_moves_bfs(
    obs: Observation, n: int, targets: set[int], budget: int
) -> tuple[int, int] | None:
    """Shortest path over passages to any target cell (targets may be
    non-passable endpoints, e.g. enemies).

    Returns (first move, distance) or None.  Ties between equally short
    paths resolve by expanding neighbors in action-number order.
    """
    start = obs.position[0] * n + obs.position[1]
    if start in targets:
        return (STOP, 0)
    board = obs.board
    seen = [False] * (n * n)
    seen[start] = True
    frontier = deque()
    r0, c0 = obs.position
    for mv in DIRECTIONS:
        dr, dc = MOVE_DELTAS[mv]
        r, c = r0 + dr, c0 + dc
        if 0 <= r < n and 0 <= c < n:
            j = r * n + c
            if j in targets:
                return (mv, 1)
            if _passable(board[j]) and not seen[j]:
                seen[j] = True
                frontier.append((j, mv, 1))
    while frontier:
        idx, first, dist = frontier.popleft()
        if dist >= budget:
            continue
        r0, c0 = divmod(idx, n)
        for mv in DIRECTIONS:
            dr, dc = MOVE_DELTAS[mv]
            r, c = r0 + dr, c0 + dc
            if not (0 <= r < n and 0 <= c < n):
                continue
            j = r * n + c
            if seen[j]:
                continue
            if j in targets:
                return (first, dist + 1)
            if _passable(board[j]):
                seen[j] = True
                frontier.append((j, first, dist + 1))
    return None


def _blast_ray(obs: Observation, n: int, origin: int, strength: int) -> set[int]:
    board = obs.board
    cells = {origin}
    r0, c0 = divmod(origin, n)
    for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        for k in range(1, strength):
            r, c = r0 + dr * k, c0 + dc * k
            if not (0 <= r < n and 0 <= c < n):
                break
            j = r * n + c
            if board[j] == RIGID:
                break
            cells.add(j)
            if board[j] == WOOD or board[j] in ITEM_KINDS:
                break
    return cells


def _enemy_in_range(obs: Observation, n: int, enemy_cells: set[int]) -> bool:
    me = obs.position[0] * n + obs.position[1]
    return bool(_blast_ray(obs, n, me, obs.blast_strength) & enemy_cells)


def _retreat_exists(obs: Observation, n: int, danger: list[int], ray: set[int]) -> bool:
    """Can we reach a threat-free cell off our own blast ray in a few steps?"""
    board = obs.board
    start = obs.position[0] * n + obs.position[1]
    seen = [False] * (n * n)
    seen[start] = True
    frontier = deque([(start, 0)])
    while frontier:
        idx, dist = frontier.popleft()
        if idx not in ray and danger[idx] == NO_DANGER:
            return True
        if dist >= RETREAT_DEPTH:
            continue
        r0, c0 = divmod(idx, n)
        for mv in DIRECTIONS:
            dr, dc = MOVE_DELTAS[mv]
            r, c = r0 + dr, c0 + dc
            if 0 <= r < n and 0 <= c < n:
                j = r * n + c
                if not seen[j] and _passable(board[j]) and danger[j] > SAFE_HORIZON:
                    seen[j] = True
                    frontier.append((j, dist + 1))
    return False


def simple_act(obs: Observation, rng: SplitMix64) -> Action:
    board = obs.board
    n = int(len(board) ** 0.5)
    r0, c0 = obs.position
    me = r0 * n + c0
    danger = _danger_map(obs, n)

    def message() -> tuple[int, int] | None:
        if obs.message is None:
            return None
        return (rng.randint(1, 8), rng.randint(1, 8))

    # Destinations per move; None = illegal.
    dest: dict[int, int | None] = {STOP: me, LAY_BOMB: me}
    for mv in DIRECTIONS:
        dr, dc = MOVE_DELTAS[mv]
        r, c = r0 + dr, c0 + dc
        if 0 <= r < n and 0 <= c < n and _passable(board[r * n + c]):
            dest[mv] = r * n + c
        else:
            dest[mv] = None

    safe = {mv for mv, d in dest.items() if d is not None and danger[d] > SAFE_HORIZON}

    if not safe:
        # Trapped: postpone death as long as possible.
        legal = [(mv, d) for mv, d in dest.items() if d is not None and mv != LAY_BOMB]
        best = max(danger[d] for _, d in legal)
        return Action(rng.choice([mv for mv, d in legal if danger[d] == best]), message())

    # Power-up seeking.
    items = {i for i in range(n * n) if board[i] in ITEM_KINDS}
    if items:
        found = _first_moves_bfs(obs, n, items, budget=n * n)
        if found and found[0] in safe and found[0] != STOP:
            return Action(found[0], message())

    enemy_cells = {
        i for i in range(n * n) if board[i] >= AGENT_BASE and board[i] - AGENT_BASE in obs.enemies
    }

    # Bomb placement.
    bomb_here = obs.bomb_life[me] > 0
    if obs.ammo > 0 and not bomb_here and LAY_BOMB in safe and danger[me] == NO_DANGER:
        next_to_wood = any(
            0 <= r0 + dr < n and 0 <= c0 + dc < n and board[(r0 + dr) * n + c0 + dc] == WOOD
            for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1))
        )
        if next_to_wood or _enemy_in_range(obs, n, enemy_cells):
            ray = _blast_ray(obs, n, me, obs.blast_strength)
            if _retreat_exists(obs, n, danger, ray):
                return Action(LAY_BOMB, message())

    # Enemy approach.
    if enemy_cells:
        found = _first_moves_bfs(obs, n, enemy_cells, budget=ENEMY_BFS_BUDGET)
        if found and found[0] in safe and found[0] != STOP:
            return Action(found[0], message())

    # Random safe move (never a pointless bomb).
    pool = sorted(safe - {LAY_BOMB}) or [STOP]
    return Action(rng.choice(pool), message())


class RandomAgent:
    """Uniform random policy."""

    def __init__(self, seed: int = 0):
        self.rng = SplitMix64(seed)

    def reset(self, *, seed: int, agent_id: int = 0) -> None:
        self.rng = SplitMix64(seed)

    def act(self, obs: Observation) -> Action:
        return random_act(obs, self.rng)


class SimpleAgent:
    """Heuristic benchmark agent (see module docstring for the pipeline)."""

    def __init__(self, seed: int = 0):
        self.rng = SplitMix64(seed)

    def reset(self, *, seed: int, agent_id: int = 0) -> None:
        self.rng = SplitMix64(seed)

    def act(self, obs: Observation) -> Action:
        return simple_act(obs, self.rng)


BUILTIN_AGENTS = {
    "random": RandomAgent,
    "simple": SimpleAgent,
}


def make_agent(name: str, seed: int = 0):
    try:
        return BUILTIN_AGENTS[name](seed)
    except KeyError:
        raise ValueError(
            f"unknown agent {name!r}; known: {', '.join(sorted(BUILTIN_AGENTS))}"
        ) from None
