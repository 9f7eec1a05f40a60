"""Seeded procedural start-state generation.

Walls are placed on whole orbits of the 90-degree rotation about the board
center, so the layout is invariant under quarter turns and every seat gets
the same terrain.  The four corners plus their two orthogonal neighbors
stay open, agents start one per corner, and generation retries (with a
re-derived RNG stream per attempt) until the corners are mutually
reachable through non-rigid cells.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache

from .engine import (
    AGENT_BASE,
    ITEM_KINDS,
    NUM_AGENTS,
    RIGID,
    AgentState,
    GameConfig,
    GameState,
    render_grid,
)
from .rng import SplitMix64, derive_seed

MAX_ATTEMPTS = 100


class GenerationError(RuntimeError):
    """Board generation could not satisfy a structural constraint."""


def corner_cells(size: int) -> list[tuple[int, int]]:
    """Agent start corners in id order."""
    n = size - 1
    return [(0, 0), (0, n), (n, 0), (n, n)]


def reserved_cells(size: int) -> set[tuple[int, int]]:
    """Corners and their two orthogonal neighbors: always passages."""
    n = size - 1
    return {
        (0, 0), (0, 1), (1, 0),
        (0, n), (0, n - 1), (1, n),
        (n, 0), (n - 1, 0), (n, 1),
        (n, n), (n, n - 1), (n - 1, n),
    }


def rotate90(cell: tuple[int, int], size: int) -> tuple[int, int]:
    r, c = cell
    return (c, size - 1 - r)


@lru_cache(maxsize=None)
def _free_orbits(size: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Non-reserved 4-cell rotation orbits, sorted by their smallest cell.

    The center cell is a rotation fixed point and is excluded; every other
    orbit on an odd board has exactly four cells.
    """
    reserved = reserved_cells(size)
    center = (size // 2, size // 2)
    seen: set[tuple[int, int]] = set()
    orbits: list[tuple[tuple[int, int], ...]] = []
    for r in range(size):
        for c in range(size):
            cell = (r, c)
            if cell in seen or cell == center:
                continue
            orbit = []
            cur = cell
            for _ in range(4):
                orbit.append(cur)
                cur = rotate90(cur, size)
            seen.update(orbit)
            if not any(x in reserved for x in orbit):
                orbits.append(tuple(sorted(orbit)))
    orbits.sort()
    return tuple(orbits)


def is_accessible(grid: list[int], size: int | None = None) -> bool:
    """True iff the four corners are mutually connected over non-rigid cells."""
    if size is None:
        size = int(len(grid) ** 0.5)
        if size * size != len(grid):
            raise ValueError(f"grid length {len(grid)} is not a perfect square")
    corners = corner_cells(size)
    targets = set(corners[1:])
    start = corners[0]
    if grid[0] == RIGID or any(grid[r * size + c] == RIGID for r, c in targets):
        return False
    seen = {start}
    frontier = deque([start])
    while frontier and targets:
        r, c = frontier.popleft()
        for nr, nc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if 0 <= nr < size and 0 <= nc < size:
                cell = (nr, nc)
                if cell not in seen and grid[nr * size + nc] != RIGID:
                    seen.add(cell)
                    targets.discard(cell)
                    frontier.append(cell)
    return not targets


def generate(config: GameConfig) -> GameState:
    """Build the start state for ``config``; deterministic in its rng_seed."""
    size = config.board_size
    orbits = list(_free_orbits(size))
    rigid_orbits = config.num_rigid // 4
    wood_orbits = config.num_wood // 4

    for attempt in range(MAX_ATTEMPTS):
        rng = SplitMix64(derive_seed(config.rng_seed, attempt))
        pool = list(orbits)
        rng.shuffle(pool)
        rigid = {cell for orbit in pool[:rigid_orbits] for cell in orbit}
        wood_pool = pool[rigid_orbits : rigid_orbits + wood_orbits]
        wood = {cell for orbit in wood_pool for cell in orbit}

        n = size
        probe = [0] * (n * n)
        for r, c in rigid:
            probe[r * n + c] = RIGID
        if not is_accessible(probe, size):
            continue

        # Half the wood hides a power-up: fill in drawn-orbit order, cells
        # within an orbit sorted, so only the last orbit can be partial.
        hidden: dict[tuple[int, int], int] = {}
        budget = config.num_wood // 2
        for orbit in wood_pool:
            for cell in orbit:
                if len(hidden) >= budget:
                    break
                hidden[cell] = rng.choice(ITEM_KINDS)

        agents = [
            AgentState(
                id=i,
                position=cell,
                ammo=config.initial_ammo,
                max_ammo=config.initial_ammo,
                blast_strength=config.initial_blast,
            )
            for i, cell in enumerate(corner_cells(size))
        ]
        state = GameState(
            config=config,
            step=0,
            grid=[],
            agents=agents,
            bombs=[],
            flames={},
            rigid=rigid,
            wood=wood,
            items={},
            hidden_items=hidden,
        )
        state.grid = render_grid(state)
        return state

    raise GenerationError(
        f"no accessible layout within {MAX_ATTEMPTS} attempts for seed "
        f"{config.rng_seed}: corner connectivity unreachable with "
        f"num_rigid={config.num_rigid}, num_wood={config.num_wood} on "
        f"{size}x{size}"
    )
