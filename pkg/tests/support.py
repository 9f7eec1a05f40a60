"""Shared helpers for building synthetic states in tests."""

from __future__ import annotations

from pommer.engine import (
    AgentState,
    Bomb,
    GameConfig,
    GameState,
    Mode,
    render_grid,
)


def make_config(size: int = 11, mode: Mode = Mode.FFA, **kwargs) -> GameConfig:
    kwargs.setdefault("num_rigid", 0)
    kwargs.setdefault("num_wood", 0)
    return GameConfig(mode=mode, board_size=size, **kwargs)


def make_state(
    size: int = 11,
    *,
    agents=None,
    bombs=None,
    rigid=(),
    wood=(),
    items=None,
    hidden_items=None,
    flames=None,
    step=0,
    config: GameConfig | None = None,
    **config_kwargs,
) -> GameState:
    """Build a GameState directly, bypassing generation.

    ``agents``: list of up to 4 dicts with AgentState overrides (position
    required); missing slots become dead agents parked at (0, 0).
    ``bombs``: list of dicts with Bomb fields.
    """
    if config is None:
        config = make_config(size, **config_kwargs)
    agent_states = []
    agents = agents or []
    for i in range(4):
        if i < len(agents) and agents[i] is not None:
            spec = dict(agents[i])
            spec.setdefault("blast_strength", config.initial_blast)
            agent_states.append(AgentState(id=i, **spec))
        else:
            agent_states.append(AgentState(id=i, position=(0, 0), alive=False))
    state = GameState(
        config=config,
        step=step,
        grid=[],
        agents=agent_states,
        bombs=[Bomb(**b) for b in (bombs or [])],
        flames=dict(flames or {}),
        rigid=set(rigid),
        wood=set(wood),
        items=dict(items or {}),
        hidden_items=dict(hidden_items or {}),
    )
    state.grid = render_grid(state)
    return state
