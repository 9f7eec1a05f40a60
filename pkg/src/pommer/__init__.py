"""Deterministic four-player bomb-laying grid game.

Engine, seeded board generation, observations with optional fog, baseline
agents, an HTTP remote-agent protocol, and a replay-recording match runner.
"""

from .engine import (
    Action,
    AgentState,
    Bomb,
    ConfigError,
    ContractViolation,
    GameConfig,
    GameState,
    MatchResult,
    Mode,
    ResultKind,
    check_done,
    state_digest,
    step,
)
from .boardgen import GenerationError, generate, is_accessible
from .observe import Observation, WireFormatError, decode_observation, encode_observation, observe

__version__ = "0.1.0"

__all__ = [
    "Action",
    "AgentState",
    "Bomb",
    "ConfigError",
    "ContractViolation",
    "GameConfig",
    "GameState",
    "GenerationError",
    "MatchResult",
    "Mode",
    "Observation",
    "ResultKind",
    "WireFormatError",
    "check_done",
    "decode_observation",
    "encode_observation",
    "generate",
    "is_accessible",
    "observe",
    "state_digest",
    "step",
]
