"""Real-time open-loop MCTS for tick-based grid games."""

from rtmcts.agent import Agent, AgentConfig, make_agent, preset
from rtmcts.engine import Action, GameState, advance, load_level, load_spec
from rtmcts.mcts import Budget, SearchConfig

__all__ = ["Action", "Agent", "AgentConfig", "Budget", "GameState", "SearchConfig", "advance",
           "load_level", "load_spec", "make_agent", "preset"]
__version__ = "0.1.0"
