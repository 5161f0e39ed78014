"""Functional compression over networks: characteristic graphs, colorings,
graph entropies and coloring-based coding schemes on trees."""

from .core import (Budget, BudgetError, Scenario, ScenarioError, block_extend,
                   conditional_entropy, entropy, load_scenario, make_scenario,
                   pushforward, save_scenario)

__all__ = ["Budget", "BudgetError", "Scenario", "ScenarioError", "block_extend",
           "conditional_entropy", "entropy", "load_scenario", "make_scenario",
           "pushforward", "save_scenario"]
__version__ = "0.1.0"
