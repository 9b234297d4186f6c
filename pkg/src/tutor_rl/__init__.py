"""LLM-tutored reinforcement learning framework.

A student-teacher training setup: DQN/PPO/A2C students whose action
selection consults an external tutor (a local LLM over HTTP, or a scripted
oracle) with a linearly decaying engagement probability, plus a budgeted
advice-reuse cache, convergence scoring, and an experiment-matrix runner.
"""

__version__ = "0.1.0"
