"""Configuration, experiment-matrix orchestration, persistence, reporting."""

from .config import ENV_DEFAULTS, ExperimentConfig, ParseError, ValidationError, load_config
from ..records import RunRecord

__all__ = [
    "ENV_DEFAULTS", "ExperimentConfig", "ParseError", "RunRecord",
    "ValidationError", "load_config",
]
