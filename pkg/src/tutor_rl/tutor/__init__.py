"""Teacher side: engagement schedule, advice cache, backends, parsing, gate."""

from .backends import (
    DEFAULT_BASE_URL,
    ENV_URL_VARIABLE,
    HttpLlmBackend,
    ScriptedBackend,
    Timeout,
    TransportError,
    query_backend,
    scripted_action,
)
from .cache import DEFAULT_BUDGET, AdviceCache, AdviceEntry, TutorStats
from .gate import DEFAULT_RETRY_CAP, RetriesExhausted, TutorGate
from .parsing import ParseFailure, parse_action
from .prompts import build_system_prompt, emit_model_file, format_action_dictionary
from .schedule import TutorSchedule, current_probability

__all__ = [
    "AdviceCache", "AdviceEntry", "TutorStats", "TutorSchedule", "TutorGate",
    "HttpLlmBackend", "ScriptedBackend", "ParseFailure", "RetriesExhausted",
    "TransportError", "Timeout", "parse_action", "build_system_prompt",
    "emit_model_file", "format_action_dictionary", "current_probability",
    "query_backend", "scripted_action", "DEFAULT_BUDGET", "DEFAULT_RETRY_CAP",
    "DEFAULT_BASE_URL", "ENV_URL_VARIABLE",
]
