"""System-message construction for the tutor, plus a model-file emitter."""

from __future__ import annotations

SYSTEM_TEMPLATE = (
    "You are a system used as a teacher for Reinforcement learning (RL) "
    "agent. Your goal is to use your reasoning to help with the convergence "
    "of optimal policy of the RL agent.\n"
    "The environment you will guide the agent is {env_name}.\n"
    "You will be given the {obs_desc}.\n"
    "\n"
    "You can select an action from this dictionary: {actions}.\n"
    "\n"
    "Output: Clarify the current state and suggest the best action for the "
    "agent to take. Output the action's index (key from the actions "
    "dictionary) in the <action></action> tags (e.g. <action>3</action>)."
)


def format_action_dictionary(action_names: dict[int, str]) -> str:
    inner = ", ".join(f"{k}: '{action_names[k]}'" for k in sorted(action_names))
    return "{" + inner + "}"


def build_system_prompt(env_name: str, obs_space_desc: str,
                        action_dictionary: dict[int, str]) -> str:
    if not env_name.strip():
        raise ValueError("env_name must be non-empty")
    if not action_dictionary:
        raise ValueError("action_dictionary must be non-empty")
    return SYSTEM_TEMPLATE.format(
        env_name=env_name,
        obs_desc=obs_space_desc,
        actions=format_action_dictionary(action_dictionary),
    )


def emit_model_file(base_model: str, system_prompt: str) -> str:
    """Equivalent server-side registration text for users who prefer baking
    the system message into a named model instead of sending it per request."""
    return f'FROM {base_model}\nSYSTEM """\n{system_prompt}\n"""\n'
