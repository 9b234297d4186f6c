"""Experiment configuration: INI files, validation, matrix expansion, hashing."""

from __future__ import annotations

import configparser
import hashlib
import inspect
import json
from dataclasses import asdict, dataclass, field

from ..agents import ALGORITHMS
from ..agents.a2c import A2cAgent
from ..agents.dqn import DqnAgent
from ..agents.ppo import PpoAgent
from ..envs import ENV_NAMES

# per-environment (total_steps, decay_steps) defaults
ENV_DEFAULTS = {
    "blackjack": (15000, 3000),
    "connect_four": (10000, 1000),
    "snake": (8000, 1000),
}

SCRIPTED_POLICIES = ("optimal", "heuristic", "random", "adversarial", "malformed")


class ParseError(Exception):
    pass


class ValidationError(Exception):
    pass


def _agent_hyperparameter_names(algorithm: str) -> set[str]:
    cls = {"dqn": DqnAgent, "ppo": PpoAgent, "a2c": A2cAgent}[algorithm]
    params = set(inspect.signature(cls.__init__).parameters)
    return params - {"self", "obs_dim", "n_actions", "seed"}


@dataclass
class ExperimentConfig:
    """One cell of the environment x algorithm x tutor x reuse grid."""

    environment: str
    algorithm: str = "dqn"
    tutor: str = "none"  # none | scripted:<policy> | http:<model>
    reuse: bool = True
    total_steps: int = 0  # 0: use the environment default
    decay_steps: int = 0
    seeds: list[int] = field(default_factory=lambda: [1, 2, 3])
    budget: int = 3
    retry_cap: int = 5
    p_initial: float = 1.0
    p_final: float = 0.1
    scripted_latency: float = 0.01
    opponent: str = "random"  # connect four opponent policy
    llm_url: str = ""  # empty: environment variable, then localhost
    llm_timeout: float = 300.0
    hyperparameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.environment not in ENV_NAMES:
            raise ValidationError(
                f"experiment.environment: {self.environment!r} not in {ENV_NAMES}")
        if self.algorithm not in ALGORITHMS:
            raise ValidationError(
                f"experiment.algorithm: {self.algorithm!r} not in {ALGORITHMS}")
        self._check_tutor()
        defaults = ENV_DEFAULTS[self.environment]
        if self.total_steps == 0:
            self.total_steps = defaults[0]
        if self.decay_steps == 0:
            self.decay_steps = defaults[1]
        for name in ("total_steps", "decay_steps", "retry_cap"):
            if getattr(self, name) < 1:
                raise ValidationError(f"experiment.{name}: must be >= 1")
        if self.budget < 0:
            raise ValidationError("experiment.budget: must be >= 0")
        if not self.seeds:
            raise ValidationError("experiment.seeds: need at least one seed")
        if not (0.0 <= self.p_final <= self.p_initial <= 1.0):
            raise ValidationError(
                "experiment.p_final/p_initial: need 0 <= p_final <= p_initial <= 1")
        if self.opponent not in ("random", "heuristic"):
            raise ValidationError(
                f"experiment.opponent: {self.opponent!r} not in ('random', 'heuristic')")
        self._check_hyperparameters()

    def _check_tutor(self):
        if self.tutor == "none":
            return
        kind, _, rest = self.tutor.partition(":")
        if kind == "scripted" and rest in SCRIPTED_POLICIES:
            return
        if kind == "http" and rest:
            return
        raise ValidationError(
            f"experiment.tutor: {self.tutor!r} must be 'none', "
            f"'scripted:<{'|'.join(SCRIPTED_POLICIES)}>', or 'http:<model>'")

    def _check_hyperparameters(self):
        allowed = _agent_hyperparameter_names(self.algorithm)
        for key, value in self.hyperparameters.items():
            if key not in allowed:
                raise ValidationError(
                    f"hyperparameters.{key}: unknown for {self.algorithm} "
                    f"(allowed: {sorted(allowed)})")
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                if value <= 0 and key not in ("eps_end",):
                    raise ValidationError(f"hyperparameters.{key}: must be > 0")

    @property
    def reuse_label(self) -> str:
        if self.tutor == "none":
            return "na"
        return "on" if self.reuse else "off"

    def canonical_dict(self) -> dict:
        data = asdict(self)
        if self.tutor == "none":
            data["reuse"] = None  # baselines are reuse-agnostic
        return data

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


# ---------------------------------------------------------------------------
# INI loading

_EXPERIMENT_KEYS = {
    "environment", "algorithm", "tutor", "reuse", "total_steps", "decay_steps",
    "seeds", "budget", "retry_cap", "p_initial", "p_final", "scripted_latency",
    "opponent", "llm_url", "llm_timeout",
}
_MATRIX_KEYS = {"environments", "algorithms", "tutors", "reuse", "seeds"}
_INT_KEYS = {"total_steps", "decay_steps", "budget", "retry_cap"}
_FLOAT_KEYS = {"p_initial", "p_final", "scripted_latency", "llm_timeout"}
_BOOL_STRINGS = {"true": True, "yes": True, "on": True, "1": True,
                 "false": False, "no": False, "off": False, "0": False}


def _parse_bool(section: str, key: str, raw: str) -> bool:
    try:
        return _BOOL_STRINGS[raw.strip().lower()]
    except KeyError:
        raise ValidationError(f"{section}.{key}: {raw!r} is not a boolean") from None


def _parse_list(raw: str) -> list[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def _parse_scalar(section: str, key: str, raw: str):
    raw = raw.strip()
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ValidationError(f"{section}.{key}: {raw!r} is not an integer") from None
    if key in _FLOAT_KEYS:
        try:
            return float(raw)
        except ValueError:
            raise ValidationError(f"{section}.{key}: {raw!r} is not a number") from None
    if key == "reuse":
        return _parse_bool(section, key, raw)
    if key == "seeds":
        try:
            return [int(s) for s in _parse_list(raw)]
        except ValueError:
            raise ValidationError(f"{section}.seeds: {raw!r} must be integers") from None
    return raw


def _parse_hyperparameter(key: str, raw: str):
    raw = raw.strip()
    if key == "hidden":
        try:
            return tuple(int(s) for s in _parse_list(raw))
        except ValueError:
            raise ValidationError(f"hyperparameters.hidden: {raw!r}") from None
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        raise ValidationError(f"hyperparameters.{key}: {raw!r} is not numeric") from None


def _read_ini(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except configparser.Error as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return parser


def _cell_from_items(section: str, items: dict, hyper: dict) -> ExperimentConfig:
    kwargs = {}
    for key, raw in items.items():
        if key not in _EXPERIMENT_KEYS:
            raise ValidationError(f"{section}.{key}: unknown key")
        kwargs[key] = _parse_scalar(section, key, raw)
    if "environment" not in kwargs:
        raise ValidationError(f"{section}.environment: required")
    return ExperimentConfig(hyperparameters=dict(hyper), **kwargs)


def load_config(path):
    """Load one cell ([experiment]) or a cell list ([matrix] / [cell.*]).

    Returns an ExperimentConfig for a single-cell file, otherwise a list of
    deduplicated cells (baselines collapse across reuse flags).
    """
    parser = _read_ini(path)
    sections = set(parser.sections())
    hyper = {k: _parse_hyperparameter(k, v)
             for k, v in parser.items("hyperparameters")} \
        if "hyperparameters" in sections else {}
    sections.discard("hyperparameters")

    if "experiment" in sections:
        extra = sections - {"experiment"}
        if extra:
            raise ValidationError(f"unexpected sections {sorted(extra)}")
        return _cell_from_items("experiment", dict(parser.items("experiment")), hyper)

    cells: list[ExperimentConfig] = []
    defaults = {}
    if "defaults" in sections:
        for key, raw in parser.items("defaults"):
            if key not in _EXPERIMENT_KEYS - {"environment"}:
                raise ValidationError(f"defaults.{key}: unknown key")
            defaults[key] = raw
        sections.discard("defaults")

    if "matrix" in sections:
        cells.extend(_expand_matrix(dict(parser.items("matrix")), defaults, hyper))
        sections.discard("matrix")

    for section in sorted(sections):
        if not section.startswith("cell."):
            raise ValidationError(f"{section}: unknown section")
        items = dict(defaults)
        items.update(parser.items(section))
        cells.append(_cell_from_items(section, items, hyper))

    if not cells:
        raise ParseError(f"{path}: no [experiment], [matrix], or [cell.*] section")
    return dedup_cells(cells)


def _expand_matrix(items: dict, defaults: dict, hyper: dict) -> list[ExperimentConfig]:
    for key in items:
        if key not in _MATRIX_KEYS:
            raise ValidationError(f"matrix.{key}: unknown key")
    if "environments" not in items:
        raise ValidationError("matrix.environments: required")
    envs = _parse_list(items["environments"])
    algos = _parse_list(items.get("algorithms", "dqn"))
    tutors = _parse_list(items.get("tutors", "none"))
    reuse_flags = [_parse_bool("matrix", "reuse", r)
                   for r in _parse_list(items.get("reuse", "on, off"))]
    cells = []
    for env in envs:
        for algo in algos:
            for tutor in tutors:
                for reuse in reuse_flags:
                    cell_items = dict(defaults)
                    cell_items.update(environment=env, algorithm=algo, tutor=tutor)
                    if "seeds" in items:
                        cell_items["seeds"] = items["seeds"]
                    cell = _cell_from_items("matrix", cell_items, hyper)
                    cell.reuse = reuse
                    cells.append(cell)
    return cells


def dedup_cells(cells: list[ExperimentConfig]) -> list[ExperimentConfig]:
    """Drop duplicate cells; baseline cells ignore the reuse flag entirely."""
    seen = set()
    unique = []
    for cell in cells:
        h = cell.config_hash()
        if h not in seen:
            seen.add(h)
            unique.append(cell)
    return unique
