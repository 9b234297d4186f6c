"""Cell execution, persistence layout, and summary building for experiment grids."""

from __future__ import annotations

import os
import traceback
from concurrent.futures import ProcessPoolExecutor

from .. import metrics, nncore
from ..agents import make_agent, split_seed, train
from ..envs import make_env
from ..tutor import HttpLlmBackend, ScriptedBackend, TutorGate, TutorSchedule
from .config import ExperimentConfig
from ..records import RunRecord

DEFAULT_WINDOW = 7  # moving-average window for emitted plot data


def build_env(config: ExperimentConfig):
    if config.environment == "connect_four":
        return make_env("connect_four", opponent=config.opponent)
    return make_env(config.environment)


def build_backend(config: ExperimentConfig, seed: int):
    kind, _, rest = config.tutor.partition(":")
    if kind == "scripted":
        return ScriptedBackend(rest, latency=config.scripted_latency, seed=seed)
    return HttpLlmBackend(rest, base_url=config.llm_url or None,
                          timeout=config.llm_timeout)


def build_gate(config: ExperimentConfig, env, seed: int) -> TutorGate | None:
    if config.tutor == "none":
        return None
    gate_seed, backend_seed = split_seed(seed, 2)
    schedule = TutorSchedule(theta=config.decay_steps,
                             p_initial=config.p_initial, p_final=config.p_final)
    return TutorGate(env, build_backend(config, backend_seed), schedule,
                     reuse_enabled=config.reuse, budget=config.budget,
                     retry_cap=config.retry_cap, seed=gate_seed,
                     timeout=config.llm_timeout)


def run_dir(out_dir: str, config: ExperimentConfig, seed: int) -> str:
    return os.path.join(out_dir, "runs", f"{config.config_hash()}-s{seed}")


def execute_run(config: ExperimentConfig, seed: int, out_dir: str) -> RunRecord:
    """Train one (cell, seed) run and persist its record, plot CSV, checkpoints."""
    env = build_env(config)
    agent_seed = split_seed(seed, 1)[0] ^ 0x5EED
    agent = make_agent(config.algorithm, env.obs_dim, env.action_count,
                       seed=agent_seed, **config.hyperparameters)
    gate = build_gate(config, env, seed)
    record = train(agent, env, gate, config.total_steps, seed,
                   tutor_label=config.tutor, reuse_label=config.reuse_label,
                   config=config.canonical_dict())

    directory = run_dir(out_dir, config, seed)
    os.makedirs(directory, exist_ok=True)
    for name, net in agent.networks().items():
        path = os.path.join(directory, f"{name}.bin")
        nncore.save_checkpoint(net, path)
        record.checkpoint_paths[name] = path
    metrics.write_run_csv(os.path.join(directory, "run.csv"),
                          metrics.PerformanceCurve(record.episode_returns,
                                                   run_id=f"s{seed}"),
                          window=DEFAULT_WINDOW)
    record.save(os.path.join(directory, "record.json"))
    return record


def _execute_run_task(args) -> RunRecord:
    config_dict, seed, out_dir = args
    hyper = config_dict.pop("hyperparameters")
    if config_dict.get("reuse") is None:
        config_dict["reuse"] = True
    config = ExperimentConfig(hyperparameters=hyper, **config_dict)
    return execute_run(config, seed, out_dir)


def run_matrix(configs: list[ExperimentConfig], parallelism: int = 1,
               out_dir: str = "out", resume: bool = False,
               log=print) -> list[RunRecord]:
    """Execute every (cell, seed) run, reusing completed ones under --resume.

    Per-run files are written by the workers (each run owns its directory);
    the summary is rebuilt by this process once everything finished. Failed
    cells are recorded in failures.log and do not stop the matrix.
    """
    os.makedirs(out_dir, exist_ok=True)
    pending: list[tuple] = []
    records: list[RunRecord] = []
    for config in configs:
        for seed in config.seeds:
            record_path = os.path.join(run_dir(out_dir, config, seed), "record.json")
            if resume and os.path.exists(record_path):
                records.append(RunRecord.load(record_path))
                log(f"[skip] {config.config_hash()} seed {seed} (completed)")
            else:
                pending.append((config.canonical_dict(), seed, out_dir))

    failures: list[str] = []
    if parallelism > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            futures = {pool.submit(_execute_run_task, task): task
                       for task in pending}
            for future, task in futures.items():
                try:
                    records.append(future.result())
                except Exception:
                    failures.append(_failure_entry(task, traceback.format_exc()))
    else:
        for task in pending:
            try:
                records.append(_execute_run_task(task))
            except Exception:
                failures.append(_failure_entry(task, traceback.format_exc()))

    if failures:
        with open(os.path.join(out_dir, "failures.log"), "a") as fh:
            fh.write("\n".join(failures) + "\n")
        log(f"[warn] {len(failures)} run(s) failed; see failures.log")

    write_summary(records, out_dir)
    return records


def _failure_entry(task, trace: str) -> str:
    config_dict, seed, _ = task
    label = (f"{config_dict.get('environment')}/{config_dict.get('algorithm')}"
             f"/{config_dict.get('tutor')}/seed{seed}")
    return f"=== {label}\n{trace}"


def summary_rows(records: list[RunRecord]) -> list[dict]:
    """Per-run summary rows; scores are normalized per environment so every
    run of an environment shares one scale."""
    by_env: dict[str, list[RunRecord]] = {}
    for record in records:
        by_env.setdefault(record.environment, []).append(record)

    scores: dict[int, str] = {}
    for group in by_env.values():
        scorable = [r for r in group if r.episode_returns]
        curves = [metrics.PerformanceCurve(r.episode_returns) for r in scorable]
        try:
            normalized = metrics.normalize_set(curves) if curves else []
        except metrics.DegenerateRange:
            normalized = []
        for record, curve in zip(scorable, normalized):
            scores[id(record)] = repr(metrics.convergence_score(curve))

    rows = []
    for record in records:
        stats = record.tutor_stats
        reuses = stats.get("reuses", 0)
        if record.latencies:
            saved = metrics.saved_time_minutes(
                metrics.TimeLedger(reuses, record.latencies,
                                   stats.get("fresh_queries", 0)))
        else:
            saved = 0.0
        rows.append({
            "environment": record.environment,
            "algorithm": record.algorithm,
            "tutor": record.tutor,
            "reuse": record.reuse,
            "seed": record.seed,
            "convergence_score": scores.get(id(record), ""),
            "fresh_queries": stats.get("fresh_queries", 0),
            "reuses": reuses,
            "saved_minutes": repr(saved),
            "wall_clock_seconds": repr(record.tutor_wall_seconds),
        })
    rows.sort(key=lambda r: (r["environment"], r["algorithm"], r["tutor"],
                             r["reuse"], r["seed"]))
    return rows


def write_summary(records: list[RunRecord], out_dir: str) -> str:
    path = os.path.join(out_dir, "summary.csv")
    metrics.write_summary_csv(path, summary_rows(records))
    return path


def load_records(out_dir: str) -> list[RunRecord]:
    runs_dir = os.path.join(out_dir, "runs")
    records = []
    if os.path.isdir(runs_dir):
        for entry in sorted(os.listdir(runs_dir)):
            path = os.path.join(runs_dir, entry, "record.json")
            if os.path.exists(path):
                records.append(RunRecord.load(path))
    return records
