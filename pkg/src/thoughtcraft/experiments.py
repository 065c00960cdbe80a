"""Experiment harness: config-driven runs, metrics persistence, comparisons.

Each experiment kind executes once per seed, writing an isolated run
directory with metrics.jsonl, checkpoints and a resolved-config snapshot,
plus an experiment-level summary.csv. Seeds can run as parallel processes;
everything except wall-clock fields is seed-deterministic.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .curriculum import (
    CurriculumConfig,
    evaluate,
    run_curriculum,
    train_target,
)
from .engine import stable_seed
from .errors import ConfigInvalidError, EnvironmentFailureError
from .metrics import MetricsWriter, read_metrics, write_summary_csv
from .policy import init_params, load_checkpoint, save_checkpoint
from .profiles import load_profile, validate_profile_pair
from .techtree import load_specs
from .trainer import TrainerConfig
from .transfer import MappingSchema, transfer_init

EXPERIMENT_KINDS = (
    "acrl-thought", "transfer", "scratch-baseline", "param-sweep", "evaluate-levels",
)

SWEEP_MULTIPLIERS = (0.5, 1.0, 2.0)


@dataclass
class ExperimentConfig:
    kind: str
    catalog: str
    thought_profile: str
    target_profile: str | None = None
    curriculum: CurriculumConfig = field(default_factory=CurriculumConfig)
    trainer: TrainerConfig = field(default_factory=TrainerConfig)
    seeds: tuple = (0,)
    out_dir: str = "runs"
    bonus_damage_multipliers: tuple = SWEEP_MULTIPLIERS
    income_multipliers: tuple = SWEEP_MULTIPLIERS
    checkpoint: str | None = None          # for evaluate-levels
    max_workers: int = 1

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigInvalidError(f"config file not found: {path}")
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigInvalidError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(raw, base_dir=path.parent)

    @classmethod
    def from_dict(cls, raw: dict, base_dir=None) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigInvalidError("experiment config must be a JSON object")
        base = Path(base_dir) if base_dir is not None else Path(".")

        def resolve(p):
            p = Path(p)
            return str(p if p.is_absolute() else base / p)

        try:
            kind = raw["kind"]
            catalog = resolve(raw["catalog"])
            thought_profile = resolve(raw["thought_profile"])
        except KeyError as exc:
            raise ConfigInvalidError(f"config missing field {exc.args[0]!r}") from exc
        if kind not in EXPERIMENT_KINDS:
            raise ConfigInvalidError(f"unknown experiment kind {kind!r}")
        seeds = tuple(raw.get("seeds", [0]))
        if not seeds:
            raise ConfigInvalidError("config must list at least one seed")
        try:
            curriculum = CurriculumConfig(**raw.get("curriculum", {}))
            trainer = TrainerConfig.from_dict(raw.get("trainer", {}))
        except (TypeError, ValueError) as exc:
            raise ConfigInvalidError(f"bad curriculum/trainer config: {exc}") from exc
        cfg = cls(
            kind=kind,
            catalog=catalog,
            thought_profile=thought_profile,
            target_profile=resolve(raw["target_profile"]) if raw.get("target_profile") else None,
            curriculum=curriculum,
            trainer=trainer,
            seeds=seeds,
            out_dir=str(raw.get("out_dir", "runs")),
            bonus_damage_multipliers=tuple(raw.get("bonus_damage_multipliers", SWEEP_MULTIPLIERS)),
            income_multipliers=tuple(raw.get("income_multipliers", SWEEP_MULTIPLIERS)),
            checkpoint=resolve(raw["checkpoint"]) if raw.get("checkpoint") else None,
            max_workers=int(raw.get("max_workers", 1)),
        )
        cfg.validate()
        return cfg

    def validate(self):
        if not Path(self.catalog).is_file():
            raise ConfigInvalidError(f"catalog file not found: {self.catalog}")
        if not Path(self.thought_profile).is_file():
            raise ConfigInvalidError(f"thought profile not found: {self.thought_profile}")
        needs_target = self.kind in ("transfer", "scratch-baseline", "evaluate-levels")
        if needs_target and self.target_profile is None:
            raise ConfigInvalidError(f"{self.kind} requires target_profile")
        if self.target_profile is not None and not Path(self.target_profile).is_file():
            raise ConfigInvalidError(f"target profile not found: {self.target_profile}")
        if self.kind == "evaluate-levels" and self.checkpoint is None:
            raise ConfigInvalidError("evaluate-levels requires checkpoint")


def _out_root(config: ExperimentConfig) -> Path:
    env = os.environ.get("THOUGHTCRAFT_OUT")
    return Path(env) if env else Path(config.out_dir)


def perturbed_profile(profile, bonus_mult: float, income_mult: float):
    return replace(
        profile,
        bonus_damage_scale=profile.bonus_damage_scale * bonus_mult,
        mineral_income_per_worker_per_step=profile.mineral_income_per_worker_per_step * income_mult,
        gas_income_per_worker_per_step=profile.gas_income_per_worker_per_step * income_mult,
    )


def _run_acrl_seed(config: ExperimentConfig, seed: int, run_id: str, out: Path,
                   bonus_mult: float = 1.0, income_mult: float = 1.0) -> dict:
    tree = load_specs(config.catalog)
    profile = perturbed_profile(load_profile(config.thought_profile), bonus_mult, income_mult)
    run_dir = out / run_id
    run_dir.mkdir(parents=True, exist_ok=True)
    cur_cfg = replace(config.curriculum, seed=seed)
    with MetricsWriter(run_dir / "metrics.jsonl") as writer:
        params, cur, records = run_curriculum(
            cur_cfg, tree, profile, config.trainer,
            run_id=run_id, metrics_writer=writer, checkpoint_dir=out)
    reached = next((h[0] for h in cur.history if h[1] == cur_cfg.max_difficulty), None)
    return {
        "run_id": run_id,
        "seed": seed,
        "completed": cur.completed,
        "final_difficulty": cur.difficulty,
        "reached_max_at_iteration": reached,
        "iterations": cur.iteration,
    }


def _run_transfer_seed(config: ExperimentConfig, seed: int, run_id: str, out: Path) -> dict:
    tree = load_specs(config.catalog)
    thought = load_profile(config.thought_profile)
    target = load_profile(config.target_profile)
    validate_profile_pair(thought, target)
    run_dir = out / run_id
    run_dir.mkdir(parents=True, exist_ok=True)
    cur_cfg = replace(config.curriculum, seed=seed)
    with MetricsWriter(run_dir / "metrics.jsonl") as writer:
        params, cur, _ = run_curriculum(
            cur_cfg, tree, thought, config.trainer,
            run_id=run_id, metrics_writer=writer, checkpoint_dir=out)
        schema = MappingSchema.from_profiles(thought, target)
        p_theta = transfer_init(params, target.feature_schema, schema)
        save_checkpoint(p_theta, out / run_id / "transfer_init.ckpt")
        p_theta, target_records = train_target(
            p_theta, tree, target, cur_cfg.target_level, config.trainer,
            episodes_per_iter=cur_cfg.target_episodes_per_iter,
            n_iterations=cur_cfg.target_max_iterations,
            eval_games=cur_cfg.eval_games, seed=seed, run_id=run_id,
            metrics_writer=writer, checkpoint_dir=out)
    first = target_records[0].win_rate_eval if target_records else None
    return {
        "run_id": run_id,
        "seed": seed,
        "thought_completed": cur.completed,
        "initial_target_win_rate": first,
        "final_target_win_rate": target_records[-1].win_rate_eval if target_records else None,
    }


def _run_scratch_seed(config: ExperimentConfig, seed: int, run_id: str, out: Path) -> dict:
    tree = load_specs(config.catalog)
    target = load_profile(config.target_profile)
    run_dir = out / run_id
    run_dir.mkdir(parents=True, exist_ok=True)
    cur_cfg = replace(config.curriculum, seed=seed)
    params = init_params(len(target.feature_schema),
                         seed=stable_seed(seed, "scratch-init"))
    with MetricsWriter(run_dir / "metrics.jsonl") as writer:
        params, records = train_target(
            params, tree, target, cur_cfg.target_level, config.trainer,
            episodes_per_iter=cur_cfg.target_episodes_per_iter,
            n_iterations=cur_cfg.target_max_iterations,
            eval_games=cur_cfg.eval_games, seed=seed, run_id=run_id,
            metrics_writer=writer, checkpoint_dir=out)
    return {
        "run_id": run_id,
        "seed": seed,
        "initial_target_win_rate": records[0].win_rate_eval if records else None,
        "final_target_win_rate": records[-1].win_rate_eval if records else None,
    }


def _run_eval_levels_seed(config: ExperimentConfig, seed: int, run_id: str, out: Path) -> dict:
    tree = load_specs(config.catalog)
    profile = load_profile(config.target_profile or config.thought_profile)
    params = load_checkpoint(config.checkpoint)
    run_dir = out / run_id
    run_dir.mkdir(parents=True, exist_ok=True)
    results = {}
    for level in range(1, config.curriculum.max_difficulty + 1):
        res = evaluate(params, tree, profile, level, 100, stable_seed(seed, "levels", level))
        results[level] = {
            "win_rate": res.win_rate, "wins": res.wins, "losses": res.losses,
            "draws": res.draws, "mean_episode_length": res.mean_episode_length,
        }
    (run_dir / "levels.json").write_text(json.dumps(results, indent=2))
    return {"run_id": run_id, "seed": seed,
            "win_rates": {k: v["win_rate"] for k, v in results.items()}}


def _seed_task(args):
    fn_name, config_dict, seed, run_id, out_str, extra = args
    config = _config_from_state(config_dict)
    out = Path(out_str)
    fn = {
        "acrl": _run_acrl_seed,
        "transfer": _run_transfer_seed,
        "scratch": _run_scratch_seed,
        "eval": _run_eval_levels_seed,
    }[fn_name]
    return fn(config, seed, run_id, out, **extra)


def _config_state(config: ExperimentConfig) -> dict:
    state = asdict(config)
    return state


def _config_from_state(state: dict) -> ExperimentConfig:
    state = dict(state)
    state["curriculum"] = CurriculumConfig(**state["curriculum"])
    state["trainer"] = TrainerConfig(**state["trainer"])
    state["seeds"] = tuple(state["seeds"])
    state["bonus_damage_multipliers"] = tuple(state["bonus_damage_multipliers"])
    state["income_multipliers"] = tuple(state["income_multipliers"])
    return ExperimentConfig(**state)


def _execute(tasks, max_workers: int):
    if max_workers <= 1 or len(tasks) <= 1:
        return [_seed_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(_seed_task, tasks))


def run_experiment(config: ExperimentConfig) -> dict:
    """Execute the configured experiment for every seed; returns a manifest of
    run results (also written to the output directory)."""
    config.validate()
    out = _out_root(config)
    out.mkdir(parents=True, exist_ok=True)
    state = _config_state(config)
    (out / "config.json").write_text(json.dumps(state, indent=2, default=str))

    tasks = []
    if config.kind == "acrl-thought":
        for seed in config.seeds:
            tasks.append(("acrl", state, seed, f"acrl-s{seed}", str(out), {}))
    elif config.kind == "transfer":
        for seed in config.seeds:
            tasks.append(("transfer", state, seed, f"transfer-s{seed}", str(out), {}))
    elif config.kind == "scratch-baseline":
        for seed in config.seeds:
            tasks.append(("scratch", state, seed, f"scratch-s{seed}", str(out), {}))
    elif config.kind == "param-sweep":
        for bmul in config.bonus_damage_multipliers:
            for imul in config.income_multipliers:
                for seed in config.seeds:
                    run_id = f"sweep-b{bmul:g}-i{imul:g}-s{seed}"
                    tasks.append(("acrl", state, seed, run_id, str(out),
                                  {"bonus_mult": bmul, "income_mult": imul}))
    elif config.kind == "evaluate-levels":
        for seed in config.seeds:
            tasks.append(("eval", state, seed, f"eval-s{seed}", str(out), {}))

    try:
        results = _execute(tasks, config.max_workers)
    except Exception as exc:
        if isinstance(exc, ConfigInvalidError):
            raise
        raise EnvironmentFailureError(f"experiment execution failed: {exc}") from exc

    manifest = {"kind": config.kind, "runs": results}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))

    run_records = {}
    for task in tasks:
        run_id = task[3]
        metrics_path = out / run_id / "metrics.jsonl"
        if metrics_path.is_file():
            records = read_metrics(metrics_path)
            if records:
                run_records[run_id] = records
    if run_records:
        write_summary_csv(out / "summary.csv", run_records)
    return manifest


def _threshold_stats(records, threshold: float) -> dict:
    for record in records:
        if record.win_rate_eval is not None and record.win_rate_eval >= threshold:
            return {
                "reached": True,
                "iteration": record.iteration,
                "episodes_to_threshold": record.episodes_total,
                "wall_clock_ms_to_threshold": record.wall_clock_ms,
            }
    return {
        "reached": False,
        "iteration": None,
        "episodes_to_threshold": None,
        "wall_clock_ms_to_threshold": None,
    }


def compare_runs(run_dir_a, run_dir_b, threshold: float) -> dict:
    """Episodes and wall-clock to first reach the evaluation threshold, per
    run, with a/b ratios. A run that never reaches it is reported as such
    (not an error)."""
    report = {"threshold": threshold, "runs": {}}
    stats = {}
    for name, run_dir in (("a", Path(run_dir_a)), ("b", Path(run_dir_b))):
        metrics_path = run_dir / "metrics.jsonl"
        if not metrics_path.is_file():
            raise ConfigInvalidError(f"no metrics.jsonl under {run_dir}")
        records = read_metrics(metrics_path)
        if not any(r.win_rate_eval is not None for r in records):
            raise ConfigInvalidError(f"run {run_dir} has no evaluation win-rates")
        st = _threshold_stats(records, threshold)
        st["dir"] = str(run_dir)
        st["total_episodes"] = records[-1].episodes_total if records else 0
        stats[name] = st
        report["runs"][name] = st
    if stats["a"]["reached"] and stats["b"]["reached"]:
        report["episodes_ratio"] = _ratio(stats["a"]["episodes_to_threshold"],
                                          stats["b"]["episodes_to_threshold"])
        report["wall_clock_ratio"] = _ratio(stats["a"]["wall_clock_ms_to_threshold"],
                                            stats["b"]["wall_clock_ms_to_threshold"])
    else:
        report["episodes_ratio"] = None
        report["wall_clock_ratio"] = None
    return report


def _ratio(a, b):
    if b:
        return a / b
    return 1.0 if a == b else None
