"""thoughtcraft: a fast turn-based RTS macro model for curriculum pre-training
with policy transfer into a higher-fidelity variant of the same game."""

__version__ = "0.1.0"

from .actions import AGENT, N_ACTIONS, OPPONENT, MacroAction
from .combat import CombatUnit, combat_resolve, unit_from_spec, units_from_counts
from .curriculum import (
    CurriculumConfig,
    CurriculumState,
    EvalResult,
    advance_check,
    collect_window,
    evaluate,
    run_curriculum,
    train_target,
)
from .engine import Game, GameState, PlayerState, stable_seed
from .metrics import MetricsRecord, MetricsWriter, read_metrics
from .opponents import DifficultyProfile, difficulty_table, opponent_action
from .policy import (
    PolicyParams,
    forward,
    greedy_action,
    init_params,
    load_checkpoint,
    sample_action,
    save_checkpoint,
)
from .profiles import (
    FidelityProfile,
    default_catalog_path,
    default_profile_path,
    load_profile,
    validate_profile_pair,
)
from .techtree import TechTree, UnitSpec, buildable, buildable_set, load_specs
from .trainer import ReplayBuffer, TrainerConfig, compute_gae, ppo_update
from .transfer import MappingSchema, map_action, map_state, transfer_init
