"""Migration planning and latency simulation for elastic stateful stream operators."""

from .core import (
    Assignment,
    ConvergenceError,
    InfeasibleError,
    InputError,
    MigrationPlan,
    NodeIdAllocator,
    Partitioning,
    PlanningError,
    SizeLimitError,
    StaleTableError,
    TaskInterval,
    TaskSet,
    UnstableScenarioError,
    is_balanced,
    migration_cost,
    migration_cost_map,
    node_cap,
    plan_between,
)
from .matching import (
    OverlapGainMatrix,
    family_migration_cost,
    max_family_gain,
    optimal_assignment,
    overlap_gains,
)
from .single_step import (
    BalancedWindow,
    brute_force_plan,
    enumerate_target_partitionings,
    normalize_nodes,
    plan_single_step,
    plan_single_step_basic,
    plan_single_step_reference,
)

__all__ = [name for name in dir() if not name.startswith("_")]
