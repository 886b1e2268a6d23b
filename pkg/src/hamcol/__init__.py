"""hamcol: seeded random (di)graph processes, online q-coloring with
orientation support, and constructive per-color directed Hamilton cycles
with full verification.

The hot kernels (online coloring, hitting scan, rotation search) run
through a compiled extension when available; ``hamcol.BACKEND`` names the
active implementation and ``HAMCOL_PURE=1`` forces the pure fallback.
"""

from ._backend import BACKEND
from .coloring import (
    ColoringResult,
    ColorState,
    color_class,
    color_greedy,
    compute_small,
    orient_color_greedy,
    rainbow_relabel,
    run_col,
    run_col_orient,
)
from .cycle_merger import (
    ArcPool,
    PatchworkInput,
    PathFrontier,
    default_rounds,
    double_rotation,
    find_cycle,
    merge_cycles,
    merge_step,
    patchwork_hamilton,
    split_pools,
)
from .errors import InvalidInput, InvalidMerge, InvalidParameter, InvalidRotation
from .harness import ExperimentConfig, TrialRecord, run_experiment, run_pipeline, trial_seed
from .minor import ContractionMap, HideBadFailure, hide_bad, lift_hamilton_cycle
from .one_factor import CandidateArcs, OneFactor, cycle_count, find_one_factor, select_candidates
from .process import (
    ArcSchedule,
    ProcessParams,
    generate_schedule,
    hitting_time,
    prefix_degrees,
)
from .rng import SplitMix64, stable_seed
from .verify import (
    Verdict,
    is_hamilton_cycle,
    verify_color_degree,
    verify_factor,
    verify_monochromatic,
    verify_rainbow,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ArcPool",
    "ArcSchedule",
    "CandidateArcs",
    "ColorState",
    "ColoringResult",
    "ContractionMap",
    "ExperimentConfig",
    "HideBadFailure",
    "InvalidInput",
    "InvalidMerge",
    "InvalidParameter",
    "InvalidRotation",
    "OneFactor",
    "PatchworkInput",
    "PathFrontier",
    "ProcessParams",
    "SplitMix64",
    "TrialRecord",
    "Verdict",
    "color_class",
    "color_greedy",
    "compute_small",
    "cycle_count",
    "default_rounds",
    "double_rotation",
    "find_cycle",
    "find_one_factor",
    "generate_schedule",
    "hide_bad",
    "hitting_time",
    "is_hamilton_cycle",
    "lift_hamilton_cycle",
    "merge_cycles",
    "merge_step",
    "orient_color_greedy",
    "patchwork_hamilton",
    "prefix_degrees",
    "rainbow_relabel",
    "run_col",
    "run_col_orient",
    "run_experiment",
    "run_pipeline",
    "select_candidates",
    "split_pools",
    "stable_seed",
    "trial_seed",
    "verify_color_degree",
    "verify_factor",
    "verify_monochromatic",
    "verify_rainbow",
]
