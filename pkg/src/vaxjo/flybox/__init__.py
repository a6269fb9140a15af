"""Monte Carlo fly-box experiments."""

from .config import SCENARIO_SCHEMA, scenario_from_dict
from .experiments import (
    EXPERIMENTS,
    ConstantSurvival,
    FlyBoxScenario,
    MeasurementRecord,
    RegionSurvival,
    ScenarioResult,
    analytic_transition,
    classify,
    disturbing_sequential,
    measure_split,
    nondisturbing_sequential,
    run_scenario,
)
from .geometry import FlyPositions, FoodField, GeometricContext, Rect, Sector, Splitter
from .sampling import context_measure, sample_flies, sample_sector_sine, sector_sine_angles

__all__ = [
    "EXPERIMENTS",
    "SCENARIO_SCHEMA",
    "ConstantSurvival",
    "FlyBoxScenario",
    "FlyPositions",
    "FoodField",
    "GeometricContext",
    "MeasurementRecord",
    "Rect",
    "RegionSurvival",
    "ScenarioResult",
    "Sector",
    "Splitter",
    "analytic_transition",
    "classify",
    "context_measure",
    "disturbing_sequential",
    "measure_split",
    "nondisturbing_sequential",
    "run_scenario",
    "sample_flies",
    "sample_sector_sine",
    "scenario_from_dict",
    "sector_sine_angles",
]
