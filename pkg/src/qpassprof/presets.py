"""Preset pipelines for optimization levels 0-3."""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit
from .framework import PassManager, PipelineResult, fixed_point_controller
from .passes import (
    ASAPSchedule,
    BasisTranslate,
    HighLevelSynthesis,
    InverseCancellation,
    MinimumPointController,
    Optimize1QGates,
    PreExpandBoxes,
    SwapRoute,
    TrivialLayout,
    VF2Layout,
)
from .profiler import Recorder
from .registry import Stage
from .target import Target

LEVELS = (0, 1, 2, 3)


@dataclass(frozen=True)
class PresetConfig:
    """Search budgets and loop limits; VF2 budgets count visited search states."""

    vf2_states_l1: int = 20_000
    vf2_states_l2: int = 100_000
    vf2_states_l3: int = 300_000
    fixed_point_max_iterations: int = 100
    backtrack_window: int = 5
    minimum_point_max_iterations: int = 1000


DEFAULT_CONFIG = PresetConfig()


def build_preset(level: int, target: Target, config: PresetConfig = DEFAULT_CONFIG) -> PassManager:
    if level not in LEVELS:
        raise ValueError(f"invalid optimization level {level!r}; valid levels are 0, 1, 2, 3")
    pm = PassManager(target, level)
    if level == 0:
        # the routing stage cannot legalize unexpanded boxes, so level 0
        # synthesizes them up front; it has no separate high-level pre-expansion
        pm.append(Stage.INITIALIZATION, HighLevelSynthesis(target))
        pm.append(Stage.LAYOUT, TrivialLayout(target))
    else:
        pm.append(Stage.INITIALIZATION, PreExpandBoxes())
        budget, scoring = {
            1: (config.vf2_states_l1, "first"),
            2: (config.vf2_states_l2, "exhaustive"),
            3: (config.vf2_states_l3, "exhaustive"),
        }[level]
        pm.append(Stage.LAYOUT, VF2Layout(target, budget, scoring))
        pm.append(Stage.LAYOUT, TrivialLayout(target))
    pm.append(Stage.ROUTING, SwapRoute(target))
    pm.append(Stage.TRANSLATION, HighLevelSynthesis(target))
    pm.append(Stage.TRANSLATION, BasisTranslate(target))
    if level == 1:
        pm.append(Stage.OPTIMIZATION, InverseCancellation())
    elif level == 2:
        pm.append(Stage.OPTIMIZATION, fixed_point_controller(
            [InverseCancellation(), Optimize1QGates()], ("size", "depth"), config.fixed_point_max_iterations))
    elif level == 3:
        pm.append(Stage.OPTIMIZATION, MinimumPointController(
            [InverseCancellation(), Optimize1QGates()], config.backtrack_window, config.minimum_point_max_iterations))
    pm.append(Stage.SCHEDULING, ASAPSchedule(target))
    return pm


def compile_circuit(circuit: Circuit, target: Target, level: int, recorder: Recorder | None = None,
                    config: PresetConfig = DEFAULT_CONFIG) -> PipelineResult:
    return build_preset(level, target, config).run(circuit, recorder)
