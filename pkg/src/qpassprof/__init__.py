"""Staged quantum-circuit transpiler with built-in per-pass profiling."""

from .circuit import Circuit, DagCircuit, Instruction, build_ghz, build_qft, from_dag, metrics, to_dag
from .framework import PassFailure, PassManager, PropertySet, fixed_point_controller, run_pipeline
from .passes import Layout
from .presets import PresetConfig, build_preset, compile_circuit
from .profiler import Recorder, aggregate, categorize, share_of_total, summarize, top_n
from .registry import Stage
from .sim import equivalent, simulate, unitary
from .target import Target, grid_target, line_target, load_target, resolve_target

__version__ = "0.1.0"
