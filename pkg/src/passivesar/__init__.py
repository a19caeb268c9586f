"""Mission evaluation for a passive bistatic-SAR UAV using illuminators of opportunity."""
from .comms import CommParams, check_los_assumption, path_capacity, segment_capacity
from .energy import EnergyBreakdown, PlatformParams, drag_power, path_energy
from .flightpath import (FlightPath, make_arc_path, make_line_path, path_length,
                         segment_kinematics)
from .geom import HillSpec, TerrainModel, clearance, height_at, line_of_sight, synth_terrain
from .mission import ScenarioError, evaluate_mission, load_scenario
from .sargeom import (ApertureWindow, IlluminatorTrajectory, RadarParams, SceneSpec,
                      echo_data_size, resolution_cell, scene_resolution_evaluator)
from .threat import ThreatParams, path_threat

__version__ = "0.1.0"

__all__ = [
    "ApertureWindow", "CommParams", "EnergyBreakdown", "FlightPath", "HillSpec",
    "IlluminatorTrajectory", "PlatformParams", "RadarParams", "ScenarioError", "SceneSpec",
    "TerrainModel", "ThreatParams", "check_los_assumption", "clearance", "drag_power",
    "echo_data_size", "evaluate_mission", "height_at", "line_of_sight", "load_scenario",
    "make_arc_path", "make_line_path", "path_capacity", "path_energy", "path_length",
    "path_threat", "resolution_cell", "scene_resolution_evaluator", "segment_capacity",
    "segment_kinematics", "synth_terrain",
]
