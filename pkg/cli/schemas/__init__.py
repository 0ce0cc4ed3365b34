"""
Config and report schemas
"""
from cli.schemas.experiment import ExperimentConfig, GridSpec, ScheduleSpec, ZRuleSpec, load_experiment
from cli.schemas.reports import CapacityReport, CodingSummary, StreamHeader

__all__ = [
    "CapacityReport",
    "CodingSummary",
    "ExperimentConfig",
    "GridSpec",
    "ScheduleSpec",
    "StreamHeader",
    "ZRuleSpec",
    "load_experiment",
]
