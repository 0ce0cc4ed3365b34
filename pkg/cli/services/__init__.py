"""
Subcommand services
"""
from cli.services.base import ExperimentService, write_report
from cli.services.capacity import CapacityService
from cli.services.coding import DecodeService, EncodeService
from cli.services.overflow import OverflowService, VerifyBoundsService
from cli.services.spectrum import SpectrumService, ThresholdService

__all__ = [
    "CapacityService",
    "DecodeService",
    "EncodeService",
    "ExperimentService",
    "OverflowService",
    "SpectrumService",
    "ThresholdService",
    "VerifyBoundsService",
    "write_report",
]
