"""Discrete-time plants with injectable disturbances, behind a common environment interface."""

from kdpc.plants._plant import Plant
from kdpc.plants.disturbances import Channel, DisturbancePulse, DisturbanceSchedule
from kdpc.plants.vdp import PlantState, VanDerPolPlant, VdpParams, measure, simulate, vdp_step

__all__ = [
    "Plant",
    "Channel", "DisturbancePulse", "DisturbanceSchedule",
    "PlantState", "VanDerPolPlant", "VdpParams", "measure", "simulate", "vdp_step",
]
