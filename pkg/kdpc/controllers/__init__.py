"""Receding-horizon controllers: the kernelized data-driven controller and the model-based baseline."""

from kdpc.controllers._controller import Controller, ControllerConfig, StepRecord, weight_matrix
from kdpc.controllers.kdpc import ControllerState, KdpcController, build_kdpc_qp, build_z_ini, kdpc_step
from kdpc.controllers.nmpc import NmpcController, build_nmpc_qp, nmpc_step

__all__ = [
    "Controller", "ControllerConfig", "StepRecord", "weight_matrix",
    "ControllerState", "KdpcController", "build_kdpc_qp", "build_z_ini", "kdpc_step",
    "NmpcController", "build_nmpc_qp", "nmpc_step",
]
