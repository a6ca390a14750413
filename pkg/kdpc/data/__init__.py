"""Offline data collection: excitation, window assembly and persistence of the resulting dataset."""

from kdpc.data.excitation import DEFAULT_LEVELS, ExcitationConfig, collect_trajectories, generate_excitation
from kdpc.data.storage import load_dataset, save_dataset
from kdpc.data.windows import assemble_dataset, check_pe

__all__ = [
    "DEFAULT_LEVELS", "ExcitationConfig", "collect_trajectories", "generate_excitation",
    "load_dataset", "save_dataset",
    "assemble_dataset", "check_pe",
]
