"""Hadamard quantum walks on dynamically percolated lines and circles."""

from .asymptotics import BellCoinState, project_asymptotic
from .attractors import brute_force_attractor_space, orthonormal_basis
from .channel import PercolatedWalk, apply_channel, evolve
from .hilbert import EdgeConfig, Topology
from .percolation import EnumerationTooLarge, PercolationModel

__all__ = [
    "BellCoinState",
    "EdgeConfig",
    "EnumerationTooLarge",
    "PercolatedWalk",
    "PercolationModel",
    "Topology",
    "apply_channel",
    "brute_force_attractor_space",
    "evolve",
    "orthonormal_basis",
    "project_asymptotic",
]
