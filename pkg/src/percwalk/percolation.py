"""Edge configurations of a dynamically percolated graph.

Each edge is independently broken with probability ``p_e`` in every step.
Random draws are counter based: the uniform number deciding edge ``e`` in
step ``t`` of trajectory ``j`` is a pure function of
``(master_seed, j, t, e)``, built from the splitmix64 finalizer

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

applied as ``mix(mix(mix(mix(seed) ^ j) ^ t) ^ e)`` (all arithmetic mod
2**64).  The top 53 bits give a double in [0, 1).  Trajectories can be
replayed or split across workers without sharing generator state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .hilbert import EdgeConfig, Topology

MAX_ENUMERATED_EDGES = 24

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


class EnumerationTooLarge(ValueError):
    """Raised when a requested enumeration or dense object exceeds its guard."""


def _mix64(z):
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = z + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def uniforms(master_seed: int, trajectory_ids, step_index: int, n_edges: int) -> np.ndarray:
    """Uniform [0, 1) draws of shape ``(len(trajectory_ids), n_edges)``."""
    seed = np.uint64(int(master_seed) & 0xFFFFFFFFFFFFFFFF)
    traj = np.atleast_1d(np.asarray(trajectory_ids, dtype=np.uint64))
    h = _mix64(_mix64(seed) ^ traj)
    h = _mix64(h ^ np.uint64(step_index))
    h = _mix64(h[:, None] ^ np.arange(n_edges, dtype=np.uint64)[None, :])
    return (h >> np.uint64(11)).astype(np.float64) * 2.0**-53


@dataclass(frozen=True)
class PercolationModel:
    """Per-edge break probabilities, each strictly inside (0, 1)."""

    break_probabilities: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.break_probabilities)
        for p in probs:
            if not 0.0 < p < 1.0:
                raise ValueError(f"break probabilities must lie in (0, 1), got {p}")
        object.__setattr__(self, "break_probabilities", probs)

    @classmethod
    def uniform(cls, topology: Topology, p: float) -> "PercolationModel":
        return cls((p,) * topology.n_edges)

    @classmethod
    def from_list(cls, topology: Topology, probs: Sequence[float]) -> "PercolationModel":
        if len(probs) != topology.n_edges:
            raise ValueError(f"{topology} has {topology.n_edges} edges, got {len(probs)} probabilities")
        return cls(tuple(probs))

    @property
    def n_edges(self) -> int:
        return len(self.break_probabilities)


def enumerate_configs(topology: Topology) -> list[EdgeConfig]:
    """All ``2**|E|`` configurations in ascending bitmask order."""
    n = topology.n_edges
    if n > MAX_ENUMERATED_EDGES:
        raise EnumerationTooLarge(f"{topology} has {n} edges; enumeration limited to {MAX_ENUMERATED_EDGES}")
    return [EdgeConfig(mask, n) for mask in range(1 << n)]


def config_probability(model: PercolationModel, config: EdgeConfig) -> float:
    if config.n_edges != model.n_edges:
        raise ValueError(f"model has {model.n_edges} edges, config has {config.n_edges}")
    prob = 1.0
    for e, p in enumerate(model.break_probabilities):
        prob *= (1.0 - p) if e in config else p
    return prob


def config_probabilities(model: PercolationModel, topology: Topology) -> np.ndarray:
    """Probabilities of ``enumerate_configs(topology)``, in the same order."""
    if model.n_edges != topology.n_edges:
        raise ValueError(f"model has {model.n_edges} edges, {topology} has {topology.n_edges}")
    return np.array([config_probability(model, c) for c in enumerate_configs(topology)])


def sample_masks(model: PercolationModel, master_seed: int, step_index: int, trajectory_ids) -> np.ndarray:
    """Configuration bitmasks for a batch of trajectories at one step."""
    u = uniforms(master_seed, trajectory_ids, step_index, model.n_edges)
    present = u >= np.asarray(model.break_probabilities)[None, :]
    weights = 1 << np.arange(model.n_edges, dtype=np.int64)
    return present.astype(np.int64) @ weights


def sample_config(model: PercolationModel, rng_seed: int, step_index: int, trajectory_id: int = 0) -> EdgeConfig:
    mask = int(sample_masks(model, rng_seed, step_index, [trajectory_id])[0])
    return EdgeConfig(mask, model.n_edges)
