"""Basis indexing, lattice topologies and the walk operators.

Single-particle basis states ``|s, c>`` are stored at flat index ``2*s + c``
with ``c = 0`` for L and ``c = 1`` for R.  Two-particle states use the
particle-1-major index ``(2N)*i1 + i2``.

Shift operators are permutations, so the module exposes them both as
dense matrices and as index arrays (``shift_permutation``).  The channel
and attractor code work with the index form to avoid d^3 products.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

L, R = 0, 1

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


@dataclass(frozen=True)
class Topology:
    """Finite line or circle with ``n_sites`` vertices.

    Edge ``e_i`` joins sites ``i`` and ``i + 1``.  The circle has the extra
    wrap edge ``e_{N-1} = (N-1, 0)``.
    """

    kind: str
    n_sites: int

    def __post_init__(self):
        if self.kind not in ("line", "circle"):
            raise ValueError(f"unknown topology kind {self.kind!r}")
        if int(self.n_sites) != self.n_sites or self.n_sites < 2:
            raise ValueError(f"n_sites must be an integer >= 2, got {self.n_sites}")

    @classmethod
    def line(cls, n: int) -> "Topology":
        return cls("line", n)

    @classmethod
    def circle(cls, n: int) -> "Topology":
        return cls("circle", n)

    @property
    def is_circle(self) -> bool:
        return self.kind == "circle"

    @property
    def n_edges(self) -> int:
        return self.n_sites if self.is_circle else self.n_sites - 1

    @property
    def dim(self) -> int:
        """Single-particle Hilbert space dimension 2N."""
        return 2 * self.n_sites

    def edges(self) -> list[tuple[int, int]]:
        n = self.n_sites
        return [(i, (i + 1) % n) for i in range(self.n_edges)]

    def right_edge(self, site: int) -> int | None:
        """Index of the edge a right-mover at ``site`` would use."""
        if site < self.n_sites - 1 or self.is_circle:
            return site
        return None

    def left_edge(self, site: int) -> int | None:
        """Index of the edge a left-mover at ``site`` would use."""
        if site > 0:
            return site - 1
        return self.n_sites - 1 if self.is_circle else None

    def __str__(self):
        return f"{self.kind}(N={self.n_sites})"


@dataclass(frozen=True)
class EdgeConfig:
    """Set of edges present during one step, stored as a bitmask."""

    mask: int
    n_edges: int

    def __post_init__(self):
        if self.mask < 0 or self.mask >> self.n_edges:
            raise ValueError(f"mask {self.mask:#x} has bits outside {self.n_edges} edges")

    @classmethod
    def from_edges(cls, edges: Iterable[int], n_edges: int) -> "EdgeConfig":
        mask = 0
        for e in edges:
            if not 0 <= e < n_edges:
                raise ValueError(f"edge index {e} out of range [0, {n_edges})")
            mask |= 1 << e
        return cls(mask, n_edges)

    @classmethod
    def full(cls, topology: Topology) -> "EdgeConfig":
        return cls((1 << topology.n_edges) - 1, topology.n_edges)

    @classmethod
    def empty(cls, topology: Topology) -> "EdgeConfig":
        return cls(0, topology.n_edges)

    def __contains__(self, edge) -> bool:
        return edge is not None and bool((self.mask >> edge) & 1)

    @property
    def edges(self) -> tuple[int, ...]:
        return tuple(e for e in range(self.n_edges) if (self.mask >> e) & 1)

    def __len__(self):
        return bin(self.mask).count("1")


def basis_index(site: int, coin: int) -> int:
    return 2 * site + coin


def two_particle_index(topology: Topology, i1: int, i2: int) -> int:
    return topology.dim * i1 + i2


def _as_config(topology: Topology, config) -> EdgeConfig:
    if isinstance(config, EdgeConfig):
        if config.n_edges != topology.n_edges:
            raise ValueError(
                f"config has {config.n_edges} edges, {topology} has {topology.n_edges}"
            )
        return config
    return EdgeConfig.from_edges(config, topology.n_edges)


def build_coin(topology: Topology) -> np.ndarray:
    """Global Hadamard coin ``I_N (x) H``."""
    return np.kron(np.eye(topology.n_sites), HADAMARD)


def build_reflection(topology: Topology) -> np.ndarray:
    """Global reflection ``I_N (x) sigma_x``; equals the shift of the empty configuration."""
    return np.kron(np.eye(topology.n_sites), SIGMA_X)


def shift_permutation(topology: Topology, config) -> np.ndarray:
    """Index form of ``S_K``: ``S_K |j> = |perm[j]>``.

    Right-movers cross ``(s, s+1)`` if present, left-movers cross
    ``(s-1, s)``; a missing edge (including the line ends) flips the coin
    in place.
    """
    config = _as_config(topology, config)
    n = topology.n_sites
    perm = np.empty(topology.dim, dtype=np.intp)
    for s in range(n):
        if topology.right_edge(s) in config:
            perm[basis_index(s, R)] = basis_index((s + 1) % n, R)
        else:
            perm[basis_index(s, R)] = basis_index(s, L)
        if topology.left_edge(s) in config:
            perm[basis_index(s, L)] = basis_index((s - 1) % n, L)
        else:
            perm[basis_index(s, L)] = basis_index(s, R)
    return perm


def permutation_matrix(perm: np.ndarray) -> np.ndarray:
    d = len(perm)
    m = np.zeros((d, d), dtype=complex)
    m[perm, np.arange(d)] = 1.0
    return m


def build_shift(topology: Topology, config) -> np.ndarray:
    return permutation_matrix(shift_permutation(topology, config))


def step_unitary(topology: Topology, config) -> np.ndarray:
    """``U_K = S_K C``."""
    perm = shift_permutation(topology, config)
    coin = build_coin(topology)
    u = np.empty_like(coin)
    u[perm] = coin
    return u


def two_particle_unitary(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    return np.kron(u, u)


def two_particle_permutation(perm: np.ndarray) -> np.ndarray:
    """Permutation of ``S (x) S`` on the particle-1-major two-particle basis."""
    d = len(perm)
    return (perm[:, None] * d + perm[None, :]).ravel()


def lift(op: np.ndarray, particles: int) -> np.ndarray:
    """``op`` for one particle, ``op (x) op`` for two."""
    if particles == 1:
        return op
    if particles == 2:
        return np.kron(op, op)
    raise ValueError(f"particles must be 1 or 2, got {particles}")


def lift_permutation(perm: np.ndarray, particles: int) -> np.ndarray:
    if particles == 1:
        return perm
    if particles == 2:
        return two_particle_permutation(perm)
    raise ValueError(f"particles must be 1 or 2, got {particles}")


def unitarity_residual(u: np.ndarray) -> float:
    return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())


def conjugate_by_coin(x: np.ndarray, topology: Topology, particles: int) -> np.ndarray:
    """``C x C^dag`` for the lifted coin, applied per coin register.

    ``x`` may carry leading batch axes; the trailing two must be ``(d, d)``.
    """
    x = np.asarray(x, dtype=complex)
    n = topology.n_sites
    d = topology.dim**particles
    if x.shape[-2:] != (d, d):
        raise ValueError(f"expected trailing shape {(d, d)}, got {x.shape[-2:]}")
    batch = x.shape[:-2]
    t = x.reshape(batch + (n, 2) * (2 * particles))
    h = HADAMARD
    nb = len(batch)
    for k in range(2 * particles):
        axis = nb + 2 * k + 1
        op = h if k < particles else h.conj()
        t = np.moveaxis(np.tensordot(op, t, axes=([1], [axis])), 0, axis)
    return t.reshape(x.shape)
