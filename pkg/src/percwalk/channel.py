"""The percolated random-unitary channel.

``Phi(rho) = sum_K p_K U_K rho U_K^dag`` with ``U_K = S_K C`` (one
particle) or ``U_K (x) U_K`` (two particles).  Because every ``S_K`` is a
permutation the Kraus sum is evaluated as one coin conjugation followed
by ``|configs|`` index shuffles.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from . import hilbert
from .hilbert import Topology
from .percolation import (
    EnumerationTooLarge,
    PercolationModel,
    config_probabilities,
    enumerate_configs,
    sample_masks,
)

# Dense superoperators are limited to d <= 64 (matrix side d**2 <= 4096).
MAX_SUPEROPERATOR_DIM = 64
MC_CHUNK = 2048


class PercolatedWalk:
    """Cached operators for one (topology, model, particle count) triple."""

    def __init__(self, topology: Topology, model: PercolationModel | None = None, particles: int = 1):
        if particles not in (1, 2):
            raise ValueError(f"particles must be 1 or 2, got {particles}")
        if model is not None and model.n_edges != topology.n_edges:
            raise ValueError(f"model has {model.n_edges} edges, {topology} has {topology.n_edges}")
        self.topology = topology
        self.model = model
        self.particles = particles
        self.dim = topology.dim**particles

    @cached_property
    def configs(self):
        return enumerate_configs(self.topology)

    @cached_property
    def probabilities(self) -> np.ndarray:
        if self.model is None:
            raise ValueError("no percolation model attached")
        return config_probabilities(self.model, self.topology)

    @cached_property
    def coin(self) -> np.ndarray:
        return hilbert.lift(hilbert.build_coin(self.topology), self.particles)

    @cached_property
    def permutations(self) -> np.ndarray:
        """Row ``k`` is the permutation of ``S_K`` (lifted) for config mask ``k``."""
        return np.array(
            [
                hilbert.lift_permutation(hilbert.shift_permutation(self.topology, c), self.particles)
                for c in self.configs
            ]
        )

    @cached_property
    def inverse_permutations(self) -> np.ndarray:
        return np.argsort(self.permutations, axis=1)

    def unitary(self, mask: int) -> np.ndarray:
        u = np.empty_like(self.coin)
        u[self.permutations[mask]] = self.coin
        return u

    def conjugate_coin(self, x: np.ndarray) -> np.ndarray:
        return hilbert.conjugate_by_coin(x, self.topology, self.particles)

    def conjugate_all(self, x: np.ndarray) -> np.ndarray:
        """Stack of ``U_K x U_K^dag`` over all configurations, shape ``(n_configs, d, d)``."""
        y = self.conjugate_coin(x)
        inv = self.inverse_permutations
        return y[inv[:, :, None], inv[:, None, :]]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = _check_dim(rho, self.dim)
        y = self.conjugate_coin(rho)
        out = np.zeros_like(y)
        for p, inv in zip(self.probabilities, self.inverse_permutations):
            out += p * y[np.ix_(inv, inv)]
        return out

    def evolve(self, rho: np.ndarray, steps: int) -> np.ndarray:
        if steps < 0:
            raise ValueError("steps must be non-negative")
        rho = _check_dim(rho, self.dim)
        for _ in range(steps):
            rho = self.apply(rho)
        return rho

    def superoperator(self) -> np.ndarray:
        """Column-stacking matrix ``M`` with ``M vec(X) = vec(Phi(X))``."""
        if self.dim > MAX_SUPEROPERATOR_DIM:
            raise EnumerationTooLarge(
                f"superoperator for d={self.dim} exceeds the d <= {MAX_SUPEROPERATOR_DIM} guard"
            )
        d2 = self.dim**2
        m = np.zeros((d2, d2), dtype=complex)
        for k, p in enumerate(self.probabilities):
            u = self.unitary(k)
            m += p * np.kron(u.conj(), u)
        return m

    # Monte-Carlo unravelling

    def _step_batch(self, psi: np.ndarray, masks: np.ndarray) -> np.ndarray:
        psi = psi @ self.coin.T
        return np.take_along_axis(psi, self.inverse_permutations[masks], axis=1)

    def run_trajectories(self, psi0: np.ndarray, steps: int, master_seed: int, trajectory_ids) -> np.ndarray:
        """Final states (one row per trajectory id) after ``steps`` sampled steps."""
        if self.model is None:
            raise ValueError("no percolation model attached")
        psi0 = np.asarray(psi0, dtype=complex).ravel()
        if psi0.shape != (self.dim,):
            raise ValueError(f"state has dimension {psi0.size}, expected {self.dim}")
        norm = np.linalg.norm(psi0)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"initial state is not normalized (norm {norm})")
        ids = np.asarray(trajectory_ids, dtype=np.uint64)
        psi = np.tile(psi0, (len(ids), 1))
        for t in range(steps):
            psi = self._step_batch(psi, sample_masks(self.model, master_seed, t, ids))
        return psi

    def trajectory_average(self, psi0: np.ndarray, steps: int, n_trajectories: int, master_seed: int) -> np.ndarray:
        """Mean of ``|psi_j><psi_j|`` over trajectory ids ``0 .. n-1``.

        Chunk sums are combined by pairwise reduction in trajectory-id
        order, so the result does not depend on how chunks are scheduled.
        """
        partial = []
        for start in range(0, n_trajectories, MC_CHUNK):
            ids = np.arange(start, min(start + MC_CHUNK, n_trajectories))
            psi = self.run_trajectories(psi0, steps, master_seed, ids)
            partial.append(psi.T @ psi.conj())
        return pairwise_sum(partial) / n_trajectories


def pairwise_sum(items: list[np.ndarray]) -> np.ndarray:
    items = list(items)
    if not items:
        raise ValueError("nothing to sum")
    while len(items) > 1:
        paired = [items[i] + items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            paired.append(items[-1])
        items = paired
    return items[0]


def _check_dim(rho, dim):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim, dim):
        raise ValueError(f"state has shape {rho.shape}, expected {(dim, dim)}")
    return rho


def apply_channel(state, topology: Topology, model: PercolationModel, particles: int = 2) -> np.ndarray:
    return PercolatedWalk(topology, model, particles).apply(state)


def evolve(state, topology: Topology, model: PercolationModel, particles: int, t: int) -> np.ndarray:
    return PercolatedWalk(topology, model, particles).evolve(state, t)


def sample_trajectory(
    pure_state,
    topology: Topology,
    model: PercolationModel,
    particles: int,
    t: int,
    master_seed: int,
    trajectory_id: int = 0,
) -> np.ndarray:
    walk = PercolatedWalk(topology, model, particles)
    return walk.run_trajectories(pure_state, t, master_seed, [trajectory_id])[0]


def build_superoperator(topology: Topology, model: PercolationModel, particles: int) -> np.ndarray:
    return PercolatedWalk(topology, model, particles).superoperator()


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape((dim, dim), order="F")


def density_violations(rho: np.ndarray) -> dict[str, float]:
    """Hermiticity, trace and positivity defects of ``rho``."""
    rho = np.asarray(rho)
    herm = float(np.abs(rho - rho.conj().T).max())
    trace = float(abs(np.trace(rho) - 1.0))
    min_eig = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2).min())
    return {"hermiticity": herm, "trace": trace, "min_eigenvalue": min_eig}


def is_density_matrix(rho: np.ndarray, tol: float = 1e-12, psd_tol: float = 1e-10) -> bool:
    v = density_violations(rho)
    return v["hermiticity"] < tol and v["trace"] < tol and v["min_eigenvalue"] >= -psd_tol


def hs_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))
