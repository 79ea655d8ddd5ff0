"""Attractor space of the percolated Hadamard walk.

An attractor for eigenvalue ``lam`` is an operator ``X`` with
``U_K X U_K^dag = lam X`` for every edge configuration ``K``.  This
module builds the analytic basis (p-attractors from common eigenstates,
non-p attractors from one-particle attractors and the particle SWAP),
orthonormalizes it sector by sector, and provides an independent
brute-force null-space computation of the same space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import hilbert
from .channel import PercolatedWalk, unvec
from .hilbert import Topology
from .percolation import EnumerationTooLarge, enumerate_configs

EIGENVALUES = (1 + 0j, 1j, -1j, -1 + 0j)
EIGENVALUE_NAMES = {1 + 0j: "1", 1j: "i", -1j: "-i", -1 + 0j: "-1"}

LAMBDA_PLUS = (1 + 1j) / np.sqrt(2.0)
LAMBDA_MINUS = (1 - 1j) / np.sqrt(2.0)
# eigenvectors of sigma_x H in the (L, R) coin basis
COIN_PLUS = np.array([1j, 1.0]) / np.sqrt(2.0)
COIN_MINUS = np.array([-1j, 1.0]) / np.sqrt(2.0)

ORACLE_MAX_SITES = {1: 8, 2: 4}
RANK_CUTOFF = 1e-9
GS_DROP_TOL = 1e-10
# dense analytic basis: operator side (2N)**particles limited to this
MAX_BASIS_DIM = 256


def eigenvalue_key(lam: complex, tol: float = 1e-8) -> complex:
    """Snap ``lam`` onto one of 1, i, -i, -1."""
    for ref in EIGENVALUES:
        if abs(lam - ref) < tol:
            return ref
    raise ValueError(f"{lam} is not one of the attractor eigenvalues 1, i, -i, -1")


@dataclass
class CommonEigenstate:
    label: str
    eigenvalue: complex
    vector: np.ndarray


@dataclass
class Attractor:
    operator: np.ndarray
    eigenvalue: complex
    provenance: str

    def normalized(self) -> "Attractor":
        return Attractor(self.operator / np.linalg.norm(self.operator), self.eigenvalue, self.provenance)


@dataclass
class AttractorBasis:
    """Orthonormal attractors grouped by eigenvalue."""

    sectors: dict[complex, list[Attractor]]
    dropped: list[str] = field(default_factory=list)

    def sizes(self) -> dict[complex, int]:
        return {lam: len(self.sectors.get(lam, [])) for lam in EIGENVALUES}

    @property
    def attractors(self) -> list[Attractor]:
        return [x for lam in EIGENVALUES for x in self.sectors.get(lam, [])]

    def __len__(self):
        return len(self.attractors)

    def operators(self) -> np.ndarray:
        return np.array([x.operator for x in self.attractors])

    def eigenvalues(self) -> np.ndarray:
        return np.array([x.eigenvalue for x in self.attractors])

    def gram(self) -> np.ndarray:
        return gram_matrix(self.operators())

    def gram_defect(self) -> float:
        g = self.gram()
        return float(np.abs(g - np.eye(len(g))).max()) if len(g) else 0.0


def gram_matrix(ops) -> np.ndarray:
    """Hilbert-Schmidt Gram matrix ``G[i, j] = Tr(A_i^dag A_j)``."""
    flat = np.asarray(ops).reshape(len(ops), -1)
    return flat.conj() @ flat.T


def _dim(topology: Topology, particles: int) -> int:
    return topology.dim**particles


def _infer_particles(x: np.ndarray, topology: Topology) -> int:
    d = x.shape[-1]
    if d == topology.dim:
        return 1
    if d == topology.dim**2:
        return 2
    raise ValueError(f"operator dimension {d} fits neither one nor two particles on {topology}")


def has_separable_eigenstates(topology: Topology) -> bool:
    """Line, or circle whose length is a multiple of 4."""
    return not topology.is_circle or topology.n_sites % 4 == 0


# common eigenstates


def common_eigenstates_1p(topology: Topology) -> list[CommonEigenstate]:
    """``phi_+`` and ``phi_-``; absent on circles with ``N`` not divisible by 4."""
    if not has_separable_eigenstates(topology):
        return []
    n = topology.n_sites
    sites = np.arange(n)
    norm = 1.0 / np.sqrt(n)
    phi_plus = np.kron((1j) ** sites * norm, COIN_PLUS)
    phi_minus = np.kron((-1j) ** sites * norm, COIN_MINUS)
    return [
        CommonEigenstate("phi+", LAMBDA_PLUS, phi_plus),
        CommonEigenstate("phi-", LAMBDA_MINUS, phi_minus),
    ]


def phi_w(topology: Topology) -> np.ndarray:
    """Equal weight on every ``|s,L,s,L>`` and ``|s,R,s,R>``."""
    d = topology.dim
    v = np.zeros(d * d, dtype=complex)
    for i in range(d):
        v[d * i + i] = 1.0
    return v / np.sqrt(d)


def common_eigenstates_2p(topology: Topology) -> list[CommonEigenstate]:
    """Orthonormal two-particle common eigenstates.

    Products of the one-particle states plus the non-separable state
    ``Phi_w`` orthogonalized against ``Phi_+-`` and ``Phi_-+`` (``Phi_w'``).
    Circles with ``N`` not divisible by 4 only carry ``Phi_w`` itself.
    """
    n = topology.n_sites
    if not has_separable_eigenstates(topology):
        return [CommonEigenstate("Phiw", 1 + 0j, phi_w(topology))]
    plus, minus = common_eigenstates_1p(topology)
    pp = np.kron(plus.vector, plus.vector)
    mm = np.kron(minus.vector, minus.vector)
    pm = np.kron(plus.vector, minus.vector)
    mp = np.kron(minus.vector, plus.vector)
    w_prime = np.sqrt(n / (n - 1)) * (phi_w(topology) - (pm + mp) / np.sqrt(2 * n))
    return [
        CommonEigenstate("Phi++", 1j, pp),
        CommonEigenstate("Phi--", -1j, mm),
        CommonEigenstate("Phi+-", 1 + 0j, pm),
        CommonEigenstate("Phi-+", 1 + 0j, mp),
        CommonEigenstate("Phiw'", 1 + 0j, w_prime),
    ]


def eigenstate_residual(state: CommonEigenstate, topology: Topology) -> float:
    """``max_K |U_K v - alpha v|`` over all configurations."""
    particles = _infer_particles(np.empty((1, len(state.vector))), topology)
    walk = PercolatedWalk(topology, None, particles)
    return max(
        float(np.abs(walk.unitary(k) @ state.vector - state.eigenvalue * state.vector).max())
        for k in range(len(walk.configs))
    )


def eigenstate_conditions(state: CommonEigenstate, topology: Topology) -> tuple[float, float]:
    """Coin residual ``|R C v - alpha v|`` and shift residual ``max_K |S_K^dag v - S_0^dag v|``."""
    particles = _infer_particles(np.empty((1, len(state.vector))), topology)
    walk = PercolatedWalk(topology, None, particles)
    v = state.vector
    coin = float(np.abs(walk.unitary(0) @ v - state.eigenvalue * v).max())
    # S^dag v = v[perm] for a permutation S
    base = v[walk.permutations[0]]
    shift = max(float(np.abs(v[perm] - base).max()) for perm in walk.permutations)
    return coin, shift


# analytic attractors


def swap_operator(topology: Topology) -> np.ndarray:
    """``W |s,c,t,d> = |t,d,s,c>``."""
    d = topology.dim
    idx = np.arange(d * d)
    i1, i2 = divmod(idx, d)
    w = np.zeros((d * d, d * d), dtype=complex)
    w[i2 * d + i1, idx] = 1.0
    return w


def _outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.outer(a, b.conj())


def build_p_attractors(topology: Topology, particles: int = 2) -> list[Attractor]:
    """All ``|Phi_a><Phi_b|`` over the orthonormal common eigenstates."""
    states = common_eigenstates_2p(topology) if particles == 2 else common_eigenstates_1p(topology)
    return [
        Attractor(
            _outer(a.vector, b.vector),
            eigenvalue_key(a.eigenvalue * np.conj(b.eigenvalue)),
            f"p:|{a.label}><{b.label}|",
        )
        for a in states
        for b in states
    ]


def build_non_p_attractors(topology: Topology, particles: int = 2) -> list[Attractor]:
    """Identity-based attractors and, for two particles, their SWAP multiples.

    Listing order: the lambda=1 group ``I(x)P+, I(x)P-, P+(x)I, P-(x)I, I``,
    then the two ``|phi-><phi+|`` products, then the two ``|phi+><phi-|``
    products, then ``W`` times each of these in the same order.
    """
    d = topology.dim
    eye1 = np.eye(d, dtype=complex)
    if particles == 1:
        return [Attractor(eye1, 1 + 0j, "np:I")]
    eye2 = np.eye(d * d, dtype=complex)
    w = swap_operator(topology)
    if not has_separable_eigenstates(topology):
        return [Attractor(eye2, 1 + 0j, "np:I"), Attractor(w, 1 + 0j, "np:W")]

    plus, minus = common_eigenstates_1p(topology)
    p_pp = _outer(plus.vector, plus.vector)
    p_mm = _outer(minus.vector, minus.vector)
    p_mp = _outer(minus.vector, plus.vector)
    p_pm = _outer(plus.vector, minus.vector)
    lam_mp = eigenvalue_key(minus.eigenvalue * np.conj(plus.eigenvalue))
    lam_pm = eigenvalue_key(plus.eigenvalue * np.conj(minus.eigenvalue))
    base = [
        ("I(x)|phi+><phi+|", np.kron(eye1, p_pp), 1 + 0j),
        ("I(x)|phi-><phi-|", np.kron(eye1, p_mm), 1 + 0j),
        ("|phi+><phi+|(x)I", np.kron(p_pp, eye1), 1 + 0j),
        ("|phi-><phi-|(x)I", np.kron(p_mm, eye1), 1 + 0j),
        ("I", eye2, 1 + 0j),
        ("I(x)|phi-><phi+|", np.kron(eye1, p_mp), lam_mp),
        ("|phi-><phi+|(x)I", np.kron(p_mp, eye1), lam_mp),
        ("I(x)|phi+><phi-|", np.kron(eye1, p_pm), lam_pm),
        ("|phi+><phi-|(x)I", np.kron(p_pm, eye1), lam_pm),
    ]
    out = [Attractor(op, lam, f"np:{name}") for name, op, lam in base]
    out += [Attractor(w @ op, lam, f"np:W.{name}") for name, op, lam in base]
    return out


def analytic_attractors(topology: Topology, particles: int = 2) -> list[Attractor]:
    """Non-p attractors followed by p-attractors (the Gram-Schmidt input order)."""
    return build_non_p_attractors(topology, particles) + build_p_attractors(topology, particles)


def attractor_residuals(ops, lams, topology: Topology) -> np.ndarray:
    """``max_K |U_K X U_K^dag - lam X|_max`` for each operator in a stack."""
    ops = np.asarray(ops, dtype=complex)
    if ops.ndim == 2:
        ops = ops[None]
    lams = np.broadcast_to(np.asarray(lams, dtype=complex), (len(ops),))
    particles = _infer_particles(ops, topology)
    walk = PercolatedWalk(topology, None, particles)
    y = walk.conjugate_coin(ops)
    target = lams[:, None, None] * ops
    worst = np.zeros(len(ops))
    for inv in walk.inverse_permutations:
        diff = np.abs(y[:, inv[:, None], inv[None, :]] - target)
        worst = np.maximum(worst, diff.reshape(len(ops), -1).max(axis=1))
    return worst


def attractor_residual(x: np.ndarray, lam: complex, topology: Topology) -> float:
    return float(attractor_residuals(x, lam, topology)[0])


# orthonormalization


def gram_schmidt(attractors: list[Attractor], drop_tol: float = GS_DROP_TOL) -> tuple[list[Attractor], list[str]]:
    """Modified Gram-Schmidt with one reorthogonalization pass.

    Inputs are normalized first, so ``drop_tol`` is relative.  Returns the
    orthonormal list and the provenance of any dropped (dependent) input.
    """
    basis: list[np.ndarray] = []
    kept: list[Attractor] = []
    dropped: list[str] = []
    for att in attractors:
        v = att.operator / np.linalg.norm(att.operator)
        for _ in range(2):
            for q in basis:
                v = v - np.vdot(q, v) * q
        norm = np.linalg.norm(v)
        if norm < drop_tol:
            dropped.append(att.provenance)
            continue
        v = v / norm
        basis.append(v)
        kept.append(Attractor(v, att.eigenvalue, att.provenance))
    return kept, dropped


def orthonormal_basis(topology: Topology, particles: int = 2) -> AttractorBasis:
    if topology.dim**particles > MAX_BASIS_DIM:
        raise EnumerationTooLarge(
            f"dense attractor basis for {topology} with {particles} particle(s) exceeds d <= {MAX_BASIS_DIM}"
        )
    sectors: dict[complex, list[Attractor]] = {}
    dropped: list[str] = []
    analytic = analytic_attractors(topology, particles)
    for lam in EIGENVALUES:
        members = [a for a in analytic if a.eigenvalue == lam]
        if not members:
            continue
        kept, lost = gram_schmidt(members)
        sectors[lam] = kept
        dropped += lost
    return AttractorBasis(sectors, dropped)


def numerical_rank(ops, rel_cutoff: float = RANK_CUTOFF) -> int:
    """Rank of a set of operators from the singular values of their Gram matrix."""
    ops = np.asarray(ops)
    flat = ops.reshape(len(ops), -1)
    flat = flat / np.linalg.norm(flat, axis=1, keepdims=True)
    s = np.linalg.svd(flat.conj() @ flat.T, compute_uv=False)
    return int(np.sum(s > rel_cutoff * s[0]))


# coin and shift conditions


def coin_block(lam: complex, params) -> np.ndarray:
    """Parameterized 4x4 attractor block for ``lam`` in the (LL, LR, RL, RR) basis.

    Satisfies ``(RH (x) RH) B (RH (x) RH)^dag = lam B`` where ``RH = sigma_x H``.
    """
    lam = eigenvalue_key(complex(lam))
    p = [complex(v) for v in params]
    expected = {1: 6, 1j: 4, -1j: 4, -1: 2}[lam]
    if len(p) != expected:
        raise ValueError(f"eigenvalue {EIGENVALUE_NAMES[lam]} takes {expected} parameters, got {len(p)}")
    i = 1j
    if lam == 1:
        a, b, c, d, e, f = p
        m = [
            [a, -b, -c, d],
            [-e, f, a - d - f, -b - c - e],
            [b + c + e, a - d - f, f, e],
            [d, c, b, a],
        ]
    elif lam == 1j:
        a, b, c, d = p
        m = [
            [-d, a, b, -i * a - i * b - d],
            [c, -i * a - i * c - d, -i * b - i * c - d, -a - b - c + 2 * i * d],
            [-a - b - c + 2 * i * d, i * b + i * c + d, i * a + i * c + d, c],
            [i * a + i * b + d, b, a, d],
        ]
    elif lam == -1j:
        a, b, c, d = p
        m = [
            [-d, a, b, i * a + i * b - d],
            [c, i * a + i * c - d, i * b + i * c - d, -a - b - c - 2 * i * d],
            [-a - b - c - 2 * i * d, -i * b - i * c + d, -i * a - i * c + d, c],
            [-i * a - i * b + d, b, a, d],
        ]
    else:
        a, b = p
        m = [
            [a, -b, -b, -a],
            [-b, -a, -a, b],
            [-b, -a, -a, b],
            [-a, b, b, a],
        ]
    return np.array(m, dtype=complex)


def local_coin_step() -> np.ndarray:
    """``sigma_x H``, the per-site block of ``R C``."""
    return hilbert.SIGMA_X @ hilbert.HADAMARD


def coin_block_residual(block: np.ndarray, lam: complex) -> float:
    v = np.kron(local_coin_step(), local_coin_step())
    return float(np.abs(v @ block @ v.conj().T - lam * block).max())


def check_shift_conditions(x: np.ndarray, topology: Topology) -> float:
    """Largest violation of ``(S_L S_K^dag)^{(x)2} X (S_K S_L^dag)^{(x)2} = X``.

    ``S_L S_K^dag`` swaps the two output states ``|s,R>`` and ``|s-1,L>`` of
    every edge whose status differs between ``K`` and ``L``, so the
    conditions say that matrix elements are equal along the orbits of
    these swaps.  Each orbit is one equality chain; its length depends on
    how many of the four position indices share an edge.  All orbits are
    checked by applying every element of the swap group.
    """
    x = np.asarray(x)
    particles = _infer_particles(x, topology)
    walk = PercolatedWalk(topology, None, particles)
    base = walk.permutations[0]
    worst = 0.0
    for perm in walk.permutations[1:]:
        # g = S_K S_0^dag as an index map: g[base[j]] = perm[j]
        g = np.empty_like(perm)
        g[base] = perm
        moved = np.empty_like(x)
        moved[np.ix_(g, g)] = x
        worst = max(worst, float(np.abs(moved - x).max()))
    return worst


# brute-force oracle


@dataclass
class OracleResult:
    topology: Topology
    particles: int
    dimensions: dict[complex, int]
    bases: dict[complex, np.ndarray]
    singular_gaps: dict[complex, tuple[float, float]]
    spectrum: "SpectrumCheck | None" = None

    @property
    def total(self) -> int:
        return sum(self.dimensions.values())


@dataclass
class SpectrumCheck:
    peripheral: np.ndarray
    outliers: np.ndarray
    counts: dict[complex, int]


def _check_oracle_guard(topology: Topology, particles: int):
    limit = ORACLE_MAX_SITES.get(particles)
    if limit is None:
        raise ValueError(f"particles must be 1 or 2, got {particles}")
    if topology.n_sites > limit:
        raise EnumerationTooLarge(
            f"brute-force oracle limited to N <= {limit} for {particles} particle(s); got {topology}"
        )


def _eigenspace_of_empty_step(walk: PercolatedWalk, lam: complex) -> np.ndarray:
    """Column-stacked basis of ``{X : U_0 X U_0^dag = lam X}``.

    ``U_0`` is normal, so its complex Schur vectors are eigenvectors and the
    solution space is spanned by ``|z_a><z_b|`` with ``mu_a conj(mu_b) = lam``.
    """
    t, z = scipy.linalg.schur(walk.unitary(0), output="complex")
    mu = np.diag(t)
    pairs = np.abs(mu[:, None] * mu[None, :].conj() - lam) < 1e-8
    a_idx, b_idx = np.nonzero(pairs)
    # vec(|z_a><z_b|) = conj(z_b) (x) z_a
    cols = np.einsum("ik,jk->ijk", z[:, b_idx].conj(), z[:, a_idx])
    return cols.reshape(walk.dim**2, len(a_idx))


def _null_space_step(walk: PercolatedWalk, q: np.ndarray, mask: int, lam: complex):
    d = walk.dim
    k = q.shape[1]
    xs = np.moveaxis(q.reshape((d, d, k), order="F"), 2, 0)
    y = walk.conjugate_coin(xs)
    inv = walk.inverse_permutations[mask]
    b = y[:, inv[:, None], inv[None, :]] - lam * xs
    b = np.moveaxis(b, 0, 2).reshape((d * d, k), order="F")
    _, s, vh = np.linalg.svd(b, full_matrices=False)
    cutoff = RANK_CUTOFF * max(s[0] if len(s) else 0.0, 1.0)
    rank = int(np.sum(s > cutoff))
    smallest_kept = float(s[rank - 1]) if rank else float("inf")
    largest_dropped = float(s[rank]) if rank < len(s) else 0.0
    return q @ vh[rank:].conj().T, smallest_kept, largest_dropped


def brute_force_attractor_space(
    topology: Topology, particles: int = 2, spectrum: bool | None = None
) -> OracleResult:
    """Dimension of every attractor sector from the raw attractor equations.

    For each candidate ``lam`` the constraints ``U_K X U_K^dag = lam X`` are
    imposed one configuration at a time: the empty configuration through
    the eigenbasis of ``U_0``, every other one by an SVD null space of the
    residual map restricted to the current solution space (singular values
    below ``1e-9 * max(s_max, 1)`` count as zero).  The intersection is
    the same null space as that of the fully stacked constraint matrix.

    With ``spectrum`` (default: one particle, or two particles with
    ``N <= 3``) the dense superoperator is also diagonalized and every
    eigenvalue within ``1e-8`` of the unit circle is checked against the
    candidate set.
    """
    _check_oracle_guard(topology, particles)
    walk = PercolatedWalk(topology, None, particles)
    n_configs = len(enumerate_configs(topology))
    dims, bases, gaps = {}, {}, {}
    for lam in EIGENVALUES:
        q = _eigenspace_of_empty_step(walk, lam)
        kept, dropped_max = float("inf"), 0.0
        for mask in range(1, n_configs):
            if q.shape[1] == 0:
                break
            q, s_kept, s_dropped = _null_space_step(walk, q, mask, lam)
            kept = min(kept, s_kept)
            dropped_max = max(dropped_max, s_dropped)
        dims[lam] = q.shape[1]
        bases[lam] = np.array([unvec(q[:, j], walk.dim) for j in range(q.shape[1])])
        gaps[lam] = (kept, dropped_max)
    if spectrum is None:
        spectrum = particles == 1 or topology.n_sites <= 3
    check = peripheral_spectrum(topology, particles) if spectrum else None
    return OracleResult(topology, particles, dims, bases, gaps, check)


def peripheral_spectrum(topology: Topology, particles: int = 2, window: float = 1e-8) -> SpectrumCheck:
    """Eigenvalues of the dense superoperator with ``||mu| - 1| < window``."""
    from .percolation import PercolationModel

    model = PercolationModel.uniform(topology, 0.5)
    m = PercolatedWalk(topology, model, particles).superoperator()
    mu = np.linalg.eigvals(m)
    peripheral = mu[np.abs(np.abs(mu) - 1.0) < window]
    cands = np.array(EIGENVALUES)
    dist = np.abs(peripheral[:, None] - cands[None, :])
    nearest = dist.argmin(axis=1)
    ok = dist.min(axis=1) < window
    counts = {lam: int(np.sum(ok & (nearest == i))) for i, lam in enumerate(EIGENVALUES)}
    return SpectrumCheck(peripheral, peripheral[~ok], counts)


def span_residual(source, target_basis) -> float:
    """Largest HS residual of projecting each ``source`` operator on span(``target_basis``).

    ``target_basis`` must be orthonormal; ``source`` operators are normalized first.
    """
    src = np.asarray(source).reshape(len(source), -1)
    src = src / np.linalg.norm(src, axis=1, keepdims=True)
    tgt = np.asarray(target_basis).reshape(len(target_basis), -1)
    coeffs = tgt.conj() @ src.T
    resid = src.T - tgt.T @ coeffs
    return float(np.linalg.norm(resid, axis=0).max())
