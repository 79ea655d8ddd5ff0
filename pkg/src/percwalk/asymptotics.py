"""Asymptotic cycles of the two-particle walk.

The general route projects an initial state onto an orthonormal attractor
basis,

    rho_inf(n) = sum_k lam_k**n Tr[X_k^dag rho0] X_k,

and is valid for every topology.  Closed forms for circles with
``N % 4 != 0`` and for length-4 lines are provided alongside so they can
be cross-checked against the projection.

Bell coin states use psi+- = (LR +- RL)/sqrt2, phi+- = (LL +- RR)/sqrt2,
and all 4x4 coin matrices are in the basis order (LL, LR, RL, RR).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import attractors
from .attractors import AttractorBasis
from .hilbert import Topology

S2 = 1.0 / np.sqrt(2.0)
BELL_VECTORS = {
    "psi+": np.array([0.0, S2, S2, 0.0], dtype=complex),
    "psi-": np.array([0.0, S2, -S2, 0.0], dtype=complex),
    "phi+": np.array([S2, 0.0, 0.0, S2], dtype=complex),
    "phi-": np.array([S2, 0.0, 0.0, -S2], dtype=complex),
}
NORM_TOL = 1e-12
GRAM_TOL = 1e-10
# coefficients below this magnitude do not count towards the period
PERIOD_TOL = 1e-12


@dataclass(frozen=True)
class BellCoinState:
    """Two-coin pure state ``a psi+ + b psi- + c phi+ + d phi-``."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        norm = abs(self.a) ** 2 + abs(self.b) ** 2 + abs(self.c) ** 2 + abs(self.d) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"Bell amplitudes are not normalized (sum of squares {norm!r})")

    @classmethod
    def from_vector(cls, coin) -> "BellCoinState":
        """Decompose a coin vector given in the (LL, LR, RL, RR) basis."""
        coin = np.asarray(coin, dtype=complex)
        if coin.shape != (4,):
            raise ValueError(f"coin vector must have 4 entries, got shape {coin.shape}")
        amps = [np.vdot(BELL_VECTORS[k], coin) for k in ("psi+", "psi-", "phi+", "phi-")]
        return cls(*amps)

    @classmethod
    def named(cls, label: str) -> "BellCoinState":
        """Bell states by name and product states such as ``"LL"`` or ``"RL"``."""
        if label in BELL_VECTORS:
            return cls.from_vector(BELL_VECTORS[label])
        if len(label) == 2 and set(label) <= {"L", "R"}:
            v = np.zeros(4, dtype=complex)
            v[2 * "LR".index(label[0]) + "LR".index(label[1])] = 1.0
            return cls.from_vector(v)
        raise ValueError(f"unknown coin state {label!r}")

    @classmethod
    def from_bqphi(cls, b: float, q: float, phi: float) -> "BellCoinState":
        """Coin with real ``b >= 0``, ``c = e^{i phi} sqrt(1 - b^2 - q^2)`` and the
        remaining weight ``q`` placed on psi+."""
        rest = 1.0 - b**2 - q**2
        if b < 0 or q < 0 or rest < -NORM_TOL:
            raise ValueError(f"need b, q >= 0 and b^2 + q^2 <= 1, got b={b}, q={q}")
        return cls(q, b, np.exp(1j * phi) * np.sqrt(max(rest, 0.0)), 0.0)

    @property
    def q2(self) -> float:
        return abs(self.a) ** 2 + abs(self.d) ** 2

    @property
    def phi(self) -> float:
        """Phase of ``c`` after rotating the global phase so that ``b`` is real."""
        if abs(self.b) == 0 or abs(self.c) == 0:
            return 0.0
        return float(np.angle(self.c * np.conj(self.b)))

    def vector(self) -> np.ndarray:
        return (
            self.a * BELL_VECTORS["psi+"]
            + self.b * BELL_VECTORS["psi-"]
            + self.c * BELL_VECTORS["phi+"]
            + self.d * BELL_VECTORS["phi-"]
        )

    def density(self) -> np.ndarray:
        v = self.vector()
        return np.outer(v, v.conj())


@dataclass
class AsymptoticCycle:
    period: int
    states: list

    def __post_init__(self):
        if self.period < 1 or len(self.states) % self.period:
            raise ValueError("number of states must be a multiple of the period")

    def phase(self, n: int) -> np.ndarray:
        return self.states[n % len(self.states)]


def _n_sites(rho: np.ndarray) -> int:
    d = rho.shape[0]
    n = int(round(np.sqrt(d))) // 2
    if rho.shape != (d, d) or (2 * n) ** 2 != d:
        raise ValueError(f"shape {rho.shape} is not a two-particle walk state")
    return n


def localized_state(topology: Topology, coin: BellCoinState, x: int = 0, y: int = 0) -> np.ndarray:
    """Density matrix of ``|x, y> (x) coin``."""
    n = topology.n_sites
    if not (0 <= x < n and 0 <= y < n):
        raise ValueError(f"sites ({x}, {y}) out of range for {topology}")
    pos = np.zeros((n, n))
    pos[x, y] = 1.0
    v = np.einsum("xy,ij->xiyj", pos, coin.vector().reshape(2, 2)).ravel()
    return np.outer(v, v.conj())


def basis_state(topology: Topology, x: int, i: int, y: int, j: int) -> np.ndarray:
    d = topology.dim
    v = np.zeros(d * d, dtype=complex)
    v[d * (2 * x + i) + (2 * y + j)] = 1.0
    return np.outer(v, v.conj())


def overlaps(rho0: np.ndarray, basis: AttractorBasis) -> np.ndarray:
    """``Tr[X_k^dag rho0]`` for every basis element."""
    ops = basis.operators()
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != ops.shape[1:]:
        raise ValueError(f"state shape {rho0.shape} does not match basis operators {ops.shape[1:]}")
    return np.einsum("kij,ij->k", ops.conj(), rho0)


def _check_basis(basis: AttractorBasis, tol: float):
    defect = basis.gram_defect()
    if defect > tol:
        raise ValueError(f"attractor basis is not orthonormal (Gram defect {defect:.3g})")


def project_asymptotic(rho0, basis: AttractorBasis, n: int, gram_tol: float = GRAM_TOL) -> np.ndarray:
    _check_basis(basis, gram_tol)
    coeffs = overlaps(rho0, basis)
    lam_n = basis.eigenvalues() ** (n % 4)
    return np.einsum("k,kij->ij", lam_n * coeffs, basis.operators())


def asymptotic_cycle(rho0, basis: AttractorBasis, gram_tol: float = GRAM_TOL) -> AsymptoticCycle:
    """The asymptotic cycle with its minimal period (1, 2 or 4)."""
    _check_basis(basis, gram_tol)
    coeffs = overlaps(rho0, basis)
    lams = basis.eigenvalues()
    active = np.abs(coeffs) > PERIOD_TOL
    if np.any(active & (np.abs(lams.imag) > 0.5)):
        period = 4
    elif np.any(active & (lams.real < -0.5)):
        period = 2
    else:
        period = 1
    ops = basis.operators()
    states = [np.einsum("k,kij->ij", lams**k * coeffs, ops) for k in range(period)]
    return AsymptoticCycle(period, states)


def position_distribution(rho: np.ndarray) -> np.ndarray:
    """``w[x, y] = sum_ij <x,i,y,j| rho |x,i,y,j>``."""
    rho = np.asarray(rho)
    n = _n_sites(rho)
    return np.real(np.diagonal(rho)).reshape(n, 2, n, 2).sum(axis=(1, 3))


def reduced_coin_state(rho: np.ndarray) -> np.ndarray:
    """Trace over both position registers; 4x4 in the (LL, LR, RL, RR) order."""
    rho = np.asarray(rho)
    n = _n_sites(rho)
    t = rho.reshape(n, 2, n, 2, n, 2, n, 2)
    return np.einsum("xiyjxkyl->ijkl", t).reshape(4, 4)


# Circles of length N % 4 != 0: three attractors I, W, F


def _require_small_circle(n_sites: int):
    if n_sites < 2:
        raise ValueError("n_sites must be >= 2")
    if n_sites % 4 == 0:
        raise ValueError(f"N={n_sites} is a multiple of 4; use project_asymptotic")


def f_operator(topology: Topology) -> np.ndarray:
    """``F = sum |x,i,x,i><y,j,y,j| = 2N |Phi_w><Phi_w|``."""
    w = attractors.phi_w(topology)
    return topology.dim * np.outer(w, w.conj())


def circle_basis_closed_form(n_sites: int) -> list[np.ndarray]:
    """Orthonormal basis ``A1, A2, A3`` of the three-attractor space."""
    top = Topology.circle(n_sites)
    n = n_sites
    eye = np.eye(top.dim**2)
    a1 = eye / (2 * n)
    a2 = (attractors.swap_operator(top) - a1) / np.sqrt(4 * n**2 - 1)
    a3 = np.sqrt((2 * n + 1) / (4 * n * (n + 1) * (2 * n - 1))) * (
        f_operator(top) - a1 - np.sqrt((2 * n - 1) / (2 * n + 1)) * a2
    )
    return [a1, a2, a3]


def steady_state_coefficients(n_sites: int, coin: BellCoinState, same_site: bool = True) -> tuple[float, float, float]:
    """``(c1, c2, c3)`` of ``rho_inf = c1 I + c2 W + c3 F``.

    For walkers started on the same site the coefficients depend on
    ``|b|^2`` and ``|c|^2``; for distinct sites they are coin independent.
    """
    _require_small_circle(n_sites)
    n = n_sites
    k = 2 * n**2 + n - 1
    if not same_site:
        scale = 1.0 / (4 * n * k)
        return (2 * n + 1) * scale, -scale, -scale
    b2, c2 = abs(coin.b) ** 2, abs(coin.c) ** 2
    den = 2 * n * k
    return (
        (n + b2 - c2) / den,
        (n - c2 - (2 * n + 1) * b2) / den,
        ((2 * n + 1) * c2 + b2 - 1) / den,
    )


def circle_steady_state(n_sites: int, coin: BellCoinState, same_site: bool = True) -> np.ndarray:
    c1, c2, c3 = steady_state_coefficients(n_sites, coin, same_site)
    top = Topology.circle(n_sites)
    return c1 * np.eye(top.dim**2) + c2 * attractors.swap_operator(top) + c3 * f_operator(top)


def circle_position_closed_form(n_sites: int, coin: BellCoinState) -> tuple[float, float]:
    """``(w(x, x), w(x, y != x))`` for walkers started on the same site."""
    _require_small_circle(n_sites)
    n = n_sites
    b2, c2 = abs(coin.b) ** 2, abs(coin.c) ** 2
    den = n * (2 * n**2 + n - 1)
    return (3 * n - 1 + 2 * (n - 1) * (c2 - b2)) / den, (2 * n + 2 * b2 - 2 * c2) / den


def circle_reduced_coin_closed_form(n_sites: int, coin: BellCoinState, variant_r1: bool = False) -> np.ndarray:
    """Reduced coin state of the same-site steady state.

    The diagonal entry ``r1`` equals ``N^2 + N - 1 + N(|c|^2 - |b|^2)``, which
    makes the trace one.  ``variant_r1=True`` substitutes
    ``2N^2 + N - 1 + N(|c|^2 - |b|^2)``; that matrix has trace
    ``1 + N^2/(2N^2+N-1)`` and is kept only for comparison.
    """
    _require_small_circle(n_sites)
    n = n_sites
    b2, c2 = abs(coin.b) ** 2, abs(coin.c) ** 2
    k = 2 * n**2 + n - 1
    r1 = (k if variant_r1 else n**2 + n - 1) + n * (c2 - b2)
    r2 = (2 * n + 1) * c2 + b2 - 1
    r3 = n * (n + b2 - c2)
    r4 = n - (2 * n + 1) * b2 - c2
    m = np.array([[r1, 0, 0, r2], [0, r3, r4, 0], [0, r4, r3, 0], [r2, 0, 0, r1]], dtype=complex)
    return m / (2 * k)


# Length-4 closed forms


def line4_coin_cycle(coin: BellCoinState) -> AsymptoticCycle:
    """Reduced coin matrices at phases 0..3, evaluated from ``(b, c)``."""
    b, c = coin.b, coin.c
    bb, cc = abs(b) ** 2, abs(c) ** 2
    z1 = 1 - (bb - cc) / 2
    z2 = (2 - bb - 7 * cc) / 6
    z3 = 1 + (bb - cc) / 2
    z4 = (2 - 7 * bb - cc) / 6
    f = (b - c) * (np.conj(b) + np.conj(c))
    g = (b * np.conj(c) + np.conj(b) * c).real
    u1 = 2 / 3 - 4 / 3 * (bb + cc) + g
    u2 = 2 / 3 - 4 / 3 * (bb + cc) - g
    bc = np.conj(b) * c
    cb = b * np.conj(c)
    fc = np.conj(f)
    r0 = np.array([[z1, bc, -bc, -z2], [cb, z3, z4, cb], [-cb, z4, z3, -cb], [-z2, bc, -bc, z1]]) / 4
    r1 = np.array([[2 - g, -f, f, -u1], [-fc, 2 + g, u2, -fc], [fc, u2, 2 + g, fc], [-u1, -f, f, 2 - g]]) / 8
    r2 = np.array([[z3, -cb, cb, -z4], [-bc, z1, z2, -bc], [bc, z2, z1, bc], [-z4, -cb, cb, z3]]) / 4
    r3 = np.array([[2 + g, fc, -fc, -u2], [f, 2 - g, u1, f], [-f, u1, 2 - g, -f], [-u2, fc, -fc, 2 + g]]) / 8
    return AsymptoticCycle(4, [np.asarray(m, dtype=complex) for m in (r0, r1, r2, r3)])


def line4_coin_cycle_bqphi(b: float, q: float, phi: float) -> AsymptoticCycle:
    """The same cycle in the real parameterization ``b >= 0``, ``q``, ``phi``."""
    q2 = q**2
    rest = 1 - b**2 - q2
    if b < 0 or q < 0 or rest < -NORM_TOL:
        raise ValueError(f"need b, q >= 0 and b^2 + q^2 <= 1, got b={b}, q={q}")
    r = np.exp(1j * phi) * b * np.sqrt(max(rest, 0.0))
    rr = 2 * r.real
    rc = np.conj(r)
    s = 1 - 2 * b**2 - q2 + (r - rc)
    sc = np.conj(s)
    v1 = (2 - 4 * q2) / 3 - rr
    v2 = (2 - 4 * q2) / 3 + rr
    p = (3 - q2) / 2 - b**2
    m = (1 + q2) / 2 + b**2
    h = (1 + q2) / 6 - b**2
    k = (5 - 7 * q2) / 6 - b**2
    r0 = np.array([[p, r, -r, k], [rc, m, h, rc], [-rc, h, m, -rc], [k, r, -r, p]]) / 4
    r1 = np.array([[2 - rr, s, -s, v1], [sc, 2 + rr, -v2, sc], [-sc, -v2, 2 + rr, -sc], [v1, s, -s, 2 - rr]]) / 8
    r2 = np.array([[m, -rc, rc, -h], [-r, p, -k, -r], [r, -k, p, r], [-h, -rc, rc, m]]) / 4
    r3 = np.array([[2 + rr, -sc, sc, v2], [-s, 2 - rr, -v1, -s], [s, -v1, 2 - rr, s], [v2, -sc, sc, 2 + rr]]) / 8
    return AsymptoticCycle(4, [np.asarray(x, dtype=complex) for x in (r0, r1, r2, r3)])


# Special cases of the length-4 coin cycle (psi+, psi- and phi+ coins).
LINE4_STATIC_COIN = np.array(
    [[1, 0, 0, -1 / 3], [0, 1, 1 / 3, 0], [0, 1 / 3, 1, 0], [-1 / 3, 0, 0, 1]], dtype=complex
) / 4
LINE4_PSI_MINUS_CYCLE = [
    np.array([[1, 0, 0, -1 / 3], [0, 3, -5 / 3, 0], [0, -5 / 3, 3, 0], [-1 / 3, 0, 0, 1]], dtype=complex) / 8,
    np.array(
        [[1, -0.5, 0.5, 1 / 3], [-0.5, 1, -1 / 3, -0.5], [0.5, -1 / 3, 1, 0.5], [1 / 3, -0.5, 0.5, 1]], dtype=complex
    )
    / 4,
    np.array([[3, 0, 0, 5 / 3], [0, 1, 1 / 3, 0], [0, 1 / 3, 1, 0], [5 / 3, 0, 0, 3]], dtype=complex) / 8,
    np.array(
        [[1, 0.5, -0.5, 1 / 3], [0.5, 1, -1 / 3, 0.5], [-0.5, -1 / 3, 1, -0.5], [1 / 3, 0.5, -0.5, 1]], dtype=complex
    )
    / 4,
]
# the phi+ cycle is the psi- cycle shifted by two phases
LINE4_PHI_PLUS_CYCLE = LINE4_PSI_MINUS_CYCLE[2:] + LINE4_PSI_MINUS_CYCLE[:2]

# index patterns of the 4x4 position matrices (entries are 0-based into x or y)
_EVEN_PATTERN = np.array([[0, 1, 2, 3], [2, 3, 0, 1], [1, 0, 3, 2], [3, 2, 1, 0]])
_ODD_SHIFTED = np.array([[2, 3, 0, 1], [0, 1, 2, 3], [3, 2, 1, 0], [1, 0, 3, 2]])


def line4_position_weights(coin: BellCoinState) -> tuple[np.ndarray, np.ndarray]:
    """The weights ``x1..x4`` and ``y1..y4`` (in units of 1/3840)."""
    b, c, d = coin.b, coin.c, coin.d
    bb, cc, dd = abs(b) ** 2, abs(c) ** 2, abs(d) ** 2
    cd = 2 * (np.conj(c) * d).real
    bc = 2 * (b * np.conj(c)).real
    bd = 2 * (b * np.conj(d)).real
    x = np.array(
        [
            294 + 3 * bb + 49 * cc + 24 * dd + 52 * cd,
            306 - 3 * bb - 49 * cc - 24 * dd - 52 * cd,
            3 * (58 + bb + 3 * cc + 8 * dd + 4 * cd),
            3 * (62 - bb - 3 * cc - 8 * dd - 4 * cd),
        ]
    )
    y = np.array(
        [
            234 + 3 * bb + 29 * cc + 24 * dd - 10 * bc - 20 * bd + 32 * cd,
            246 - 3 * bb - 29 * cc - 24 * dd + 10 * bc + 20 * bd - 32 * cd,
            234 + 3 * bb + 29 * cc + 24 * dd + 10 * bc + 20 * bd + 32 * cd,
            246 - 3 * bb - 29 * cc - 24 * dd - 10 * bc - 20 * bd - 32 * cd,
        ]
    )
    return x, y


def line4_position_cycle(coin: BellCoinState) -> AsymptoticCycle:
    x, y = line4_position_weights(coin)
    mats = [x[_EVEN_PATTERN], y[_EVEN_PATTERN], x[_ODD_SHIFTED], y[_ODD_SHIFTED]]
    return AsymptoticCycle(4, [m / 3840.0 for m in mats])


# Cross-checks of closed forms against the projection


def cycle_distance(a: AsymptoticCycle, b: AsymptoticCycle) -> float:
    """Largest entrywise deviation over four phases."""
    return max(float(np.abs(a.phase(k) - b.phase(k)).max()) for k in range(4))


def projected_cycle(topology: Topology, coin: BellCoinState, basis: AttractorBasis, x: int = 0, y: int = 0, reduce=None) -> AsymptoticCycle:
    """Four phases of the projected state, optionally mapped through ``reduce``."""
    rho0 = localized_state(topology, coin, x, y)
    states = [project_asymptotic(rho0, basis, k) for k in range(4)]
    if reduce is not None:
        states = [reduce(s) for s in states]
    return AsymptoticCycle(4, states)
