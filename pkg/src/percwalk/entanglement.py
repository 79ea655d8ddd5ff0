"""Partial transpose, negativity and two-qubit concurrence."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import asymptotics, attractors
from .asymptotics import BellCoinState
from .hilbert import Topology

PPT_TOL = -1e-10
SIGMA_Y2 = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


@dataclass
class PTSpectrum:
    eigenvalues: np.ndarray  # ascending
    is_ppt: bool
    negativity: float

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])


def partial_transpose(rho, dims: tuple[int, int]) -> np.ndarray:
    """Transpose on the second tensor factor of a ``d1*d2`` dimensional operator."""
    rho = np.asarray(rho)
    d1, d2 = dims
    if rho.shape != (d1 * d2, d1 * d2):
        raise ValueError(f"shape {rho.shape} does not match dims {dims}")
    return rho.reshape(d1, d2, d1, d2).transpose(0, 3, 2, 1).reshape(d1 * d2, d1 * d2)


def pt_spectrum(rho, dims: tuple[int, int], tol: float = PPT_TOL) -> PTSpectrum:
    pt = partial_transpose(rho, dims)
    ev = np.linalg.eigvalsh((pt + pt.conj().T) / 2)
    neg = float(-ev[ev < 0].sum())
    return PTSpectrum(ev, bool(ev[0] >= tol), neg)


def negativity(rho, dims: tuple[int, int]) -> float:
    return pt_spectrum(rho, dims).negativity


def split_dims(rho, split: str) -> tuple[int, int]:
    """Tensor split for ``"particles"`` (two walk registers) or ``"coins"`` (4x4)."""
    d = np.asarray(rho).shape[0]
    if split == "coins":
        if d != 4:
            raise ValueError("coin split needs a 4x4 reduced coin state")
        return 2, 2
    if split == "particles":
        half = int(round(np.sqrt(d)))
        if half * half != d:
            raise ValueError(f"dimension {d} is not a square")
        return half, half
    raise ValueError(f"unknown split {split!r}")


def _psd_sqrt(rho):
    w, v = np.linalg.eigh((rho + rho.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def concurrence(rho4) -> float:
    """Wootters concurrence of a two-qubit state.

    Uses the Hermitian form ``sqrt(rho) rho~ sqrt(rho)``, which has the same
    eigenvalues as ``rho rho~``.
    """
    rho4 = np.asarray(rho4, dtype=complex)
    if rho4.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {rho4.shape}")
    sq = _psd_sqrt(rho4)
    tilde = SIGMA_Y2 @ rho4.conj() @ SIGMA_Y2
    m = sq @ tilde @ sq
    mu = np.linalg.eigvalsh((m + m.conj().T) / 2)[::-1]
    lam = np.sqrt(np.clip(mu, 0.0, None))
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def _check_domain(b, q):
    if b < 0 or q < 0 or b**2 + q**2 > 1 + 1e-12:
        raise ValueError(f"need b, q >= 0 and b^2 + q^2 <= 1, got b={b}, q={q}")


def concurrence_closed_form(b: float, q: float, phi: float) -> float:
    """Concurrence of the length-4 asymptotic coin cycle in the ``(b, q, phi)``
    parameterization."""
    _check_domain(b, q)
    q2 = q**2
    lhs = b**2 * max(1 - b**2 - q2, 0.0) * np.sin(phi) ** 2
    alpha = 25 - 34 * q2 + 13 * q2**2 - 72 * lhs
    beta = 7 + 2 * q2 - 5 * q2**2
    root = np.sqrt(max(alpha**2 - beta**2, 0.0))
    value = (np.sqrt(alpha + root) - np.sqrt(max(alpha - root, 0.0)) - 4 * (1 + q2)) / 12
    return float(max(value, 0.0))


def npt_region(b: float, q: float, phi: float) -> bool:
    """True when the length-4 asymptotic coin state is NPT."""
    _check_domain(b, q)
    q2 = q**2
    return bool(b**2 * (1 - b**2 - q2) * np.sin(phi) ** 2 < (5 - 26 * q2 + 5 * q2**2) / 36)


def circle_pt_eigenvalues(n_sites: int, coin: BellCoinState) -> list[tuple[float, int]]:
    """Distinct PT eigenvalues of the same-site circle steady state with multiplicities."""
    n = n_sites
    b2, c2 = abs(coin.b) ** 2, abs(coin.c) ** 2
    return [
        ((1 - 2 * b2) / (2 * n), 1),
        ((1 - 2 * c2) / (2 * n * (2 * n - 1)), n * (2 * n - 1)),
        ((n - 1 + 2 * b2 + 2 * n * c2) / (2 * n * (2 * n - 1) * (n + 1)), (n + 1) * (2 * n - 1)),
    ]


def expand_multiplicities(pairs) -> np.ndarray:
    return np.sort(np.concatenate([np.full(m, v) for v, m in pairs]))


def adjudicate_claims(n_sites: int = 5, basis=None, tol: float = 1e-10) -> dict:
    """Singlet-coin checks on a circle with ``n_sites % 4 != 0``.

    Computes the same-site and distinct-site steady states by projection and
    compares them with the closed forms.  The two qualitative statements
    (PPT for every input; the distinct-site state equals the same-site state
    for a singlet) are evaluated and reported, not asserted.
    """
    top = Topology.circle(n_sites)
    if basis is None:
        basis = attractors.orthonormal_basis(top)
    singlet = BellCoinState.named("psi-")
    dims = (top.dim, top.dim)
    same = asymptotics.project_asymptotic(asymptotics.localized_state(top, singlet, 0, 0), basis, 0)
    dist = asymptotics.project_asymptotic(asymptotics.localized_state(top, singlet, 0, 1), basis, 0)
    same_cf = asymptotics.circle_steady_state(n_sites, singlet, same_site=True)
    dist_cf = asymptotics.circle_steady_state(n_sites, singlet, same_site=False)
    lam1 = circle_pt_eigenvalues(n_sites, singlet)[0][0]
    same_min = pt_spectrum(same, dims).min_eigenvalue
    dist_min = pt_spectrum(dist, dims).min_eigenvalue
    report = {
        "n_sites": n_sites,
        "same_site_formula_error": float(np.abs(same - same_cf).max()),
        "distinct_site_formula_error": float(np.abs(dist - dist_cf).max()),
        "same_site_min_pt_eigenvalue": same_min,
        "lambda1_formula": lam1,
        "lambda1_error": abs(same_min - lam1),
        "distinct_site_min_pt_eigenvalue": dist_min,
        "same_vs_distinct_hs_distance": float(np.linalg.norm(same - dist)),
        "same_site_coefficients": asymptotics.steady_state_coefficients(n_sites, singlet, True),
        "distinct_site_coefficients": asymptotics.steady_state_coefficients(n_sites, singlet, False),
    }
    report["formulas_match"] = bool(
        report["same_site_formula_error"] < tol
        and report["distinct_site_formula_error"] < tol
        and report["lambda1_error"] < tol
    )
    report["claim_ppt_for_all_inputs_holds"] = bool(min(same_min, dist_min) >= PPT_TOL)
    report["claim_singlet_equivalence_holds"] = bool(report["same_vs_distinct_hs_distance"] < tol)
    return report
