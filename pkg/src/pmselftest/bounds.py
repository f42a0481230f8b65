"""Analytic compatibility (self-testing) bounds.

Covers qubit preparations and measurements in the 2 -> 1 RAC, their N -> 1
generalizations, the biased RAC, and qutrit strategies in Jordan normal form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .quantum import Observable, state_to_bloch

RADICAND_TOL = 1e-9
JORDAN_TOL = 1e-8


def _clamped_sqrt(radicand: float, tol: float = RADICAND_TOL) -> float:
    """sqrt with small negative round-off clamped to zero.

    Radicands below -tol indicate invalid inputs rather than round-off and
    are rejected.
    """
    if radicand < -tol:
        raise ValueError(f"radicand {radicand} is negative beyond tolerance {tol}")
    return float(np.sqrt(max(radicand, 0.0)))


@dataclass(frozen=True)
class PrepBoundReport:
    beta: float
    alpha: float
    bound: float


@dataclass(frozen=True)
class MeasBoundReport:
    mu: float
    nu: float
    eta_plus: float
    eta_minus: float
    bound: float


def prep_compat_bound_2(states) -> PrepBoundReport:
    """Largest RAC value compatible with four given qubit preparations.

    States are indexed (x0, x1) in the order 00, 01, 10, 11. The bound is
    1/2 + (sqrt(beta+alpha) + sqrt(beta-alpha)) / (8 sqrt(2)) in terms of the
    Bloch vectors, and reaches the quantum maximum exactly for pairwise
    antipodal pure states on orthogonal axes.
    """
    states = list(states)
    if len(states) != 4:
        raise ValueError(f"expected 4 preparations, got {len(states)}")
    if any(s.dim != 2 for s in states):
        raise DimensionError("preparation bound requires qubit states")
    m00, m01, m10, m11 = (state_to_bloch(s) for s in states)
    beta = (
        0.5 * sum(float(m @ m) for m in (m00, m01, m10, m11))
        - float(m00 @ m11)
        - float(m01 @ m10)
    )
    alpha = float((m00 - m11) @ (m01 - m10))
    bound = 0.5 + (_clamped_sqrt(beta + alpha) + _clamped_sqrt(beta - alpha)) / (8 * np.sqrt(2))
    return PrepBoundReport(beta=beta, alpha=alpha, bound=bound)


def meas_compat_bound_2(m0: Observable, m1: Observable) -> MeasBoundReport:
    """Largest RAC value compatible with two given qubit observables."""
    if m0.dim != 2 or m1.dim != 2:
        raise DimensionError("measurement bound requires qubit observables")
    a, b = m0.mat, m1.mat
    mu = float(np.trace(a @ a + b @ b).real)
    nu = float(np.trace(a @ b + b @ a).real)
    eta_plus = float(np.trace(a + b).real)
    eta_minus = float(np.trace(a - b).real)
    bound = 0.5 + (
        _clamped_sqrt(2 * mu + 2 * nu - eta_plus**2)
        + _clamped_sqrt(2 * mu - 2 * nu - eta_minus**2)
    ) / 16
    return MeasBoundReport(mu=mu, nu=nu, eta_plus=eta_plus, eta_minus=eta_minus, bound=bound)


def _bit(x: int, y: int, n: int) -> int:
    return (x >> (n - 1 - y)) & 1


def prep_compat_bound_N(states, n: int) -> float:
    """Largest N -> 1 RAC value compatible with 2^N qubit preparations.

    For each measurement input y, the squared signed state sum is
    proportional to the identity and its trace is
        sum_x Tr(rho_x^2) + sum_{k<l} (-1)^{k_y + l_y} Tr({rho_k, rho_l});
    the per-y contribution is the square root of half that trace (the square
    operator is c*identity with 2c equal to the trace, matching the N = 2
    expression in terms of beta and alpha).
    """
    states = list(states)
    if len(states) != 2**n:
        raise ValueError(f"expected {2**n} preparations, got {len(states)}")
    if any(s.dim != 2 for s in states):
        raise DimensionError("preparation bound requires qubit states")
    rhos = [s.rho for s in states]
    purities = [float(np.trace(r @ r).real) for r in rhos]
    cross = np.zeros((len(rhos), len(rhos)))
    for k in range(len(rhos)):
        for l in range(k + 1, len(rhos)):
            cross[k, l] = 2 * float(np.trace(rhos[k] @ rhos[l]).real)
    total = 0.0
    for y in range(n):
        bracket = sum(purities)
        for k in range(len(rhos)):
            for l in range(k + 1, len(rhos)):
                sign = -1.0 if _bit(k, y, n) != _bit(l, y, n) else 1.0
                bracket += sign * cross[k, l]
        total += _clamped_sqrt(bracket / 2)
    return 0.5 + total / (n * 2**n)


def meas_compat_bound_N(observables) -> float:
    """Largest N -> 1 RAC value compatible with N qubit observables.

    Sums over the 2^(N-1) sign strings with last bit zero (the complementary
    strings contribute identically through the spectral symmetry of the
    signed observable sums). Derived for rank-one projective (traceless)
    observables, where it coincides with the two-bit bound at N = 2; it
    remains a valid but weaker bound otherwise (no trace subtraction).
    """
    observables = list(observables)
    n = len(observables)
    if any(o.dim != 2 for o in observables):
        raise DimensionError("measurement bound requires qubit observables")
    mats = [o.mat for o in observables]
    sq = sum(float(np.trace(m @ m).real) for m in mats)
    anti = np.zeros((n, n))
    for k in range(n):
        for l in range(k + 1, n):
            anti[k, l] = 2 * float(np.trace(mats[k] @ mats[l]).real)
    total = 0.0
    for z_prefix in range(2 ** (n - 1)):
        z = z_prefix << 1  # last bit fixed to zero
        radicand = sq
        for k in range(n):
            for l in range(k + 1, n):
                sign = -1.0 if _bit(z, k, n) != _bit(z, l, n) else 1.0
                radicand += sign * anti[k, l]
        total += _clamped_sqrt(radicand)
    return 0.5 + np.sqrt(2) * total / (n * 2 ** (n + 1))


def biased_bound(q: float, m0: Observable, m1: Observable) -> float:
    """Largest biased-RAC value compatible with two qubit observables."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("bias q must lie in [0, 1]")
    if m0.dim != 2 or m1.dim != 2:
        raise DimensionError("biased bound requires qubit observables")
    a, b = m0.mat, m1.mat
    tr0 = float(np.trace(a).real)
    tr1 = float(np.trace(b).real)
    beta = 2 * float(np.trace(a @ a + b @ b).real) - tr0**2 - tr1**2
    alpha = 2 * float(np.trace(a @ b + b @ a).real) - 2 * tr0 * tr1
    return 0.5 + (q * _clamped_sqrt(beta + alpha) + (1 - q) * _clamped_sqrt(beta - alpha)) / 8


def biased_optimal_overlap(q: float) -> float:
    """Bloch overlap n0.n1 of the observables saturating the biased RAC."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("bias q must lie in [0, 1]")
    return (2 * q - 1) / (1 - 2 * q + 2 * q * q)


def biased_max(q: float) -> float:
    """Quantum maximum of the biased RAC over qubit strategies."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("bias q must lie in [0, 1]")
    return 0.5 * (1 + np.sqrt(1 - 2 * q + 2 * q * q))


def qutrit_bound(alpha: float, r: int, s: int) -> float:
    """Largest RAC value for projective qutrit observables in Jordan form.

    The observables decompose into one 2x2 block (relative angle alpha) and
    one 1x1 block with eigenvalues r and s.
    """
    if r not in (-1, 1) or s not in (-1, 1):
        raise ValueError("block signs r, s must be +-1")
    sa, ca = abs(np.sin(alpha)), abs(np.cos(alpha))
    if r == s:
        block_sum = 2 + 4 * sa + 2 * ca
    else:
        block_sum = 2 + 2 * sa + 4 * ca
    return 0.5 + block_sum / 16


def qutrit_max() -> float:
    """Quantum maximum of the 2 -> 1 RAC with qutrits, (5 + sqrt(5))/8."""
    return (5 + np.sqrt(5)) / 8


def jordan_parameters(m0: Observable, m1: Observable, tol: float = JORDAN_TOL):
    """Extract (alpha, r, s) from two projective qutrit observables.

    Locates the 2x2 Jordan block as the column space of the commutator and
    reads the relative angle from the block trace; the orthogonal 1x1 block
    carries the eigenvalue signs. Raises if the observables commute (purely
    classical arrangement) or are not projective.
    """
    if m0.dim != 3 or m1.dim != 3:
        raise DimensionError("Jordan extraction expects qutrit observables")
    eye = np.eye(3)
    for m in (m0.mat, m1.mat):
        if np.max(np.abs(m @ m - eye)) > tol:
            raise ValueError("observables must be projective (M^2 = identity)")
    comm = m0.mat @ m1.mat - m1.mat @ m0.mat
    u, sv, _ = np.linalg.svd(comm)
    if sv[0] < tol:
        raise ValueError("observables commute; no 2x2 Jordan block")
    if sv[2] > tol:
        raise ValueError("commutator rank exceeds 2; inputs are not a valid Jordan pair")
    block = u[:, :2]
    line = u[:, 2]
    r = float((line.conj() @ m0.mat @ line).real)
    s = float((line.conj() @ m1.mat @ line).real)
    if abs(abs(r) - 1) > tol or abs(abs(s) - 1) > tol:
        raise ValueError("1x1 block eigenvalues are not +-1")
    a = block.conj().T @ m0.mat @ block
    b = block.conj().T @ m1.mat @ block
    cos2a = float(np.trace(a @ b).real) / 2
    angle = 0.5 * np.arccos(np.clip(cos2a, -1.0, 1.0))
    return float(angle), int(np.sign(r)), int(np.sign(s))
