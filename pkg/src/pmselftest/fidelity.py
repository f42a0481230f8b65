"""Robust self-testing fidelity machinery.

Linear lower bound L(A2), operator-inequality coefficients and verification
for preparations and measurements, direct average-fidelity evaluation over
unitary extraction channels, and the parametric tightness curves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize
from scipy.spatial.transform import Rotation

from .errors import DimensionError
from .linalg import psd_check
from .quantum import (
    ID2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    Observable,
    Povm,
    State,
    dephasing_coefficient,
    observable_to_bloch,
    povm_from_observable,
    pure_state,
    state_to_bloch,
)
from .scenario import Strategy, Witness, make_rac_witness, witness_value

Q2 = 0.5 * (1 + 1 / np.sqrt(2))
S_STAR = 4 * (1 + np.sqrt(2))
INEQ_TOL = 1e-9


def linear_lower_bound(a2: float) -> float:
    """Fidelity lower bound L(A2) = (1 + sqrt(2)) A2 - 3/(2 sqrt(2)).

    Valid for both preparations and measurements; L(Q2) = 1 and
    L(3/4) = 3/4.
    """
    if not 0.0 <= a2 <= Q2 + 1e-12:
        raise ValueError(f"witness value {a2} outside [0, Q2]")
    return (1 + np.sqrt(2)) * a2 - 3 / (2 * np.sqrt(2))


def conjectured_upper_bound(a2: float) -> float:
    """Conjectured linear *upper* bound on the average fidelity.

    Reporting overlay only -- never asserted: passes through (Q2, 1) and
    equals Q2 at A2 = 3/4.
    """
    if not 0.0 <= a2 <= Q2 + 1e-12:
        raise ValueError(f"witness value {a2} outside [0, Q2]")
    return ((1 - Q2) * a2 + Q2**2 - 0.75) / (Q2 - 0.75)


@dataclass(frozen=True)
class OperatorIneqCoeffs:
    theta: float
    s: float
    t_e: float
    t_o: float

    @property
    def t(self) -> float:
        return (self.t_e + self.t_o) / 2


def _check_theta_s(theta: float, s: float) -> None:
    if not 0.0 <= theta <= np.pi / 2:
        raise ValueError(f"theta {theta} outside [0, pi/2]")
    if s <= 0:
        raise ValueError("s must be positive")


def prep_ineq_coeffs(theta: float, s: float = S_STAR) -> OperatorIneqCoeffs:
    """Largest feasible constants in the preparation operator inequalities.

    t_e covers inputs 00/11, t_o covers 01/10; the two theta intervals
    differ by exchanging t_e <-> t_o and sin <-> cos.
    """
    _check_theta_s(theta, s)
    c = dephasing_coefficient(theta, s)
    if theta <= np.pi / 4:
        t_e = min(1 - (s / 8) * np.cos(theta), (s / 8) * np.cos(theta))
        t_o = min((4 + 4 * c - s * np.sin(theta)) / 8, (4 - 4 * c + s * np.sin(theta)) / 8)
    else:
        t_e = min((4 + 4 * c - s * np.cos(theta)) / 8, (4 - 4 * c + s * np.cos(theta)) / 8)
        t_o = min(1 - (s / 8) * np.sin(theta), (s / 8) * np.sin(theta))
    return OperatorIneqCoeffs(theta=theta, s=s, t_e=float(t_e), t_o=float(t_o))


def meas_ineq_coeffs(theta: float, s: float = S_STAR) -> OperatorIneqCoeffs:
    """Largest feasible constants in the measurement operator inequalities."""
    _check_theta_s(theta, s)
    c = dephasing_coefficient(theta, s)
    if theta <= np.pi / 4:
        t_e = min((8 - s - s * np.cos(theta)) / 8, (s / 8) * (np.cos(theta) - 1))
        t_o = min((4 * c - s * np.sin(theta) - s + 4) / 8, (-4 * c + s * np.sin(theta) - s + 4) / 8)
    else:
        t_e = min((4 * c - s * np.cos(theta) - s + 4) / 8, (-4 * c + s * np.cos(theta) - s + 4) / 8)
        t_o = min((s / 8) * (np.sin(theta) - 1), (8 - s - s * np.sin(theta)) / 8)
    return OperatorIneqCoeffs(theta=theta, s=s, t_e=float(t_e), t_o=float(t_o))


def prep_ineq_operators(theta: float, s: float = S_STAR):
    """The four preparation inequalities as (K_x, W_x, t_x) triples.

    Each triple must satisfy K - sW - t*identity >= 0; the c(theta)-damped
    axis switches between the two theta intervals.
    """
    coeffs = prep_ineq_coeffs(theta, s)
    c = dephasing_coefficient(theta, s)
    ct, st = np.cos(theta), np.sin(theta)
    if theta <= np.pi / 4:
        ks = [
            (ID2 + SIGMA_X) / 2,
            (ID2 + c * SIGMA_Z) / 2,
            (ID2 - c * SIGMA_Z) / 2,
            (ID2 - SIGMA_X) / 2,
        ]
    else:
        ks = [
            (ID2 + c * SIGMA_X) / 2,
            (ID2 + SIGMA_Z) / 2,
            (ID2 - SIGMA_Z) / 2,
            (ID2 - c * SIGMA_X) / 2,
        ]
    ws = [ct * SIGMA_X / 8, st * SIGMA_Z / 8, -st * SIGMA_Z / 8, -ct * SIGMA_X / 8]
    ts = [coeffs.t_e, coeffs.t_o, coeffs.t_o, coeffs.t_e]
    return list(zip(ks, ws, ts))


def meas_ineq_operators(theta: float, s: float = S_STAR):
    """The four measurement inequalities as (K_yb, Z_yb, t_y) triples,
    ordered (y, b) = (0,0), (0,1), (1,0), (1,1)."""
    coeffs = meas_ineq_coeffs(theta, s)
    c = dephasing_coefficient(theta, s)
    ct, st = np.cos(theta), np.sin(theta)
    if theta <= np.pi / 4:
        ks = [
            (ID2 + SIGMA_X) / 2,
            (ID2 - SIGMA_X) / 2,
            (ID2 + c * SIGMA_Z) / 2,
            (ID2 - c * SIGMA_Z) / 2,
        ]
    else:
        ks = [
            (ID2 + c * SIGMA_X) / 2,
            (ID2 - c * SIGMA_X) / 2,
            (ID2 + SIGMA_Z) / 2,
            (ID2 - SIGMA_Z) / 2,
        ]
    zs = [
        (ID2 + ct * SIGMA_X) / 8,
        (ID2 - ct * SIGMA_X) / 8,
        (ID2 + st * SIGMA_Z) / 8,
        (ID2 - st * SIGMA_Z) / 8,
    ]
    ts = [coeffs.t_e, coeffs.t_e, coeffs.t_o, coeffs.t_o]
    return list(zip(ks, zs, ts))


def verify_operator_inequality(k, w, s: float, t: float, tol: float = INEQ_TOL) -> bool:
    """Check K - sW - t*identity >= -tol."""
    k = np.asarray(k, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if k.shape != w.shape:
        raise DimensionError(f"operator shapes differ: {k.shape} vs {w.shape}")
    return psd_check(k - s * w - t * np.eye(k.shape[0]), tol)


def sweep_operator_inequalities(grid: int = 721, s: float = S_STAR, tol: float = INEQ_TOL):
    """Verify all eight operator inequalities on a uniform theta grid.

    Returns (all_hold, min_prep_t, min_meas_t, min_residual) where the
    residual is the smallest eigenvalue of K - sW - t*identity over the whole
    sweep.
    """
    min_resid = np.inf
    min_tp = np.inf
    min_tm = np.inf
    ok = True
    for theta in np.linspace(0.0, np.pi / 2, grid):
        min_tp = min(min_tp, prep_ineq_coeffs(theta, s).t)
        min_tm = min(min_tm, meas_ineq_coeffs(theta, s).t)
        for k, w, t in prep_ineq_operators(theta, s) + meas_ineq_operators(theta, s):
            resid = float(np.linalg.eigvalsh(k - s * w - t * np.eye(2))[0])
            min_resid = min(min_resid, resid)
            ok = ok and resid >= -tol
    return ok, float(min_tp), float(min_tm), float(min_resid)


@dataclass(frozen=True)
class FidelityReport:
    witness_value: float
    avg_fidelity: float
    aligning_unitary: np.ndarray


def _kabsch_so3(m: np.ndarray):
    """Maximize Tr(R m) over proper rotations R; returns (value, R)."""
    u, sv, vt = np.linalg.svd(m)
    d = np.sign(np.linalg.det(u @ vt))
    if d == 0:
        d = 1.0
    value = sv[0] + sv[1] + d * sv[2]
    r = (vt.T * np.array([1.0, 1.0, d])) @ u.T
    return float(value), r


def _su2_from_so3(r: np.ndarray) -> np.ndarray:
    """Lift a proper rotation to the SU(2) element conjugating Bloch vectors by it."""
    x, y, z, w = Rotation.from_matrix(r).as_quat()
    return w * ID2 - 1j * (x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z)


def _rac2_value_or_nan(strategy: Strategy, witness) -> float:
    if witness is None:
        if len(strategy.preparations) == 4 and len(strategy.measurements) == 2:
            witness = make_rac_witness(2)
        else:
            return float("nan")
    return witness_value(witness, strategy)


def _hermitian_basis(d: int):
    basis = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1
        basis.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = e[j, i] = 1
            basis.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = -1j
            e[j, i] = 1j
            basis.append(e)
    return basis


def _optimize_unitary(objective, d: int, restarts: int, rng) -> tuple:
    """Derivative-free maximization of ``objective(U)`` over d x d unitaries."""
    basis = _hermitian_basis(d)

    def neg(params):
        h = sum(p * b for p, b in zip(params, basis))
        return -objective(expm(1j * h))

    best_val, best_u = -np.inf, np.eye(d, dtype=complex)
    for _ in range(restarts):
        x0 = rng.normal(scale=1.0, size=len(basis))
        res = minimize(neg, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
        if -res.fun > best_val:
            best_val = -res.fun
            best_u = expm(1j * sum(p * b for p, b in zip(res.x, basis)))
    return best_val, best_u


def avg_fidelity_states(strategy: Strategy, ideal_states, restarts: int = 32, rng=None, witness: Witness | None = None) -> FidelityReport:
    """Mean fidelity of the preparations to pure references, maximized over
    unitary extraction channels.

    For qubits the optimum over the rotation group has a closed form: with
    M = sum_x m_x n_x^T built from actual (m) and ideal (n) Bloch vectors,
    max_R Tr(RM) is the sum of singular values with the smallest one signed
    by det. Higher dimensions fall back to a derivative-free local search
    with random restarts.
    """
    ideal_states = list(ideal_states)
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if len(ideal_states) != len(strategy.preparations):
        raise ValueError("number of ideal states differs from preparations")
    d = strategy.dim
    if any(s.dim != d for s in ideal_states):
        raise DimensionError("ideal state dimension differs from strategy")
    if any(not s.is_pure() for s in ideal_states):
        raise ValueError("ideal reference states must be pure")
    nx = len(ideal_states)
    if d == 2:
        m = sum(
            np.outer(state_to_bloch(actual), state_to_bloch(ideal))
            for actual, ideal in zip(strategy.preparations, ideal_states)
        )
        value, r = _kabsch_so3(m)
        fid = 0.5 + value / (2 * nx)
        unitary = _su2_from_so3(r)
    else:
        rng = np.random.default_rng(rng)
        rhos = [p.rho for p in strategy.preparations]
        ideals = [s.rho for s in ideal_states]

        def objective(u):
            return sum(
                np.trace(ideal @ u @ rho @ u.conj().T).real for rho, ideal in zip(rhos, ideals)
            ) / nx

        fid, unitary = _optimize_unitary(objective, d, restarts, rng)
    return FidelityReport(
        witness_value=_rac2_value_or_nan(strategy, witness),
        avg_fidelity=float(min(max(fid, 0.0), 1.0)),
        aligning_unitary=unitary,
    )


def avg_fidelity_measurements(strategy: Strategy, ideal_povms, restarts: int = 32, rng=None, witness: Witness | None = None) -> FidelityReport:
    """Mean effect-wise fidelity of the measurements to ideal projective
    POVMs, maximized over unitary (hence unital) extraction channels.

    Each term is Tr(P_yb U E_yb U^dagger) for the ideal rank-one projector
    P_yb, and the total is divided by the number of effects. For qubits the
    rotation optimum is closed-form as in the state case.
    """
    ideal_povms = list(ideal_povms)
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if len(ideal_povms) != len(strategy.measurements):
        raise ValueError("number of ideal POVMs differs from measurements")
    d = strategy.dim
    if any(p.dim != d for p in ideal_povms):
        raise DimensionError("ideal POVM dimension differs from strategy")
    pairs = []
    for actual, ideal in zip(strategy.measurements, ideal_povms):
        if actual.n_outcomes != ideal.n_outcomes:
            raise ValueError("outcome counts differ between actual and ideal POVMs")
        pairs.extend(zip(actual.effects, ideal.effects))
    n_eff = len(pairs)
    if d == 2:
        trace_part = sum(float(np.trace(e).real) / 2 for e, _ in pairs)
        m = np.zeros((3, 3))
        for e, p in pairs:
            w = np.array([np.trace(e @ pauli).real for pauli in (SIGMA_X, SIGMA_Y, SIGMA_Z)])
            n_vec = np.array([np.trace(p @ pauli).real for pauli in (SIGMA_X, SIGMA_Y, SIGMA_Z)])
            m += np.outer(w, n_vec)
        value, r = _kabsch_so3(m)
        fid = (trace_part + value / 2) / n_eff
        unitary = _su2_from_so3(r)
    else:
        rng = np.random.default_rng(rng)

        def objective(u):
            return sum(
                np.trace(p @ u @ e @ u.conj().T).real for e, p in pairs
            ) / n_eff

        fid, unitary = _optimize_unitary(objective, d, restarts, rng)
    return FidelityReport(
        witness_value=_rac2_value_or_nan(strategy, witness),
        avg_fidelity=float(min(max(fid, 0.0), 1.0)),
        aligning_unitary=unitary,
    )


def conjectured_states_strategy(phi: float) -> Strategy:
    """Explicit family interpolating between the tight strategies.

    With tan(phi) = sin(2 theta): preparations |0>, cos|0>+sin|1>,
    cos|0>-sin|1>, |1>; observables cos(phi) sigma_z +- sin(phi) sigma_x.
    """
    if not 0.0 <= phi <= np.pi / 4 + 1e-12:
        raise ValueError(f"phi {phi} outside [0, pi/4]")
    theta = 0.5 * np.arcsin(min(np.tan(phi), 1.0))
    ct, st = np.cos(theta), np.sin(theta)
    states = (
        pure_state([1, 0]),
        pure_state([ct, st]),
        pure_state([ct, -st]),
        pure_state([0, 1]),
    )
    meas = tuple(
        povm_from_observable(Observable(np.cos(phi) * SIGMA_Z + sign * np.sin(phi) * SIGMA_X))
        for sign in (1, -1)
    )
    return Strategy(states, meas)


def conjectured_curve_states(phi: float) -> tuple:
    """Closed-form (A2, F) along the state-fidelity boundary curve."""
    if not 0.0 <= phi <= np.pi / 4 + 1e-12:
        raise ValueError(f"phi {phi} outside [0, pi/4]")
    a2 = 0.5 + 0.25 * np.sqrt(1 + np.tan(phi) ** 2)
    fid = 0.25 * (3 + np.tan(phi))
    return float(a2), float(fid)


def conjectured_meas_strategy(theta: float) -> Strategy:
    """Explicit family along the measurement-fidelity boundary.

    M_0 = sigma_z; M_1 = eta sigma_x + (1 - eta) identity with
    eta = tan(2 theta); preparations are the corresponding optimal states.
    """
    if not 0.0 <= theta <= np.pi / 8 + 1e-12:
        raise ValueError(f"theta {theta} outside [0, pi/8]")
    eta = np.tan(2 * theta)
    ct, st = np.cos(theta), np.sin(theta)
    states = (
        pure_state([ct, st]),
        pure_state([ct, -st]),
        pure_state([st, ct]),
        pure_state([-st, ct]),
    )
    meas = (
        povm_from_observable(Observable(SIGMA_Z)),
        povm_from_observable(Observable(eta * SIGMA_X + (1 - eta) * ID2)),
    )
    return Strategy(states, meas)


def conjectured_curve_meas(theta: float) -> tuple:
    """(A2, F) along the measurement boundary, evaluated directly on the
    constructed strategy (closed-form rotation optimum, no sampling)."""
    strategy = conjectured_meas_strategy(theta)
    from .scenario import ideal_rac2_strategy

    ideal = ideal_rac2_strategy()
    report = avg_fidelity_measurements(strategy, ideal.measurements)
    a2 = witness_value(make_rac_witness(2), strategy)
    return float(a2), report.avg_fidelity
