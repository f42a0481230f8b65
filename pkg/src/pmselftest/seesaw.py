"""Alternating (seesaw) optimization of witness values at fixed dimension.

Both half-steps are exact best responses: preparations are top-eigenvector
projectors, binary projective measurements are sign-space projectors.  Also
hosts the random-strategy region sweep used for the fidelity scatter plots.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import eig_hermitian
from .quantum import Povm, State, haar_unitary, random_pure_state
from .scenario import Strategy, Witness, witness_value
from .fidelity import avg_fidelity_measurements, avg_fidelity_states

CONVERGENCE_TOL = 1e-11
MAX_ITERS = 500
DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class SeesawResult:
    best_value: float
    best_strategy: Strategy
    iterations: int
    restart_values: tuple


def optimal_states_for_measurements(witness: Witness, povms) -> list:
    """Exact best-response preparations for fixed measurements.

    For each input x the payoff operator is G_x = sum_{y,b} alpha[x,y,b]
    M_y^b and the optimal preparation is a projector onto a top eigenvector.
    Fully degenerate G_x falls back to the first computational basis state.
    """
    povms = list(povms)
    d = povms[0].dim
    states = []
    for x in range(witness.nx):
        g = np.zeros((d, d), dtype=complex)
        for y, povm in enumerate(povms):
            for b, effect in enumerate(povm.effects):
                a = witness.alpha[x, y, b]
                if a != 0.0:
                    g += a * effect
        vals, vecs = eig_hermitian(g)
        if vals[0] - vals[-1] < DEGENERACY_TOL:
            v = np.zeros(d, dtype=complex)
            v[0] = 1.0
        else:
            v = vecs[:, 0]
        states.append(State(np.outer(v, v.conj())))
    return states


def optimal_measurements_for_states(witness: Witness, states) -> list:
    """Exact best-response projective measurements for fixed preparations.

    For measurement y, outcome b carries H_yb = sum_x alpha[x,y,b] rho_x and
    each eigenvector of the discriminating combination is assigned to the
    outcome with the largest diagonal payoff (ties toward smaller b, so a
    fully degenerate discriminator yields a deterministic outcome).
    """
    states = list(states)
    d = states[0].dim
    povms = []
    for y in range(witness.ny):
        hs = []
        for b in range(witness.nb):
            h = np.zeros((d, d), dtype=complex)
            for x, state in enumerate(states):
                a = witness.alpha[x, y, b]
                if a != 0.0:
                    h += a * state.rho
            hs.append(h)
        if witness.nb == 2:
            disc = hs[0] - hs[1]
        else:
            disc = sum((b + 1) * h for b, h in enumerate(hs))
        _, vecs = eig_hermitian(disc)
        effects = [np.zeros((d, d), dtype=complex) for _ in range(witness.nb)]
        for i in range(d):
            v = vecs[:, i]
            payoffs = [float((v.conj() @ h @ v).real) for h in hs]
            effects[int(np.argmax(payoffs))] += np.outer(v, v.conj())
        povms.append(Povm(tuple(effects)))
    return povms


def _random_start_povms(witness: Witness, d: int, rng: np.random.Generator) -> list:
    povms = []
    for _ in range(witness.ny):
        u = haar_unitary(d, rng)
        assignment = rng.integers(witness.nb, size=d)
        effects = [np.zeros((d, d), dtype=complex) for _ in range(witness.nb)]
        for i in range(d):
            effects[assignment[i]] += np.outer(u[:, i], u[:, i].conj())
        povms.append(Povm(tuple(effects)))
    return povms


def seesaw(witness: Witness, d: int, restarts: int = 64, max_iters: int = MAX_ITERS, rng=None, tol: float = CONVERGENCE_TOL) -> SeesawResult:
    """Alternate the two best responses from Haar-random starts.

    Each restart gets an independent derived RNG stream, so results are
    deterministic per master seed and independent of execution order.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    master = np.random.default_rng(rng)
    streams = master.spawn(restarts)
    best_value = -np.inf
    best_strategy = None
    best_iters = 0
    restart_values = []
    for stream in streams:
        povms = _random_start_povms(witness, d, stream)
        value = -np.inf
        states = optimal_states_for_measurements(witness, povms)
        iters = 0
        for iters in range(1, max_iters + 1):
            states = optimal_states_for_measurements(witness, povms)
            povms = optimal_measurements_for_states(witness, states)
            new_value = witness_value(witness, Strategy(tuple(states), tuple(povms)))
            if new_value - value < tol:
                value = max(value, new_value)
                break
            value = new_value
        restart_values.append(value)
        if value > best_value:
            best_value = value
            best_strategy = Strategy(tuple(states), tuple(povms))
            best_iters = iters
    return SeesawResult(
        best_value=float(best_value),
        best_strategy=best_strategy,
        iterations=best_iters,
        restart_values=tuple(restart_values),
    )


def region_sweep(witness: Witness, ideal_strategy: Strategy, samples: int, rng=None) -> list:
    """Random-preparation scatter of (value, state fidelity, measurement
    fidelity) with measurements chosen as the exact best response."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(rng)
    d = ideal_strategy.dim
    out = []
    for _ in range(samples):
        states = [random_pure_state(d, rng) for _ in range(witness.nx)]
        povms = optimal_measurements_for_states(witness, states)
        strategy = Strategy(tuple(states), tuple(povms))
        value = witness_value(witness, strategy)
        f_states = avg_fidelity_states(strategy, ideal_strategy.preparations, witness=witness)
        f_meas = avg_fidelity_measurements(strategy, ideal_strategy.measurements, witness=witness)
        out.append((float(value), f_states.avg_fidelity, f_meas.avg_fidelity))
    return out
