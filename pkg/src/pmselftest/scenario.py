"""Prepare-and-measure scenarios: witnesses, strategies, classical bounds.

A witness is a dense coefficient table alpha[x, y, b] defining the linear
functional A = sum alpha[x, y, b] P(b|x, y); a strategy is a set of
preparations plus a set of POVMs in one declared dimension.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, DimensionError
from .quantum import (
    Povm,
    State,
    bloch_to_state,
    observable_from_povm,
    operator_from_json,
    operator_to_json,
    povm_from_observable,
    Observable,
    SIGMA_X,
    SIGMA_Z,
)

ENUMERATION_BUDGET = 10**8


@dataclass(frozen=True)
class Witness:
    """Coefficient table alpha with shape (n_inputs, n_measurements, n_outcomes)."""

    alpha: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=float)
        if a.ndim != 3 or min(a.shape) < 1:
            raise ValueError(f"coefficient table must be 3-dimensional, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("coefficient table contains non-finite entries")
        a = a.copy()
        a.flags.writeable = False
        object.__setattr__(self, "alpha", a)

    @property
    def nx(self) -> int:
        return self.alpha.shape[0]

    @property
    def ny(self) -> int:
        return self.alpha.shape[1]

    @property
    def nb(self) -> int:
        return self.alpha.shape[2]


@dataclass(frozen=True)
class Strategy:
    """Preparations and measurements sharing one Hilbert-space dimension."""

    preparations: tuple
    measurements: tuple

    def __post_init__(self):
        preps = tuple(self.preparations)
        meas = tuple(self.measurements)
        if not preps or not meas:
            raise ValueError("strategy needs at least one preparation and one measurement")
        d = preps[0].dim
        if any(p.dim != d for p in preps) or any(m.dim != d for m in meas):
            raise DimensionError("all strategy operators must share one dimension")
        object.__setattr__(self, "preparations", preps)
        object.__setattr__(self, "measurements", meas)

    @property
    def dim(self) -> int:
        return self.preparations[0].dim

    @property
    def observables(self) -> tuple:
        return tuple(observable_from_povm(m) for m in self.measurements)


def probability(strategy: Strategy, x: int, y: int, b: int) -> float:
    """Born probability P(b|x, y) = Tr(rho_x M_y^b)."""
    rho = strategy.preparations[x].rho
    effect = strategy.measurements[y].effects[b]
    return float(np.trace(rho @ effect).real)


def witness_value(witness: Witness, strategy: Strategy) -> float:
    """Evaluate A = sum alpha[x, y, b] P(b|x, y) on a strategy."""
    if len(strategy.preparations) != witness.nx or len(strategy.measurements) != witness.ny:
        raise ValueError("witness and strategy alphabets disagree")
    if any(m.n_outcomes != witness.nb for m in strategy.measurements):
        raise ValueError("witness and strategy outcome counts disagree")
    total = 0.0
    for x in range(witness.nx):
        for y in range(witness.ny):
            for b in range(witness.nb):
                a = witness.alpha[x, y, b]
                if a != 0.0:
                    total += a * probability(strategy, x, y, b)
    return total


def classical_bound(witness: Witness, d: int, budget: int = ENUMERATION_BUDGET) -> float:
    """Exact maximum of the witness over classical d-dimensional strategies.

    Enumerates every deterministic encoding E: inputs -> {1..d}; the optimal
    deterministic decoding for a fixed encoding is computed greedily per
    (message, y). Shared randomness cannot raise the maximum of a linear
    functional, so this equals C_d.
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    nx, ny, nb = witness.nx, witness.ny, witness.nb
    cost = (d ** nx) * d * ny * nb
    if cost > budget:
        raise BudgetError(f"classical enumeration needs {cost} branches, budget is {budget}")
    alpha = witness.alpha
    best = -np.inf
    for encoding in itertools.product(range(d), repeat=nx):
        enc = np.asarray(encoding)
        value = 0.0
        for m in range(d):
            rows = alpha[enc == m]  # (k, ny, nb)
            if rows.size:
                value += rows.sum(axis=0).max(axis=1).sum()
        best = max(best, value)
    return float(best)


def make_rac_witness(n: int) -> Witness:
    """N -> 1 random access code witness: alpha = 1/(N 2^N) on b = x_y."""
    if not 2 <= n <= 8:
        raise ValueError("RAC size must be between 2 and 8")
    nx = 2 ** n
    alpha = np.zeros((nx, n, 2))
    for x in range(nx):
        for y in range(n):
            bit = (x >> (n - 1 - y)) & 1
            alpha[x, y, bit] = 1.0 / (n * nx)
    return Witness(alpha)


def make_biased_rac_witness(q: float) -> Witness:
    """2 -> 1 RAC with score q/2 on x0 = x1 inputs and (1-q)/2 otherwise."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("bias q must lie in [0, 1]")
    alpha = np.zeros((4, 2, 2))
    for x0 in range(2):
        for x1 in range(2):
            x = 2 * x0 + x1
            r = q / 2 if x0 == x1 else (1 - q) / 2
            alpha[x, 0, x0] = r / 2
            alpha[x, 1, x1] = r / 2
    return Witness(alpha)


EXAMPLE2_CORRELATORS = np.array([[1.0, np.sqrt(3)], [1.0, -np.sqrt(3)], [-1.0, 0.0]])


def make_example2_witness() -> Witness:
    """Correlator witness A = sum c[x, y] E(x, y) with three preparations.

    The correlator form is expanded to outcome coefficients
    alpha[x, y, b] = c[x, y] * (-1)^b so there is a single evaluation path.
    """
    alpha = np.zeros((3, 2, 2))
    for x in range(3):
        for y in range(2):
            alpha[x, y, 0] = EXAMPLE2_CORRELATORS[x, y]
            alpha[x, y, 1] = -EXAMPLE2_CORRELATORS[x, y]
    return Witness(alpha)


def ideal_rac2_strategy() -> Strategy:
    """Optimal qubit strategy for the 2 -> 1 RAC.

    States are the sigma_x / sigma_z eigenstates; measurements are the two
    anti-commuting observables (sigma_x +- sigma_z)/sqrt(2).
    """
    states = tuple(
        bloch_to_state(m) for m in [(1, 0, 0), (0, 0, 1), (0, 0, -1), (-1, 0, 0)]
    )
    meas = tuple(
        povm_from_observable(Observable((SIGMA_X + sign * SIGMA_Z) / np.sqrt(2)))
        for sign in (1, -1)
    )
    return Strategy(states, meas)


def ideal_example2_strategy() -> Strategy:
    """Equilateral-triangle preparations and their optimal observables."""
    r3 = np.sqrt(3)
    states = tuple(
        bloch_to_state(m)
        for m in [(1, 0, 0), (-0.5, 0, r3 / 2), (-0.5, 0, -r3 / 2)]
    )
    n0 = np.array([0.5, 0.0, r3 / 2])
    n1 = np.array([r3 / 2, 0.0, -0.5])
    meas = tuple(
        povm_from_observable(Observable(n[0] * SIGMA_X + n[2] * SIGMA_Z))
        for n in (n0, n1)
    )
    return Strategy(states, meas)


def witness_to_json(witness: Witness) -> dict:
    return {
        "nx": witness.nx,
        "ny": witness.ny,
        "nb": witness.nb,
        "alpha": witness.alpha.tolist(),
    }


def witness_from_json(doc: dict) -> Witness:
    alpha = np.asarray(doc["alpha"], dtype=float)
    if alpha.shape != (doc["nx"], doc["ny"], doc["nb"]):
        raise ValueError("witness table shape disagrees with declared alphabet sizes")
    return Witness(alpha)


def strategy_to_json(strategy: Strategy) -> dict:
    return {
        "dim": strategy.dim,
        "preparations": [operator_to_json(p.rho) for p in strategy.preparations],
        "measurements": [
            [operator_to_json(e) for e in m.effects] for m in strategy.measurements
        ],
    }


def strategy_from_json(doc: dict) -> Strategy:
    preps = tuple(State(operator_from_json(p)) for p in doc["preparations"])
    meas = tuple(
        Povm(tuple(operator_from_json(e) for e in m)) for m in doc["measurements"]
    )
    return Strategy(preps, meas)


def save_strategy(strategy: Strategy, path) -> None:
    with open(path, "w") as fh:
        json.dump(strategy_to_json(strategy), fh, indent=1)


def load_strategy(path) -> Strategy:
    with open(path) as fh:
        return strategy_from_json(json.load(fh))


def load_witness(path) -> Witness:
    with open(path) as fh:
        return witness_from_json(json.load(fh))
