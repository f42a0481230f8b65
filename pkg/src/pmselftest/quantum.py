"""Quantum objects: states, observables, POVMs, channels, random sampling.

Qubit objects support a Bloch-vector parameterization; channels are stored in
Kraus form so that trace preservation and unitality reduce to single identity
checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError
from .linalg import as_complex_matrix, as_hermitian, min_eigenvalue

TRACE_TOL = 1e-10
PSD_TOL = 1e-10
PURITY_TOL = 1e-9
SPECTRUM_TOL = 1e-9

ID2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


@dataclass(frozen=True)
class State:
    """Density operator with unit trace and nonnegative spectrum."""

    rho: np.ndarray

    def __post_init__(self):
        rho = as_hermitian(self.rho)
        tr = np.trace(rho).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density operator trace {tr} != 1")
        if min_eigenvalue(rho) < -PSD_TOL:
            raise ValueError("density operator is not positive semidefinite")
        d = rho.shape[0]
        purity = np.trace(rho @ rho).real
        if not (1.0 / d - PURITY_TOL <= purity <= 1.0 + PURITY_TOL):
            raise ValueError(f"purity {purity} outside [1/{d}, 1]")
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    @property
    def purity(self) -> float:
        return float(np.trace(self.rho @ self.rho).real)

    def is_pure(self, tol: float = PURITY_TOL) -> bool:
        return self.purity >= 1.0 - tol


@dataclass(frozen=True)
class Observable:
    """Binary-outcome observable M = M^0 - M^1 with spectrum in [-1, 1]."""

    mat: np.ndarray

    def __post_init__(self):
        mat = as_hermitian(self.mat)
        vals = np.linalg.eigvalsh(mat)
        if vals[0] < -1.0 - SPECTRUM_TOL or vals[-1] > 1.0 + SPECTRUM_TOL:
            raise ValueError(f"observable spectrum [{vals[0]}, {vals[-1]}] outside [-1, 1]")
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True)
class Povm:
    """Positive effects, one per outcome, summing to the identity."""

    effects: tuple

    def __post_init__(self):
        effects = tuple(as_hermitian(e) for e in self.effects)
        if not effects:
            raise ValueError("POVM needs at least one effect")
        d = effects[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for e in effects:
            if e.shape[0] != d:
                raise DimensionError("POVM effects have mismatched dimensions")
            if min_eigenvalue(e) < -PSD_TOL:
                raise ValueError("POVM effect is not positive semidefinite")
            total += e
        if np.max(np.abs(total - np.eye(d))) > TRACE_TOL:
            raise ValueError("POVM effects do not sum to the identity")
        object.__setattr__(self, "effects", effects)

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.effects)


def povm_from_observable(obs: Observable) -> Povm:
    """Two-outcome POVM {(1+M)/2, (1-M)/2} of a binary observable."""
    eye = np.eye(obs.dim)
    return Povm(((eye + obs.mat) / 2, (eye - obs.mat) / 2))


def observable_from_povm(povm: Povm) -> Observable:
    if povm.n_outcomes != 2:
        raise ValueError("observable form requires a binary POVM")
    return Observable(povm.effects[0] - povm.effects[1])


@dataclass(frozen=True)
class Channel:
    """Completely positive trace-preserving map in Kraus form.

    ``heisenberg`` marks operators intended for dual (observable-side)
    application; both directions are available as methods regardless.
    """

    kraus: tuple
    heisenberg: bool = field(default=False)

    def __post_init__(self):
        kraus = tuple(as_complex_matrix(k) for k in self.kraus)
        if not kraus:
            raise ValueError("channel needs at least one Kraus operator")
        d = kraus[0].shape[0]
        total = sum(k.conj().T @ k for k in kraus)
        if np.max(np.abs(total - np.eye(d))) > TRACE_TOL:
            raise ValueError("Kraus operators are not trace preserving")
        object.__setattr__(self, "kraus", kraus)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Schroedinger picture: rho -> sum_i K_i rho K_i^dagger."""
        rho = as_complex_matrix(rho)
        return sum(k @ rho @ k.conj().T for k in self.kraus)

    def apply_dual(self, a: np.ndarray) -> np.ndarray:
        """Heisenberg picture: A -> sum_i K_i^dagger A K_i."""
        a = as_complex_matrix(a)
        return sum(k.conj().T @ a @ k for k in self.kraus)

    def is_unital(self, tol: float = TRACE_TOL) -> bool:
        eye = np.eye(self.dim)
        return bool(np.max(np.abs(self.apply(eye) - eye)) <= tol)


def bloch_to_state(m) -> State:
    """Qubit state (1 + m.sigma)/2 from a Bloch vector of norm <= 1."""
    m = np.asarray(m, dtype=float)
    if m.shape != (3,):
        raise ValueError("Bloch vector must have three components")
    if np.linalg.norm(m) > 1.0 + 1e-12:
        raise ValueError(f"invalid Bloch vector, norm {np.linalg.norm(m)} > 1")
    rho = (ID2 + m[0] * SIGMA_X + m[1] * SIGMA_Y + m[2] * SIGMA_Z) / 2
    return State(rho)


def state_to_bloch(state: State) -> np.ndarray:
    if state.dim != 2:
        raise DimensionError("Bloch vector is defined for qubits only")
    return np.array([np.trace(state.rho @ p).real for p in PAULIS])


def observable_to_bloch(obs: Observable) -> np.ndarray:
    """Bloch components of the traceless part of a qubit observable."""
    if obs.dim != 2:
        raise DimensionError("Bloch vector is defined for qubits only")
    return np.array([0.5 * np.trace(obs.mat @ p).real for p in PAULIS])


def pure_state(vec) -> State:
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return State(np.outer(v, v.conj()))


def dephasing_coefficient(theta: float, s: float) -> float:
    """Mixing weight c(theta) of the dephasing extraction channel."""
    if not 0.0 <= theta <= np.pi / 2:
        raise ValueError(f"theta {theta} outside [0, pi/2]")
    if s <= 0:
        raise ValueError("s must be positive")
    if theta <= np.pi / 4:
        return min(1.0, (s / 4) * np.sin(theta))
    return min(1.0, (s / 4) * np.cos(theta))


def dephasing_channel(theta: float, s: float) -> Channel:
    """Dephasing channel rho -> (1+c)/2 rho + (1-c)/2 G rho G.

    The dephasing axis G is sigma_x on [0, pi/4] and sigma_z on (pi/4, pi/2];
    the weight c(theta) follows ``dephasing_coefficient``.
    """
    c = dephasing_coefficient(theta, s)
    gamma = SIGMA_X if theta <= np.pi / 4 else SIGMA_Z
    return Channel((np.sqrt((1 + c) / 2) * ID2, np.sqrt((1 - c) / 2) * gamma))


def fidelity_to_pure(ideal: State, sigma: State) -> float:
    """Overlap Tr(sigma . ideal) with a pure reference state."""
    if not ideal.is_pure():
        raise ValueError(f"reference state is not pure (purity {ideal.purity})")
    if ideal.dim != sigma.dim:
        raise DimensionError("state dimensions differ")
    return float(np.trace(sigma.rho @ ideal.rho).real)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via complex-Gaussian QR with phase fixing."""
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_pure_state(d: int, rng: np.random.Generator) -> State:
    """Haar-distributed pure state (normalized complex Gaussian vector)."""
    if d < 2:
        raise DimensionError("dimension must be at least 2")
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return pure_state(v)


def random_projective_observable(d: int, rng: np.random.Generator, signs=None) -> Observable:
    """Random projective observable U diag(+-1) U^dagger with Haar U.

    ``signs`` fixes the rank split; by default each eigenvalue sign is drawn
    uniformly (degenerate +-identity outcomes included).
    """
    if d < 2:
        raise DimensionError("dimension must be at least 2")
    u = haar_unitary(d, rng)
    if signs is None:
        signs = rng.choice([1.0, -1.0], size=d)
    signs = np.asarray(signs, dtype=float)
    return Observable((u * signs) @ u.conj().T)


def operator_to_json(mat: np.ndarray) -> dict:
    mat = as_complex_matrix(mat)
    return {"dim": mat.shape[0], "re": mat.real.tolist(), "im": mat.imag.tolist()}


def operator_from_json(doc: dict) -> np.ndarray:
    if "bloch" in doc:
        m = np.asarray(doc["bloch"], dtype=float)
        return (ID2 + m[0] * SIGMA_X + m[1] * SIGMA_Y + m[2] * SIGMA_Z) / 2
    mat = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc.get("im", 0.0), dtype=float)
    if mat.shape != (doc["dim"], doc["dim"]):
        raise DimensionError("serialized matrix shape disagrees with declared dim")
    return mat
