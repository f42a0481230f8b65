"""Swap-operator SDP lower bounds on extraction fidelity.

The feasible set of the dimension-bounded moment-matrix hierarchy is realized
numerically: moment matrices of random d-dimensional strategies are sampled,
their affine span is orthonormalized, and the fidelity objective is minimized
over the PSD matrices in that span subject to a witness-value constraint.
The cone program itself is handed to cvxopt's interior-point SDP solver.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import cvxopt
import cvxopt.solvers
import numpy as np

from .errors import BudgetError, DimensionError, InfeasibleError
from .quantum import (
    SIGMA_X,
    bloch_to_state,
    random_projective_observable,
    random_pure_state,
)
from .scenario import Witness

# Word list defining the hierarchy level: identity, B0, B1, B0B1, B1B0.
Q_WORDS = ((), (0,), (1,), (0, 1), (1, 0))

SPAN_TOL = 1e-9
SPAN_STABLE = 20
SPAN_BUDGET = 2000
PSD_SAMPLE_TOL = 1e-9

# Bob's swap-building operators s_i0: s00 = 1 + B0, s10 = B1 - B1B0,
# written as (coefficient, word) lists.
_S_WORDS = {0: ((1.0, ()), (1.0, (0,))), 1: ((1.0, (1,)), (-1.0, (1, 0)))}


def reduce_word(word) -> tuple:
    """Cancel adjacent repeated letters using B_y^2 = identity."""
    out = []
    for a in word:
        if out and out[-1] == a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def _word_positions():
    """First (row-word, col-word) pair realizing each reduced product
    rev(q_i) q_k; every word reachable at this level appears."""
    table = {}
    for qi, wi in enumerate(Q_WORDS):
        for qk, wk in enumerate(Q_WORDS):
            w = reduce_word(tuple(reversed(wi)) + wk)
            table.setdefault(w, (qi, qk))
    return table


WORD_POS = _word_positions()


def _word_products(left, right):
    """Product of two (coefficient, word) combinations, reduced."""
    out = {}
    for c1, w1 in left:
        for c2, w2 in right:
            w = reduce_word(tuple(w1) + tuple(w2))
            out[w] = out.get(w, 0.0) + c1 * c2
    return tuple((c, w) for w, c in out.items() if abs(c) > 0)


def _dagger_words(ws):
    return tuple((c, tuple(reversed(w))) for c, w in ws)


# T_ik = s_k0^dagger s_i0 as word combinations; the pairing used in the
# objective is Tr(T_ik rho) <k|P|i>.
T_WORDS = {
    (i, k): _word_products(_dagger_words(_S_WORDS[k]), _S_WORDS[i])
    for i in range(2)
    for k in range(2)
}


def _word_matrix(word, observables) -> np.ndarray:
    d = observables[0].shape[0]
    m = np.eye(d, dtype=complex)
    for a in word:
        m = m @ observables[a]
    return m


def swap_T_operators(b0, b1):
    """The four operators T_ik = S_i^dagger S_k entering the swapped-state
    fidelity, with S_0 = 1 + B0 and S_1 = B1 - B1 B0.

    T00 = 2(1+B0), T01 = B1(1-B0) + B0B1(1-B0), T11 = 2(1-B0),
    T10 = B1(1+B0) - B0B1(1+B0); T00 + T11 = 4*identity always.

    The ancilla state after the swap has matrix elements
    sigma[k, i] = Tr(T_ik rho) / 4, so the extraction fidelity against a
    reference P is sum_ik Tr(T_ik rho) P[i, k] / 4. For Hermitian real-valued
    references the transposed pairing gives the same value.
    """
    b0 = np.asarray(b0, dtype=complex)
    b1 = np.asarray(b1, dtype=complex)
    if b0.shape != b1.shape:
        raise DimensionError(f"observable shapes differ: {b0.shape} vs {b1.shape}")
    eye = np.eye(b0.shape[0], dtype=complex)
    return {
        (0, 0): 2 * (eye + b0),
        (0, 1): b1 @ (eye - b0) + b0 @ b1 @ (eye - b0),
        (1, 1): 2 * (eye - b0),
        (1, 0): b1 @ (eye + b0) - b0 @ b1 @ (eye + b0),
    }


def swap_operator(b0, b1):
    """Full swap operator S = UVU on system (x) ancilla.

    U = 1 (x) |0><0| + B1 (x) |1><1|; V = (1+B0)/2 (x) 1 + (1-B0)/2 (x) sigma_x.
    For B0 = sigma_z, B1 = sigma_x this is the two-qubit swap.
    """
    b0 = np.asarray(b0, dtype=complex)
    b1 = np.asarray(b1, dtype=complex)
    if b0.shape != b1.shape:
        raise DimensionError(f"observable shapes differ: {b0.shape} vs {b1.shape}")
    d = b0.shape[0]
    eye = np.eye(d, dtype=complex)
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    u = np.kron(eye, p0) + np.kron(b1, p1)
    v = np.kron((eye + b0) / 2, np.eye(2)) + np.kron((eye - b0) / 2, SIGMA_X)
    return u @ v @ u


@dataclass(frozen=True)
class MomentMatrix:
    """Gram matrix chi[(i,j),(k,l)] = Tr[(Q_i R_j)^dagger Q_k R_l]."""

    chi: np.ndarray
    n_states: int

    @property
    def q_words(self) -> tuple:
        return Q_WORDS

    @property
    def r_words(self) -> tuple:
        return ("1",) + tuple(f"rho{x}" for x in range(self.n_states))

    @property
    def size(self) -> int:
        return self.chi.shape[0]


def moment_matrix_from_realization(observables, states) -> MomentMatrix:
    """Moment matrix of an explicit realization (two observables, a state
    list), built as a Gram matrix of the operators Q_i R_j under the
    Hilbert-Schmidt inner product, so positivity holds by construction."""
    mats = [np.asarray(o.mat if hasattr(o, "mat") else o, dtype=complex) for o in observables]
    if len(mats) != 2:
        raise ValueError("hierarchy words are defined for exactly two observables")
    rhos = [np.asarray(s.rho if hasattr(s, "rho") else s, dtype=complex) for s in states]
    d = mats[0].shape[0]
    r_ops = [np.eye(d, dtype=complex)] + rhos
    ops = [_word_matrix(w, mats) @ r for w in Q_WORDS for r in r_ops]
    v = np.stack([o.ravel() for o in ops])
    return MomentMatrix(chi=v.conj() @ v.T, n_states=len(rhos))


def sample_moment_matrix(d: int, n_states: int, rng) -> MomentMatrix:
    """Moment matrix of a random d-dimensional realization."""
    if d < 2:
        raise DimensionError("dimension must be at least 2")
    rng = np.random.default_rng(rng)
    observables = [random_projective_observable(d, rng).mat for _ in range(2)]
    states = [random_pure_state(d, rng).rho for _ in range(n_states)]
    return moment_matrix_from_realization(observables, states)


def _svec(a: np.ndarray) -> np.ndarray:
    return np.concatenate([a.real.ravel(), a.imag.ravel()])


def _unsvec(v: np.ndarray, n: int) -> np.ndarray:
    return v[: n * n].reshape(n, n) + 1j * v[n * n :].reshape(n, n)


@dataclass(frozen=True)
class AffineSpan:
    """Offset plus orthonormal basis spanning the sampled feasible set."""

    offset: np.ndarray
    basis: tuple
    n_samples: int

    @property
    def rank(self) -> int:
        return len(self.basis)


def _orthogonalize(v: np.ndarray, basis: list) -> np.ndarray:
    # two Gram-Schmidt passes for numerical orthogonality
    for _ in range(2):
        for b in basis:
            v = v - (b @ v) * b
    return v


def affine_span(samples=None, sampler=None, tol: float = SPAN_TOL, stable: int = SPAN_STABLE, budget: int = SPAN_BUDGET) -> AffineSpan:
    """Orthonormal affine basis of sampled moment matrices.

    Either a fixed list of samples (at least two) or a sampler callable;
    with a sampler, draws continue until ``stable`` consecutive samples add
    no new direction, or ``budget`` is exhausted (BudgetError).
    """
    basis = []
    if samples is not None:
        mats = [s.chi if isinstance(s, MomentMatrix) else np.asarray(s) for s in samples]
        if len(mats) < 2:
            raise ValueError("need at least two samples to span differences")
        offset = mats[0]
        for m in mats[1:]:
            v = _orthogonalize(_svec(m - offset), basis)
            nv = np.linalg.norm(v)
            if nv > tol:
                basis.append(v / nv)
        return AffineSpan(offset=offset, basis=tuple(basis), n_samples=len(mats))
    if sampler is None:
        raise ValueError("provide samples or a sampler")
    offset = sampler()
    if isinstance(offset, MomentMatrix):
        offset = offset.chi
    count = 0
    n = 1
    while count < stable:
        if n >= budget:
            raise BudgetError(f"span rank not stable after {budget} samples")
        s = sampler()
        if isinstance(s, MomentMatrix):
            s = s.chi
        n += 1
        v = _orthogonalize(_svec(s - offset), basis)
        nv = np.linalg.norm(v)
        if nv > tol:
            basis.append(v / nv)
            count = 0
        else:
            count += 1
    return AffineSpan(offset=offset, basis=tuple(basis), n_samples=n)


def _embed(a: np.ndarray) -> np.ndarray:
    """Real symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix."""
    n = a.shape[0]
    m = np.zeros((2 * n, 2 * n))
    m[:n, :n] = a.real
    m[n:, n:] = a.real
    m[:n, n:] = -a.imag
    m[n:, :n] = a.imag
    return m


@dataclass(frozen=True)
class SdpProblem:
    """min objective.y + const  s.t.  offset + sum_a y_a basis_a >= 0 (PSD)
    and ineq_g @ y >= ineq_h (elementwise)."""

    offset: np.ndarray
    basis: tuple
    objective: np.ndarray
    const: float = 0.0
    ineq_g: np.ndarray | None = None
    ineq_h: np.ndarray | None = None

    @property
    def psd_size(self) -> int:
        return self.offset.shape[0]


@dataclass(frozen=True)
class SdpResult:
    status: str
    value: float
    coords: np.ndarray
    gap: float
    solve_s: float = 0.0


def sdp_solve(problem: SdpProblem, max_iters: int = 200) -> SdpResult:
    """Interior-point solve of the affine-parameterized SDP.

    The Hermitian PSD constraint is passed through the real symmetric
    embedding, which is PSD iff the Hermitian matrix is.
    """
    n_var = len(problem.basis)
    c = cvxopt.matrix(np.asarray(problem.objective, dtype=float))
    gs = [cvxopt.matrix(np.stack([-_embed(b).ravel() for b in problem.basis]).T)]
    hs = [cvxopt.matrix(_embed(problem.offset))]
    if problem.ineq_g is not None:
        gl = cvxopt.matrix(-np.atleast_2d(np.asarray(problem.ineq_g, dtype=float)))
        hl = cvxopt.matrix(-np.asarray(problem.ineq_h, dtype=float))
    else:
        gl = cvxopt.matrix(np.zeros((0, n_var)))
        hl = cvxopt.matrix(np.zeros(0))
    opts = {"show_progress": False, "maxiters": max_iters}
    t0 = time.perf_counter()
    sol = cvxopt.solvers.sdp(c, gl, hl, gs, hs, options=opts)
    dt = time.perf_counter() - t0
    status = sol["status"]
    coords = np.array(sol["x"]).ravel() if sol["x"] is not None else np.full(n_var, np.nan)
    value = (sol["primal objective"] + problem.const) if sol["primal objective"] is not None else np.nan
    gap = sol["gap"] if sol["gap"] is not None else np.nan
    return SdpResult(status=status, value=float(value), coords=coords, gap=float(gap), solve_s=dt)


def lambda_max_sdp(a, max_iters: int = 200) -> SdpResult:
    """Largest eigenvalue of a Hermitian matrix via min t, t*1 - A >= 0.

    Exists as an independently checkable exercise of the solver path; the
    oracle is a direct eigenvalue computation.
    """
    a = np.asarray(a, dtype=complex)
    problem = SdpProblem(
        offset=-a,
        basis=(np.eye(a.shape[0], dtype=complex),),
        objective=np.array([1.0]),
    )
    return sdp_solve(problem, max_iters=max_iters)


def rac2_swap_ideal_states() -> tuple:
    """Ideal RAC preparations in the swap frame (B0 -> sigma_z, B1 -> sigma_x)."""
    s = 1 / np.sqrt(2)
    return tuple(
        bloch_to_state(m) for m in [(s, 0, s), (-s, 0, s), (s, 0, -s), (-s, 0, -s)]
    )


def example2_swap_ideal_states() -> tuple:
    """Ideal triangle preparations in the swap frame."""
    r3 = np.sqrt(3)
    return tuple(
        bloch_to_state(m) for m in [(r3 / 2, 0, 0.5), (-r3 / 2, 0, 0.5), (0, 0, -1)]
    )


class SwapSdp:
    """Reusable swap-method SDP for one witness: build the sampled span and
    objective once, then solve for many witness-value thresholds."""

    def __init__(self, witness: Witness, ideal_states, d: int = 2, rng=None,
                 span_budget: int = SPAN_BUDGET, span_stable: int = SPAN_STABLE):
        if witness.ny != 2 or witness.nb != 2:
            raise ValueError("swap method implemented for two binary measurements")
        ideal_states = list(ideal_states)
        if len(ideal_states) != witness.nx:
            raise ValueError("number of ideal states differs from witness inputs")
        if any(s.dim != 2 for s in ideal_states):
            raise DimensionError("swap objective expects qubit ideal references")
        self.witness = witness
        self.ideal_states = tuple(ideal_states)
        self.d = d
        rng = np.random.default_rng(rng)
        nx = witness.nx
        n_r = nx + 1
        size = len(Q_WORDS) * n_r
        span = affine_span(
            sampler=lambda: sample_moment_matrix(d, nx, rng),
            budget=span_budget,
            stable=span_stable,
        )
        self.span = span

        def pos(qi, qk, x):
            return (qi * n_r, qk * n_r + x + 1)

        c_obj = np.zeros((size, size), dtype=complex)
        for x in range(nx):
            p = self.ideal_states[x].rho
            for (i, k), words in T_WORDS.items():
                for coeff, w in words:
                    qi, qk = WORD_POS[w]
                    c_obj[pos(qi, qk, x)] += coeff * p[k, i] / (4 * nx)
        c_wit = np.zeros((size, size), dtype=complex)
        for x in range(nx):
            for y in range(witness.ny):
                c_wit[pos(0, y + 1, x)] += (witness.alpha[x, y, 0] - witness.alpha[x, y, 1]) / 2
        self._c_obj = c_obj
        self._c_wit = c_wit
        self._wit_const = float(witness.alpha.sum()) / 2

        basis_mats = [_unsvec(b, size) for b in span.basis]
        self._objective = np.array([np.real(np.sum(c_obj * b)) for b in basis_mats])
        self._obj_const = float(np.real(np.sum(c_obj * span.offset)))
        self._wit_vec = np.array([np.real(np.sum(c_wit * b)) for b in basis_mats])
        self._wit_offset = self._wit_const + float(np.real(np.sum(c_wit * span.offset)))
        self._basis_mats = tuple(basis_mats)

    @property
    def rank(self) -> int:
        return self.span.rank

    def objective_value(self, chi: np.ndarray) -> float:
        """Swap-extracted average fidelity of an explicit moment matrix."""
        return float(np.real(np.sum(self._c_obj * chi)))

    def witness_value(self, chi: np.ndarray) -> float:
        return self._wit_const + float(np.real(np.sum(self._c_wit * chi)))

    def problem(self, a_star: float) -> SdpProblem:
        return SdpProblem(
            offset=self.span.offset,
            basis=self._basis_mats,
            objective=self._objective,
            const=self._obj_const,
            ineq_g=self._wit_vec.reshape(1, -1),
            ineq_h=np.array([a_star - self._wit_offset]),
        )

    def fidelity_bound(self, a_star: float, max_iters: int = 200) -> SdpResult:
        result = sdp_solve(self.problem(a_star), max_iters=max_iters)
        if result.status == "primal infeasible":
            raise InfeasibleError(f"no moment matrix in the span reaches witness value {a_star}")
        return result


def swap_fidelity_bound(witness: Witness, ideal_states, a_star: float, d: int = 2, rng=None) -> float:
    """One-shot lower bound on the extraction fidelity at witness value a_star."""
    return SwapSdp(witness, ideal_states, d=d, rng=rng).fidelity_bound(a_star).value
