import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmselftest.errors import DimensionError
from pmselftest.quantum import (
    ID2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    Channel,
    Observable,
    Povm,
    State,
    bloch_to_state,
    dephasing_channel,
    dephasing_coefficient,
    fidelity_to_pure,
    haar_unitary,
    observable_from_povm,
    observable_to_bloch,
    operator_from_json,
    operator_to_json,
    povm_from_observable,
    pure_state,
    random_projective_observable,
    random_pure_state,
    state_to_bloch,
)
from pmselftest.fidelity import S_STAR


def test_state_validation():
    with pytest.raises(ValueError):
        State(np.diag([0.7, 0.7]))  # trace != 1
    with pytest.raises(ValueError):
        State(np.diag([1.5, -0.5]))  # not PSD
    s = State(np.eye(2) / 2)
    assert s.purity == pytest.approx(0.5)
    assert not s.is_pure()
    assert pure_state([1, 0]).is_pure()


def test_bloch_roundtrip():
    rng = np.random.default_rng(1)
    for _ in range(20):
        m = rng.normal(size=3)
        m /= np.linalg.norm(m) / rng.uniform(0, 1)
        s = bloch_to_state(m)
        assert np.allclose(state_to_bloch(s), m, atol=1e-12)
    with pytest.raises(ValueError):
        bloch_to_state((1.0, 1.0, 0.0))


def test_observable_spectrum_validated():
    with pytest.raises(ValueError):
        Observable(2 * SIGMA_Z)
    obs = Observable(0.3 * SIGMA_X + 0.2 * ID2)
    assert obs.dim == 2


def test_observable_bloch():
    obs = Observable((SIGMA_X + SIGMA_Z) / np.sqrt(2))
    assert np.allclose(observable_to_bloch(obs), [1 / np.sqrt(2), 0, 1 / np.sqrt(2)])


def test_povm_validation_and_observable_roundtrip():
    with pytest.raises(ValueError):
        Povm((np.eye(2), np.eye(2)))  # does not sum to identity
    with pytest.raises(ValueError):
        Povm((np.diag([1.5, 1.0]), np.diag([-0.5, 0.0])))  # negative effect
    obs = Observable(SIGMA_Z)
    povm = povm_from_observable(obs)
    assert povm.n_outcomes == 2
    back = observable_from_povm(povm)
    assert np.allclose(back.mat, SIGMA_Z)


def test_channel_trace_preserving_and_unital():
    ch = dephasing_channel(0.3, S_STAR)
    assert ch.is_unital()
    rho = pure_state([1, 1j]).rho
    out = ch.apply(rho)
    assert np.trace(out).real == pytest.approx(1.0)
    # dual agrees with adjoint: Tr(A . ch(rho)) == Tr(ch_dual(A) . rho)
    a = SIGMA_X + 0.5 * SIGMA_Z
    lhs = np.trace(a @ ch.apply(rho))
    rhs = np.trace(ch.apply_dual(a) @ rho)
    assert lhs == pytest.approx(rhs)
    with pytest.raises(ValueError):
        Channel((np.eye(2) * 0.5,))


def test_dephasing_coefficient_branches():
    assert dephasing_coefficient(0.0, S_STAR) == 0.0
    assert dephasing_coefficient(np.pi / 2, S_STAR) == pytest.approx(0.0, abs=1e-15)
    # s/4 sin(theta) caps at 1
    assert dephasing_coefficient(np.pi / 4, S_STAR) == 1.0
    with pytest.raises(ValueError):
        dephasing_coefficient(-0.1, S_STAR)
    with pytest.raises(ValueError):
        dephasing_coefficient(0.1, -1.0)


def test_dephasing_axis_switches_at_pi_4():
    low = dephasing_channel(0.2, S_STAR)
    high = dephasing_channel(1.2, S_STAR)
    gamma_low = low.kraus[1] / np.max(np.abs(low.kraus[1]))
    gamma_high = high.kraus[1] / np.max(np.abs(high.kraus[1]))
    assert np.allclose(np.abs(gamma_low), np.abs(SIGMA_X))
    assert np.allclose(np.abs(gamma_high), np.abs(SIGMA_Z))


def test_fidelity_to_pure():
    psi = pure_state([1, 0])
    assert fidelity_to_pure(psi, State(np.eye(2) / 2)) == pytest.approx(0.5)
    assert fidelity_to_pure(psi, psi) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        fidelity_to_pure(State(np.eye(2) / 2), psi)


def test_haar_unitary_is_unitary_and_deterministic():
    u1 = haar_unitary(4, np.random.default_rng(9))
    u2 = haar_unitary(4, np.random.default_rng(9))
    assert np.array_equal(u1, u2)
    assert np.allclose(u1 @ u1.conj().T, np.eye(4), atol=1e-12)


def test_random_projective_observable():
    rng = np.random.default_rng(0)
    for _ in range(10):
        m = random_projective_observable(3, rng).mat
        assert np.allclose(m @ m, np.eye(3), atol=1e-10)
    fixed = random_projective_observable(2, rng, signs=(1, -1)).mat
    assert np.trace(fixed).real == pytest.approx(0.0, abs=1e-12)


def test_random_pure_state_dim_guard():
    with pytest.raises(DimensionError):
        random_pure_state(1, np.random.default_rng(0))


def test_operator_json_roundtrip():
    rng = np.random.default_rng(3)
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    doc = operator_to_json(g)
    assert doc["dim"] == 3
    assert np.allclose(operator_from_json(doc), g)
    # Bloch shorthand
    m = operator_from_json({"bloch": [0, 0, 1]})
    assert np.allclose(m, np.diag([1.0, 0.0]))


@settings(deadline=None, max_examples=30)
@given(st.integers(min_value=0, max_value=10**6))
def test_random_pure_states_are_valid(seed):
    s = random_pure_state(2, np.random.default_rng(seed))
    assert s.is_pure()
    assert np.linalg.norm(state_to_bloch(s)) == pytest.approx(1.0, abs=1e-9)
