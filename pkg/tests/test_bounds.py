import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmselftest.bounds import (
    biased_bound,
    biased_max,
    biased_optimal_overlap,
    jordan_parameters,
    meas_compat_bound_2,
    meas_compat_bound_N,
    prep_compat_bound_2,
    prep_compat_bound_N,
    qutrit_bound,
    qutrit_max,
)
from pmselftest.errors import DimensionError
from pmselftest.quantum import (
    ID2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    Observable,
    State,
    bloch_to_state,
    haar_unitary,
    random_projective_observable,
    random_pure_state,
)
from pmselftest.scenario import ideal_rac2_strategy

Q2 = 0.5 * (1 + 1 / np.sqrt(2))


def test_prep_bound_ideal_states():
    rep = prep_compat_bound_2(ideal_rac2_strategy().preparations)
    assert rep.bound == pytest.approx(Q2, abs=1e-12)
    assert rep.beta == pytest.approx(4.0, abs=1e-12)
    assert rep.alpha == pytest.approx(0.0, abs=1e-12)


def test_prep_bound_saturating_family():
    # antipodal pure pairs at relative angle theta: beta = 4, alpha = 4cos(theta)
    for theta in np.linspace(0.01, np.pi - 0.01, 9):
        m01 = (np.cos(theta), 0.0, np.sin(theta))
        states = [
            bloch_to_state((1, 0, 0)),
            bloch_to_state(m01),
            bloch_to_state(tuple(-v for v in m01)),
            bloch_to_state((-1, 0, 0)),
        ]
        rep = prep_compat_bound_2(states)
        expected = 0.5 + (np.sqrt(1 + np.cos(theta)) + np.sqrt(1 - np.cos(theta))) / (4 * np.sqrt(2))
        assert rep.bound == pytest.approx(expected, abs=1e-12)
        assert rep.alpha == pytest.approx(4 * np.cos(theta), abs=1e-12)


def test_prep_bound_maximally_mixed():
    states = [State(np.eye(2) / 2)] * 4
    rep = prep_compat_bound_2(states)
    assert rep.bound == pytest.approx(0.5, abs=1e-12)


def test_prep_bound_input_checks():
    with pytest.raises(ValueError):
        prep_compat_bound_2([State(np.eye(2) / 2)] * 3)
    with pytest.raises(DimensionError):
        prep_compat_bound_2([State(np.eye(3) / 3)] * 4)


def test_meas_bound_ideal():
    obs = ideal_rac2_strategy().observables
    rep = meas_compat_bound_2(*obs)
    assert rep.bound == pytest.approx(Q2, abs=1e-12)
    assert rep.mu == pytest.approx(4.0, abs=1e-12)
    assert rep.eta_plus == pytest.approx(0.0, abs=1e-12)


def test_meas_bound_classical_pair():
    rep = meas_compat_bound_2(Observable(SIGMA_Z), Observable(SIGMA_Z))
    assert rep.bound == pytest.approx(0.75, abs=1e-12)


def test_meas_bound_trivial_measurement():
    # M1 = identity cannot help with the second bit
    rep = meas_compat_bound_2(Observable(SIGMA_Z), Observable(ID2))
    assert rep.bound == pytest.approx(0.75, abs=1e-12)


def test_prep_bound_N_matches_two_bit_case():
    rng = np.random.default_rng(2)
    for _ in range(25):
        states = [random_pure_state(2, rng) for _ in range(4)]
        assert prep_compat_bound_N(states, 2) == pytest.approx(
            prep_compat_bound_2(states).bound, abs=1e-10
        )


def test_meas_bound_N_matches_two_bit_case_for_traceless_pairs():
    # the N-bit bound assumes rank-one projective (traceless) observables;
    # there it coincides with the two-bit bound, whose trace terms vanish
    rng = np.random.default_rng(3)
    for _ in range(25):
        obs = [random_projective_observable(2, rng, signs=(1, -1)) for _ in range(2)]
        assert meas_compat_bound_N(obs) == pytest.approx(
            meas_compat_bound_2(*obs).bound, abs=1e-10
        )


def test_meas_bound_N_never_below_two_bit_bound():
    # for non-traceless observables the N-form is valid but weaker
    rng = np.random.default_rng(5)
    for _ in range(25):
        obs = [random_projective_observable(2, rng) for _ in range(2)]
        assert meas_compat_bound_N(obs) >= meas_compat_bound_2(*obs).bound - 1e-10


def test_three_bit_bounds_tight():
    expected = 0.5 * (1 + 1 / np.sqrt(3))
    obs = [Observable(p) for p in (SIGMA_X, SIGMA_Y, SIGMA_Z)]
    assert meas_compat_bound_N(obs) == pytest.approx(expected, abs=1e-12)
    # cube states aligned with the Pauli triple saturate the preparation bound
    r3 = 1 / np.sqrt(3)
    states = []
    for x in range(8):
        bits = [(x >> (2 - y)) & 1 for y in range(3)]
        states.append(bloch_to_state(tuple(r3 * (-1) ** b for b in bits)))
    assert prep_compat_bound_N(states, 3) == pytest.approx(expected, abs=1e-12)


def test_meas_bound_N_degenerate_pair():
    obs = [Observable(SIGMA_Z), Observable(SIGMA_Z)]
    assert meas_compat_bound_N(obs) == pytest.approx(0.75, abs=1e-12)


def test_prep_bound_N_input_checks():
    with pytest.raises(ValueError):
        prep_compat_bound_N([State(np.eye(2) / 2)] * 3, 2)


def test_biased_bound_optimal_pair_reaches_max():
    for q in np.linspace(0.0, 1.0, 11):
        ov = biased_optimal_overlap(q)
        ang = np.arccos(np.clip(ov, -1, 1))
        m0 = Observable(SIGMA_Z)
        m1 = Observable(np.cos(ang) * SIGMA_Z + np.sin(ang) * SIGMA_X)
        assert biased_bound(q, m0, m1) == pytest.approx(biased_max(q), abs=1e-12)


def test_biased_reduces_to_rac_at_half():
    assert biased_max(0.5) == pytest.approx(Q2, abs=1e-12)
    assert biased_optimal_overlap(0.5) == 0.0
    obs = ideal_rac2_strategy().observables
    assert biased_bound(0.5, *obs) == pytest.approx(Q2, abs=1e-12)


def test_biased_endpoints():
    assert biased_max(0.0) == pytest.approx(1.0)
    assert biased_max(1.0) == pytest.approx(1.0)
    assert biased_optimal_overlap(0.0) == pytest.approx(-1.0)
    assert biased_optimal_overlap(1.0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        biased_bound(-0.1, Observable(SIGMA_Z), Observable(SIGMA_X))


def test_qutrit_bound_values():
    assert qutrit_bound(np.arctan(2), 1, 1) == pytest.approx(qutrit_max(), abs=1e-12)
    assert qutrit_bound(np.arctan(0.5), 1, -1) == pytest.approx(qutrit_max(), abs=1e-12)
    assert qutrit_max() == pytest.approx((5 + np.sqrt(5)) / 8, abs=1e-15)
    # commuting blocks (alpha = 0) cannot beat the d = 3 classical bound
    assert qutrit_bound(0.0, 1, 1) == pytest.approx(0.75)
    assert qutrit_bound(0.0, 1, -1) == pytest.approx(0.875)
    with pytest.raises(ValueError):
        qutrit_bound(0.3, 2, 1)


def _jordan_pair(alpha, r, s, rng):
    b0 = np.zeros((3, 3), dtype=complex)
    b1 = np.zeros((3, 3), dtype=complex)
    b0[:2, :2] = SIGMA_Z
    c, sn = np.cos(2 * alpha), np.sin(2 * alpha)
    b1[:2, :2] = c * SIGMA_Z + sn * SIGMA_X
    b0[2, 2] = r
    b1[2, 2] = s
    u = haar_unitary(3, rng)
    return Observable(u @ b0 @ u.conj().T), Observable(u @ b1 @ u.conj().T)


def test_jordan_parameter_extraction():
    rng = np.random.default_rng(7)
    for alpha in (0.3, np.arctan(2) , 1.2):
        for r in (1, -1):
            for s in (1, -1):
                m0, m1 = _jordan_pair(alpha, r, s, rng)
                got_alpha, got_r, got_s = jordan_parameters(m0, m1)
                assert got_alpha == pytest.approx(alpha, abs=1e-9)
                assert (got_r, got_s) == (r, s)


def test_jordan_rejects_commuting_and_nonprojective():
    with pytest.raises(ValueError):
        jordan_parameters(
            Observable(np.diag([1.0, -1.0, 1.0])), Observable(np.diag([1.0, 1.0, -1.0]))
        )
    bad = Observable(np.diag([0.5, 1.0, -1.0]))
    with pytest.raises(ValueError):
        jordan_parameters(bad, Observable(np.diag([1.0, -1.0, 1.0])))


@settings(deadline=None, max_examples=40)
@given(st.integers(min_value=0, max_value=10**6))
def test_bounds_radicands_never_negative_for_valid_inputs(seed):
    rng = np.random.default_rng(seed)
    states = [random_pure_state(2, rng) for _ in range(4)]
    obs = [random_projective_observable(2, rng) for _ in range(2)]
    assert 0.5 <= prep_compat_bound_2(states).bound <= Q2 + 1e-9
    assert 0.5 <= meas_compat_bound_2(*obs).bound <= Q2 + 1e-9
