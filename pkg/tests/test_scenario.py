import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmselftest.errors import BudgetError, DimensionError
from pmselftest.quantum import Observable, State, povm_from_observable, SIGMA_X, SIGMA_Z
from pmselftest.scenario import (
    Strategy,
    Witness,
    classical_bound,
    ideal_example2_strategy,
    ideal_rac2_strategy,
    load_strategy,
    load_witness,
    make_biased_rac_witness,
    make_example2_witness,
    make_rac_witness,
    probability,
    save_strategy,
    strategy_from_json,
    strategy_to_json,
    witness_from_json,
    witness_to_json,
    witness_value,
)

Q2 = 0.5 * (1 + 1 / np.sqrt(2))


def test_witness_validation():
    with pytest.raises(ValueError):
        Witness(np.zeros((4, 2)))
    with pytest.raises(ValueError):
        Witness(np.full((2, 2, 2), np.inf))
    w = make_rac_witness(2)
    assert (w.nx, w.ny, w.nb) == (4, 2, 2)
    with pytest.raises(ValueError):
        w.alpha[0, 0, 0] = 1.0  # read-only


def test_strategy_validation():
    ideal = ideal_rac2_strategy()
    assert ideal.dim == 2
    with pytest.raises(DimensionError):
        Strategy(
            (State(np.eye(3) / 3),) + ideal.preparations[1:],
            ideal.measurements,
        )
    with pytest.raises(ValueError):
        Strategy((), ideal.measurements)


def test_probabilities_normalize():
    s = ideal_rac2_strategy()
    for x in range(4):
        for y in range(2):
            total = sum(probability(s, x, y, b) for b in range(2))
            assert total == pytest.approx(1.0, abs=1e-12)


def test_ideal_rac2_value():
    w = make_rac_witness(2)
    assert witness_value(w, ideal_rac2_strategy()) == pytest.approx(Q2, abs=1e-12)


def test_ideal_example2_value():
    w = make_example2_witness()
    assert witness_value(w, ideal_example2_strategy()) == pytest.approx(5.0, abs=1e-9)


def test_witness_value_alphabet_mismatch():
    w = make_rac_witness(3)
    with pytest.raises(ValueError):
        witness_value(w, ideal_rac2_strategy())


def test_classical_bounds():
    w = make_rac_witness(2)
    assert classical_bound(w, 2) == 0.75
    assert classical_bound(w, 3) == 0.875
    assert classical_bound(w, 4) == pytest.approx(1.0, abs=1e-12)
    e2 = make_example2_witness()
    assert classical_bound(e2, 2) == pytest.approx(1 + 2 * np.sqrt(3), abs=1e-12)


def test_classical_budget():
    with pytest.raises(BudgetError):
        classical_bound(make_rac_witness(8), 3)
    with pytest.raises(ValueError):
        classical_bound(make_rac_witness(2), 0)


def test_rac_witness_shape_and_normalization():
    for n in (2, 3, 4):
        w = make_rac_witness(n)
        assert w.alpha.shape == (2**n, n, 2)
        assert w.alpha.sum() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        make_rac_witness(1)
    with pytest.raises(ValueError):
        make_rac_witness(9)


def test_biased_witness_reduces_to_rac():
    assert np.allclose(make_biased_rac_witness(0.5).alpha, make_rac_witness(2).alpha)
    with pytest.raises(ValueError):
        make_biased_rac_witness(1.5)


def test_biased_classical_value():
    # deterministic strategies reach 1/2 + max(q, 1-q)/2
    for q in (0.0, 0.25, 0.5, 0.9):
        w = make_biased_rac_witness(q)
        expected = 0.5 + max(q, 1 - q) / 2
        assert classical_bound(w, 2) == pytest.approx(expected, abs=1e-12)


def test_witness_json_roundtrip(tmp_path):
    w = make_example2_witness()
    doc = witness_to_json(w)
    w2 = witness_from_json(doc)
    assert np.array_equal(w.alpha, w2.alpha)
    path = tmp_path / "w.json"
    with open(path, "w") as fh:
        json.dump(doc, fh)
    assert np.array_equal(load_witness(path).alpha, w.alpha)
    bad = dict(doc, nx=7)
    with pytest.raises(ValueError):
        witness_from_json(bad)


def test_strategy_json_roundtrip(tmp_path):
    s = ideal_rac2_strategy()
    s2 = strategy_from_json(strategy_to_json(s))
    for a, b in zip(s.preparations, s2.preparations):
        assert np.allclose(a.rho, b.rho, atol=1e-15)
    path = tmp_path / "s.json"
    save_strategy(s, path)
    s3 = load_strategy(path)
    w = make_rac_witness(2)
    assert witness_value(w, s3) == pytest.approx(Q2, abs=1e-12)


@settings(deadline=None, max_examples=20)
@given(st.integers(min_value=0, max_value=10**6))
def test_classical_bound_dominates_deterministic_strategies(seed):
    """Any deterministic encode/decode strategy is a feasible classical point."""
    rng = np.random.default_rng(seed)
    w = make_rac_witness(2)
    d = 2
    enc = rng.integers(d, size=w.nx)
    dec = rng.integers(w.nb, size=(d, w.ny))
    value = sum(w.alpha[x, y, dec[enc[x], y]] for x in range(w.nx) for y in range(w.ny))
    assert value <= classical_bound(w, d) + 1e-12


def test_classical_strategies_realizable_quantum():
    # the classical optimum is attained by a diagonal quantum strategy
    w = make_rac_witness(2)
    states = tuple(
        State(np.diag([1.0, 0.0]) if x in (0, 1) else np.diag([0.0, 1.0])) for x in range(4)
    )
    meas = tuple(povm_from_observable(Observable(SIGMA_Z)) for _ in range(2))
    assert witness_value(w, Strategy(states, meas)) == pytest.approx(0.75, abs=1e-12)
