import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmselftest.errors import DimensionError
from pmselftest.linalg import (
    MAX_DIM,
    as_complex_matrix,
    as_hermitian,
    dagger,
    eig_hermitian,
    eigenvalue_gap_2x2,
    hermiticity_defect,
    min_eigenvalue,
    psd_check,
)


def test_as_complex_matrix_rejects_nonsquare():
    with pytest.raises(DimensionError):
        as_complex_matrix(np.zeros((2, 3)))


def test_as_complex_matrix_rejects_oversize():
    with pytest.raises(DimensionError):
        as_complex_matrix(np.eye(MAX_DIM + 1))


def test_as_hermitian_symmetrizes_roundoff():
    a = np.array([[1.0, 1e-14], [0.0, 2.0]])
    h = as_hermitian(a)
    assert hermiticity_defect(h) == 0.0


def test_as_hermitian_rejects_large_defect():
    with pytest.raises(ValueError):
        as_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eig_hermitian_descending():
    vals, vecs = eig_hermitian(np.diag([1.0, 3.0, 2.0]))
    assert np.allclose(vals, [3.0, 2.0, 1.0])
    h = np.diag([1.0, 3.0, 2.0]).astype(complex)
    assert np.allclose(vecs @ np.diag(vals) @ vecs.conj().T, h)


def test_eigenvalue_gap_2x2_matches_spectrum():
    rng = np.random.default_rng(4)
    for _ in range(50):
        g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        h = (g + g.conj().T) / 2
        vals = np.linalg.eigvalsh(h)
        assert eigenvalue_gap_2x2(h) == pytest.approx(vals[1] - vals[0], abs=1e-12)


def test_eigenvalue_gap_rejects_other_dims():
    with pytest.raises(DimensionError):
        eigenvalue_gap_2x2(np.eye(3))


def test_psd_check():
    assert psd_check(np.diag([0.0, 1.0]), 0.0)
    assert not psd_check(np.diag([-1e-6, 1.0]), 1e-9)
    assert psd_check(np.diag([-1e-12, 1.0]), 1e-9)
    with pytest.raises(ValueError):
        psd_check(np.eye(2), -1.0)


def test_min_eigenvalue_and_dagger():
    assert min_eigenvalue(np.diag([2.0, -3.0])) == pytest.approx(-3.0)
    a = np.array([[1, 1j], [0, 1]])
    assert np.allclose(dagger(a), a.conj().T)


@settings(deadline=None, max_examples=25)
@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=10**6))
def test_gram_matrices_are_psd(d, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    assert psd_check(g @ g.conj().T, 1e-9)
