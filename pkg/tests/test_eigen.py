import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spherical_ensembles import eigen
from spherical_ensembles.eigen import (
    ConvergenceFailure,
    PairingFailure,
    eigenvalues,
    eigenvalues_many,
    householder_tridiagonalize,
    symmetric_eigh_native,
    tridiagonal_ql,
)
from spherical_ensembles.ensembles import RngState, sample_spherical
from spherical_ensembles.matrix import EnsembleSpec, Quaternion, SelfAdjointMatrix, frobenius_norm, frobenius_norm_sq
from spherical_ensembles.oracles import eigenvalues_bruteforce, moore_determinant

from conftest import random_matrix


def test_spec_examples():
    assert np.array_equal(eigenvalues(SelfAdjointMatrix(1, [3.0, 1.0, 2.0])).values, [1.0, 2.0, 3.0])
    swap = SelfAdjointMatrix.from_dense(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(eigenvalues(swap).values, [-1, 1], atol=1e-15)
    herm = SelfAdjointMatrix.from_dense(np.array([[0, 1j], [-1j, 0]]))
    for method in ("lapack", "native"):
        assert np.allclose(eigenvalues(herm, method).values, [-1, 1], atol=1e-15)


def test_spectrum_is_read_only_and_sorted():
    s = eigenvalues(random_matrix(4, 5, np.random.default_rng(0)))
    assert len(s) == 5 and np.all(np.diff(s.values) >= 0)
    with pytest.raises(ValueError):
        s.values[0] = 0.0


def test_householder_reduces_and_preserves():
    a = np.random.default_rng(1).standard_normal((7, 7))
    a = a + a.T
    d, e, q = householder_tridiagonalize(a)
    t = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    assert np.allclose(q.T @ a @ q, t, atol=1e-12)
    assert np.allclose(q.T @ q, np.eye(7), atol=1e-13)


def test_ql_on_known_tridiagonal():
    # the free-particle chain: eigenvalues 2 cos(k pi/(n+1))
    n = 12
    w, _ = tridiagonal_ql(np.zeros(n), np.ones(n - 1))
    exact = 2 * np.cos(np.arange(1, n + 1) * math.pi / (n + 1))
    assert np.allclose(np.sort(w), np.sort(exact), atol=1e-14)


def test_ql_budget(monkeypatch):
    monkeypatch.setattr(eigen, "SWEEPS_PER_DIM", 0)
    with pytest.raises(ConvergenceFailure):
        tridiagonal_ql([1.0, 2.0, 3.0], [1.0, 1.0])


def test_native_matches_lapack_with_vectors():
    a = np.random.default_rng(2).standard_normal((20, 20))
    a = a + a.T
    w, v = symmetric_eigh_native(a)
    assert np.allclose(w, np.linalg.eigvalsh(a), atol=1e-13)
    assert np.allclose(a @ v, v * w, atol=1e-12)


def test_pairing_failure_is_detected():
    with pytest.raises(PairingFailure):
        eigen._collapse(np.array([0.0, 1e-3, 1.0, 1.0]), 2, 1.0)
    with pytest.raises(ValueError):
        eigenvalues(SelfAdjointMatrix(1, [1.0]), method="magic")


@given(st.sampled_from([1, 2, 4]), st.integers(1, 8), st.integers(0, 2**32 - 1), st.sampled_from(["lapack", "native"]))
def test_trace_and_norm_identities(beta, dim, seed, method):
    a = random_matrix(beta, dim, np.random.default_rng(seed))
    s = eigenvalues(a, method)
    nrm = frobenius_norm(a)
    assert abs(s.values.sum() - a.trace()) <= 1e-9 * (1 + nrm)
    assert abs((s.values**2).sum() - frobenius_norm_sq(a)) <= 1e-8 * nrm**2
    assert s.residual <= 1e-10 * (1 + nrm)


@given(st.sampled_from([1, 2, 4]), st.integers(1, 6), st.floats(0.5, 10), st.integers(0, 2**32 - 1))
def test_spherical_constraint(beta, dim, r, seed):
    a = sample_spherical(EnsembleSpec.spherical(beta, dim, r=r), RngState(seed))
    assert abs((eigenvalues(a).values ** 2).sum() - r * r) <= 1e-8 * r * r


@given(st.sampled_from([1, 2, 4]), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_agrees_with_bruteforce_characteristic_roots(beta, dim, seed):
    a = random_matrix(beta, dim, np.random.default_rng(seed))
    assert np.allclose(eigenvalues(a).values, eigenvalues_bruteforce(a), atol=1e-8 * max(1.0, frobenius_norm(a)), rtol=0)


def test_moore_determinant_matches_lapack_det_for_complex():
    gen = np.random.default_rng(3)
    for beta in (1, 2):
        a = random_matrix(beta, 4, gen)
        def q(z):
            z = complex(z)
            return Quaternion(z.real, z.imag)

        d = a.to_dense()
        assert math.isclose(moore_determinant([[q(x) for x in row] for row in d]), float(np.real(np.linalg.det(d))), rel_tol=1e-10)


def test_many_matches_single():
    gen = np.random.default_rng(4)
    mats = [random_matrix(4, 5, gen) for _ in range(10)]
    for s, m in zip(eigenvalues_many(mats, chunk=3), mats):
        assert np.allclose(s.values, eigenvalues(m).values, atol=1e-13)
    assert eigenvalues_many([]) == []
