import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import ks_2samp

from spherical_ensembles.analytic import arcsine_cdf
from spherical_ensembles.eigen import eigenvalues_many
from spherical_ensembles.ensembles import RngState, sample, sample_batch, sample_gaussian, sample_spherical
from spherical_ensembles.exactseries import moment_gaussian_second
from spherical_ensembles.matrix import EnsembleSpec, SelfAdjointMatrix, frobenius_norm, frobenius_norm_sq
from spherical_ensembles.stats import ks_distance


def test_rng_state_validation():
    with pytest.raises(ValueError):
        RngState(-1)
    with pytest.raises(ValueError):
        RngState(2**64)
    with pytest.raises(ValueError):
        RngState(1, -1)
    assert RngState(5, 2).substream(3) == RngState(5, 5)


def test_determinism_bitwise():
    for spec in (EnsembleSpec.gaussian(4, 5, 2), EnsembleSpec.spherical(1, 3, r=2.0)):
        assert sample(spec, RngState(9, 4)) == sample(spec, RngState(9, 4))
        assert sample(spec, RngState(9, 4)) != sample(spec, RngState(9, 5))


def test_scalar_gaussian_variance():
    spec = EnsembleSpec.gaussian(2, 1, 1)
    x = np.array([m.diag[0] for m in sample_batch(spec, 10**5, RngState(11))])
    se = math.sqrt(2.0 / x.size)  # se of the variance estimate for a unit normal
    assert abs(x.var() - 1.0) <= 3 * se


@pytest.mark.parametrize("beta,q", [(1, 1), (2, 3), (4, 0.5)])
def test_entry_variances(beta, q):
    spec = EnsembleSpec.gaussian(beta, 3, q)
    mats = sample_batch(spec, 10**5, RngState(12, beta))
    diag = np.array([m.diag[0] for m in mats])
    off = np.array([m.off[0, -1] for m in mats])
    for values, target in ((diag, 2 / (beta * q)), (off, 1 / (beta * q))):
        v = float(np.mean(values**2))
        se = float(np.std(values**2, ddof=1) / math.sqrt(values.size))
        assert abs(v - target) <= 3 * se


def test_gaussian_second_moment_against_closed_form():
    spec = EnsembleSpec.gaussian(1, 2, 2)
    vals = np.array([frobenius_norm_sq(m) / 2 for m in sample_batch(spec, 40000, RngState(13))])
    exact = float(moment_gaussian_second(1, 2, 2))
    assert abs(vals.mean() - exact) <= 3 * vals.std(ddof=1) / math.sqrt(vals.size)


def test_spherical_norm_and_point_masses():
    spec = EnsembleSpec.spherical(2, 4, r=2.0)
    for m in sample_batch(spec, 50, RngState(14)):
        assert abs(frobenius_norm(m) - 2.0) <= 1e-12 * 2
    one = EnsembleSpec.spherical(2, 1, r=3.0)
    x = np.array([m.diag[0] for m in sample_batch(one, 10**4, RngState(15))])
    assert set(np.round(x, 12)) == {-3.0, 3.0}
    frac = float(np.mean(x > 0))
    assert abs(frac - 0.5) <= 3 * math.sqrt(0.25 / x.size)


def test_arcsine_histogram():
    spec = EnsembleSpec.spherical(2, 2, r_squared=2)
    lam = np.concatenate([s.values for s in eigenvalues_many(sample_batch(spec, 50000, RngState(16)), chunk=4096)])
    assert ks_distance(lam, lambda x: arcsine_cdf(x, math.sqrt(2))) < 0.01


@given(st.sampled_from([1, 2, 4]), st.integers(1, 6), st.floats(0.1, 50), st.integers(0, 2**32 - 1))
def test_radius_invariance(beta, dim, r, seed):
    m = sample_spherical(EnsembleSpec.spherical(beta, dim, r=r), RngState(seed))
    assert abs(frobenius_norm_sq(m) - r * r) <= 1e-10 * r * r


def test_sample_batch_contract():
    spec = EnsembleSpec.spherical(2, 3, r=1.0)
    assert sample_batch(spec, 1, RngState(3)) == [sample_spherical(spec, RngState(3, 0))]
    assert sample_batch(spec, 40, RngState(3), workers=1) == sample_batch(spec, 40, RngState(3), workers=4)
    with pytest.raises(ValueError):
        sample_batch(spec, 0, RngState(3))
    with pytest.raises(ValueError):
        sample_gaussian(spec, RngState(3))


@pytest.mark.slow
def test_full_spacing_batch_size():
    spec = EnsembleSpec.spherical(2, 100, r_squared=100)
    assert len(sample_batch(spec, 2000, RngState(17), workers=4)) == 2000


def _lambda_max_over_norm(spec, count, seed):
    mats = sample_batch(spec, count, RngState(seed))
    return np.array([s.values[-1] / frobenius_norm(m) for s, m in zip(eigenvalues_many(mats), mats)])


def test_scale_consistency_across_q():
    # lambda_max / |A| is a function of A/|A| only, so its law is q-free
    a = _lambda_max_over_norm(EnsembleSpec.gaussian(2, 4, 1), 4000, 18)
    b = _lambda_max_over_norm(EnsembleSpec.gaussian(2, 4, 9), 4000, 19)
    assert ks_2samp(a, b).pvalue > 0.001


def test_permutation_conjugation_invariance():
    spec = EnsembleSpec.spherical(1, 4, r=2.0)
    mats = sample_batch(spec, 4000, RngState(20))
    perm = np.eye(4)[[2, 0, 3, 1]]
    conj = [SelfAdjointMatrix.from_dense(perm @ m.to_dense() @ perm.T) for m in mats]
    top = np.array([s.values[-1] for s in eigenvalues_many(mats)])
    top_c = np.array([s.values[-1] for s in eigenvalues_many(conj)])
    # the same matrices conjugated: spectra coincide, and so do their laws
    assert np.allclose(top, top_c, atol=1e-12)
    other = np.array([s.values[-1] for s in eigenvalues_many(sample_batch(spec, 4000, RngState(21)))])
    assert ks_2samp(top_c, other).pvalue > 0.001
