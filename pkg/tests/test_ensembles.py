import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tridens import (
    EnsembleSpec,
    ParameterError,
    ScalingRegime,
    TridiagonalMatrix,
    eigenvalues,
    limit_matrix_mp,
    limit_matrix_sc,
    make_rng,
    rescale_matrix,
    sample_gaussian_tridiag,
    sample_jacobi_tridiag,
    sample_laguerre_tridiag,
    spectral_measure,
)
from tridens.ensembles import (
    jacobi_beta_parameters,
    jacobi_entries,
    sample_batch,
    sample_jacobi_canonical,
)
from tridens.spectral import eigenvalues as eigs


def test_invalid_specs_raise():
    with pytest.raises(ParameterError):
        EnsembleSpec("jacobi", 2.0, 10, a=9.0, b=20.0)  # a must exceed (n-1) bp = 9
    with pytest.raises(ParameterError):
        EnsembleSpec("laguerre", 2.0, 10, a=5.0)
    with pytest.raises(ParameterError):
        EnsembleSpec("gaussian", 0.0, 3)
    with pytest.raises(ParameterError):
        EnsembleSpec("wishart", 2.0, 3)
    with pytest.raises(ParameterError):
        EnsembleSpec("gaussian", 2.0, 0)


def test_beta_parameters_match_the_model():
    spec = EnsembleSpec("jacobi", 2.0, 3, a=5.0, b=7.0)
    first, second = jacobi_beta_parameters(spec)
    # p1..p5: odd j-th ~ Beta(a-(j-1), b-(j-1)); even 2j ~ Beta((n-j), a+b-(n+j-1))
    np.testing.assert_allclose(first, [5, 2, 4, 1, 3])
    np.testing.assert_allclose(second, [7, 9, 6, 8, 5])


def test_jacobi_n1_is_first_canonical_moment():
    spec = EnsembleSpec("jacobi", 2.0, 1, a=3.0, b=4.0)
    T = sample_jacobi_tridiag(spec, make_rng(1))
    p = sample_jacobi_canonical(spec, make_rng(1), 1)
    assert T.n == 1 and T.diag[0] == p[0, 0]


def test_jacobi_small_entries_in_unit_interval():
    spec = EnsembleSpec("jacobi", 2.0, 2, a=10.0, b=10.0)
    for r in range(50):
        T = sample_jacobi_tridiag(spec, make_rng(2, r))
        assert np.all((T.diag >= 0) & (T.diag <= 1))
        assert np.all((T.offdiag > 0) & (T.offdiag <= 1))


def test_jacobi_entries_formula():
    p = np.array([0.3, 0.4, 0.6, 0.2, 0.5])
    d, c = jacobi_entries(p)
    np.testing.assert_allclose(d, [0.3, 0.4 * 0.7 + 0.6 * 0.6, 0.2 * 0.4 + 0.5 * 0.8])
    np.testing.assert_allclose(c, [math.sqrt(0.3 * 0.4 * 0.7), math.sqrt(0.6 * 0.6 * 0.2 * 0.4)])


def test_jacobi_mean_diagonal():
    spec = EnsembleSpec("jacobi", 2.0, 100, a=1e4, b=1e4)
    diag, _ = sample_batch(spec, make_rng(3), 1000)
    assert np.all(np.abs(diag.mean(axis=0) - 0.5) <= 0.01)


def test_gaussian_small_and_offdiag_mean():
    T = sample_gaussian_tridiag(EnsembleSpec("gaussian", 2.0, 1), make_rng(4))
    assert T.n == 1 and T.offdiag.size == 0
    n = 200
    _, c = sample_batch(EnsembleSpec("gaussian", 2.0, n), make_rng(5), 2000)
    ratio = (c**2 / (n - np.arange(1, n))).mean(axis=0)
    assert np.all(np.abs(ratio - 1) <= 0.05)


def test_laguerre_first_diagonal_mean():
    T = sample_laguerre_tridiag(EnsembleSpec("laguerre", 2.0, 1, a=3.0), make_rng(6))
    assert T.n == 1 and T.diag[0] > 0
    diag, off = sample_batch(EnsembleSpec("laguerre", 2.0, 100, a=200.0), make_rng(7), 1000)
    assert np.all(diag > 0) and np.all(off > 0)
    assert abs(diag[:, 0].mean() - 200) <= 5 * math.sqrt(200 / 1000)


def test_limit_matrices():
    assert limit_matrix_sc(2) == TridiagonalMatrix([0, 0], [1])
    assert limit_matrix_sc(1) == TridiagonalMatrix([0], [])
    m = spectral_measure(limit_matrix_sc(2))
    np.testing.assert_allclose(m.atoms, [-1, 1], atol=1e-15)
    np.testing.assert_allclose(m.weights, [0.5, 0.5], atol=1e-15)
    assert limit_matrix_mp(3, 0.25) == TridiagonalMatrix([1, 1.25, 1.25], [0.5, 0.5])
    assert limit_matrix_mp(1, 0.7) == TridiagonalMatrix([1], [])
    for n in (1, 4, 9):
        for tau in (0.1, 0.5, 1.0):
            assert spectral_measure(limit_matrix_mp(n, tau)).moment(1) == pytest.approx(1, abs=1e-12)
    for tau in (0.0, 1.5):
        with pytest.raises(ParameterError):
            limit_matrix_mp(3, tau)


def test_rescale_examples():
    T = TridiagonalMatrix([0.2, 0.3, 0.9], [0.1, 0.4])
    assert rescale_matrix(T, ScalingRegime("affine", scale=1.0, shift=0.0)) == T
    spec = EnsembleSpec("jacobi", 2.0, 3, a=50.0, b=50.0)
    assert rescale_matrix(T, ScalingRegime("LLN1", spec, tau=0.5)) == T
    spec = EnsembleSpec("jacobi", 2.0, 100, a=1e4, b=1e4)
    s, m = ScalingRegime("LLN2", spec, sigma=1.0).affine_params()
    assert s == pytest.approx(2 * math.sqrt(2e4 / 100)) and s == pytest.approx(28.2843, abs=1e-4)
    assert m == 0.5


def test_rescale_mismatch_and_bad_regimes():
    spec = EnsembleSpec("jacobi", 2.0, 4, a=50.0, b=50.0)
    with pytest.raises(ParameterError):
        rescale_matrix(TridiagonalMatrix([0.1, 0.2], [0.3]), ScalingRegime("LDP2", spec))
    with pytest.raises(ParameterError):
        ScalingRegime("LLN2", spec, sigma=-1.0)
    with pytest.raises(ParameterError):
        ScalingRegime("LLN1", spec, tau=2.0)
    with pytest.raises(ParameterError):
        ScalingRegime("LDP2", EnsembleSpec("gaussian", 2.0, 4))


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(1, 50),
    beta=st.sampled_from([0.5, 1.0, 2.0, 4.0]),
    seed=st.integers(0, 2**32),
    regime=st.sampled_from(["LLN2", "LLN1", "LDP2"]),
)
def test_spectrum_equivariance(n, beta, seed, regime):
    spec = EnsembleSpec("jacobi", beta, n, a=n * beta + 1.0, b=n * n * beta + 1.0)
    T = sample_jacobi_tridiag(spec, make_rng(seed))
    reg = ScalingRegime(regime, spec, sigma=1.0, tau=0.5)
    s, m = reg.affine_params()
    lam = np.linalg.eigvalsh(T.to_dense())
    got = np.linalg.eigvalsh(rescale_matrix(T, reg).to_dense())
    np.testing.assert_allclose(got, s * (lam - m), atol=1e-10 * max(1.0, s))


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(1, 200),
    beta=st.sampled_from([0.5, 1.0, 2.0, 4.0]),
    extra=st.floats(0.01, 50.0),
    seed=st.integers(0, 2**32),
)
def test_jacobi_spectrum_in_unit_interval(n, beta, extra, seed):
    floor = (n - 1) * beta / 2
    spec = EnsembleSpec("jacobi", beta, n, a=floor + extra, b=floor + 2 * extra)
    lam = eigs(sample_jacobi_tridiag(spec, make_rng(seed)))
    assert lam.min() >= -1e-12 and lam.max() <= 1 + 1e-12


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 100), beta=st.sampled_from([1.0, 2.0, 4.0]), seed=st.integers(0, 2**32))
def test_laguerre_positive_definite(n, beta, seed):
    spec = EnsembleSpec("laguerre", beta, n, a=(n - 1) * beta / 2 + 1.0)
    T = sample_laguerre_tridiag(spec, make_rng(seed))
    assert np.linalg.eigvalsh(T.to_dense()).min() > 0


def _median_deviation(spec, regime, target_d, target_c, k=3, replicas=20):
    devs = []
    for r in range(replicas):
        T = rescale_matrix(sample_jacobi_tridiag(spec, make_rng(99, (spec.n << 32) | r)), regime)
        devs.append(max(np.max(np.abs(T.diag[:k] - target_d)), np.max(np.abs(T.offdiag[:k] - target_c))))
    return float(np.median(devs))


def test_lln2_entrywise_limit():
    devs = []
    for n in (2**6, 2**9, 2**12):
        spec = EnsembleSpec("jacobi", 2.0, n, a=float(n * n), b=float(n * n))
        devs.append(_median_deviation(spec, ScalingRegime("LLN2", spec, sigma=1.0), 0.0, 1.0))
    assert devs[0] > devs[1] > devs[2]


def test_lln1_entrywise_limit():
    tau = 0.5
    lim = limit_matrix_mp(3, tau)
    target_d = np.array([1.0, 1 + tau, 1 + tau])
    devs = []
    for n in (2**6, 2**9, 2**12):
        spec = EnsembleSpec("jacobi", 2.0, n, a=2.0 * n, b=float(n * n))
        devs.append(_median_deviation(spec, ScalingRegime("LLN1", spec, tau=tau), target_d, lim.offdiag[0]))
    assert devs[0] > devs[1] > devs[2]


def test_gaussian_entrywise_limit():
    devs = []
    for n in (2**6, 2**9, 2**12):
        diag, off = sample_batch(EnsembleSpec("gaussian", 2.0, n), make_rng(11, n), 20)
        s = 1 / math.sqrt(n)
        devs.append(np.median(np.maximum(np.abs(s * diag[:, :3]).max(1), np.abs(s * off[:, :3] - 1).max(1))))
    assert devs[0] > devs[1] > devs[2]


def test_laguerre_entrywise_limit():
    tau = 0.5
    devs = []
    for n in (2**6, 2**9, 2**12):
        a = n / tau
        diag, off = sample_batch(EnsembleSpec("laguerre", 2.0, n, a=a), make_rng(12, n), 20)
        d_err = np.abs(diag[:, :3] / a - [1, 1 + tau, 1 + tau]).max(1)
        c_err = np.abs(off[:, :3] / a - math.sqrt(tau)).max(1)
        devs.append(np.median(np.maximum(d_err, c_err)))
    assert devs[0] > devs[1] > devs[2]


def test_even_index_resolution_matches_lln_normalisation():
    # b(1+sigma)/(n bp) p_{2k} -> 1 under the LLN2 scaling, pinning the even-index parameters
    n, sigma = 400, 1.0
    spec = EnsembleSpec("jacobi", 2.0, n, a=float(n * n), b=float(n * n))
    p = sample_jacobi_canonical(spec, make_rng(13), 200)
    scaled = spec.b * (1 + sigma) / (n * spec.bp) * p[:, 1:6:2].mean(axis=0)
    np.testing.assert_allclose(scaled, 1.0, atol=0.02)


def test_sampling_is_reproducible():
    spec = EnsembleSpec("jacobi", 1.0, 30, a=40.0, b=50.0)
    assert sample_jacobi_tridiag(spec, make_rng(5, 3)) == sample_jacobi_tridiag(spec, make_rng(5, 3))
    assert sample_jacobi_tridiag(spec, make_rng(5, 3)) != sample_jacobi_tridiag(spec, make_rng(5, 4))
