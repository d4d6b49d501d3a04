import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from tridens import (
    DiscreteMeasure,
    MarchenkoPastur,
    ParameterError,
    Semicircle,
    cdf,
    kolmogorov_distance,
    limit_matrix_mp,
    make_rng,
    reference_density,
    spectral_measure,
)
from tridens.measures import _mp_panels

TAUS = [0.05, 0.25, 0.5, 1.0]


def mp_quad(tau, x, power=0):
    """int_{lo}^{x} t**power * density(t) dt by scipy's algebraic-weight quadrature (independent oracle)."""
    lo, hi = (math.sqrt(tau) - 1) ** 2, (math.sqrt(tau) + 1) ** 2
    x = min(x, hi)
    if x <= lo:
        return 0.0
    if tau == 1.0:
        f = lambda t: t**power * math.sqrt(hi - t) / (2 * math.pi * tau)
        val, _ = integrate.quad(f, lo, x, weight="alg", wvar=(-0.5, 0.0), epsabs=1e-13, epsrel=1e-12)
    else:
        f = lambda t: t**power * math.sqrt(hi - t) / (2 * math.pi * tau * t)
        val, _ = integrate.quad(f, lo, x, weight="alg", wvar=(0.5, 0.0), epsabs=1e-13, epsrel=1e-12)
    return val


def test_semicircle_values():
    sc = Semicircle()
    assert cdf(sc, 0.0) == pytest.approx(0.5, abs=1e-15)
    assert cdf(sc, 2.0) == 1.0 and cdf(sc, -2.0) == 0.0
    assert reference_density(sc, 0.0) == pytest.approx(1 / math.pi, abs=1e-15)
    assert reference_density(sc, 2.0) == 0.0 and reference_density(sc, -2.0) == 0.0
    assert reference_density(sc, 3.0) == 0.0


def test_semicircle_cdf_against_quadrature():
    sc = Semicircle()
    for x in np.linspace(-2, 2, 21):
        ref, _ = integrate.quad(lambda t: math.sqrt(4 - t * t) / (2 * math.pi), -2, x, epsabs=1e-14)
        assert cdf(sc, x) == pytest.approx(ref, abs=1e-10)


def test_marchenko_pastur_values():
    mp = MarchenkoPastur(1.0)
    assert reference_density(mp, 2.0) == pytest.approx(1 / (2 * math.pi), abs=1e-15)
    assert mp.lower == 0.0 and mp.upper == 4.0
    for tau in TAUS:
        law = MarchenkoPastur(tau)
        assert cdf(law, law.upper) == 1.0 and cdf(law, law.lower) == 0.0
    with pytest.raises(ParameterError):
        MarchenkoPastur(0.0)
    with pytest.raises(ParameterError):
        MarchenkoPastur(1.5)


def test_mp1_midpoint_cdf():
    value = cdf(MarchenkoPastur(1.0), 2.0)
    assert value == pytest.approx(0.5 + 1 / math.pi, abs=1e-10)
    # Monte Carlo with x = u**2, which removes the inverse square root at the hard edge
    u = make_rng(2024).uniform(0.0, math.sqrt(2.0), size=10**7)
    mc = math.sqrt(2.0) * np.mean(np.sqrt(4 - u * u) / math.pi)
    assert abs(value - mc) <= 1e-4


@pytest.mark.parametrize("tau", TAUS)
def test_mp_cdf_against_quadrature(tau):
    law = MarchenkoPastur(tau)
    for x in np.linspace(law.lower, law.upper, 17)[1:-1]:
        assert cdf(law, x) == pytest.approx(mp_quad(tau, x), abs=1e-10)


@pytest.mark.parametrize("tau", TAUS)
def test_densities_integrate_to_one(tau):
    assert abs(mp_quad(tau, 10.0) - 1) <= 1e-10
    _, cum = _mp_panels(tau)
    assert abs(cum[-1] - 1) <= 1e-10


@pytest.mark.parametrize("tau", TAUS)
def test_mp_mean_and_variance(tau):
    mean = mp_quad(tau, 10.0, 1)
    second = mp_quad(tau, 10.0, 2)
    assert mean == pytest.approx(1.0, abs=1e-8)
    assert second - mean**2 == pytest.approx(tau, abs=1e-8)
    # limit matrix moments: d_1 = 1 and d_1**2 + c_1**2 = 1 + tau
    m = spectral_measure(limit_matrix_mp(6, tau))
    assert m.moment(1) == pytest.approx(mean, abs=1e-8)
    assert m.moment(2) == pytest.approx(second, abs=1e-8)


@pytest.mark.parametrize("law", [Semicircle(), MarchenkoPastur(0.3), MarchenkoPastur(1.0)])
def test_cdf_monotone(law):
    grid = np.linspace(law.lower - 1, law.upper + 1, 10**4)
    F = np.asarray(cdf(law, grid))
    assert np.all(np.diff(F) >= 0)
    assert np.all(F[grid <= law.lower] == 0) and np.all(F[grid >= law.upper] == 1)


def test_discrete_cdf_right_continuous():
    m = DiscreteMeasure([0.0, 1.0], [0.25, 0.75])
    assert cdf(m, -0.1) == 0.0 and cdf(m, 0.0) == 0.25 and cdf(m, 0.999) == 0.25 and cdf(m, 1.0) == 1.0


def test_distance_examples():
    m = DiscreteMeasure([0.0, 1.0], [0.5, 0.5])
    assert kolmogorov_distance(m, m) == 0.0
    assert kolmogorov_distance(DiscreteMeasure([0.0], [1.0]), DiscreteMeasure([1.0], [1.0])) == 1.0


def test_two_point_vs_semicircle_grid_scan():
    m = DiscreteMeasure([-1.0, 1.0], [0.5, 0.5])
    exact = kolmogorov_distance(m, Semicircle())
    grid = np.linspace(-2, 2, 10**5 + 1)
    scan = np.max(np.abs(m.cdf(grid) - np.asarray(Semicircle().cdf(grid))))
    assert abs(exact - scan) <= 1e-6
    assert exact == pytest.approx(0.5 - Semicircle().cdf(-1.0), abs=1e-15)


def measure_strategy(lo=-3.0, hi=3.0, max_atoms=12):
    return st.lists(st.tuples(st.floats(lo, hi), st.floats(0.01, 1.0)), min_size=1, max_size=max_atoms).map(
        lambda pairs: DiscreteMeasure.from_unsorted([p[0] for p in pairs], [p[1] for p in pairs])
    )


def scan_distance(m, law):
    grid = np.concatenate([np.linspace(law.lower - 0.5, law.upper + 0.5, 4001), m.atoms, m.atoms - 1e-12])
    return float(np.max(np.abs(m.cdf(grid) - np.asarray(law.cdf(grid)))))


@settings(max_examples=40, deadline=None)
@given(m=measure_strategy(), law=st.sampled_from([Semicircle(), MarchenkoPastur(0.5)]))
def test_exact_distance_dominates_scan(m, law):
    exact = kolmogorov_distance(m, law)
    assert 0 <= exact <= 1
    assert exact >= scan_distance(m, law) - 1e-9
    # the supremum is attained at an atom, from one side
    assert exact <= scan_distance(m, law) + 1e-9


@settings(max_examples=60, deadline=None)
@given(m1=measure_strategy(), m2=measure_strategy(), m3=measure_strategy())
def test_symmetry_and_triangle(m1, m2, m3):
    d12, d21 = kolmogorov_distance(m1, m2), kolmogorov_distance(m2, m1)
    assert d12 == d21
    assert kolmogorov_distance(m1, m3) <= d12 + kolmogorov_distance(m2, m3) + 1e-15
    sc = Semicircle()
    assert kolmogorov_distance(m1, sc) == kolmogorov_distance(sc, m1)
    assert kolmogorov_distance(m1, m3) <= kolmogorov_distance(m1, sc) + kolmogorov_distance(sc, m3) + 1e-12


def test_continuous_pair():
    sc, mp = Semicircle(), MarchenkoPastur(0.5)
    grid = np.linspace(-2, 3, 10**5)
    scan = np.max(np.abs(np.asarray(sc.cdf(grid)) - np.asarray(mp.cdf(grid))))
    d = kolmogorov_distance(sc, mp)
    assert d == kolmogorov_distance(mp, sc)
    assert scan - 1e-12 <= d <= scan + 1e-6
    assert kolmogorov_distance(sc, sc) == 0.0


def test_measure_validation():
    with pytest.raises(ParameterError):
        DiscreteMeasure([1.0, 0.0], [0.5, 0.5])
    with pytest.raises(ParameterError):
        DiscreteMeasure([0.0, 1.0], [0.5, 0.6])
    with pytest.raises(ParameterError):
        DiscreteMeasure([0.0, 1.0], [-0.5, 1.5])
    with pytest.raises(ParameterError):
        DiscreteMeasure([], [])
    tiny = DiscreteMeasure([0.0, 1.0], [1 - 1e-17, 1e-17])
    assert len(tiny) == 2


def test_measure_serialisation():
    m = DiscreteMeasure.from_unsorted([0.3, -1.0, 0.3, 2.5], [1, 1, 1, 1])
    assert m.atoms.tolist() == [-1.0, 0.3, 2.5] and m.weights.tolist() == [0.25, 0.5, 0.25]
    back = DiscreteMeasure.from_json(m.to_json())
    assert np.array_equal(back.atoms, m.atoms) and np.array_equal(back.weights, m.weights)
    assert set(json.loads(m.to_json())) == {"atoms", "weights"}
    lines = m.to_csv().splitlines()
    assert lines[0] == "atom,weight" and len(lines) == 4
    with pytest.raises(ParameterError):
        DiscreteMeasure.from_dict({"atoms": [1.0]})
