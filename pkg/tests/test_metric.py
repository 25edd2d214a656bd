import math

import mpmath as mp
import numpy as np
import pytest
from scipy import integrate

from rqi import metric
from rqi.errors import ContractError, DomainError, UnsupportedConfigurationError

O = np.zeros(4)


def ex(*v):
    return np.array(v, dtype=float)


def test_massless_spacelike_value():
    v = metric.kernel_eval(metric.MinkowskiMassless(1e-12), O, ex(0, 1, 0, 0))
    assert abs(v.value - 1 / (4 * math.pi ** 2)) < 1e-15 and not v.near_singular
    with pytest.raises(DomainError):
        metric.kernel_eval(metric.MinkowskiMassless(), O, O)
    assert metric.kernel_eval(metric.MinkowskiMassless(1e-8), O, ex(1, 1, 0, 0)).near_singular


def test_half_space_boundary():
    k = metric.HalfSpaceDirichlet(1e-10)
    bulk = abs(k.value(ex(0, 0, 0, 1), ex(0, 0.5, 0, 1)))
    assert abs(k.value(ex(0, 0, 0, 0), ex(0.1, 0.5, 0, 1))) <= 1e-10 * bulk
    assert abs(k.value(ex(0.1, 0.5, 0, 1), ex(0, 0, 0, 0))) <= 1e-10 * bulk
    with pytest.raises(DomainError):
        k.value(ex(0, 0, 0, -0.1), ex(0, 0, 0, 1))


def test_massive_small_mass_limit():
    s = 0.7
    m = 1e-4 / s
    w0 = metric.MinkowskiMassless(0).value(O, ex(0, s, 0, 0))
    for form in ("hadamard", "exact"):
        wm = metric.MinkowskiMassive(m, 0, form).value(O, ex(0, s, 0, 0))
        assert abs(wm / w0 - 1) < 1e-6


@pytest.mark.parametrize("s", [0.05, 0.5, 2.0])
def test_massive_exact_against_bessel(s):
    m = 1.3
    ref = float(m * mp.besselk(1, m * s) / (4 * mp.pi ** 2 * s))
    assert abs(metric.MinkowskiMassive(m, 0, "exact").value(O, ex(0, s, 0, 0)) - ref) < 1e-13 * ref


def test_massive_hadamard_differs_by_smooth_part():
    # the Hadamard form drops a smooth bi-solution, so the difference stays bounded at coincidence
    k_h, k_e = metric.MinkowskiMassive(1.0, 0, "hadamard"), metric.MinkowskiMassive(1.0, 0, "exact")
    diffs = [k_e.value(O, ex(0, s, 0, 0)) - k_h.value(O, ex(0, s, 0, 0)) for s in (1e-2, 1e-3, 1e-4)]
    assert abs(diffs[2] - diffs[1]) < abs(diffs[1] - diffs[0]) and abs(diffs[2]) < 0.1


def test_massive_timelike_branch_consistent():
    # both forms share the eps prescription; Im W is odd under exchange
    for form in ("hadamard", "exact"):
        k = metric.MinkowskiMassive(1.0, 1e-9, form)
        a = k.value(O, ex(0.8, 0.3, 0, 0))
        b = k.value(ex(0.8, 0.3, 0, 0), O)
        assert abs(a - np.conj(b)) < 1e-9 * abs(a)


def test_rw_small_mu_is_conformal_vacuum():
    k = metric.RWHyperbolic(2.0, 1e-10, 0)
    x, y = ex(0.0, 0.5, 1.0, 0.0), ex(0.2, 1.2, 1.3, 0.4)
    c = (math.cosh(0.5) * math.cosh(1.2) - math.sinh(0.5) * math.sinh(1.2)
         * (math.cos(1.0) * math.cos(1.3) + math.sin(1.0) * math.sin(1.3) * math.cos(0.4)))
    D = math.acosh(c)
    ref = (D / math.sinh(D)) / (4 * math.pi ** 2 * 4.0 * (D * D - 0.04))
    assert abs(k.value(x, y) - ref) < 1e-10 * ref
    # massive spacelike value is real
    v = metric.RWHyperbolic(2.0, 1.5, 0).value(x, y)
    assert abs(v.imag) < 1e-14 * abs(v)


def test_desitter_validation_and_hadamard_limit():
    with pytest.raises(DomainError):
        metric.DeSitter(1.0, 0.5)
    with pytest.raises(DomainError):
        metric.DeSitter(1.0, 0.3).value(ex(0, 0, 0, 0), ex(1, 0, 0, 0))
    k = metric.DeSitter(1.5, 0.3, 0)
    x = ex(2.0, 0, 0, 0)
    for h in (1e-2, 1e-4):
        sig = 0.5 * (1.5 / 2.0) ** 2 * h * h
        assert abs(k.value(x, x + ex(0, h, 0, 0)) * 8 * math.pi ** 2 * sig - 1) < 2 * h


def test_one_particle_profile_against_quadrature():
    k = metric.OneParticleGaussian(1.3, 0)
    sk = 1.3
    for t, r in ((0.0, 0.0), (0.4, 0.7), (-1.0, 2.0)):
        def f(q, part):
            v = (q ** 1.5 * math.exp(-q * q / (2 * sk * sk)) * (np.sinc(q * r / math.pi))
                 * complex(math.cos(q * t), -math.sin(q * t)))
            return v.real if part == 0 else v.imag
        amp = (2 * math.pi) ** -1.5 * (math.pi * sk * sk) ** -0.75 * 4 * math.pi / math.sqrt(2)
        ref = amp * complex(integrate.quad(f, 0, 20, args=(0,), epsabs=1e-14)[0],
                            integrate.quad(f, 0, 20, args=(1,), epsabs=1e-14)[0])
        assert abs(k.profile(t, r) - ref) < 1e-10


def test_lattice_validation():
    with pytest.raises(ContractError):
        metric.LatticeSpec("polar")
    with pytest.raises(ContractError):
        metric.LatticeSpec("inertial", -0.1)
    with pytest.raises(ContractError):
        metric.LatticeSpec("inertial", 0.1, (1, 1, 1))
    assert metric.LatticeSpec("inertial", 0.1, (2, 1, 3, 1)).sites().shape == (6, 4)


def test_chart_compatibility():
    lat = metric.LatticeSpec("inertial", 0.1)
    with pytest.raises(UnsupportedConfigurationError):
        metric.discrete_metric(metric.RWHyperbolic(), lat)
    with pytest.raises(UnsupportedConfigurationError):
        metric.discrete_metric(metric.HalfSpaceDirichlet(), lat)
    with pytest.raises(UnsupportedConfigurationError):
        metric.discrete_metric(metric.MinkowskiMassless(), metric.LatticeSpec("conformal-desitter", 0.1, base=(1, 0, 0, 0)))


def test_massless_inertial_is_exact():
    lat = metric.LatticeSpec("inertial", 0.3, (2, 1, 1, 2), (0.1, 0.2, 0.3, 0.4))
    e = metric.discrete_metric(metric.MinkowskiMassless(1e-9), lat)
    assert e.max_residual < 1e-12 and not np.any(e.failed)


def test_massive_inertial_converges():
    res = []
    for L in (0.2, 0.1, 0.05):
        lat = metric.LatticeSpec("inertial", L, (2, 2, 2, 2), (0.3, 0.1, -0.2, 0.5))
        res.append(metric.discrete_metric(metric.MinkowskiMassive(1.0, 1e-6 * L), lat).max_residual)
    assert res[0] > res[1] > res[2] and res[2] <= 0.01


def test_rindler_lapse():
    a, L = 2.0, 0.05
    for X in (0.5, 1.0, 1.5):
        lat = metric.LatticeSpec("rindler", L, (1, 1, 1, 1), (0.3, X, 0, 0), {"a": a})
        e = metric.discrete_metric(metric.MinkowskiMassless(1e-6 * L), lat)
        assert abs(e.g[0, 0, 0].real / -(a * X) ** 2 - 1) < 0.02


def test_desitter_better_at_late_conformal_time():
    rel = []
    for eta in (1.0, 2.0, 4.0):
        lat = metric.LatticeSpec("conformal-desitter", 0.01, (1, 1, 1, 1), (eta, 0.1, 0.2, 0.3), {"ell": 1.0})
        e = metric.discrete_metric(metric.DeSitter(1.0, 0.3, 1e-8), lat)
        rel.append(e.max_residual * eta ** 2)
    assert rel[0] > rel[1] > rel[2] and rel[0] < 0.02


def test_rw_converges():
    res = []
    for L in (0.02, 0.01):
        lat = metric.LatticeSpec("conformal-rw", L, (1, 1, 1, 1), (0.3, 0.8, 1.0, 0.5), {"a": 1.0})
        res.append(metric.discrete_metric(metric.RWHyperbolic(1.0, 1.0, 1e-8), lat).max_residual)
    assert res[1] < res[0] < 0.05


def test_half_space_estimates_and_boundary_flag():
    L = 0.01
    lat = metric.LatticeSpec("half-space", L, (1, 1, 1, 3), (0, 0, 0, 0))
    e = metric.discrete_metric(metric.HalfSpaceDirichlet(1e-6 * L), lat)
    assert e.failed[0] and not np.any(e.failed[1:])
    far = metric.discrete_metric(metric.HalfSpaceDirichlet(1e-6 * L),
                                 metric.LatticeSpec("half-space", L, (1, 1, 1, 1), (0, 0, 0, 10 * L)))
    assert far.max_residual < 0.01


def test_one_particle_deviation_is_second_order():
    devs = []
    Ls = (0.1, 0.05, 0.025)
    for L in Ls:
        lat = metric.LatticeSpec("inertial", L, (1, 1, 1, 1), (0.0, 0.3, 0.0, 0.0))
        e1 = metric.discrete_metric(metric.OneParticleGaussian(1.0, 1e-6 * L), lat)
        e0 = metric.discrete_metric(metric.MinkowskiMassless(1e-6 * L), lat)
        devs.append(float(np.max(np.abs(e1.g.real - e0.g.real))))
    slope = np.polyfit(np.log(Ls), np.log(devs), 1)[0]
    assert 1.9 < slope < 2.1


def test_spacelike_readout():
    W = 0.0123
    assert math.isclose(metric.detector_estimate_spacelike(0.3, metric.spacelike_correlator(0.3, W, math.pi / 2, math.pi / 2)), W)
    half = metric.spacelike_correlator(0.3, W, math.pi / 6, math.pi / 6)
    assert math.isclose(half, 0.25 * metric.spacelike_correlator(0.3, W, math.pi / 2, math.pi / 2))
    with pytest.warns(RuntimeWarning):
        metric.detector_estimate_spacelike(0.3, 1e-3, 0.05, math.pi / 2)
    with pytest.raises(ContractError), pytest.warns(RuntimeWarning):
        metric.detector_estimate_spacelike(0.3, 1e-3, 0.0, math.pi / 2)


@pytest.mark.parametrize("d", [1.0, 2.0])
@pytest.mark.parametrize("wd", [0.5, 1.0, 2.0])
def test_smeared_readout_close_to_pointlike(d, wd):
    sigma = 0.05 * d
    xb = ex(0, d, 0, 0)
    sm = metric.smeared_spacelike_correlator(1.0, sigma, O, xb, wd / d)
    W = metric.kernel_eval(metric.MinkowskiMassless(0), O, xb).value.real
    assert abs(metric.detector_estimate_spacelike(1.0, sm) / W - 1) < 0.01


def test_timelike_readout():
    W = metric.MinkowskiMassless(1e-3).value(O, ex(1.0, 0.3, 0.1, 0))
    lam, Om = 0.2, 1.7
    settings = []
    for dtau in (0.0, math.pi / (2 * Om)):
        p1, p2 = 0.01, 0.02
        settings.append((Om, dtau, metric.timelike_signal(lam, W, Om, dtau) + p1 + p2, p1, p2))
    assert abs(metric.detector_estimate_timelike(lam, settings) - W) < 1e-8 * abs(W)
    # the two designed settings read Re W and Im W separately
    assert math.isclose(metric.timelike_signal(lam, W, Om, 0.0), 2 * lam * lam * W.real)
    assert math.isclose(metric.timelike_signal(lam, W, Om, math.pi / (2 * Om)), 2 * lam * lam * W.imag)
    zero = [(Om, 0.0, 0.03, 0.01, 0.02), (Om, math.pi / (2 * Om), 0.03, 0.01, 0.02)]
    assert abs(metric.detector_estimate_timelike(lam, zero)) < 1e-15
    with pytest.raises(ContractError):
        metric.detector_estimate_timelike(lam, [(Om, 0.0, 0, 0, 0), (Om, 1e-3, 0, 0, 0)])
