import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rqi.errors import UnsupportedConfigurationError
from rqi.propagators import (
    GaussianSmearing, Kind, bidistribution_closed, bidistribution_oracle, d_domega,
    momentum_smeared, momentum_smeared_oracle, rescale_switching_width,
)



def pair(T=1.0, sigma=0.5, L=2.0, t0=0.0, W1=0.0, W2=0.0, T2=None, s2=None):
    f1 = GaussianSmearing(T, sigma, 0.0, W1)
    f2 = GaussianSmearing(T2 or T, s2 or sigma, t0, W2, (L, 0.0, 0.0))
    return f1, f2


def close(a, b, rel, floor=0.0):
    return abs(a - b) <= rel * abs(b) + floor


def test_wightman_equal_detectors_positive():
    f = GaussianSmearing(1.3, 0.4)
    for L in (0.5, 3.0):
        g = f.with_(center=(0.0, L, 0.0))
        v = bidistribution_closed(Kind.WIGHTMAN, f, g).value
        assert abs(v.imag) < 1e-15 and v.real > 0


def test_causal_vanishes_for_identical_smearings():
    f = GaussianSmearing(0.7, 0.3, 0.2, 1.5)
    assert abs(bidistribution_closed(Kind.CAUSAL, f, f).value) < 1e-15


def test_wightman_against_momentum_oracle():
    f1, f2 = pair(1.0, 0.1, 5.0, 0.0, 2.0, 2.0)
    c = bidistribution_closed(Kind.WIGHTMAN, f1, f2).value
    o = bidistribution_oracle(Kind.WIGHTMAN, f1, f2)
    assert close(c, o.value, 1e-6, o.meta["error_estimate"])


@pytest.mark.parametrize("kind", list(Kind))
@pytest.mark.parametrize("L,t0,W1,W2", [(1.5, 0.3, 0.8, -0.4), (0.01, 1.0, 1.0, 1.0), (4.0, -2.0, 0.0, 2.0)])
def test_every_kind_against_oracle(kind, L, t0, W1, W2):
    f1, f2 = pair(1.0, 0.4, L, t0, W1, W2)
    c = bidistribution_closed(kind, f1, f2).value
    o = bidistribution_oracle(kind, f1, f2)
    assert close(c, o.value, 1e-6, o.meta["error_estimate"] + 1e-14)


def test_small_separation_branch_is_continuous():
    for kind in (Kind.WIGHTMAN, Kind.FEYNMAN, Kind.RETARDED):
        vals = [bidistribution_closed(kind, *pair(1.0, 0.3, L, 0.4, 1.0, 0.5)).value
                for L in (0.0, 1e-7, 1e-4, 0.999e-3, 1.001e-3)]
        for v in vals[1:]:
            assert abs(v - vals[0]) < 1e-5 * abs(vals[0])


def test_retarded_support():
    f1, f2 = pair(0.5, 0.2, 1.0, 12.0)
    # f2 lives at t ~ 12, far in the future of f1: G_R(f1, f2) ~ 0, G_A large
    gr = bidistribution_oracle(Kind.RETARDED, f1, f2).value
    ga = bidistribution_oracle(Kind.ADVANCED, f1, f2).value
    assert abs(gr) <= 1e-8 * abs(ga)
    assert abs(bidistribution_closed(Kind.RETARDED, f1, f2).value) <= 1e-8 * abs(ga)


def test_hermiticity_by_parameter_swap():
    f1, f2 = pair(1.0, 0.3, 2.0, 0.7, 1.2, -0.5)
    w = bidistribution_closed(Kind.WIGHTMAN, f1, f2).value
    # W(f1, f2) = conj W(f2*, f1*): conjugation flips each Omega, the swap flips t0 and L
    g1 = GaussianSmearing(1.0, 0.3, 0.0, -1.2)
    g2 = GaussianSmearing(1.0, 0.3, 0.7, 0.5, (2.0, 0.0, 0.0))
    w2 = bidistribution_closed(Kind.WIGHTMAN, g2, g1).value
    assert abs(w - w2.conjugate()) < 1e-10 * abs(w)


times = st.floats(0.3, 3.0)
widths = st.floats(0.1, 1.5)
gaps = st.floats(-3, 3)
seps = st.floats(0.0, 6.0)
shifts = st.floats(-2, 2)


@given(times, widths, seps, shifts, gaps, gaps)
@settings(max_examples=60, deadline=None)
def test_kind_identities(T, s, L, t0, W1, W2):
    f1, f2 = pair(T, s, L, t0, W1, W2)
    v = {k: bidistribution_closed(k, f1, f2).value for k in Kind}
    scale = max(abs(x) for x in v.values()) + 1e-300
    assert abs(v[Kind.WIGHTMAN] - 0.5 * (v[Kind.HADAMARD] + 1j * v[Kind.CAUSAL])) <= 1e-10 * scale
    assert abs(v[Kind.RETARDED] - v[Kind.ADVANCED] - v[Kind.CAUSAL]) <= 1e-10 * scale
    assert abs(v[Kind.SYMMETRIC] - v[Kind.RETARDED] - v[Kind.ADVANCED]) <= 1e-10 * scale
    assert abs(v[Kind.FEYNMAN] - 0.5 * (v[Kind.HADAMARD] + 1j * v[Kind.SYMMETRIC])) <= 1e-10 * scale


@given(times, widths, seps, shifts, gaps, gaps)
@settings(max_examples=60, deadline=None)
def test_causal_antisymmetric_and_wightman_conjugate(T, s, L, t0, W1, W2):
    f1, f2 = pair(T, s, L, t0, W1, W2)
    e12 = bidistribution_closed(Kind.CAUSAL, f1, f2).value
    e21 = bidistribution_closed(Kind.CAUSAL, f2, f1).value
    assert abs(e12 + e21) <= 1e-10 * max(abs(e12), 1e-300)


def test_unequal_sigma_fallback():
    f1, f2 = pair(1.0, 0.3, 2.0, 0.5, 1.0, 1.0, s2=0.6)
    with pytest.raises(UnsupportedConfigurationError):
        bidistribution_closed(Kind.RETARDED, f1, f2, allow_fallback=False)
    with pytest.warns(RuntimeWarning):
        v = bidistribution_closed(Kind.RETARDED, f1, f2)
    assert v.fallback
    # the spatial profiles only enter through sigma1^2 + sigma2^2
    se = math.sqrt(0.5 * (0.3 ** 2 + 0.6 ** 2))
    ref = bidistribution_closed(Kind.RETARDED, *pair(1.0, se, 2.0, 0.5, 1.0, 1.0)).value
    assert abs(v.value - ref) < 1e-6 * abs(ref)
    # W has a closed form at unequal widths
    c = bidistribution_closed(Kind.WIGHTMAN, f1, f2).value
    o = bidistribution_oracle(Kind.WIGHTMAN, f1, f2)
    assert close(c, o.value, 1e-6, o.meta["error_estimate"])


def test_domega_analytic_vs_finite_difference():
    f1, f2 = pair(1.0, 0.2, 2.0, 1.0, 3.0, 3.0)
    for kind in (Kind.WIGHTMAN, Kind.HADAMARD, Kind.CAUSAL):
        for which in (1, 2):
            a = d_domega(kind, f1, f2, which, "analytic")
            b = d_domega(kind, f1, f2, which, "fd")
            assert abs(a - b) <= 1e-6 * max(abs(a), 1e-12)


def test_momentum_smeared_reduces_and_matches_oracle():
    f1, f2 = pair(1.0, 0.4, 1.5, 0.5, 0.7, -0.3)
    assert momentum_smeared(Kind.WIGHTMAN, f1, f2).value == bidistribution_closed(Kind.WIGHTMAN, f1, f2).value
    for kind in (Kind.WIGHTMAN, Kind.CAUSAL):
        c = momentum_smeared(kind, f1, f2, 1, 0).value
        o = momentum_smeared_oracle(kind, f1, f2)
        assert close(c, o.value, 1e-6, o.meta["error_estimate"] + 1e-14)


def test_commutator_with_momentum_at_coincidence():
    # E(pi f, phi f) for a real smearing is fixed by the profile alone; the
    # oracle needs a nonzero separation, so compare at L = 1e-4 and check
    # that this is already the coincidence value
    f = GaussianSmearing(0.8, 0.3)
    g = f.with_(center=(1e-4, 0.0, 0.0))
    c0 = momentum_smeared(Kind.CAUSAL, f, f, 1, 0).value
    c = momentum_smeared(Kind.CAUSAL, f, g, 1, 0).value
    o = momentum_smeared_oracle(Kind.CAUSAL, f, g)
    assert close(c, o.value, 1e-6, o.meta["error_estimate"])
    assert abs(c - c0) < 1e-6 * abs(c0)
    assert abs(c0.imag) < 1e-12 * abs(c0) and c0.real != 0


def test_rescaled_width():
    T = 1.7
    Tp = rescale_switching_width(T)
    t = 0.9
    assert math.isclose(math.exp(-t * t / (2 * Tp * Tp)), math.exp(-math.pi * t * t / (2 * T * T)))


@given(times, widths, st.floats(0.1, 6.0), shifts, gaps, gaps)
@settings(max_examples=40, deadline=None)
def test_hermiticity_property(T, s, L, t0, W1, W2):
    f1, f2 = pair(T, s, L, t0, W1, W2)
    g1, g2 = f1.with_(Omega=-W1), f2.with_(Omega=-W2)
    w = bidistribution_closed(Kind.WIGHTMAN, f1, f2).value
    w2 = bidistribution_closed(Kind.WIGHTMAN, g2, g1).value
    assert abs(w - w2.conjugate()) <= 1e-10 * max(abs(w), 1e-300)


def _decay_ratio(T, s, W=0.0):
    m = max(T, s)
    near = abs(bidistribution_closed(Kind.WIGHTMAN, *pair(T, s, 2 * m, 0.0, W, W)).value)
    far = abs(bidistribution_closed(Kind.WIGHTMAN, *pair(T, s, 20 * m, 0.0, W, W)).value)
    return far / near


@pytest.mark.parametrize("T,s", [(1.0, 0.5), (0.5, 1.0), (2.0, 0.1)])
def test_decay_with_separation_is_inverse_square(T, s):
    # the massless kernel falls off as 1/L^2 once L >> T, sigma
    r = _decay_ratio(T, s)
    assert 0.5e-2 < r < 2e-2
    far = [abs(bidistribution_closed(Kind.WIGHTMAN, *pair(T, s, L)).value) * L * L
           for L in (40 * max(T, s), 80 * max(T, s))]
    assert abs(far[1] / far[0] - 1) < 0.01


@pytest.mark.xfail(strict=True, reason="a 1e-4 drop between 2 and 20 widths would need faster than 1/L^2 decay")
def test_decay_with_separation_1e4():
    assert _decay_ratio(1.0, 0.5) <= 1e-4


def test_smearing_validation():
    with pytest.raises(ValueError):
        GaussianSmearing(0.0, 1.0)
    with pytest.raises(ValueError):
        GaussianSmearing(1.0, 1.0, center=(0.0, 1.0))
    with pytest.raises(ValueError):
        Kind.parse("nonsense")
    assert Kind.parse("feynman") is Kind.FEYNMAN
