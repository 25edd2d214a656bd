import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from rqi.errors import (
    ContractError, LinearDependenceError, PartitionError, UnsupportedConfigurationError,
)
from rqi.modes import (
    GaussianState, ModeSpec, canonical_form, f_delta, f_delta_hat, klco_cores, log_negativity,
    mode_correlators, multi_time_modes, symplectic_gram_schmidt, symplectic_spectrum, vacuum_state,
)


def pair(d, delta=2.0, R=1.0, tb=0.0):
    return [ModeSpec("A", R, delta, (0, 0, 0)), ModeSpec("B", R, delta, (d, 0, 0), tb)]


def random_equal_time_state(rng, n_a, n_b):
    # valid whenever G^1/2 H G^1/2 >= 1
    n = n_a + n_b
    A = rng.normal(size=(n, n))
    G = A @ A.T + 0.5 * np.eye(n)
    w, v = np.linalg.eigh(G)
    Gm = v @ np.diag(w ** -0.5) @ v.T
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    H = Gm @ Q @ np.diag(1 + rng.exponential(size=n)) @ Q.T @ Gm
    sigma = np.zeros((2 * n, 2 * n))
    sigma[0::2, 0::2] = G
    sigma[1::2, 1::2] = 0.5 * (H + H.T)
    return GaussianState(sigma, n_a)


def test_profile_normalized_and_transform():
    for delta in (1.0, 2.0, 3.5):
        n2 = integrate.quad(lambda r: 4 * math.pi * r * r * f_delta(r, 1.3, delta) ** 2, 0, 1.3)[0]
        assert abs(n2 - 1) < 1e-10
        for k in (0.0, 0.7, 4.0):
            ref = integrate.quad(lambda r: 4 * math.pi * r * r * f_delta(r, 1.3, delta)
                                 * (np.sinc(k * r / math.pi)), 0, 1.3, epsabs=1e-13)[0]
            assert abs(f_delta_hat(k, 1.3, delta) - ref) < 1e-9


def _shell_oracle(d, R=1.0, delta=2.0):
    """Two-shell reduction of int int F(x) F(y) / (2 pi^2 |x - y|^2)."""
    def xlogx(x):
        return x * math.log(x) - x if x > 0 else 0.0

    def avg(a, b):
        # mean of 1/|x - y|^2 over |x| = a and |y - c| = b, |c| = d
        lo, hi = d - a, d + a
        inner = (xlogx(hi + b) - xlogx(lo + b)) - (xlogx(hi - b) - xlogx(lo - b))
        return inner / (4 * a * b * d)

    def f(b, a):
        return (4 * math.pi * a * a * f_delta(a, R, delta)) * (4 * math.pi * b * b * f_delta(b, R, delta)) * avg(a, b)

    v, _ = integrate.dblquad(f, 0, R, 0, R, epsabs=1e-13, epsrel=1e-11)
    return v / (2 * math.pi ** 2)


def test_cross_term_against_position_space():
    sigma, C, _ = mode_correlators(pair(4.0))
    assert abs(sigma[0, 2] - _shell_oracle(4.0)) < 1e-5 * abs(sigma[0, 2])
    assert abs(sigma[0, 2] - _shell_oracle(4.0)) < 1e-9


def test_equal_time_structure():
    sigma, C, _ = mode_correlators(pair(3.0))
    assert abs(sigma[0, 1]) < 1e-14 and abs(sigma[0, 3]) < 1e-14
    # spacelike modes commute
    assert np.max(np.abs(C[0:2, 2:4])) < 1e-12
    # each mode is canonical up to normalization
    assert C[0, 1] > 0 and abs(C[0, 0]) < 1e-15


def test_partition_and_ordering_checks():
    with pytest.raises(PartitionError):
        mode_correlators(pair(1.5))
    with pytest.raises(PartitionError):
        mode_correlators(pair(2.5, tb=1.0))
    with pytest.raises(ContractError):
        mode_correlators([ModeSpec("B", 1.0, 2.0, (3, 0, 0)), ModeSpec("A")])
    with pytest.raises(ContractError):
        ModeSpec("C")


def test_gram_schmidt_identity_on_canonical_input():
    J = canonical_form(3)
    sig = np.diag([1.0, 2.0, 3.0, 0.5, 1.5, 1.0])
    state, M = symplectic_gram_schmidt(J, sig, 2)
    assert np.allclose(M, np.eye(6), atol=1e-14)
    assert np.allclose(state.sigma, sig)


def test_duplicate_mode_is_degenerate():
    ms = [ModeSpec("A"), ModeSpec("A"), ModeSpec("B", center=(3, 0, 0))]
    with pytest.raises(LinearDependenceError):
        vacuum_state(ms)


def test_three_slice_output_is_canonical():
    st_ = vacuum_state(multi_time_modes(3, 1.0, 2.0, 1.0))
    assert st_.meta["omega_error"] < 1e-12
    assert st_.validity() > -1e-10


def test_product_state_has_no_negativity():
    s = GaussianState(np.diag([1.0, 1.0, 2.0, 0.5]), 1)
    assert log_negativity(s) == 0.0


@pytest.mark.parametrize("d", [2.05, 3.0, 5.0])
def test_single_mode_pair_not_entangled(d):
    assert log_negativity(vacuum_state(pair(d))) == 0.0


@given(st.floats(0.01, 2.0))
def test_two_mode_squeezed(r):
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    sig = np.array([[c, 0, s, 0], [0, c, 0, -s], [s, 0, c, 0], [0, -s, 0, c]])
    state = GaussianState(sig, 1)
    assert abs(log_negativity(state) - 2 * r / math.log(2)) < 1e-9
    assert abs(log_negativity(state) + math.log2(math.exp(-2 * r))) < 1e-9


def test_vacuum_has_unit_spectrum():
    assert np.allclose(symplectic_spectrum(np.eye(6)), 1.0)


def test_cores_of_uncorrelated_state():
    s = GaussianState(np.diag([2.0, 0.5, 1.0, 1.0, 3.0, 1 / 3]), 2)
    cores = klco_cores(s)
    assert cores.cores == [] and np.all(cores.spectrum >= 1 - 1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_cores_local_bases_are_symplectic(seed):
    rng = np.random.default_rng(seed)
    state = random_equal_time_state(rng, 2, 2)
    cores = klco_cores(state)
    J = canonical_form(2)
    for S in (cores.S_A, cores.S_B):
        assert np.max(np.abs(S @ J @ S.T - J)) < 1e-10
    assert abs(cores.total - log_negativity(state)) < 1e-8


def test_cores_sum_on_multimode_vacuum():
    ms = [ModeSpec("A", 1.0, 2.0), ModeSpec("A", 1.0, 4.0),
          ModeSpec("B", 1.0, 2.0, (2.0, 0, 0)), ModeSpec("B", 1.0, 4.0, (2.0, 0, 0))]
    state = vacuum_state(ms)
    cores = klco_cores(state)
    assert state.n == 4
    assert abs(cores.total - log_negativity(state)) < 1e-8


def test_cores_need_equal_time_modes():
    state = vacuum_state(multi_time_modes(2, 1.0, 2.0, 1.0))
    with pytest.raises(UnsupportedConfigurationError):
        klco_cores(state)


def test_multi_time_layout():
    ms = multi_time_modes(3, 1.0, 2.0, 2.0)
    assert [m.slice_time for m in ms[:3]] == [-1.0, 0.0, 1.0]
    assert ms[3].center == (4.0, 0.0, 0.0)
    assert multi_time_modes(1)[0].slice_time == 0.0
