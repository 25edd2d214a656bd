"""Single two-level Unruh-DeWitt detector.

Leading-order Bloch-vector update from the response terms X, L+-, K, N,
closed-form vacuum excitation probabilities for a Gaussian detector in the
massless Minkowski vacuum, the long-time transition rate, the response to a
one-particle wavepacket, and the exact channel of a gapless detector.

Matrices use the Pauli basis with sigma_z = diag(1, -1), so index 0 is the
excited state |e> and index 1 the ground state |g>.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from .errors import ContractError, DomainError
from .propagators import GaussianSmearing, Kind, bidistribution_closed
from .specfun import exp_erfc, faddeeva
from .states import SIGMA_X, SIGMA_Y, SIGMA_Z, check_density

__all__ = [
    "BlochState",
    "GaplessChannelParams",
    "ResponseTerms",
    "bloch_evolve",
    "fermi_bound",
    "gapless_channel",
    "localized_spectrum",
    "minkowski_gapless_params",
    "minkowski_response_terms",
    "pointlike_response",
    "rate_peak",
    "transition_rate",
    "vacuum_response",
    "wavepacket_asymptotic",
    "wavepacket_integral",
    "wavepacket_response",
]

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class BlochState:
    a: tuple

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        if len(a) != 3 or not all(math.isfinite(x) for x in a):
            raise ContractError("Bloch vector must be a finite 3-vector")
        if math.sqrt(sum(x * x for x in a)) > 1.0 + 1e-9:
            raise ContractError("Bloch vector outside the unit ball")
        object.__setattr__(self, "a", a)

    @classmethod
    def from_density(cls, rho):
        rho = np.asarray(rho, dtype=complex)
        return cls(tuple(float(np.real(np.trace(rho @ s))) for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)))

    def density(self):
        ax, ay, az = self.a
        return 0.5 * (np.eye(2) + ax * SIGMA_X + ay * SIGMA_Y + az * SIGMA_Z)

    @property
    def norm(self):
        return math.sqrt(sum(x * x for x in self.a))


@dataclass(frozen=True)
class ResponseTerms:
    """Leading-order response terms, lambda factors included."""

    X: complex = 0j
    Lminus: float = 0.0
    Lplus: float = 0.0
    K: complex = 0j
    N: complex = 0j

    def __post_init__(self):
        if self.Lminus < -1e-12 or self.Lplus < -1e-12:
            raise ContractError("L terms must be non-negative")


def bloch_evolve(a0, terms):
    """Final Bloch vector after the interaction, to second order in lambda.

    Returns a plain 3-tuple rather than a :class:`BlochState` because a
    non-perturbative choice of terms can leave the unit ball; in that case a
    ``RuntimeWarning`` is issued.
    """
    ax, ay, az = a0.a if isinstance(a0, BlochState) else tuple(float(x) for x in a0)
    X, Lm, Lp, K, N = terms.X, terms.Lminus, terms.Lplus, terms.K, terms.N
    nx = ax - 2 * az * X.imag - (ax * (N - K).real + ay * (N + K).imag)
    ny = ay - 2 * az * X.real - (ay * (N + K).real - ax * (N - K).imag)
    nz = az + 2 * (ax * X.imag + ay * X.real) - (az * (Lm + Lp) - Lm + Lp)
    out = (float(nx), float(ny), float(nz))
    if math.sqrt(sum(x * x for x in out)) > 1.0 + 1e-6:
        warnings.warn("Bloch vector left the unit ball: perturbativity violated",
                      RuntimeWarning, stacklevel=2)
    return out


def _n_term(lam, T, sigma, Omega):
    # N = lam^2 T^2/(4 pi) int_0^inf k e^{-sigma^2 k^2} [w((W-k)T) + w((W+k)T)] dk
    def f(k, part):
        v = k * math.exp(-(sigma * k) ** 2) * (faddeeva((Omega - k) * T) + faddeeva((Omega + k) * T))
        return v.real if part == 0 else v.imag

    hi = abs(Omega) + 40.0 / T + 9.0 / sigma
    pts = [abs(Omega)] if abs(Omega) < hi else None
    re = integrate.quad(f, 0.0, hi, args=(0,), points=pts, limit=500, epsabs=0, epsrel=1e-11)[0]
    im = integrate.quad(f, 0.0, hi, args=(1,), points=pts, limit=500, epsabs=0, epsrel=1e-11)[0]
    return lam ** 2 * T ** 2 / (4 * math.pi) * complex(re, im)


def minkowski_response_terms(lam, smearing):
    """Response terms of one Gaussian detector in the massless vacuum.

    ``smearing.Omega`` is read as the detector gap; the field is quasifree
    so X vanishes. N needs a one-dimensional momentum integral.
    """
    W = smearing.Omega
    plus = smearing.with_(Omega=W)
    minus = smearing.with_(Omega=-W)
    lm = bidistribution_closed(Kind.WIGHTMAN, minus, plus).value
    lp = bidistribution_closed(Kind.WIGHTMAN, plus, minus).value
    kk = bidistribution_closed(Kind.WIGHTMAN, plus, plus).value
    return ResponseTerms(
        X=0j,
        Lminus=float(lam ** 2 * lm.real),
        Lplus=float(lam ** 2 * lp.real),
        K=complex(lam ** 2 * kk),
        N=_n_term(lam, smearing.T, smearing.sigma, W),
    )


def _one_minus_sqrtpi_x_erfcx(x):
    """1 - sqrt(pi) x exp(x^2) erfc(x), with the large-x cancellation removed."""
    if x < 8.0:
        return 1.0 - _SQRT_PI * x * special.erfcx(x)
    # asymptotic: sum_{n>=1} (-1)^{n+1} (2n-1)!! / (2x^2)^n
    y = 1.0 / (2.0 * x * x)
    term, total, n = 1.0, 0.0, 1
    while True:
        term *= (2 * n - 1) * y
        total += term if n % 2 else -term
        if term < 1e-18 * abs(total) or n > 60:
            return total
        n += 1


def vacuum_response(lam, Omega, T, sigma):
    """Leading-order excitation probability of a Gaussian detector.

    Negative ``Omega`` gives the de-excitation probability.
    """
    if T <= 0 or sigma < 0:
        raise DomainError("need T > 0 and sigma >= 0")
    a2 = T * T + sigma * sigma
    x = Omega * T * T / math.sqrt(a2)
    pref = lam ** 2 / (4 * math.pi) * T * T / a2
    if x >= 0:
        return pref * math.exp(-(Omega * T) ** 2) * _one_minus_sqrtpi_x_erfcx(x)
    # exp(-W^2T^2) sqrt(pi) x exp(x^2) erfc(x) with x^2 - W^2 T^2 <= 0
    c = x * x - (Omega * T) ** 2
    return pref * (math.exp(-(Omega * T) ** 2) - _SQRT_PI * x * exp_erfc(c, x).real)


def pointlike_response(lam, Omega, T):
    """The sigma -> 0 limit of :func:`vacuum_response`, written separately."""
    y = Omega * T
    return lam ** 2 / (4 * math.pi) * math.exp(-y * y) * (
        1.0 - _SQRT_PI * y * math.exp(y * y) * special.erfc(y))


def transition_rate(lam, Omega, sigma):
    """Long-time de-excitation rate of a detector with gap ``Omega``.

    This is F(-Omega). It is zero for Omega <= 0, where the only open
    channel is excitation, which does not happen in the vacuum at late times.
    """
    if Omega <= 0:
        return 0.0
    return lam ** 2 * Omega * math.exp(-(Omega * sigma) ** 2) / (2 * _SQRT_PI)


def rate_peak(sigma, lam=1.0):
    """Gap that maximizes :func:`transition_rate`, found numerically."""
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    res = optimize.minimize_scalar(lambda w: -transition_rate(lam, w, sigma),
                                   bracket=(0.1 / sigma, 1.0 / sigma, 5.0 / sigma),
                                   method="golden", tol=1e-12)
    return float(res.x)


def _wavepacket_norm(k0, delta):
    return 4 * math.sqrt(k0) * delta ** 1.5 * math.pi ** 0.75 / math.sqrt(special.erf(k0 * delta))


def wavepacket_response(Omega, T, sigma, k0, delta, lam=1.0, form="closed"):
    """Amplitude lam*q(Omega) for a Gaussian momentum wavepacket.

    ``form="closed"`` uses the closed expression as it is usually quoted.
    That expression differs from the defining momentum integral by an
    overall 16 pi^3 and carries exp(-W^2 s^2/alpha^2) where the integral
    gives exp(-W^2 s^2/(2 alpha^2)). ``form="integral"`` uses the closed
    evaluation that matches :func:`wavepacket_integral`.
    """
    if delta <= 0 or k0 <= 0 or T <= 0 or sigma < 0:
        raise DomainError("need delta, k0, T > 0 and sigma >= 0")
    al2 = 1.0 + sigma ** 2 / T ** 2
    be = math.sqrt(1.0 + (delta ** 2 + sigma ** 2) / T ** 2)
    N0 = _wavepacket_norm(k0, delta)
    g = al2 * delta ** 2 / (2 * be ** 2)
    d = math.sqrt(2.0) * be * T
    up = special.erf((delta ** 2 * k0 - Omega * T ** 2) / d)
    um = special.erf((delta ** 2 * k0 + Omega * T ** 2) / d)
    bracket = (math.exp(-g * (k0 + Omega / al2) ** 2) * (1 + up)
               - math.exp(-g * (k0 - Omega / al2) ** 2) * (1 - um))
    if form == "closed":
        pref = 2 * math.pi ** 2 * N0 * math.exp(-(Omega * sigma) ** 2 / al2) / (be * k0 * delta ** 2)
    elif form == "integral":
        pref = N0 * math.exp(-(Omega * sigma) ** 2 / (2 * al2)) / (8 * math.pi * be * k0 * delta ** 2)
    else:
        raise ValueError("form must be 'closed' or 'integral'")
    return lam * pref * bracket


def wavepacket_asymptotic(Omega, T, sigma, k0, delta, lam=1.0):
    """Sharp-momentum approximation of the closed form (delta k0 >> 1)."""
    al2 = 1.0 + sigma ** 2 / T ** 2
    be = math.sqrt(1.0 + (delta ** 2 + sigma ** 2) / T ** 2)
    return lam * (16 * math.pi ** 2 * math.pi ** 0.75 * math.exp(-(Omega * sigma) ** 2 / al2)
                  / (be * math.sqrt(k0 * delta))
                  * math.exp(-al2 * delta ** 2 / (2 * be ** 2) * (k0 + Omega / al2) ** 2))


def wavepacket_integral(Omega, T, sigma, k0, delta, lam=1.0):
    """Radial quadrature of the defining momentum integral for q(Omega)."""
    N0 = _wavepacket_norm(k0, delta)

    def f(k):
        # angular integral of exp(delta^2 k k0 cos) gives the sinh
        ang = -math.expm1(-2 * delta ** 2 * k * k0) / (2 * delta ** 2 * k0) if k > 0 else 1.0
        return (ang * math.exp(-0.5 * delta ** 2 * (k - k0) ** 2 - 0.5 * (sigma * k) ** 2
                               - 0.5 * T ** 2 * (k + Omega) ** 2))

    width = 1.0 / math.sqrt(delta ** 2 + sigma ** 2 + T ** 2)
    hi = k0 + abs(Omega) + 60 * width + 60.0 / delta
    val = integrate.quad(f, 0.0, hi, points=[k0], limit=500, epsabs=0, epsrel=1e-12)[0]
    return lam * T / (2 * math.pi) ** 2.5 * N0 * 2 * math.pi * val


@dataclass(frozen=True)
class GaplessChannelParams:
    xi: float
    G: float
    mu: np.ndarray = None

    def __post_init__(self):
        mu = SIGMA_X if self.mu is None else np.asarray(self.mu, dtype=complex)
        if mu.shape != (2, 2):
            raise ContractError("mu must be 2x2")
        if np.max(np.abs(mu - mu.conj().T)) > 1e-12:
            raise ContractError("mu must be Hermitian")
        if np.max(np.abs(mu @ mu - np.eye(2))) > 1e-12:
            raise ContractError("mu^2 must be the identity")
        if self.xi < 0:
            raise ContractError("xi must be non-negative")
        object.__setattr__(self, "mu", mu)


def gapless_channel(rho0, params):
    """Exact final state of a gapless detector.

    rho = U (e^-xi cosh xi rho0 + e^-xi sinh xi mu rho0 mu) U^dagger with
    U = exp(-i mu^2 G). Because mu^2 is the identity, U is a global phase.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    check_density(rho0)
    mu = params.mu
    xi = params.xi
    c = 0.5 * (1.0 + math.exp(-2 * xi))      # e^-xi cosh xi
    s = 0.5 * (-math.expm1(-2 * xi))          # e^-xi sinh xi
    mixed = c * rho0 + s * (mu @ rho0 @ mu)
    w, v = np.linalg.eigh(mu @ mu)
    U = v @ np.diag(np.exp(-1j * w * params.G)) @ v.conj().T
    rho = U @ mixed @ U.conj().T
    check_density(rho)
    return rho


def minkowski_gapless_params(lam, T, sigma, mu=None):
    """xi = lam^2 W(L, L) and G = (lam^2/2) G_R(L, L) for a Gaussian detector."""
    f = GaussianSmearing(T=T, sigma=sigma)
    w = bidistribution_closed(Kind.WIGHTMAN, f, f).value.real
    gr = bidistribution_closed(Kind.RETARDED, f, f).value.real
    return GaplessChannelParams(xi=lam ** 2 * w, G=0.5 * lam ** 2 * gr, mu=mu)


def fermi_bound(a, lam_R):
    """Lower estimate 1/(a + sqrt(lam_R)) of the Fermi-coordinate radius.

    Returns ``math.inf`` when both a and lam_R vanish.
    """
    if a < 0 or lam_R < 0:
        raise DomainError("a and lam_R must be non-negative")
    den = a + math.sqrt(lam_R)
    return math.inf if den == 0 else 1.0 / den


def localized_spectrum(kind, m, n, size):
    """Frequency of mode ``n`` of a field confined to a box or a trap.

    kind="box": cube of side ``size``, n_i >= 1.
    kind="harmonic": trap of width ``size``, n_i >= 0.
    """
    n = tuple(n)
    if len(n) != 3 or any(int(x) != x for x in n):
        raise ContractError("n must be an integer triple")
    if size <= 0:
        raise DomainError("size must be positive")
    if kind == "box":
        if min(n) < 1:
            raise ContractError("box modes start at n = 1")
        return math.sqrt(m * m + (math.pi / size) ** 2 * sum(x * x for x in n))
    if kind == "harmonic":
        if min(n) < 0:
            raise ContractError("trap modes start at n = 0")
        return math.sqrt(m * m + 2.0 / size ** 2 * (sum(n) + 1.5))
    raise ContractError(f"unknown spectrum kind {kind!r}")
