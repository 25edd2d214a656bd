"""Spacetime metric from field two-point functions.

Near coincidence every Hadamard two-point function behaves as
1/(8 pi^2 sigma), so

    g_mu nu(x) = -1/(8 pi^2) lim d_mu d_nu' W(x, x')^-1.

On a coordinate lattice with spacing L_mu the double derivative becomes a
four-point stencil. Only 1/W enters the stencil, so null-separated lattice
pairs (where W itself is singular) are harmless.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import ContractError, DomainError, UnsupportedConfigurationError
from .specfun import gauss_2f1

__all__ = [
    "DeSitter",
    "HalfSpaceDirichlet",
    "KernelValue",
    "LatticeSpec",
    "MetricEstimate",
    "MinkowskiMassive",
    "MinkowskiMassless",
    "OneParticleGaussian",
    "RWHyperbolic",
    "detector_estimate_spacelike",
    "detector_estimate_timelike",
    "discrete_metric",
    "kernel_eval",
    "smeared_spacelike_correlator",
    "spacelike_correlator",
    "timelike_signal",
]

_FOUR_PI2 = 4 * math.pi ** 2
_EIGHT_PI2 = 8 * math.pi ** 2


def _split(x, xp):
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    if x.shape != (4,) or xp.shape != (4,):
        raise ContractError("events are 4-vectors")
    return x, xp


def _sigma_eps(dt, dx2, eps):
    """Synge function of flat space with dt -> dt - i eps."""
    return 0.5 * (-(dt - 1j * eps) ** 2 + dx2)


@dataclass(frozen=True)
class MinkowskiMassless:
    eps: float = 1e-8
    chart_family = "minkowski"

    def value(self, x, xp):
        x, xp = _split(x, xp)
        d = x - xp
        return 1.0 / (_EIGHT_PI2 * _sigma_eps(d[0], float(d[1:] @ d[1:]), self.eps))


def _i1_ratio(u):
    """I_1(sqrt u)/sqrt u, an entire function of u."""
    u = complex(u)
    if abs(u) < 1.0:
        term, out = 0.5, 0.5
        for k in range(1, 30):
            term *= (u / 4) / (k * (k + 1))
            out += term
            if abs(term) < 1e-17 * abs(out):
                break
        return out
    z = np.sqrt(u)
    return complex(special.iv(1, z) / z)


@dataclass(frozen=True)
class MinkowskiMassive:
    """Massive vacuum kernel.

    form="hadamard" keeps the singular Hadamard structure with the log term;
    form="exact" is m K_1(m sqrt(2 sigma)) / (4 pi^2 sqrt(2 sigma)).
    """

    m: float = 1.0
    eps: float = 1e-8
    form: str = "hadamard"
    chart_family = "minkowski"

    def __post_init__(self):
        if self.m < 0:
            raise DomainError("mass must be non-negative")
        if self.form not in ("hadamard", "exact"):
            raise ContractError("form must be 'hadamard' or 'exact'")

    def value(self, x, xp):
        x, xp = _split(x, xp)
        d = x - xp
        s = _sigma_eps(d[0], float(d[1:] @ d[1:]), self.eps)
        m = self.m
        if self.form == "exact":
            if m == 0:
                return 1.0 / (_EIGHT_PI2 * s)
            z = m * np.sqrt(2 * s)
            return complex(m * special.kv(1, z) / (_FOUR_PI2 * np.sqrt(2 * s)))
        out = 1.0 / (_EIGHT_PI2 * s)
        if m > 0:
            # principal log: cut on the negative real axis
            out += m * m / _EIGHT_PI2 * _i1_ratio(2 * m * m * s) * np.log(2 * m * m * s)
        return complex(out)


@dataclass(frozen=True)
class RWHyperbolic:
    """Conformally coupled field on the static open universe, chart (eta, chi, theta, phi)."""

    a: float = 1.0
    mu: float = 1.0
    eps: float = 1e-8
    chart_family = "conformal-rw"

    def value(self, x, xp):
        x, xp = _split(x, xp)
        deta = x[0] - xp[0]
        # geodesic distance on the unit hyperboloid
        c = (math.cosh(x[1]) * math.cosh(xp[1]) - math.sinh(x[1]) * math.sinh(xp[1])
             * (math.cos(x[2]) * math.cos(xp[2])
                + math.sin(x[2]) * math.sin(xp[2]) * math.cos(x[3] - xp[3])))
        D = math.acosh(max(c, 1.0))
        ratio = 1.0 if D < 1e-12 else D / math.sinh(D)
        s2 = (deta - 1j * self.eps) ** 2 - D * D
        s = np.sqrt(s2)
        if s.imag > 0:
            s = -s
        pre = ratio / (8 * math.pi * self.a ** 2)
        if self.mu == 0 or abs(self.mu * s) < 1e-8:
            # small-argument limit i mu H1(mu s)/s -> -2/(pi s^2)
            return complex(pre * (-2.0 / (math.pi * s2)))
        return complex(pre * 1j * self.mu * special.hankel2(1, self.mu * s) / s)


@dataclass(frozen=True)
class DeSitter:
    """Bunch-Davies kernel in conformal coordinates (eta, x, y, z)."""

    ell: float = 1.0
    nu: float = 0.5
    eps: float = 1e-8
    chart_family = "conformal-desitter"

    def __post_init__(self):
        if abs(math.cos(math.pi * self.nu)) < 1e-12:
            # sec(pi nu) pole; take nu slightly off the half-integer instead
            raise DomainError("nu must not be a half-integer")

    def value(self, x, xp):
        x, xp = _split(x, xp)
        if x[0] == 0 or xp[0] == 0:
            raise DomainError("conformal time must be non-zero")
        d = x - xp
        w = ((d[0] - 1j * self.eps) ** 2 - float(d[1:] @ d[1:])) / (4 * x[0] * xp[0])
        if abs(w) < 1e-9:
            # z = 1 + w is not resolved in double precision; the pole term is
            # exact up to O(w log w) relative corrections
            return complex(-1.0 / (16 * math.pi ** 2 * self.ell ** 2 * w))
        nu = self.nu
        pre = (0.25 - nu * nu) / math.cos(math.pi * nu) / (16 * math.pi * self.ell ** 2)
        return complex(pre * gauss_2f1(1.5 + nu, 1.5 - nu, 2.0, complex(1 + w)))


@dataclass(frozen=True)
class HalfSpaceDirichlet:
    """Massless vacuum on z >= 0 with Dirichlet conditions at z = 0."""

    eps: float = 1e-8
    chart_family = "minkowski"

    def value(self, x, xp):
        x, xp = _split(x, xp)
        if x[3] < 0 or xp[3] < 0:
            raise DomainError("half-space events need z >= 0")
        d = x - xp
        dx2 = float(d[1:3] @ d[1:3])
        s = _sigma_eps(d[0], dx2 + d[3] ** 2, self.eps)
        s_img = _sigma_eps(d[0], dx2 + (x[3] + xp[3]) ** 2, self.eps)
        return complex(1.0 / (_EIGHT_PI2 * s) - 1.0 / (_EIGHT_PI2 * s_img))


class OneParticleGaussian:
    """Massless one-particle state with f(k) = (pi sk^2)^(-3/4) exp(-k^2 / 2 sk^2).

    W_psi = W_0 + F(x) F*(x') + F(x') F*(x), F done by radial quadrature.
    """

    chart_family = "minkowski"

    def __init__(self, sigma_k=1.0, eps=1e-8, nodes=400):
        if sigma_k <= 0:
            raise DomainError("sigma_k must be positive")
        self.sigma_k = float(sigma_k)
        self.eps = eps
        self._vac = MinkowskiMassless(eps)
        # k = u^2 makes the k^(3/2) endpoint smooth
        umax = (2 * self.sigma_k ** 2 * 46.0) ** 0.25
        xg, wg = np.polynomial.legendre.leggauss(nodes)
        self._u = 0.5 * umax * (xg + 1)
        self._w = 0.5 * umax * wg
        self._cache = {}

    def profile(self, t, r):
        key = (float(t), float(r))
        if key in self._cache:
            return self._cache[key]
        u, w = self._u, self._w
        k = u * u
        sk = self.sigma_k
        amp = (2 * math.pi) ** -1.5 * (math.pi * sk * sk) ** -0.75 * 4 * math.pi / math.sqrt(2)
        integrand = 2 * u ** 4 * np.exp(-k * k / (2 * sk * sk)) * np.sinc(k * r / math.pi) \
            * np.exp(-1j * k * t)
        val = complex(amp * np.dot(w, integrand))
        if len(self._cache) < 200_000:
            self._cache[key] = val
        return val

    def value(self, x, xp):
        x, xp = _split(x, xp)
        F1 = self.profile(x[0], float(np.linalg.norm(x[1:])))
        F2 = self.profile(xp[0], float(np.linalg.norm(xp[1:])))
        return self._vac.value(x, xp) + F1 * np.conj(F2) + F2 * np.conj(F1)


@dataclass(frozen=True)
class KernelValue:
    value: complex
    near_singular: bool = False


def kernel_eval(kernel, x, xp):
    x, xp = _split(x, xp)
    if np.array_equal(x, xp):
        raise DomainError("coincident events")
    v = kernel.value(x, xp)
    d = x - xp
    # flat interval as the light-cone proxy for every chart
    interval = -d[0] ** 2 + float(d[1:] @ d[1:])
    eps = getattr(kernel, "eps", 0.0)
    near = abs(interval) <= 10 * eps * max(abs(d[0]), 1e-300)
    return KernelValue(complex(v), bool(near))


_CHARTS = ("inertial", "rindler", "conformal-rw", "conformal-desitter", "half-space")


@dataclass
class LatticeSpec:
    """Coordinate lattice: ``shape`` sites with spacing ``L`` starting at ``base``."""

    chart: str = "inertial"
    L: float = 0.1
    shape: tuple = (1, 1, 1, 1)
    base: tuple = (0.0, 0.0, 0.0, 0.0)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.chart not in _CHARTS:
            raise ContractError(f"unknown chart {self.chart!r}; valid: {', '.join(_CHARTS)}")
        L = np.broadcast_to(np.asarray(self.L, dtype=float), (4,)).copy()
        if np.any(L <= 0):
            raise ContractError("lattice spacing must be positive")
        self.spacing = L
        self.shape = tuple(int(n) for n in self.shape)
        if len(self.shape) != 4 or min(self.shape) < 1:
            raise ContractError("shape needs four positive extents")
        self.base = np.asarray(self.base, dtype=float)

    def sites(self):
        grids = [self.base[i] + self.spacing[i] * np.arange(self.shape[i]) for i in range(4)]
        mesh = np.meshgrid(*grids, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def to_kernel(self, y):
        """Chart coordinates to the coordinates the kernel is written in."""
        if self.chart == "rindler":
            a = self.params.get("a", 1.0)
            T, X = y[0], y[1]
            return np.array([X * math.sinh(a * T), X * math.cosh(a * T), y[2], y[3]])
        return np.asarray(y, dtype=float)

    def exact_metric(self, y):
        p = self.params
        if self.chart in ("inertial", "half-space"):
            return np.diag([-1.0, 1.0, 1.0, 1.0])
        if self.chart == "rindler":
            a = p.get("a", 1.0)
            return np.diag([-(a * y[1]) ** 2, 1.0, 1.0, 1.0])
        if self.chart == "conformal-rw":
            a = p.get("a", 1.0)
            s2 = math.sinh(y[1]) ** 2
            return a * a * np.diag([-1.0, 1.0, s2, s2 * math.sin(y[2]) ** 2])
        ell = p.get("ell", 1.0)
        return (ell / y[0]) ** 2 * np.diag([-1.0, 1.0, 1.0, 1.0])


_COMPAT = {
    "minkowski": ("inertial", "rindler", "half-space"),
    "conformal-rw": ("conformal-rw",),
    "conformal-desitter": ("conformal-desitter",),
}


@dataclass
class MetricEstimate:
    sites: np.ndarray
    g: np.ndarray
    exact: np.ndarray
    residual: np.ndarray
    imag_max: np.ndarray
    failed: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def max_residual(self):
        ok = ~self.failed
        return float(np.max(self.residual[ok])) if np.any(ok) else math.inf


def discrete_metric(kernel, lattice, fail_tol=1e-10):
    """Four-point stencil estimate of g_mu nu at every lattice site."""
    fam = getattr(kernel, "chart_family", None)
    if lattice.chart not in _COMPAT.get(fam, ()):
        raise UnsupportedConfigurationError(
            f"kernel {type(kernel).__name__} cannot be used with chart {lattice.chart!r}")
    if isinstance(kernel, HalfSpaceDirichlet) and lattice.chart != "half-space":
        raise UnsupportedConfigurationError("Dirichlet kernel needs the half-space chart")
    L = lattice.spacing
    sites = lattice.sites()
    n = len(sites)
    g = np.zeros((n, 4, 4), dtype=complex)
    exact = np.zeros((n, 4, 4))
    failed = np.zeros(n, dtype=bool)
    scale = 1.0 / (_EIGHT_PI2 * float(np.min(L)) ** 2)
    E = np.eye(4)
    near = 0
    for s, y in enumerate(sites):
        exact[s] = lattice.exact_metric(y)
        pts = [lattice.to_kernel(y + L[i] * E[i]) for i in range(4)]
        x0 = lattice.to_kernel(y)
        cache = {}

        def winv(i, j):
            # 1/W between shifted events; index -1 means the unshifted site
            key = (i, j)
            if key not in cache:
                a = x0 if i < 0 else pts[i]
                b = x0 if j < 0 else pts[j]
                w = kernel.value(a, b)
                if not np.isfinite(w) or abs(w) <= fail_tol * scale:
                    cache[key] = None
                else:
                    cache[key] = 1.0 / w
            return cache[key]

        bad = False
        for mu in range(4):
            for nu in range(4):
                terms = (winv(nu, mu), winv(-1, mu), winv(nu, -1), winv(-1, -1))
                if any(t is None for t in terms):
                    bad = True
                    continue
                num = terms[0] - terms[1] - terms[2] + terms[3]
                g[s, mu, nu] = -num / (_EIGHT_PI2 * L[mu] * L[nu])
        failed[s] = bad
    resid = np.max(np.abs(g.real - exact), axis=(1, 2))
    resid[failed] = math.inf
    imag = np.max(np.abs(g.imag), axis=(1, 2))
    meta = {"chart": lattice.chart, "spacing": L.tolist(), "kernel": type(kernel).__name__,
            "eps": getattr(kernel, "eps", None)}
    return MetricEstimate(sites, g, exact, resid, imag, failed, meta)


# --- detector read-outs --------------------------------------------------------

def spacelike_correlator(lam, W, phase_a, phase_b):
    """<mu_A mu_B> = 4 lam^2 sin(phase_a) sin(phase_b) W for pointlike detectors.

    phase_i = Omega_i (tau_i + t_i), with tau_i the proper time at the centre
    and t_i the measurement time.
    """
    return 4 * lam * lam * math.sin(phase_a) * math.sin(phase_b) * W


def detector_estimate_spacelike(lam, corr, phase_a=math.pi / 2, phase_b=math.pi / 2):
    """Invert the spacelike read-out for W(x_A, x_B)."""
    fac = math.sin(phase_a) * math.sin(phase_b)
    if abs(fac) < 0.1:
        warnings.warn("measurement phases leave less than 10% of the signal", RuntimeWarning,
                      stacklevel=2)
    if fac == 0:
        raise ContractError("measurement phases annihilate the signal")
    return corr / (4 * lam * lam * fac)


def smeared_spacelike_correlator(lam, sigma, xa, xb, Omega, t_a=None, t_b=None):
    """Read-out of two Gaussian detectors with 4-D width sigma centred at xa, xb.

    Each profile is normalized to unit spacetime integral. Measurement
    times default to pi/(2 Omega), which makes the sine factors one.
    """
    from .propagators import GaussianSmearing, Kind, bidistribution_closed

    if Omega <= 0:
        raise DomainError("Omega must be positive")
    t_a = math.pi / (2 * Omega) if t_a is None else t_a
    t_b = math.pi / (2 * Omega) if t_b is None else t_b
    norm = 1.0 / (2 * math.pi * sigma * sigma)     # time factor per detector, squared
    fa = GaussianSmearing(T=sigma, sigma=sigma, t_c=xa[0], center=tuple(xa[1:]))
    fb = GaussianSmearing(T=sigma, sigma=sigma, t_c=xb[0], center=tuple(xb[1:]))
    Wmp = bidistribution_closed(Kind.WIGHTMAN, fa.with_(Omega=-Omega), fb.with_(Omega=Omega)).value
    Gpp = bidistribution_closed(Kind.FEYNMAN, fa.with_(Omega=Omega), fb.with_(Omega=Omega)).value
    val = 2 * lam * lam * (np.exp(-1j * Omega * t_a + 1j * Omega * t_b) * Wmp
                           - np.exp(1j * Omega * t_a + 1j * Omega * t_b) * Gpp).real
    return float(val * norm)


def timelike_signal(lam, W, Omega, dtau):
    """P_12 - P_1 - P_2 for pointlike couplings: 2 lam^2 (cos Re W + sin Im W)."""
    W = complex(W)
    return 2 * lam * lam * (math.cos(Omega * dtau) * W.real + math.sin(Omega * dtau) * W.imag)


def detector_estimate_timelike(lam, settings):
    """Recover complex W(x1, x2) from two settings.

    ``settings`` is a pair of (Omega, dtau, P12, P1, P2) tuples.
    """
    if len(settings) != 2:
        raise ContractError("exactly two settings are needed")
    A = np.array([[math.cos(Om * dt), math.sin(Om * dt)] for Om, dt, *_ in settings])
    if abs(np.linalg.det(A)) < 0.1:
        raise ContractError("singular design: offset the two Omega*dtau values by about pi/2")
    y = np.array([(P12 - P1 - P2) / (2 * lam * lam) for _, _, P12, P1, P2 in settings])
    re, im = np.linalg.solve(A, y)
    return complex(re, im)
