"""Smeared bi-distributions of a massless scalar in the Minkowski vacuum.

Smearings are Gaussian in space and time with a phase,

    f_i(x) = exp(-|x - L_i|^2 / 2 sigma_i^2) / (2 pi sigma_i^2)^(3/2)
             * exp(-(t - t_i)^2 / 2 T_i^2) * exp(i Omega_i t),

and every pairing is bilinear: A(f1, f2) = int f1(x) f2(x') A(x, x').

With P = T1 T2 exp(i(W1 t1 + W2 t2)) exp(-(W1^2 T1^2 + W2^2 T2^2)/2),
beta = W1 T1^2 - W2 T2^2, s = t0 + i beta and a^2 = T1^2 + T2^2 + s1^2 + s2^2,
the Wightman function is

    W = P / (4 sqrt(2 pi) L a) * i [w(-u+) - w(-u-)],  u+- = (s +- L)/(sqrt2 a),

with w the Faddeeva function. The retarded family (equal sigma) is written
with erfc. Every exponential prefactor is folded into the argument of a
scaled special function so that nothing overflows.
"""

import cmath
import functools
import math
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy import integrate, special

from .errors import NumericalFailure, UnsupportedConfigurationError
from .specfun import exp_erfc

__all__ = [
    "GaussianSmearing",
    "Kind",
    "PropagatorValue",
    "bidistribution_closed",
    "bidistribution_oracle",
    "d_domega",
    "momentum_smeared",
    "momentum_smeared_oracle",
    "rescale_switching_width",
]

_SQRT2 = math.sqrt(2.0)
_SQRT_PI = math.sqrt(math.pi)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_SMALL_L = 1e-3


@dataclass(frozen=True)
class GaussianSmearing:
    """One detector's spacetime coupling profile."""

    T: float
    sigma: float
    t_c: float = 0.0
    Omega: float = 0.0
    center: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        c = tuple(float(x) for x in self.center)
        if len(c) != 3:
            raise ValueError("center must be a 3-vector")
        object.__setattr__(self, "center", c)
        for name in ("T", "sigma", "t_c", "Omega"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.T <= 0 or self.sigma <= 0:
            raise ValueError("T and sigma must be positive")

    def with_(self, **kw):
        return replace(self, **kw)


def rescale_switching_width(T):
    """Width T' such that exp(-t^2/2T'^2) equals exp(-pi t^2/2T^2)."""
    return T / math.sqrt(math.pi)


class Kind(Enum):
    WIGHTMAN = "Wightman"
    HADAMARD = "Hadamard"
    CAUSAL = "Causal"
    RETARDED = "Retarded"
    ADVANCED = "Advanced"
    SYMMETRIC = "Symmetric"
    FEYNMAN = "Feynman"

    @classmethod
    def parse(cls, tag):
        if isinstance(tag, cls):
            return tag
        for k in cls:
            if k.value.lower() == str(tag).lower() or k.name.lower() == str(tag).lower():
                return k
        raise ValueError(f"unknown kind {tag!r}")


RETARDED_FAMILY = (Kind.RETARDED, Kind.ADVANCED, Kind.SYMMETRIC, Kind.FEYNMAN)


@dataclass
class PropagatorValue:
    value: complex
    kind: Kind
    fallback: bool = False
    meta: dict = field(default_factory=dict)

    def __complex__(self):
        return complex(self.value)


# ---------------------------------------------------------------------------
# geometry of a pair


@dataclass(frozen=True)
class _Pair:
    T1: float
    T2: float
    t1: float
    t2: float
    W1: float
    W2: float
    s1: float
    s2: float
    L: float

    @classmethod
    def of(cls, f1, f2):
        L = math.dist(f1.center, f2.center)
        return cls(f1.T, f2.T, f1.t_c, f2.t_c, f1.Omega, f2.Omega, f1.sigma, f2.sigma, L)

    @property
    def logpref(self):
        return (math.log(self.T1 * self.T2) + 1j * (self.W1 * self.t1 + self.W2 * self.t2)
                - 0.5 * (self.W1 ** 2 * self.T1 ** 2 + self.W2 ** 2 * self.T2 ** 2))

    @property
    def beta(self):
        return self.W1 * self.T1 ** 2 - self.W2 * self.T2 ** 2

    @property
    def s(self):
        return (self.t1 - self.t2) + 1j * self.beta

    @property
    def a(self):
        return math.sqrt(self.T1 ** 2 + self.T2 ** 2 + self.s1 ** 2 + self.s2 ** 2)

    @property
    def scale(self):
        return math.sqrt(max(self.T1, self.T2) ** 2 + max(self.s1, self.s2) ** 2)


def _sw(lp, z):
    """exp(lp) * w(z), stable in the lower half plane."""
    if z.imag >= 0:
        return cmath.exp(lp) * special.wofz(z)
    return 2.0 * cmath.exp(lp - z * z) - cmath.exp(lp) * special.wofz(-z)


def _dsw(lp, lpd, z, zd):
    """Derivative of exp(lp) w(z) given d(lp) and dz."""
    val = _sw(lp, z)
    wprime = -2.0 * z * val + 2j / _SQRT_PI * cmath.exp(lp)
    return lpd * val + zd * wprime


# brackets: closed form = bracket(L) / L, bracket odd in L


def _bracket_w(p, L):
    a = p.a
    lp = p.logpref
    up = (p.s + L) / (_SQRT2 * a)
    um = (p.s - L) / (_SQRT2 * a)
    return 1j * (_sw(lp, -up) - _sw(lp, -um)) / (4.0 * _SQRT_2PI * a)


def _bracket_h(p, L):
    a = p.a
    lp = p.logpref
    up = (p.s + L) / (_SQRT2 * a)
    um = (p.s - L) / (_SQRT2 * a)
    # exp(-z^2) erfi(z) = (i/2)(w(-z) - w(z))
    inner = 0.5j * (_sw(lp, um) - _sw(lp, -um) + _sw(lp, -up) - _sw(lp, up))
    return inner / (2.0 * _SQRT_2PI * a)


def _bracket_e(p, L):
    a = p.a
    lp = p.logpref
    up = (p.s + L) / (_SQRT2 * a)
    um = (p.s - L) / (_SQRT2 * a)
    return (cmath.exp(lp - up * up) - cmath.exp(lp - um * um)) / (2.0 * _SQRT_2PI * a)


def _retarded_parts(p, L):
    sig = p.s1
    tau2 = p.T1 ** 2 + p.T2 ** 2
    tau = math.sqrt(tau2)
    b = math.sqrt(tau2 + 2.0 * sig ** 2)
    lp = p.logpref
    s = p.s
    ym = (s - L) / (_SQRT2 * b)
    yp = (s + L) / (_SQRT2 * b)
    am = (L * tau2 + 2.0 * sig ** 2 * s) / (2.0 * sig * tau * b)
    ap = (L * tau2 - 2.0 * sig ** 2 * s) / (2.0 * sig * tau * b)
    norm = -1.0 / (4.0 * _SQRT_2PI * b)
    return lp, ym, yp, am, ap, norm


def _bracket_gr(p, L):
    lp, ym, yp, am, ap, norm = _retarded_parts(p, L)
    # (1 + erf A) = erfc(-A), (-1 + erf A) = -erfc(A)
    return norm * (exp_erfc(lp - ym * ym, -am) - exp_erfc(lp - yp * yp, ap))


def _bracket_ga(p, L):
    lp, ym, yp, am, ap, norm = _retarded_parts(p, L)
    return norm * (-exp_erfc(lp - ym * ym, am) + exp_erfc(lp - yp * yp, -ap))


def _bracket_delta(p, L):
    return _bracket_gr(p, L) + _bracket_ga(p, L)


def _bracket_feynman(p, L):
    return 0.5 * _bracket_h(p, L) + 0.5j * _bracket_delta(p, L)


_BRACKETS = {
    Kind.WIGHTMAN: _bracket_w,
    Kind.HADAMARD: _bracket_h,
    Kind.CAUSAL: _bracket_e,
    Kind.RETARDED: _bracket_gr,
    Kind.ADVANCED: _bracket_ga,
    Kind.SYMMETRIC: _bracket_delta,
    Kind.FEYNMAN: _bracket_feynman,
}


def _even_limit(fun, p, L):
    """bracket(L)/L, using an interpolation in L^2 when L is tiny."""
    thr = _SMALL_L * p.scale
    if L >= thr:
        return fun(p, L) / L
    nodes = (thr, 0.75 * thr, 0.5 * thr)
    vals = [fun(p, x) / x for x in nodes]
    xs = [x * x for x in nodes]
    X = L * L
    out = 0j
    for i in range(3):
        w = 1.0
        for j in range(3):
            if j != i:
                w *= (X - xs[j]) / (xs[i] - xs[j])
        out += w * vals[i]
    return out


def _closed_value(kind, p):
    return _even_limit(_BRACKETS[kind], p, p.L)


def _check_equal_sigma(f1, f2):
    return abs(f1.sigma - f2.sigma) <= 1e-14 * max(f1.sigma, f2.sigma)


def bidistribution_closed(kind, f1, f2, allow_fallback=True):
    """Closed-form value of a smeared bi-distribution.

    Retarded-family kinds need equal spatial widths. With unequal widths the
    quadrature oracle is used instead and ``fallback`` is set on the result
    (or ``UnsupportedConfigurationError`` is raised when
    ``allow_fallback=False``).
    """
    kind = Kind.parse(kind)
    if kind in RETARDED_FAMILY and not _check_equal_sigma(f1, f2):
        if not allow_fallback:
            raise UnsupportedConfigurationError(
                f"{kind.value}: closed form needs sigma1 == sigma2")
        warnings.warn("unequal sigma: falling back to quadrature", RuntimeWarning, stacklevel=2)
        out = bidistribution_oracle(kind, f1, f2)
        out.fallback = True
        return out
    p = _Pair.of(f1, f2)
    return PropagatorValue(complex(_closed_value(kind, p)), kind)


# ---------------------------------------------------------------------------
# quadrature oracles


def _qawo_gauss(lin, quad_coef, omega, kind, k_hi, lead):
    """int_0^k_hi exp(lin k - quad_coef k^2 - lead) * {sin, cos}(omega k) dk."""

    def g(k):
        return math.exp(lin * k - quad_coef * k * k - lead)

    if omega == 0.0:
        if kind == "sin":
            return 0.0, 0.0
        val, err = integrate.quad(g, 0.0, k_hi, epsabs=0.0, epsrel=1e-13, limit=400)
        return val, err
    val, err = integrate.quad(g, 0.0, k_hi, weight=kind, wvar=omega,
                              epsabs=0.0, epsrel=1e-13, limit=2000)
    return val, err


def _momentum_oracle(p, combo, kpow=0):
    """Radial k integral of the Wightman representation.

    combo selects W12 ("w"), W12 + W21 ("h") or -i(W12 - W21) ("e").
    kpow = 1 inserts one factor of -i k (a time derivative on argument 1).
    """
    L = p.L
    if L == 0.0:
        raise NumericalFailure("momentum oracle needs L > 0")
    a = p.a
    beta = p.beta
    t0 = p.t1 - p.t2
    lp = p.logpref
    # envelope exp(+/- beta k - a^2 k^2/2) with its maximum factored out
    res = 0j
    errs = 0.0
    terms = []
    # sin(kL) e^{-i k s} = sin(kL) e^{-i k t0} e^{beta k}
    # sin(kL) e^{+i k s} = sin(kL) e^{+i k t0} e^{-beta k}
    if combo == "w":
        terms.append((1.0, +beta, -1.0))
    elif combo == "h":
        terms.append((1.0, +beta, -1.0))
        terms.append((1.0, -beta, +1.0))
    elif combo == "e":
        terms.append((-1j, +beta, -1.0))
        terms.append((+1j, -beta, +1.0))
    else:
        raise ValueError(combo)
    for coef, lin, sgn in terms:
        kpk = max(lin / a ** 2, 0.0)
        lead = 0.5 * lin * kpk
        k_hi = kpk + 40.0 / a
        # sin(kL) e^{i sgn k t0} = 1/2[sin(k(L+sgn t0)) + sin(k(L-sgn t0))]
        #                          + i/2 [cos(k(L - sgn t0)) - cos(k(L + sgn t0))]
        w1 = L + sgn * t0
        w2 = L - sgn * t0
        if kpow == 0:
            def piece(kind, om, _lin=lin, _lead=lead, _khi=k_hi):
                sign = 1.0
                if om < 0:
                    om = -om
                    sign = -1.0 if kind == "sin" else 1.0
                v, e = _qawo_gauss(_lin, 0.5 * a * a, om, kind, _khi, _lead)
                return sign * v, e
        else:
            def piece(kind, om, _lin=lin, _lead=lead, _khi=k_hi):
                sign = 1.0
                if om < 0:
                    om = -om
                    sign = -1.0 if kind == "sin" else 1.0
                def g(k):
                    return k * math.exp(_lin * k - 0.5 * a * a * k * k - _lead)
                if om == 0.0:
                    if kind == "sin":
                        return 0.0, 0.0
                    v, e = integrate.quad(g, 0.0, _khi, epsabs=0.0, epsrel=1e-13, limit=400)
                else:
                    v, e = integrate.quad(g, 0.0, _khi, weight=kind, wvar=om,
                                          epsabs=0.0, epsrel=1e-13, limit=2000)
                return sign * v, e
        s1, e1 = piece("sin", w1)
        s2, e2 = piece("sin", w2)
        c2, e3 = piece("cos", w2)
        c1, e4 = piece("cos", w1)
        val = 0.5 * (s1 + s2) + 0.5j * (c2 - c1)
        # the derivative sits on f1: Fourier factor -i k when f1 is the left
        # argument (first term) and +i k when it is the right one (swapped)
        fac = 1j * sgn if kpow else 1.0
        res += coef * fac * val * cmath.exp(lp + lead)
        errs += (e1 + e2 + e3 + e4) * abs(cmath.exp(lp + lead))
    return res / (2.0 * math.pi * L), errs / (2.0 * math.pi * L)


def _gauss_t_integral(p, v):
    """Closed Gaussian integral over t at fixed |v| (retarded oracle)."""
    # integrand exp(i W1 t - (t-t1)^2/2T1^2 + i W2 (t - c) - (t - c - t2)^2/2T2^2), c = sqrt2 v
    c = _SQRT2 * v
    A = 0.5 / p.T1 ** 2 + 0.5 / p.T2 ** 2
    B = 1j * (p.W1 + p.W2) + p.t1 / p.T1 ** 2 + (c + p.t2) / p.T2 ** 2
    C = (-1j * p.W2 * c - p.t1 ** 2 / (2 * p.T1 ** 2) - (c + p.t2) ** 2 / (2 * p.T2 ** 2))
    return 0.5 * math.log(math.pi / A), B * B / (4 * A) + C


def _retarded_oracle(p):
    """Real-space nested integral for G_R.

    Both spatial profiles are unit-normalized Gaussians, so the pair only
    sees sigma1^2 + sigma2^2 and unequal widths reduce to a common one.
    """
    sig = math.sqrt(0.5 * (p.s1 ** 2 + p.s2 ** 2))
    L = p.L
    if L == 0.0:
        raise NumericalFailure("retarded oracle needs L > 0")
    pref = -1.0 / (2.0 * _SQRT2 * math.pi ** 1.5 * sig * L)
    centre = L / _SQRT2

    def integrand(v):
        lognorm, expo = _gauss_t_integral(p, v)
        g1 = -(v - centre) ** 2 / (2 * sig ** 2)
        g2 = -(v + centre) ** 2 / (2 * sig ** 2)
        return 0.5 * (cmath.exp(lognorm + expo + g1) - cmath.exp(lognorm + expo + g2))

    tau = math.sqrt(p.T1 ** 2 + p.T2 ** 2)
    hi = centre + 40.0 * sig + 40.0 * tau + abs(p.t1 - p.t2) + 10.0 * abs(p.beta) / tau
    pts = sorted({x for x in (centre, max(centre - 8 * sig, 0.0), centre + 8 * sig) if 0 < x < hi})
    re, ere = integrate.quad(lambda v: integrand(v).real, 0.0, hi, points=pts or None,
                             epsabs=0.0, epsrel=1e-12, limit=1000)
    im, eim = integrate.quad(lambda v: integrand(v).imag, 0.0, hi, points=pts or None,
                             epsabs=0.0, epsrel=1e-12, limit=1000)
    return pref * complex(re, im), abs(pref) * (ere + eim)


def _quiet(fun):
    # the oracles report quad's own error estimate, so its tolerance warnings add nothing
    @functools.wraps(fun)
    def wrapped(*args, **kw):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            return fun(*args, **kw)
    return wrapped


@_quiet
def bidistribution_oracle(kind, f1, f2):
    """Brute-force quadrature values, independent of the closed forms."""
    kind = Kind.parse(kind)
    p = _Pair.of(f1, f2)
    if kind is Kind.WIGHTMAN:
        v, e = _momentum_oracle(p, "w")
    elif kind is Kind.HADAMARD:
        v, e = _momentum_oracle(p, "h")
    elif kind is Kind.CAUSAL:
        v, e = _momentum_oracle(p, "e")
    else:
        gr, egr = _retarded_oracle(p)
        ga, ega = _retarded_oracle(_Pair.of(f2, f1))   # G_A(f1,f2) = G_R(f2,f1)
        if kind is Kind.RETARDED:
            v, e = gr, egr
        elif kind is Kind.ADVANCED:
            v, e = ga, ega
        elif kind is Kind.SYMMETRIC:
            v, e = gr + ga, egr + ega
        else:
            h, eh = _momentum_oracle(p, "h")
            v, e = 0.5 * h + 0.5j * (gr + ga), 0.5 * eh + 0.5 * (egr + ega)
    if not np.isfinite(v):
        raise NumericalFailure("oracle produced a non-finite value", residual=e)
    return PropagatorValue(complex(v), kind, meta={"error_estimate": e})


# ---------------------------------------------------------------------------
# momentum smearing


def _bracket_w_domega(p, L, which):
    a = p.a
    lp = p.logpref
    up = (p.s + L) / (_SQRT2 * a)
    um = (p.s - L) / (_SQRT2 * a)
    if which == 1:
        lpd = 1j * p.t1 - p.W1 * p.T1 ** 2
        ud = 1j * p.T1 ** 2 / (_SQRT2 * a)
    else:
        lpd = 1j * p.t2 - p.W2 * p.T2 ** 2
        ud = -1j * p.T2 ** 2 / (_SQRT2 * a)
    return 1j * (_dsw(lp, lpd, -up, -ud) - _dsw(lp, lpd, -um, -ud)) / (4.0 * _SQRT_2PI * a)


def _bracket_h_domega(p, L, which):
    a = p.a
    lp = p.logpref
    up = (p.s + L) / (_SQRT2 * a)
    um = (p.s - L) / (_SQRT2 * a)
    if which == 1:
        lpd = 1j * p.t1 - p.W1 * p.T1 ** 2
        ud = 1j * p.T1 ** 2 / (_SQRT2 * a)
    else:
        lpd = 1j * p.t2 - p.W2 * p.T2 ** 2
        ud = -1j * p.T2 ** 2 / (_SQRT2 * a)
    inner = 0.5j * (_dsw(lp, lpd, um, ud) - _dsw(lp, lpd, -um, -ud)
                    + _dsw(lp, lpd, -up, -ud) - _dsw(lp, lpd, up, ud))
    return inner / (2.0 * _SQRT_2PI * a)


def _bracket_e_domega(p, L, which):
    a = p.a
    lp = p.logpref
    up = (p.s + L) / (_SQRT2 * a)
    um = (p.s - L) / (_SQRT2 * a)
    if which == 1:
        lpd = 1j * p.t1 - p.W1 * p.T1 ** 2
        ud = 1j * p.T1 ** 2 / (_SQRT2 * a)
    else:
        lpd = 1j * p.t2 - p.W2 * p.T2 ** 2
        ud = -1j * p.T2 ** 2 / (_SQRT2 * a)
    ep = (lpd - 2 * up * ud) * cmath.exp(lp - up * up)
    em = (lpd - 2 * um * ud) * cmath.exp(lp - um * um)
    return (ep - em) / (2.0 * _SQRT_2PI * a)


_ANALYTIC_DOMEGA = {
    Kind.WIGHTMAN: _bracket_w_domega,
    Kind.HADAMARD: _bracket_h_domega,
    Kind.CAUSAL: _bracket_e_domega,
}


def d_domega(kind, f1, f2, which, method="auto"):
    """Derivative of a closed form with respect to Omega of argument 1 or 2."""
    kind = Kind.parse(kind)
    if method == "auto":
        method = "analytic" if kind in _ANALYTIC_DOMEGA else "fd"
    if method == "analytic":
        fun = _ANALYTIC_DOMEGA[kind]
        p = _Pair.of(f1, f2)
        return complex(_even_limit(lambda q, L: fun(q, L, which), p, p.L))
    f = f1 if which == 1 else f2
    h = 1e-5 / f.T

    def val(dw):
        g = f.with_(Omega=f.Omega + dw)
        if which == 1:
            return bidistribution_closed(kind, g, f2).value
        return bidistribution_closed(kind, f1, g).value

    return (-val(2 * h) + 8 * val(h) - 8 * val(-h) + val(-2 * h)) / (12 * h)


def momentum_smeared(kind, f1, f2, deriv1=0, deriv2=0, method="auto"):
    """Bi-distribution with pi = d/dt phi on the flagged arguments.

    Uses omega(pi(f1) phi(f2)) = -(i/T1^2) dA/dOmega1 - (t1/T1^2 + i Omega1) A
    and the same rule on argument 2.
    """
    kind = Kind.parse(kind)
    if deriv1 not in (0, 1) or deriv2 not in (0, 1):
        raise ValueError("deriv flags must be 0 or 1")
    if not deriv1 and not deriv2:
        return bidistribution_closed(kind, f1, f2)

    def apply2(g1):
        base = bidistribution_closed(kind, g1, f2).value
        if not deriv2:
            return base
        dv = d_domega(kind, g1, f2, 2, method)
        return -1j / f2.T ** 2 * dv - (f2.t_c / f2.T ** 2 + 1j * f2.Omega) * base

    if not deriv1:
        return PropagatorValue(complex(apply2(f1)), kind, meta={"deriv": (0, 1)})
    base = apply2(f1)
    if not deriv2:
        dv = d_domega(kind, f1, f2, 1, method)
    else:
        h = 1e-5 / f1.T
        vals = [apply2(f1.with_(Omega=f1.Omega + k * h)) for k in (2, 1, -1, -2)]
        dv = (-vals[0] + 8 * vals[1] - 8 * vals[2] + vals[3]) / (12 * h)
    out = -1j / f1.T ** 2 * dv - (f1.t_c / f1.T ** 2 + 1j * f1.Omega) * base
    return PropagatorValue(complex(out), kind, meta={"deriv": (1, deriv2)})


@_quiet
def momentum_smeared_oracle(kind, f1, f2):
    """Momentum-space quadrature of omega(pi(f1) phi(f2)) type kernels.

    Only the Wightman, Hadamard and Causal kinds with a derivative on the
    first argument are supported; a factor -i k is inserted in the radial
    integrand.
    """
    kind = Kind.parse(kind)
    combos = {Kind.WIGHTMAN: "w", Kind.HADAMARD: "h", Kind.CAUSAL: "e"}
    if kind not in combos:
        raise UnsupportedConfigurationError("oracle covers W, H and E only")
    p = _Pair.of(f1, f2)
    v, e = _momentum_oracle(p, combos[kind], kpow=1)
    return PropagatorValue(complex(v), kind, meta={"error_estimate": e})
