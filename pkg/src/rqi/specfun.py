"""Special functions used by the closed-form propagators and kernels.

Error functions and Bessel functions are thin, validated wrappers around
``scipy.special`` (which implements the Faddeeva package). The Gauss
hypergeometric function is evaluated here with Maclaurin series plus the
standard connection formulas, because the de Sitter kernel needs explicit
control of the side of the branch cut [1, inf).
"""

import cmath
import math

import numpy as np
from scipy import special

from .errors import DomainError, SingularInputError

__all__ = [
    "complex_erf",
    "complex_erfc",
    "faddeeva",
    "exp_erfc",
    "erfi",
    "erfi_scaled",
    "bessel_i1_ratio",
    "gauss_2f1",
    "hankel1_2",
]

_SQRT_PI = math.sqrt(math.pi)


def _finite_or_raise(value, what):
    arr = np.asarray(value)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what}: result is not finite (out of validated domain)")
    return value


def _check_complex_input(z, limit, what):
    arr = np.asarray(z)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what}: non-finite input")
    if np.any(np.abs(arr) > limit):
        raise DomainError(f"{what}: |z| exceeds {limit:g}")


def complex_erf(z):
    """erf(z) for complex z with |z| <= 1e6."""
    _check_complex_input(z, 1e6, "complex_erf")
    out = special.erf(np.asarray(z, dtype=complex))
    _finite_or_raise(out, "complex_erf")
    return out[()] if np.ndim(out) == 0 else out


def complex_erfc(z):
    _check_complex_input(z, 1e6, "complex_erfc")
    out = special.erfc(np.asarray(z, dtype=complex))
    _finite_or_raise(out, "complex_erfc")
    return out[()] if np.ndim(out) == 0 else out


def faddeeva(z):
    """w(z) = exp(-z^2) erfc(-i z)."""
    out = special.wofz(np.asarray(z, dtype=complex))
    _finite_or_raise(out, "faddeeva")
    return out[()] if np.ndim(out) == 0 else out


def exp_erfc(c, z):
    """exp(c) * erfc(z) without intermediate overflow.

    Used wherever a large Gaussian prefactor multiplies an error function
    whose own growth compensates it. For Re z >= 0 we use
    erfc(z) = exp(-z^2) w(iz); otherwise erfc(z) = 2 - erfc(-z).
    """
    c = complex(c)
    z = complex(z)
    if z.real >= 0:
        return cmath.exp(c - z * z) * special.wofz(1j * z)
    return 2.0 * cmath.exp(c) - cmath.exp(c - z * z) * special.wofz(-1j * z)


def erfi(x):
    """Imaginary error function erfi(x) = -i erf(ix) for real |x| <= 25."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("erfi: non-finite input")
    if np.any(np.abs(arr) > 25.0):
        raise DomainError("erfi: |x| > 25, use erfi_scaled")
    out = special.erfi(arr)
    return out[()] if np.ndim(out) == 0 else out


def erfi_scaled(x):
    """exp(-x^2) erfi(x), valid for every finite real x."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("erfi_scaled: non-finite input")
    out = 2.0 / _SQRT_PI * special.dawsn(arr)
    return out[()] if np.ndim(out) == 0 else out


def bessel_i1_ratio(z):
    """I1(sqrt z)/sqrt z, continued to z <= 0 as J1(sqrt(-z))/sqrt(-z)."""
    arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(np.abs(arr) > 1e4):
        raise DomainError("bessel_i1_ratio: need finite |z| <= 1e4")
    out = np.empty_like(arr)
    small = np.abs(arr) < 1e-6
    # series: 1/2 + z/16 + z^2/384
    zs = arr[small]
    out[small] = 0.5 + zs / 16.0 + zs * zs / 384.0
    pos = (~small) & (arr > 0)
    neg = (~small) & (arr < 0)
    rp = np.sqrt(arr[pos])
    out[pos] = special.i1(rp) / rp
    rn = np.sqrt(-arr[neg])
    out[neg] = special.j1(rn) / rn
    return out[()] if np.ndim(out) == 0 else out


def hankel1_2(x):
    """Hankel function of the second kind, order one: J1(x) - i Y1(x)."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError("hankel1_2: non-finite input")
    if x == 0.0:
        raise SingularInputError("hankel1_2: Y1 diverges at x = 0")
    if x > 0:
        return complex(special.hankel2(1, x))
    # principal branch for negative real argument
    return complex(special.hankel2(1, complex(x, 0.0)))


# ---------------------------------------------------------------------------
# Gauss hypergeometric function


def _is_nonpos_int(v, tol=1e-12):
    return v <= tol and abs(v - round(v)) < tol


def _is_int(v, tol=1e-12):
    return abs(v - round(v)) < tol


def _maclaurin(a, b, c, z, maxterms=20000):
    term = 1.0 + 0j
    total = 1.0 + 0j
    for n in range(maxterms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
        if term == 0 or abs(term) < 1e-17 * abs(total):
            # two quiet terms in a row guard against an accidental tiny term
            nxt = term * (a + n + 1) * (b + n + 1) / ((c + n + 1) * (n + 2.0)) * z
            if abs(nxt) < 1e-17 * abs(total):
                return total
    raise DomainError("gauss_2f1: Maclaurin series did not converge")


def _log_one_minus(z, side):
    """log(1 - z), taking z = x + i0*side when z is real and > 1."""
    w = 1.0 - z
    if z.imag == 0.0 and z.real > 1.0:
        return math.log(z.real - 1.0) - 1j * math.pi * side
    return cmath.log(w)


def _log_minus(z, side):
    """log(-z), taking z = x + i0*side when z is real and > 0."""
    if z.imag == 0.0 and z.real > 0.0:
        return math.log(z.real) - 1j * math.pi * side
    return cmath.log(-z)


def _near_one(a, b, c, z, side):
    s = c - a - b
    w = 1.0 - z
    lw = _log_one_minus(z, side)
    if not _is_int(s):
        # non-degenerate connection about z = 1
        g1 = special.gamma(c) * special.gamma(s) * special.rgamma(c - a) * special.rgamma(c - b)
        g2 = special.gamma(c) * special.gamma(-s) * special.rgamma(a) * special.rgamma(b)
        f1 = _maclaurin(a, b, a + b - c + 1.0, w)
        f2 = _maclaurin(c - a, c - b, c - a - b + 1.0, w)
        return g1 * f1 + g2 * cmath.exp(s * lw) * f2
    m = int(round(s))
    if m < 0:
        return _degenerate_minus(a, b, c, -m, w, lw)
    return _degenerate_plus(a, b, c, m, w, lw)


def _degenerate_minus(a, b, c, m, w, lw):
    """c = a + b - m with integer m >= 1."""
    gc = special.gamma(c)
    first = 0j
    if m > 0:
        coef = special.gamma(m) * special.rgamma(a) * special.rgamma(b)
        term = 1.0 + 0j
        part = 0j
        for k in range(m):
            if k > 0:
                term *= (a - m + k - 1) * (b - m + k - 1) / (k * (1 - m + k - 1)) * w
            part += term
        first = coef * part * w ** (-m)
    pref = (-1.0) ** m * special.rgamma(a - m) * special.rgamma(b - m)
    second = 0j
    if pref != 0.0:
        coef = 1.0 / math.factorial(m)
        k = 0
        while True:
            bracket = (lw - special.digamma(k + 1.0) - special.digamma(k + m + 1.0)
                       + special.digamma(a + k) + special.digamma(b + k))
            piece = coef * bracket
            second += piece
            if k > 5 and abs(piece) < 1e-17 * max(abs(second), 1e-300):
                break
            coef *= (a + k) * (b + k) / ((k + 1.0) * (k + m + 1.0)) * w
            k += 1
            if k > 20000:
                raise DomainError("gauss_2f1: log series did not converge")
    return gc * (first - pref * second)


def _degenerate_plus(a, b, c, m, w, lw):
    """c = a + b + m with integer m >= 0."""
    gc = special.gamma(c)
    first = 0j
    if m > 0:
        coef = special.rgamma(a + m) * special.rgamma(b + m)
        part = 0j
        poch = 1.0 + 0j
        for k in range(m):
            part += poch * math.factorial(m - k - 1) / math.factorial(k) * (-w) ** k
            poch *= (a + k) * (b + k)
        first = coef * part
    pref = special.rgamma(a) * special.rgamma(b)
    second = 0j
    if pref != 0.0:
        coef = 1.0 / math.factorial(m)
        k = 0
        while True:
            bracket = (lw - special.digamma(k + 1.0) - special.digamma(k + m + 1.0)
                       + special.digamma(a + k + m) + special.digamma(b + k + m))
            piece = coef * bracket
            second += piece
            if k > 5 and abs(piece) < 1e-17 * max(abs(second), 1e-300):
                break
            coef *= (a + m + k) * (b + m + k) / ((k + 1.0) * (k + m + 1.0)) * w
            k += 1
            if k > 20000:
                raise DomainError("gauss_2f1: log series did not converge")
        second *= (-w) ** m
    return gc * (first - pref * second)


def _large_z(a, b, c, z, side):
    if _is_int(b - a):
        return None
    lmz = _log_minus(z, side)
    iz = 1.0 / z
    g1 = special.gamma(c) * special.gamma(b - a) * special.rgamma(b) * special.rgamma(c - a)
    g2 = special.gamma(c) * special.gamma(a - b) * special.rgamma(a) * special.rgamma(c - b)
    f1 = _maclaurin(a, a - c + 1.0, a - b + 1.0, iz)
    f2 = _maclaurin(b, b - c + 1.0, b - a + 1.0, iz)
    return g1 * cmath.exp(-a * lmz) * f1 + g2 * cmath.exp(-b * lmz) * f2


def gauss_2f1(a, b, c, z, side=None):
    """Gauss hypergeometric function 2F1(a, b; c; z).

    ``side`` (+1 or -1) selects z + i0 or z - i0 when z is real and on the
    cut [1, inf); without it such an input raises ``DomainError``.
    """
    a = float(a)
    b = float(b)
    c = float(c)
    z = complex(z)
    if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(c)):
        raise DomainError("gauss_2f1: non-finite parameters")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError("gauss_2f1: non-finite argument")
    if _is_nonpos_int(c):
        raise DomainError("gauss_2f1: c is a non-positive integer")
    on_cut = z.imag == 0.0 and z.real >= 1.0
    if on_cut:
        if z.real == 1.0:
            if c - a - b > 0:
                return complex(special.gamma(c) * special.gamma(c - a - b)
                               * special.rgamma(c - a) * special.rgamma(c - b))
            raise SingularInputError("gauss_2f1: divergent at z = 1")
        if side not in (1, -1):
            raise DomainError("gauss_2f1: z on the branch cut needs side=+1 or -1")
    side = 1 if side is None else int(side)
    if z == 0:
        return 1.0 + 0j
    # terminating series
    for p in (a, b):
        if _is_nonpos_int(p):
            return _maclaurin(a, b, c, z)
    if abs(z) <= 0.75:
        return _maclaurin(a, b, c, z)
    if abs(1.0 - z) <= 0.75:
        return _near_one(a, b, c, z, side)
    if abs(z) >= 1.0 / 0.75:
        val = _large_z(a, b, c, z, side)
        if val is not None:
            return val
    if z.real < 0.5 and abs(z / (z - 1.0)) <= 0.75:
        # Pfaff transformation
        return (1.0 - z) ** (-a) * _maclaurin(a, c - b, c, z / (z - 1.0))
    if on_cut:
        raise DomainError("gauss_2f1: no connection formula for this cut point")
    return complex(special.hyp2f1(a, b, c, z))
