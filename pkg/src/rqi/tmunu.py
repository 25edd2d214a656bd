"""Stress-energy of a covariant localized detector.

A classical complex field psi_c = exp(-i w_c t) sech(r/l)/l traps the
detector field in the potential -6 sech^2(r/l)/l^2. A perfect fluid coupled
to |psi_c|^2 keeps the total stress-energy conserved. Quantities are
returned in units set by l (densities and pressures ~ 1/l^4).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ContractError, DomainError

__all__ = [
    "ALPHA",
    "G0_CLOSED",
    "EnergyConditions",
    "GroundTmunu",
    "ProbeModel",
    "bound_mode",
    "bound_mode_laplacian",
    "energy_conditions",
    "excited_fluid",
    "fluid_density",
    "fluid_pressure",
    "g0_quadrature",
    "ground_tmunu",
]

ALPHA = -6.0
LOG_GLAISHER = 0.248754477033784
ZETA_PRIME_M3 = 0.00537857635777430
G0_CLOSED = 4 * (4 * LOG_GLAISHER - 40 * ZETA_PRIME_M3 - 1 / 3 - 4 / 45 * math.log(2))
_R_CUT = 40.0   # in units of l; the neglected tail is below 1e-30


@dataclass(frozen=True)
class ProbeModel:
    ell: float = 1.0
    mu_fluid: float = 0.2
    eta: int = 0
    m_c: float = 2.0
    m_d: float = 5.0

    def __post_init__(self):
        if self.ell <= 0:
            raise DomainError("ell must be positive")
        if not 0 < self.mu_fluid < self.ell ** 2:
            raise ContractError("need 0 < mu_fluid < ell^2; the pressure diverges otherwise")
        if self.eta not in (0, 1):
            raise ContractError("eta must be 0 or 1")
        if self.m_c * self.ell <= 1 or self.m_d * self.ell <= 1:
            raise ContractError("need m_c l > 1 and m_d l > 1 (unstable bound mode otherwise)")

    @property
    def omega_c(self):
        return math.sqrt(self.m_c ** 2 - 1 / self.ell ** 2)

    @property
    def omega_d(self):
        return math.sqrt(self.m_d ** 2 - 1 / self.ell ** 2)


def _G(u):
    """Pressure source in units of 1/l, as a function of u = r/l."""
    if u < 1e-4:
        return 4 * u * (1 - 5 * u * u / 3)
    s = 1 / math.cosh(u)
    t = math.tanh(u)
    return 4 * s * s * t * t / u


def _dG(u, model):
    """Extra source from the excited bound mode, u = r/l, units 1/l."""
    # l^2 times the printed Delta G, matching the 1/(l^2 D) prefactor of P
    s = 1 / math.cosh(u)
    t = math.tanh(u)
    ell = model.ell
    return -9 * t ** 3 * s ** 4 / (4 * math.pi * u * u * ell * model.omega_d)


def _tail(u, src):
    """int_u^cut src(v) dv by adaptive quadrature, split at unit intervals."""
    if u >= _R_CUT:
        return 0.0
    edges = [u] + [float(k) for k in range(int(math.floor(u)) + 1, int(_R_CUT) + 1)]
    if edges[-1] < _R_CUT:
        edges.append(_R_CUT)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b > a:
            total += integrate.quad(src, a, b, epsabs=1e-15, epsrel=1e-13, limit=200)[0]
    return total


def _radius(r, model):
    r = float(r)
    if not r > 0 or not math.isfinite(r):
        raise DomainError("r must be positive and finite")
    return r / model.ell


def _D(u, model):
    return model.ell ** 2 - model.mu_fluid / math.cosh(u) ** 2


def fluid_pressure(model, r):
    u = _radius(r, model)
    return _tail(u, _G) / (model.ell ** 2 * _D(u, model))


def _tanh_over(u):
    return 1 - u * u / 3 if u < 1e-5 else math.tanh(u) / u


def fluid_density(model, r, P=None):
    u = _radius(r, model)
    P = fluid_pressure(model, r) if P is None else P
    return 3 * model.eta * P + 2 / (model.mu_fluid * model.ell ** 2) * _tanh_over(u)


def g0_quadrature():
    """l^2 (l^2 - mu) P(0+), which is independent of the model."""
    return _tail(0.0, _G)


@dataclass
class EnergyConditions:
    r: np.ndarray
    rho: np.ndarray
    P: np.ndarray
    rho_plus_P: np.ndarray
    rho_plus_3P: np.ndarray
    rho_minus_absP: np.ndarray
    w: np.ndarray

    @property
    def passed(self):
        return {
            "null": bool(np.all(self.rho_plus_P > 0)),
            "strong": bool(np.all(self.rho_plus_3P > 0)),
            "dominant": bool(np.all(self.rho_minus_absP > 0)),
        }


def energy_conditions(model, r):
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r <= 0) or np.any(r / model.ell > 10 + 1e-12):
        raise DomainError("grid must lie in 0 < r/l <= 10")
    P = np.array([fluid_pressure(model, x) for x in r])
    rho = np.array([fluid_density(model, x, p) for x, p in zip(r, P)])
    return EnergyConditions(r, rho, P, rho + P, rho + 3 * P, rho - np.abs(P), P / rho)


def bound_mode(model):
    """Klein-Gordon normalized bound mode Phi_1(r) and its frequency."""
    ell, w = model.ell, model.omega_d
    amp = math.sqrt(3 / (8 * math.pi * ell * w))

    def phi(r):
        r = np.asarray(r, dtype=float)
        u = r / ell
        with np.errstate(invalid="ignore", divide="ignore"):
            core = np.where(u < 1e-5, (1 - 4 * u * u / 3) / ell,
                            np.tanh(u) / np.where(r == 0, 1.0, r) / np.cosh(u))
        return amp * core

    return phi, w


def bound_mode_laplacian(model, r):
    """Radial Laplacian of Phi_1, from (r Phi)'' / r with r Phi ~ tanh sech."""
    ell, w = model.ell, model.omega_d
    amp = math.sqrt(3 / (8 * math.pi * ell * w))
    u = np.asarray(r, dtype=float) / ell
    s, t = 1 / np.cosh(u), np.tanh(u)
    # d^2/du^2 (s t) = s t (t^2 - 5 s^2)
    return amp * s * t * (t * t - 5 * s * s) / (ell * ell * np.asarray(r, dtype=float))


@dataclass(frozen=True)
class GroundTmunu:
    rho0: float
    R0: float
    P0: float
    deviator: float
    p: float


def ground_tmunu(model, r):
    """Energy density, radial and angular pressure with the detector in its ground state."""
    u = _radius(r, model)
    ell, mu = model.ell, model.mu_fluid
    s2 = 1 / math.cosh(u) ** 2
    P = fluid_pressure(model, r)
    rho = fluid_density(model, r, P)
    dress = 1 - mu * s2 / ell ** 2
    rho0 = 2 * s2 / ell ** 2 * model.m_c ** 2 + dress * rho
    R0 = -2 * s2 * s2 / ell ** 4 + dress * P
    P0 = -2 * s2 / ell ** 4 + dress * P
    return GroundTmunu(rho0, R0, P0, 2 / 3 * (R0 - P0), (R0 + 2 * P0) / 3)


def excited_fluid(model, r):
    """Fluid pressure and density with the detector in its first excited state.

    Only the fluid part is available; the field part of the excited
    stress-energy is not provided.
    """
    u = _radius(r, model)
    ell = model.ell
    P1 = _tail(u, lambda v: _G(v) + _dG(v, model)) / (ell ** 2 * _D(u, model))
    s, t = 1 / math.cosh(u), math.tanh(u)
    rr = u * ell
    g = 3 * t * t * s * s / (8 * math.pi * rr * rr * model.omega_d * ell)
    rho1 = (3 * model.eta * P1 + 2 / (model.mu_fluid * ell ** 2) * _tanh_over(u)
            + ALPHA / (2 * model.mu_fluid) * g)
    return P1, rho1
