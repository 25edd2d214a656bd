"""Entanglement harvesting with two probes.

Two detectors (qubits or harmonic oscillators) start in their ground states
and couple to a quasifree field. To second order in lambda the joint state
is built from

    L_ij = lam^2 W(L_i^-, L_j^+),  M = -lam^2 G_F(L_a^+, L_b^+),
    K_i = -lam^2/sqrt2 G_F(L_i^+, L_i^+),  D_ab = (lam^2/2) Delta(L_a^+, L_b^+),

with L^+-(x) = L(x) exp(+-i Omega t). Qubit states are written in the basis
{gg, ge, eg, ee}; oscillator states in {00, 01, 02, 10, 11, 12, 20, 21, 22},
first label for A.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .detector import _one_minus_sqrtpi_x_erfcx, vacuum_response
from .errors import ContractError, DomainError
from .propagators import GaussianSmearing, Kind, bidistribution_closed
from .specfun import erfi_scaled
from .states import finish_perturbative

__all__ = [
    "HARVEST_THRESHOLD",
    "HarvestTerms",
    "asymptotics",
    "feynman_minkowski",
    "minkowski_harvest_terms",
    "negativity_closed_minkowski",
    "negativity_general",
    "negativity_leading",
    "optimal_gap",
    "oscillator_pair_state",
    "qubit_pair_state",
    "signalling_minkowski",
]

HARVEST_THRESHOLD = 0.1
_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class HarvestTerms:
    Laa: float = 0.0
    Lbb: float = 0.0
    Lab: complex = 0j
    M: complex = 0j
    Dab: complex = 0j
    Ka: complex = 0j
    Kb: complex = 0j

    def __post_init__(self):
        if self.Laa < -1e-12 or self.Lbb < -1e-12:
            raise ContractError("local noise terms must be non-negative")


def _bil(kind, lhs, rhs):
    """Bilinear extension over lists of (coefficient, smearing)."""
    out = 0j
    for ca, fa in lhs:
        for cb, fb in rhs:
            if ca == 0 or cb == 0:
                continue
            out += ca * cb * bidistribution_closed(kind, fa, fb).value
    return out


def minkowski_harvest_terms(lam, fa, fb):
    """Harvesting terms for two Gaussian detectors in the massless vacuum.

    The ``Omega`` field of each smearing is the detector gap.
    """
    ap, am = fa.with_(Omega=fa.Omega), fa.with_(Omega=-fa.Omega)
    bp, bm = fb.with_(Omega=fb.Omega), fb.with_(Omega=-fb.Omega)
    W, F, D = Kind.WIGHTMAN, Kind.FEYNMAN, Kind.SYMMETRIC
    l2 = lam * lam
    return HarvestTerms(
        Laa=float(l2 * bidistribution_closed(W, am, ap).value.real),
        Lbb=float(l2 * bidistribution_closed(W, bm, bp).value.real),
        Lab=complex(l2 * bidistribution_closed(W, am, bp).value),
        M=complex(-l2 * bidistribution_closed(F, ap, bp).value),
        Dab=complex(0.5 * l2 * bidistribution_closed(D, ap, bp).value),
        Ka=complex(-l2 / math.sqrt(2) * bidistribution_closed(F, ap, ap).value),
        Kb=complex(-l2 / math.sqrt(2) * bidistribution_closed(F, bp, bp).value),
    )


_HINT = "the dropped O(lam^4) entries (|M|^2, |K|^2) are too large; lower the coupling"


def _hygiene(rho, strict):
    return finish_perturbative(rho, strict, _HINT)


def qubit_pair_state(terms, strict=True):
    """Leading-order qubit pair state; ``strict=False`` returns it even if not positive."""
    t = terms
    rho = np.array([
        [1 - t.Laa - t.Lbb, 0, 0, np.conj(t.M)],
        [0, t.Lbb, t.Lab, 0],
        [0, np.conj(t.Lab), t.Laa, 0],
        [t.M, 0, 0, 0],
    ], dtype=complex)
    return _hygiene(rho, strict)


def _ix(na, nb):
    return 3 * na + nb


def oscillator_pair_state(terms, strict=True):
    t = terms
    rho = np.zeros((9, 9), dtype=complex)
    rho[0, 0] = 1 - t.Laa - t.Lbb
    rho[_ix(0, 1), _ix(0, 1)] = t.Lbb
    rho[_ix(1, 0), _ix(1, 0)] = t.Laa
    rho[_ix(0, 1), _ix(1, 0)] = t.Lab
    rho[_ix(1, 0), _ix(0, 1)] = np.conj(t.Lab)
    rho[_ix(1, 1), 0] = t.M
    rho[0, _ix(1, 1)] = np.conj(t.M)
    rho[_ix(0, 2), 0] = t.Kb
    rho[0, _ix(0, 2)] = np.conj(t.Kb)
    rho[_ix(2, 0), 0] = t.Ka
    rho[0, _ix(2, 0)] = np.conj(t.Ka)
    return _hygiene(rho, strict)


def _neg_formula(M, Laa, Lbb):
    return max(0.0, math.sqrt(abs(M) ** 2 + (0.5 * (Laa - Lbb)) ** 2) - 0.5 * (Laa + Lbb))


def negativity_leading(terms):
    return _neg_formula(terms.M, terms.Laa, terms.Lbb)


def negativity_general(alpha_a, beta_a, alpha_b, beta_b, fa, fb, lam):
    """Leading-order negativity for pure product initial qubit states.

    |psi_i> = cos(alpha_i)|g> - exp(i beta_i) sin(alpha_i)|e>.
    Returns (negativity, dict of the L^gen and M^gen terms).
    """
    sm = {}
    for name, f in (("a", fa), ("b", fb)):
        sm[name] = (f.with_(Omega=f.Omega), f.with_(Omega=-f.Omega))
    ang = {"a": (alpha_a, beta_a), "b": (alpha_b, beta_b)}

    def L(i, j):
        (ip, im), (jp, jm) = sm[i], sm[j]
        ai, bi = ang[i]
        aj, bj = ang[j]
        lhs = [(math.cos(aj) ** 2, im), (-cmath.exp(-2j * bj) * math.sin(aj) ** 2, ip)]
        rhs = [(math.cos(ai) ** 2, jp), (-cmath.exp(2j * bi) * math.sin(ai) ** 2, jm)]
        return lam ** 2 * _bil(Kind.WIGHTMAN, lhs, rhs)

    (ap, am), (bp, bm) = sm["a"], sm["b"]
    lhs = [(math.cos(alpha_a) ** 2, ap), (-cmath.exp(2j * beta_a) * math.sin(alpha_a) ** 2, am)]
    rhs = [(math.cos(alpha_b) ** 2, bp), (-cmath.exp(2j * beta_b) * math.sin(alpha_b) ** 2, bm)]
    Mgen = lam ** 2 * _bil(Kind.FEYNMAN, lhs, rhs)
    Laa, Lbb = L("a", "a").real, L("b", "b").real
    terms = {"Laa": Laa, "Lbb": Lbb, "Lab": L("a", "b"), "M": Mgen}
    return _neg_formula(Mgen, Laa, Lbb), terms


def feynman_minkowski(lam, Omega, T, sigma, L, t0):
    """lam^2 G_F(L_a^+, L_b^+) for equal Gaussian detectors, B delayed by t0."""
    if L <= 0 or sigma <= 0 or T <= 0:
        raise DomainError("need L, sigma, T > 0")
    a = math.sqrt(T * T + sigma * sigma)
    xp, xm = (L + t0) / (2 * a), (L - t0) / (2 * a)
    e1, e2 = math.exp(-xp * xp), math.exp(-xm * xm)
    br = (erfi_scaled(xp) + erfi_scaled(xm)
          - 1j * (e1 * special.erf((L * T * T - t0 * sigma ** 2) / (2 * T * sigma * a))
                  + e2 * special.erf((L * T * T + t0 * sigma ** 2) / (2 * T * sigma * a))))
    return (lam ** 2 * T * T * math.exp(-(Omega * T) ** 2) * cmath.exp(1j * Omega * t0)
            / (8 * _SQRT_PI * L * a) * br)


def signalling_minkowski(lam, Omega, T, sigma, L):
    """(lam^2/2)|Delta(L_a^+, L_b^+)| at t0 = 0."""
    al = math.sqrt(1 + sigma ** 2 / T ** 2)
    return (lam ** 2 * math.exp(-(Omega * T) ** 2) / (4 * al * _SQRT_PI) * T / L
            * math.exp(-L * L / (4 * al * al * T * T)) * special.erf(L / (2 * al * sigma)))


def _neg_anal(lam, Omega, T, sigma, L):
    al = math.sqrt(1 + sigma ** 2 / T ** 2)
    x = L / (2 * al * T)
    ex = math.exp(-x * x)
    corr = _SQRT_PI * al * T / L * math.hypot(ex * special.erf(L / (2 * al * sigma)), erfi_scaled(x))
    y = Omega * T / al
    if y >= 0:
        local = -_one_minus_sqrtpi_x_erfcx(y)
    else:
        local = _SQRT_PI * y * special.erfcx(y) - 1.0
    val = lam ** 2 * math.exp(-(Omega * T) ** 2) / (4 * math.pi * al * al) * (corr + local)
    return max(0.0, val)


def negativity_closed_minkowski(lam, Omega, T, sigma, L, t0=0.0, threshold=HARVEST_THRESHOLD):
    """Closed-form negativity and signalling for two equal Gaussian detectors.

    Returns (negativity, signalling, harvested) where harvested means
    signalling <= threshold * negativity with negativity > 0.
    """
    if t0 == 0.0:
        neg = _neg_anal(lam, Omega, T, sigma, L)
        sig = signalling_minkowski(lam, Omega, T, sigma, L)
    else:
        M = feynman_minkowski(lam, Omega, T, sigma, L, t0)
        loc = vacuum_response(lam, Omega, T, sigma)
        neg = max(0.0, abs(M) - loc)
        fa = GaussianSmearing(T=T, sigma=sigma, Omega=Omega)
        fb = GaussianSmearing(T=T, sigma=sigma, Omega=Omega, t_c=t0, center=(L, 0.0, 0.0))
        sig = 0.5 * lam ** 2 * abs(bidistribution_closed(Kind.SYMMETRIC, fa, fb).value)
    return neg, sig, bool(neg > 0 and sig <= threshold * neg)


def optimal_gap(lam, T, sigma, L):
    """Numerical argmax over Omega of the closed-form negativity."""
    guess = L / (2 * T * T)

    def f(w):
        return -_neg_anal(lam, w, T, sigma, L)

    res = optimize.minimize_scalar(f, bounds=(0.25 * guess, 3.0 * guess), method="bounded",
                                   options={"xatol": 1e-10 / T})
    return float(res.x), _neg_anal(lam, float(res.x), T, sigma, L)


def asymptotics(lam, T, sigma, L):
    """Large-separation optimal gap L/(2T^2) and negativity at that gap."""
    w = L / (2 * T * T)
    n = 4 * lam ** 2 / math.pi * math.exp(-L * L / (4 * T * T)) * T ** 4 / L ** 4
    return w, n
