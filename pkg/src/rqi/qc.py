"""Quantum-controlled interactions compared with quantum-field interactions.

Two qubits either couple to a quantum field (Unruh-DeWitt model) or talk
directly through the retarded Green's function of the field (the
quantum-controlled, or qc, model). Included here:

* the exact gapless two-detector states of both models,
* the leading-order qc state of two gapped qubits,
* the gravity-mediated-entanglement (GME) setup with path superpositions.

Gapless states are written in the joint eigenbasis {++, +-, -+, --} of
mu_A (x) mu_B. Each entry uses A_IJ = lam^2 A(L_I, L_J).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, interpolate, optimize

from .errors import ContractError, SingularInputError
from .propagators import GaussianSmearing, Kind, bidistribution_closed
from .states import (SIGMA_X, check_density, finish_perturbative, hs_distance, negativity,
                     partial_transpose)

__all__ = [
    "GMEPaths",
    "GaplessPairInputs",
    "Worldline",
    "gapless_pair_qc",
    "gapless_pair_quantum",
    "gme_delta",
    "gme_newtonian",
    "gme_retarded_H",
    "gme_state",
    "ground_state_pm",
    "hs_asymptote",
    "hs_distance",
    "min_pt_eigenvalue",
    "minkowski_gapless_pair_inputs",
    "qc_two_qubit_perturbative",
    "to_pm_basis",
    "from_pm_basis",
]


@dataclass(frozen=True)
class GaplessPairInputs:
    Waa: float = 0.0
    Wbb: float = 0.0
    Hab: float = 0.0
    Eab: float = 0.0
    Dab: float = 0.0
    Gra: float = 0.0
    Grb: float = 0.0

    def __post_init__(self):
        for name in ("Waa", "Wbb", "Hab", "Eab", "Dab", "Gra", "Grb"):
            v = getattr(self, name)
            if isinstance(v, complex):
                if abs(v.imag) > 1e-12 * max(1.0, abs(v)):
                    raise ContractError(f"{name} must be real")
                v = v.real
            v = float(v)
            if not math.isfinite(v):
                raise ContractError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.Waa < 0 or self.Wbb < 0:
            raise ContractError("Waa and Wbb must be non-negative")


def minkowski_gapless_pair_inputs(lam, T, sigma, L, t0=0.0):
    """Inputs for two equal Gaussian gapless detectors, B shifted by (t0, L, 0, 0)."""
    fa = GaussianSmearing(T=T, sigma=sigma)
    fb = GaussianSmearing(T=T, sigma=sigma, t_c=t0, center=(L, 0.0, 0.0))
    l2 = lam * lam

    def val(kind, f, g):
        return bidistribution_closed(kind, f, g).value

    return GaplessPairInputs(
        Waa=l2 * val(Kind.WIGHTMAN, fa, fa).real,
        Wbb=l2 * val(Kind.WIGHTMAN, fb, fb).real,
        Hab=l2 * val(Kind.HADAMARD, fa, fb).real,
        Eab=l2 * val(Kind.CAUSAL, fa, fb).real,
        Dab=l2 * val(Kind.SYMMETRIC, fa, fb).real,
        Gra=0.5 * l2 * val(Kind.RETARDED, fa, fa).real,
        Grb=0.5 * l2 * val(Kind.RETARDED, fb, fb).real,
    )


def _pm_unitary(mu_a, mu_b):
    cols = []
    for mu in (mu_a, mu_b):
        mu = SIGMA_X if mu is None else np.asarray(mu, dtype=complex)
        if mu.shape != (2, 2) or np.max(np.abs(mu @ mu - np.eye(2))) > 1e-12 \
                or np.max(np.abs(mu - mu.conj().T)) > 1e-12:
            raise ContractError("mu must be a Hermitian involution")
        w, v = np.linalg.eigh(mu)
        if not np.allclose(w, [-1, 1]):
            raise ContractError("mu must have eigenvalues +1 and -1")
        cols.append(v[:, ::-1])            # +1 eigenvector first
    return np.kron(cols[0], cols[1])


def to_pm_basis(rho, mu_a=None, mu_b=None):
    """Rewrite a computational-basis two-qubit matrix in the mu eigenbasis."""
    V = _pm_unitary(mu_a, mu_b)
    return V.conj().T @ np.asarray(rho, dtype=complex) @ V


def from_pm_basis(rho, mu_a=None, mu_b=None):
    V = _pm_unitary(mu_a, mu_b)
    return V @ np.asarray(rho, dtype=complex) @ V.conj().T


def ground_state_pm():
    """|g_A g_B><g_A g_B| in the sigma_x eigenbasis (index 1 of each qubit is |g>)."""
    g = np.array([0.0, 1.0])
    rho = np.kron(np.outer(g, g), np.outer(g, g)).astype(complex)
    return to_pm_basis(rho)


def _check_rho0(rho0, basis, mu_a, mu_b):
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (4, 4):
        raise ContractError("two-qubit state must be 4x4")
    if basis == "computational":
        rho0 = to_pm_basis(rho0, mu_a, mu_b)
    elif basis != "pm":
        raise ContractError("basis must be 'pm' or 'computational'")
    check_density(rho0)
    return rho0


def _finish(rho, basis, mu_a, mu_b):
    rho = 0.5 * (rho + rho.conj().T)
    return from_pm_basis(rho, mu_a, mu_b) if basis == "computational" else rho


def gapless_pair_quantum(rho0, inputs, basis="pm", mu_a=None, mu_b=None):
    """Exact final state of two gapless detectors coupled to a quasifree field."""
    rho0 = _check_rho0(rho0, basis, mu_a, mu_b)
    p = inputs
    Wa, Wb, H = p.Waa, p.Wbb, p.Hab
    em, ep = p.Eab - p.Dab, p.Eab + p.Dab
    F = np.ones((4, 4), dtype=complex)
    F[0, 1] = np.exp(-2 * Wb + 1j * em)
    F[0, 2] = np.exp(-2 * Wa - 1j * ep)
    F[0, 3] = np.exp(-2 * (Wa + Wb + H))
    F[1, 2] = np.exp(-2 * (Wa + Wb - H))
    F[1, 3] = np.exp(-2 * Wa + 1j * ep)
    F[2, 3] = np.exp(-2 * Wb - 1j * em)
    iu = np.triu_indices(4, 1)
    F[(iu[1], iu[0])] = np.conj(F[iu])
    return _finish(F * rho0, basis, mu_a, mu_b)


def gapless_pair_qc(rho0, Dab, basis="pm", mu_a=None, mu_b=None):
    """Final state under the qc unitary exp(-i/2 mu_A mu_B Dab)."""
    rho0 = _check_rho0(rho0, basis, mu_a, mu_b)
    s = np.array([1.0, -1.0, -1.0, 1.0])
    ph = np.exp(-0.5j * Dab * s)
    return _finish(ph[:, None] * rho0 * np.conj(ph)[None, :], basis, mu_a, mu_b)


def hs_asymptote(lam):
    """Large-T limit of the squared HS distance between the two gapless pipelines."""
    x = lam * lam / math.pi
    return 0.125 * (5 + math.exp(-4 * x) - 2 * math.exp(-2 * x) + 4 * math.exp(-x)
                    - 8 * math.exp(-0.5 * x))


def min_pt_eigenvalue(rho):
    pt = partial_transpose(rho)
    return float(np.min(np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))))


def qc_two_qubit_perturbative(fa, fb, lam, strict=True):
    """Leading-order qc evolution of two qubits starting in |g g>.

    ``fa`` and ``fb`` carry the gap in their ``Omega`` field (equal gaps).
    Returns (M_c, N_c, rho_c, negativity) with rho_c in {gg, ge, eg, ee}.
    """
    if fa.Omega != fb.Omega:
        raise ContractError("both qubits need the same gap")
    ap = fa.with_(Omega=fa.Omega)
    bp, bm = fb.with_(Omega=fb.Omega), fb.with_(Omega=-fb.Omega)
    l2 = lam * lam
    Mc = complex(-0.5j * l2 * bidistribution_closed(Kind.SYMMETRIC, ap, bp).value)
    Nc = complex(-0.5j * l2 * bidistribution_closed(Kind.SYMMETRIC, ap, bm).value)
    m2 = abs(Mc) ** 2
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1 - m2
    rho[3, 3] = m2
    rho[3, 0] = Mc
    rho[0, 3] = np.conj(Mc)
    finish_perturbative(rho, strict, "|M_c|^2 is too large; lower the coupling")
    return Mc, Nc, rho, abs(Mc)


# --- gravity-mediated entanglement -------------------------------------------

class Worldline:
    """Spatial path z(t) on [t0, t1]; held at its end points outside."""

    def __init__(self, pos, vel, t0, t1, breaks=()):
        self._pos, self._vel = pos, vel
        self.t0, self.t1 = float(t0), float(t1)
        self.breaks = tuple(float(b) for b in breaks)

    def position(self, t):
        return np.asarray(self._pos(min(max(t, self.t0), self.t1)), dtype=float)

    def velocity(self, t):
        if t < self.t0 or t > self.t1:
            return np.zeros(3)
        return np.asarray(self._vel(t), dtype=float)

    @classmethod
    def static(cls, x, T):
        x = np.asarray(x, dtype=float)
        return cls(lambda t: x, lambda t: np.zeros(3), 0.0, T)

    @classmethod
    def uniform(cls, x0, v, T):
        x0, v = np.asarray(x0, dtype=float), np.asarray(v, dtype=float)
        if np.linalg.norm(v) >= 1:
            raise ContractError("speed must be below 1")
        return cls(lambda t: x0 + v * t, lambda t: v, 0.0, T)

    @classmethod
    def trapezoid(cls, center, direction, amplitude, ramp, T):
        """Split along ``direction`` by ``amplitude`` over ``ramp``, hold, recombine."""
        c = np.asarray(center, dtype=float)
        n = np.asarray(direction, dtype=float)
        n = n / np.linalg.norm(n)
        if not 0 < ramp <= T / 2:
            raise ContractError("need 0 < ramp <= T/2")
        speed = amplitude / ramp
        if abs(speed) >= 1:
            raise ContractError("split speed must be below 1")

        def d(t):
            if t < ramp:
                return speed * t
            if t > T - ramp:
                return speed * (T - t)
            return amplitude

        def dd(t):
            if t < ramp:
                return speed
            if t > T - ramp:
                return -speed
            return 0.0

        return cls(lambda t: c + n * d(t), lambda t: n * dd(t), 0.0, T, (ramp, T - ramp))

    @classmethod
    def from_samples(cls, t, xyz):
        """Cubic interpolation of sampled (t, x, y, z) rows."""
        t = np.asarray(t, dtype=float)
        xyz = np.asarray(xyz, dtype=float)
        sp = interpolate.CubicSpline(t, xyz, axis=0)
        dsp = sp.derivative()
        if np.max(np.linalg.norm(dsp(np.linspace(t[0], t[-1], 20 * len(t))), axis=1)) >= 1:
            raise ContractError("sampled path is not subluminal")
        return cls(sp, dsp, t[0], t[-1])


@dataclass
class GMEPaths:
    L1: Worldline
    R1: Worldline
    L2: Worldline
    R2: Worldline
    m1: float = 1.0
    m2: float = 1.0
    T: float = 1.0
    G: float = 1.0

    def path(self, label):
        return getattr(self, label)

    PAIRS = (("L1", "L2"), ("L1", "R2"), ("R1", "L2"), ("R1", "R2"))


def _dist(paths, p1, p2, t):
    d = np.linalg.norm(paths.path(p1).position(t) - paths.path(p2).position(t))
    if d < 1e-12:
        raise SingularInputError(f"paths {p1} and {p2} coincide at t={t}")
    return d


def gme_newtonian(paths, epsabs=1e-13, epsrel=1e-12):
    """Newtonian phases Phi_{p1 p2} and the resulting negativity."""
    k = paths.G * paths.m1 * paths.m2
    table = {}
    for p1, p2 in GMEPaths.PAIRS:
        val, _ = integrate.quad(lambda t: 1.0 / _dist(paths, p1, p2, t), 0.0, paths.T,
                                epsabs=epsabs, epsrel=epsrel, limit=400, points=_kinks(paths))
        table[(p1, p2)] = -k * val
    ph = table[("L1", "L2")] + table[("R1", "R2")] - table[("L1", "R2")] - table[("R1", "L2")]
    return table, max(0.0, 0.5 * math.sin(0.5 * ph))


def _kinks(paths):
    pts = set()
    for lab in ("L1", "R1", "L2", "R2"):
        w = paths.path(lab)
        pts.update((w.t0, w.t1) + w.breaks)
    pts = sorted(p for p in pts if 0 < p < paths.T)
    return pts or None


def _lorentz_u(v):
    g = 1.0 / math.sqrt(1.0 - float(np.dot(v, v)))
    return g, g * np.asarray(v)


def _minkowski_dot(u, w):
    # signature (-, +, +, +)
    return -u[0] * w[0] + float(np.dot(u[1], w[1]))


def _lag_time(src, z_obs, t, sign, dmax):
    """Retarded (sign=+1) or advanced (sign=-1) time of ``src`` seen from z_obs at t."""

    def f(tr):
        return sign * (t - tr) - np.linalg.norm(z_obs - src.position(tr))

    lo, hi = (t - dmax - 1.0, t) if sign > 0 else (t, t + dmax + 1.0)
    try:
        return optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-14, maxiter=200)
    except ValueError as exc:
        raise ContractError("retarded-time bracket failed; path data may be superluminal") from exc


def _half_term(k, obs, src, t, sign, dmax):
    z2 = obs.position(t)
    tr = _lag_time(src, z2, t, sign, dmax)
    z1 = src.position(tr)
    R = z2 - z1
    r = np.linalg.norm(R)
    if r < 1e-12:
        raise SingularInputError("coincident source and observer")
    v1 = src.velocity(tr)
    u2 = _lorentz_u(obs.velocity(t))
    u1 = _lorentz_u(v1)
    dot = _minkowski_dot(u2, u1)
    den = u2[0] * u1[0] * (1.0 - sign * float(np.dot(R / r, v1)))
    return -k / r * (dot * dot - 0.5) / den


def _dmax(paths, p1, p2):
    ts = np.linspace(0, paths.T, 65)
    a = np.array([paths.path(p1).position(t) for t in ts])
    b = np.array([paths.path(p2).position(t) for t in ts])
    return float(np.max(np.linalg.norm(a[:, None] - b[None], axis=-1))) * 1.5 + 1.0


def gme_retarded_H(paths, t, pair, kernel="retarded"):
    """Velocity-dependent interaction energy of one branch pair at time t."""
    p1, p2 = pair
    sign = 1 if kernel == "retarded" else -1
    if kernel not in ("retarded", "advanced"):
        raise ContractError("kernel must be 'retarded' or 'advanced'")
    k = paths.G * paths.m1 * paths.m2
    dmax = _dmax(paths, p1, p2)
    w1, w2 = paths.path(p1), paths.path(p2)
    return _half_term(k, w2, w1, t, sign, dmax) + _half_term(k, w1, w2, t, sign, dmax)


def gme_delta(paths, pair, kernel="retarded", epsabs=1e-12, epsrel=1e-10):
    """Delta_{p1 p2} = (1/2 pi G) int_0^T H_I dt, so that lam^2 Delta = int H_I dt."""
    p1, p2 = pair
    dmax = _dmax(paths, p1, p2)
    sign = 1 if kernel == "retarded" else -1
    k = paths.G * paths.m1 * paths.m2
    w1, w2 = paths.path(p1), paths.path(p2)

    def h(t):
        return _half_term(k, w2, w1, t, sign, dmax) + _half_term(k, w1, w2, t, sign, dmax)

    val, _ = integrate.quad(h, 0.0, paths.T, epsabs=epsabs, epsrel=epsrel, limit=400,
                            points=_kinks(paths))
    return val / (2 * math.pi * paths.G)


_GME_BASIS = (("L1", "L2"), ("R1", "L2"), ("L1", "R2"), ("R1", "R2"))


def gme_state(delta, lam, H=None, Lv=0.0, Li=0.0, strict=True):
    """Leading-order GME state in {L1L2, R1L2, L1R2, R1R2} and its negativities.

    ``delta`` and ``H`` map branch pairs (p1, p2) to Delta_{p1p2} and
    H_{p1p2}. Returns (rho, N_q, N_c, meta).
    """
    H = H or {}
    if Lv < Li:
        raise ContractError("the interference noise L_I cannot exceed L_V")
    D = np.array([float(delta[p]) for p in _GME_BASIS])
    Hv = {p: float(H.get(p, 0.0)) for p in _GME_BASIS}
    l2 = lam * lam
    rho0 = np.full((4, 4), 0.25, dtype=complex)
    drc = 0.25j * l2 * (D[:, None] - D[None, :])
    hq = Hv[("L1", "R2")] + Hv[("R1", "L2")] - Hv[("L1", "L2")] - Hv[("R1", "R2")]
    drq = 0.25 * l2 * hq * np.array([[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]])
    ham = np.array([[0, 1, 1, 2], [1, 0, 2, 1], [1, 2, 0, 1], [2, 1, 1, 0]])
    drl = -0.5 * l2 * (Lv - Li) * ham
    rho = rho0 + drc + drq + drl
    dcomb = D[0] + D[3] - D[1] - D[2]
    hcomb = Hv[("L1", "L2")] + Hv[("R1", "R2")] - Hv[("L1", "R2")] - Hv[("R1", "L2")]
    gcomb = 0.5 * hcomb + 0.5j * dcomb
    # local noise L = 2 (L_V - L_I): the value that reproduces the negativity of rho
    Nq = 0.5 * l2 * (abs(gcomb) - 2 * (Lv - Li))
    Nc = 0.25 * l2 * abs(dcomb)
    # positivity at first order needs L_V - L_I >= |H combination| / 4
    finish_perturbative(rho, strict, "need L_V - L_I >= |H_L1R2 + H_R1L2 - H_L1L2 - H_R1R2|/4 "
                        "and small lam^2 Delta")
    meta = {"N_state": negativity(rho), "N_c_exact": 0.5 * abs(math.sin(0.5 * l2 * dcomb))}
    return rho, Nq, Nc, meta
