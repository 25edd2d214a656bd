"""Gaussian analysis of localized field modes in the massless Minkowski vacuum.

Modes are pairs (Phi_t(F), Pi_t(F)) of field and momentum smeared on the
slice t with F^(delta)(x) = N (1 - |x|^2/R^2)^delta on the ball of radius R.
Phase-space vectors are ordered (Phi_1, Pi_1, Phi_2, Pi_2, ...), with the
modes of region A first. The covariance is sigma^ab = <{X^a, X^b}> (no 1/2,
so the vacuum has symplectic eigenvalues 1) and the commutator matrix is
C^ab = -i <[X^a, X^b]>.

Correlators reduce to radial momentum integrals of the spherical transform

    F^(delta)^(k) = 4 pi N R^3 sqrt(pi/2) 2^delta Gamma(delta+1) b^(-delta-3/2) J_(delta+3/2)(b),

b = k R, evaluated on a composite Gauss-Legendre grid.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import ContractError, LinearDependenceError, NumericalFailure, PartitionError, \
    UnsupportedConfigurationError

__all__ = [
    "GaussianState",
    "ModeSpec",
    "NegativityCores",
    "canonical_form",
    "f_delta",
    "f_delta_hat",
    "klco_cores",
    "log_negativity",
    "mode_correlators",
    "multi_time_modes",
    "symplectic_gram_schmidt",
    "symplectic_spectrum",
    "vacuum_state",
]


NU_TOL = 1e-12   # symplectic eigenvalues this close to 1 are round-off


def canonical_form(n):
    """Block-diagonal symplectic form for n canonical pairs."""
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class ModeSpec:
    region: str
    R: float = 1.0
    delta: float = 2.0
    center: tuple = (0.0, 0.0, 0.0)
    slice_time: float = 0.0

    def __post_init__(self):
        if self.region not in ("A", "B"):
            raise ContractError("region must be 'A' or 'B'")
        if self.R <= 0 or self.delta < 1:
            raise ContractError("need R > 0 and delta >= 1")
        object.__setattr__(self, "center", tuple(float(x) for x in self.center))


def _norm(R, delta):
    return math.sqrt(special.gamma(2.5 + 2 * delta) / special.gamma(1 + 2 * delta)) / (
        math.pi ** 0.75 * R ** 1.5)


def f_delta(r, R=1.0, delta=2.0):
    """F^(delta) as a function of the distance to its centre."""
    r = np.asarray(r, dtype=float)
    out = np.where(r < R, _norm(R, delta) * np.clip(1 - (r / R) ** 2, 0, None) ** delta, 0.0)
    return out[()] if out.ndim == 0 else out


def _fhat_amp(R, delta):
    return 4 * math.pi * _norm(R, delta) * R ** 3 * math.sqrt(math.pi / 2) * 2 ** delta \
        * special.gamma(delta + 1)


def f_delta_hat(k, R=1.0, delta=2.0):
    """Three-dimensional Fourier transform of F^(delta) (real, radial)."""
    k = np.asarray(k, dtype=float)
    b = k * R
    nu = delta + 1.5
    out = np.empty_like(b)
    small = b < 1e-3
    # b^-nu J_nu(b) -> 2^-nu / Gamma(nu + 1) (1 - b^2/(4(nu+1)))
    bs = b[small]
    out[small] = 2.0 ** -nu / special.gamma(nu + 1) * (1 - bs * bs / (4 * (nu + 1)))
    bl = b[~small]
    out[~small] = bl ** -nu * special.jv(nu, bl)
    out *= _fhat_amp(R, delta)
    return out[()] if out.ndim == 0 else out


class _KGrid:
    """Composite Gauss-Legendre grid on [0, K] with a tail bound."""

    def __init__(self, modes, freq_max, tol=1e-11, max_nodes=4_000_000):
        Rmin = min(m.R for m in modes)
        dmin = min(m.delta for m in modes)
        amp = max(_fhat_amp(m.R, m.delta) for m in modes)
        # |fhat|^2 <= amp^2 (2/pi) (kR)^(-2 delta - 4); worst integrand k^3
        c = amp ** 2 * (2 / math.pi) * Rmin ** (-2 * dmin - 4) / (2 * math.pi ** 2)
        K = (c / (2 * dmin * tol)) ** (1.0 / (2 * dmin))
        K = max(K, 60.0 / Rmin)
        h = min(0.25 * Rmin, math.pi / (4.0 * max(freq_max, 1e-9)))
        npan = int(math.ceil(K / h))
        x, w = np.polynomial.legendre.leggauss(16)
        if npan * 16 > max_nodes:
            npan = max_nodes // 16
        h = K / npan
        edges = np.arange(npan) * h
        self.k = (edges[:, None] + 0.5 * h * (x[None, :] + 1)).ravel()
        self.w = np.tile(0.5 * h * w, npan)
        self.K = npan * h
        self.tail_bound = c * self.K ** (-2 * dmin) / (2 * dmin)


def _sinc(x):
    return np.sinc(x / math.pi)


def mode_correlators(modes, tol=1e-11, check_partition=True):
    """Raw vacuum covariance and commutator matrices for a list of modes.

    Returns (sigma, C, meta). Region A modes must precede region B modes.
    """
    modes = list(modes)
    if not modes:
        raise ContractError("no modes")
    regions = [m.region for m in modes]
    nA = regions.count("A")
    if regions != ["A"] * nA + ["B"] * (len(modes) - nA):
        raise ContractError("region A modes must come first")
    if check_partition:
        _check_partition(modes)
    n = len(modes)
    cen = np.array([m.center for m in modes])
    ts = np.array([m.slice_time for m in modes])
    d = np.linalg.norm(cen[:, None, :] - cen[None, :, :], axis=-1)
    dt = ts[:, None] - ts[None, :]
    grid = _KGrid(modes, float(np.max(d) + np.max(np.abs(dt)) + max(m.R for m in modes)), tol)
    k, w = grid.k, grid.w
    shapes = {}
    fh = []
    for m in modes:
        key = (m.R, m.delta)
        if key not in shapes:
            shapes[key] = f_delta_hat(k, m.R, m.delta)
        fh.append(shapes[key])
    sigma = np.zeros((2 * n, 2 * n))
    C = np.zeros((2 * n, 2 * n))
    pref = 1.0 / (2 * math.pi ** 2)
    for i in range(n):
        for j in range(i, n):
            base = w * fh[i] * fh[j] * _sinc(k * d[i, j]) * pref
            cs, sn = np.cos(k * dt[i, j]), np.sin(k * dt[i, j])
            I1c, I1s = np.dot(base * k, cs), np.dot(base * k, sn)
            I2c, I2s = np.dot(base * k * k, cs), np.dot(base * k * k, sn)
            I3c, I3s = np.dot(base * k ** 3, cs), np.dot(base * k ** 3, sn)
            a, b = 2 * i, 2 * j
            blk_s = np.array([[I1c, I2s], [-I2s, I3c]])
            blk_c = np.array([[-I1s, I2c], [-I2c, -I3s]])
            sigma[a:a + 2, b:b + 2] = blk_s
            sigma[b:b + 2, a:a + 2] = blk_s.T
            C[a:a + 2, b:b + 2] = blk_c
            C[b:b + 2, a:a + 2] = -blk_c.T
    meta = {"n_a": nA, "k_max": grid.K, "tail_bound": grid.tail_bound, "nodes": k.size}
    return sigma, C, meta


def _check_partition(modes):
    A = [m for m in modes if m.region == "A"]
    B = [m for m in modes if m.region == "B"]
    for a in A:
        for b in B:
            dist = math.dist(a.center, b.center)
            if dist < a.R + b.R + abs(a.slice_time - b.slice_time) - 1e-12:
                raise PartitionError(
                    f"modes at {a.center} (t={a.slice_time}) and {b.center} "
                    f"(t={b.slice_time}) are not causally disjoint")


def _symp(u, v, C):
    return u @ C @ v


def _gs_region(C, tol=1e-10, labels=None):
    """Rows M with M C M^T canonical, built pair by pair from unit vectors."""
    n2 = C.shape[0]
    vecs = [np.eye(n2)[i] for i in range(n2)]
    scale = max(np.max(np.abs(C)), 1e-300)
    out = []
    while vecs:
        u = vecs.pop(0)
        best, bi = 0.0, None
        for idx, v in enumerate(vecs):
            val = _symp(u, v, C)
            if abs(val) > abs(best) * (1 + 1e-12):
                best, bi = val, idx
            if idx == 0 and abs(val) > 0.5 * scale * np.dot(u, u) ** 0.5 * np.dot(v, v) ** 0.5:
                break
        nu_ = np.linalg.norm(u)
        if bi is None or abs(best) <= tol * scale * max(nu_, 1e-300) ** 2 or nu_ < tol:
            where = len(out) // 2
            lab = labels[where] if labels is not None and where < len(labels) else where
            raise LinearDependenceError(f"degenerate mode set at mode {lab}", index=lab)
        w = vecs.pop(bi)
        s = math.sqrt(abs(best))
        q = u / s
        p = w / s if best > 0 else -w / s
        # two passes of the symplectic projection for stability
        for _ in range(2):
            vecs = [v + _symp(p, v, C) * q - _symp(q, v, C) * p for v in vecs]
        out.extend([q, p])
    return np.array(out)


def symplectic_gram_schmidt(C, sigma, n_a, tol=1e-10):
    """Canonicalize the commutator separately in each region.

    Returns a :class:`GaussianState` plus the congruence used.
    """
    C = np.asarray(C, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    n2 = C.shape[0]
    k = 2 * n_a
    blocks = []
    for lo, hi, name in ((0, k, "A"), (k, n2, "B")):
        if hi == lo:
            blocks.append(np.zeros((0, 0)))
            continue
        sub = C[lo:hi, lo:hi]
        labs = [f"{name}{i}" for i in range((hi - lo) // 2)]
        blocks.append(_gs_region(sub, tol, labs))
    M = np.zeros_like(C)
    M[:k, :k] = blocks[0]
    M[k:, k:] = blocks[1]
    new_sigma = M @ sigma @ M.T
    new_C = M @ C @ M.T
    J = canonical_form(n2 // 2)
    err = np.max(np.abs(new_C - J))
    state = GaussianState(0.5 * (new_sigma + new_sigma.T), n_a, meta={"omega_error": float(err)})
    return state, M


@dataclass
class GaussianState:
    sigma: np.ndarray
    n_a: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        s = np.asarray(self.sigma, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
            raise ContractError("covariance must be 2N x 2N")
        if np.max(np.abs(s - s.T)) > 1e-9 * max(1.0, np.max(np.abs(s))):
            raise ContractError("covariance must be symmetric")
        self.sigma = 0.5 * (s + s.T)
        if not 0 <= self.n_a <= s.shape[0] // 2:
            raise ContractError("bad partition")

    @property
    def n(self):
        return self.sigma.shape[0] // 2

    @property
    def omega(self):
        return canonical_form(self.n)

    def validity(self):
        """Smallest eigenvalue of sigma + i Omega^-1."""
        Om = self.omega
        return float(np.min(np.linalg.eigvalsh(self.sigma + 1j * np.linalg.inv(Om))))


def vacuum_state(modes, tol=1e-11):
    sigma, C, meta = mode_correlators(modes, tol)
    state, M = symplectic_gram_schmidt(C, sigma, meta["n_a"])
    state.meta.update(meta)
    return state


def symplectic_spectrum(sigma):
    """Positive symplectic eigenvalues, ascending."""
    n = sigma.shape[0] // 2
    ev = np.linalg.eigvals(1j * canonical_form(n) @ sigma)
    return np.sort(np.abs(ev))[::2]


def _transpose_b(state):
    n = state.n
    d = np.ones(2 * n)
    d[2 * state.n_a + 1::2] = -1.0
    return d[:, None] * state.sigma * d[None, :]


def log_negativity(state):
    nu = symplectic_spectrum(_transpose_b(state))
    nu = nu[nu < 1.0 - NU_TOL]
    return float(np.sum(-np.log2(nu)))


@dataclass
class NegativityCores:
    cores: list
    S_A: np.ndarray
    S_B: np.ndarray
    spectrum: np.ndarray
    degenerate: bool = False

    @property
    def total(self):
        return float(sum(c["contribution"] for c in self.cores))


def klco_cores(state, cross_tol=1e-10):
    """Negativity cores of an equal-time Gaussian vacuum state."""
    s = state.sigma
    n = state.n
    phi = np.arange(0, 2 * n, 2)
    pi = phi + 1
    cross = s[np.ix_(phi, pi)]
    if np.max(np.abs(cross)) > cross_tol * max(1.0, np.max(np.abs(s))):
        raise UnsupportedConfigurationError("Phi-Pi cross block is not zero: equal-time modes required")
    G = s[np.ix_(phi, phi)]
    H = s[np.ix_(pi, pi)]
    cb = np.ones(n)
    cb[state.n_a:] = -1.0
    HG = cb[:, None] * H * cb[None, :]
    ew, ev = np.linalg.eigh(G)
    if np.min(ew) <= 0:
        raise NumericalFailure("field block of the covariance is not positive")
    Gh = ev @ np.diag(np.sqrt(ew)) @ ev.T
    Ghi = ev @ np.diag(1 / np.sqrt(ew)) @ ev.T
    Msym = Gh @ HG @ Gh
    lam, U = np.linalg.eigh(0.5 * (Msym + Msym.T))
    if np.min(lam) <= 0:
        raise NumericalFailure("partially transposed spectrum is not positive")
    nu = np.sqrt(lam)
    # H^G G v_phi = nu^2 v_phi with v_phi^T G v_phi = nu; v_pi = G v_phi / nu
    vphi = Ghi @ U * np.sqrt(nu)[None, :]
    vpi = G @ vphi / nu[None, :]
    nA = state.n_a
    cores = []
    for j in range(n):
        if nu[j] < 1.0 - NU_TOL:
            cores.append({"index": j, "nu": float(nu[j]), "contribution": float(-math.log2(nu[j])),
                          "v_phi": vphi[:, j], "v_pi": vpi[:, j]})
    spread = np.diff(nu[[c["index"] for c in cores]]) if len(cores) > 1 else np.array([])
    degenerate = bool(np.any(np.abs(spread) < 1e-8))
    S_A = _local_basis(vphi[:nA], vpi[:nA], nA)
    R = np.kron(np.eye(n - nA)[::-1], np.eye(2))
    if n - nA == nA:
        S_B = R @ S_A @ R
    else:
        S_B = _local_basis(vphi[nA:], vpi[nA:], n - nA)
    return NegativityCores(cores, S_A, S_B, nu, degenerate)


def _local_basis(vphi, vpi, m):
    """Symplectic rows from the local projections of the eigenvectors."""
    if m == 0:
        return np.zeros((0, 0))
    J = canonical_form(m)
    cand = []
    for j in range(vphi.shape[1]):
        q = np.zeros(2 * m)
        p = np.zeros(2 * m)
        q[0::2] = vphi[:, j]
        p[1::2] = vpi[:, j]
        cand.append((q, p))
    rows = []
    for q, p in cand + [(np.eye(2 * m)[2 * i], np.eye(2 * m)[2 * i + 1]) for i in range(m)]:
        if len(rows) == 2 * m:
            break
        for _ in range(2):
            for a in range(0, len(rows), 2):
                qa, pa = rows[a], rows[a + 1]
                q = q + (pa @ J @ q) * qa - (qa @ J @ q) * pa
                p = p + (pa @ J @ p) * qa - (qa @ J @ p) * pa
        val = q @ J @ p
        if abs(val) < 1e-9 * max(np.linalg.norm(q) * np.linalg.norm(p), 1e-300):
            continue
        s = math.sqrt(abs(val))
        rows.extend([q / s, (p if val > 0 else -p) / s])
    S = np.array(rows)
    if S.shape != (2 * m, 2 * m):
        raise NumericalFailure("could not complete a local symplectic basis")
    return S


def multi_time_modes(N, R=1.0, delta=2.0, T=1.0, separation=None):
    """Mode set with slices t_i = -T/2 + i T/(N-1) in both regions.

    With N = 1 the single slice is t = 0. The default separation is T + 2R.
    """
    if N < 1:
        raise ContractError("N >= 1")
    sep = T + 2 * R if separation is None else separation
    times = [0.0] if N == 1 else [-T / 2 + i * T / (N - 1) for i in range(N)]
    A = [ModeSpec("A", R, delta, (0.0, 0.0, 0.0), t) for t in times]
    B = [ModeSpec("B", R, delta, (sep, 0.0, 0.0), t) for t in times]
    return A + B
