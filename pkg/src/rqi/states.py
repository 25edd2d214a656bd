"""Small dense density-matrix utilities shared by the qubit modules."""

import numpy as np

from .errors import ContractError, PerturbativeRangeError

__all__ = [
    "HygieneReport",
    "check_density",
    "finish_perturbative",
    "hs_distance",
    "negativity",
    "partial_transpose",
    "purity",
]

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

HERM_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-8


class HygieneReport:
    """Hermiticity, trace and spectrum diagnostics of one matrix."""

    def __init__(self, rho):
        rho = np.asarray(rho, dtype=complex)
        self.asymmetry = float(np.max(np.abs(rho - rho.conj().T))) if rho.size else 0.0
        self.trace_error = abs(complex(np.trace(rho)) - 1.0)
        herm = 0.5 * (rho + rho.conj().T)
        self.min_eigenvalue = float(np.min(np.linalg.eigvalsh(herm)))

    def ok(self, herm_tol=HERM_TOL, trace_tol=TRACE_TOL, psd_tol=PSD_TOL):
        return (self.asymmetry <= herm_tol and self.trace_error <= trace_tol
                and self.min_eigenvalue >= -psd_tol)

    def __repr__(self):
        return (f"HygieneReport(asymmetry={self.asymmetry:.3g}, "
                f"trace_error={self.trace_error:.3g}, min_eig={self.min_eigenvalue:.3g})")


def check_density(rho, herm_tol=HERM_TOL, trace_tol=TRACE_TOL, psd_tol=PSD_TOL, raise_=True):
    rep = HygieneReport(rho)
    if raise_ and not rep.ok(herm_tol, trace_tol, psd_tol):
        raise ContractError(f"not a valid density matrix: {rep!r}")
    return rep


def partial_transpose(rho, dims=(2, 2), sys=1):
    """Partial transpose of a bipartite matrix on subsystem ``sys``."""
    da, db = dims
    r = np.asarray(rho).reshape(da, db, da, db)
    if sys == 1:
        r = r.transpose(0, 3, 2, 1)
    elif sys == 0:
        r = r.transpose(2, 1, 0, 3)
    else:
        raise ContractError("sys must be 0 or 1")
    return r.reshape(da * db, da * db)


def negativity(rho, dims=(2, 2)):
    """Sum of the magnitudes of the negative eigenvalues of the partial transpose."""
    pt = partial_transpose(rho, dims)
    ev = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return float(-ev[ev < 0].sum())


def purity(rho):
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))


def hs_distance(rho1, rho2):
    """Squared Hilbert-Schmidt distance tr((rho1 - rho2)^2)."""
    d = np.asarray(rho1) - np.asarray(rho2)
    if d.ndim != 2:
        raise ContractError("expected matrices")
    return float(np.real(np.trace(d.conj().T @ d)))


def finish_perturbative(rho, strict=True, hint=""):
    """Gate for leading-order states.

    Trace and Hermiticity are always enforced. Truncation leaves negative
    eigenvalues of the order of the dropped terms; with ``strict`` a state
    below -PSD_TOL is refused instead of returned.
    """
    rep = HygieneReport(rho)
    if rep.trace_error > 1e-10 or rep.asymmetry > HERM_TOL:
        raise ContractError(f"internal error building state: {rep!r}")
    if strict and rep.min_eigenvalue < -PSD_TOL:
        raise PerturbativeRangeError(
            f"leading-order state has eigenvalue {rep.min_eigenvalue:.3g}; {hint}".rstrip("; "))
    return rho
