"""One function per experiment tag: parameters in, ordered output columns out."""

import math

import numpy as np

from . import harvesting, metric, modes, qc, tmunu
from .detector import transition_rate, vacuum_response
from .errors import ContractError
from .propagators import GaussianSmearing, Kind, bidistribution_closed
from .states import hs_distance

__all__ = ["COLUMNS", "run_point"]

COLUMNS = {
    "propagator": ("re", "im"),
    "detector": ("probability", "rate"),
    "harvest": ("negativity", "signalling", "harvested_flag"),
    "modes": ("log_negativity", "validity", "omega_error"),
    "qc": ("hs_distance", "hs_asymptote", "min_pt_eigenvalue"),
    "gme": ("negativity", "N_q", "N_c"),
    "metric": ("max_residual", "max_imag", "failed_sites"),
    "tmunu": ("pressure", "density", "rho0", "R0", "P0", "deviator", "p"),
}


def _propagator(p, tol):
    f1 = GaussianSmearing(p["T1"], p["sigma1"], p["t1"], p["Omega1"])
    f2 = GaussianSmearing(p["T2"], p["sigma2"], p["t2"], p["Omega2"], (p["L"], 0.0, 0.0))
    v = bidistribution_closed(Kind.parse(p["kind"]), f1, f2, allow_fallback=False).value
    return (v.real, v.imag)


def _detector(p, tol):
    return (vacuum_response(p["lam"], p["Omega"], p["T"], p["sigma"]),
            transition_rate(p["lam"], p["Omega"], p["sigma"]))


def _harvest(p, tol):
    T = p["T"]
    n, s, h = harvesting.negativity_closed_minkowski(p["lam"], p["OmegaT"] / T, T, p["sigma"],
                                                     p["L"], threshold=p["threshold"])
    return (n, s, int(h))


def _modes(p, tol):
    sep = None if math.isnan(p["separation"]) else p["separation"]
    ms = modes.multi_time_modes(p["N"], p["R"], p["delta"], p["T"], sep)
    st = modes.vacuum_state(ms, tol=tol["mode_tail"])
    return (modes.log_negativity(st), st.validity(), st.meta["omega_error"])


def _qc(p, tol):
    i = qc.minkowski_gapless_pair_inputs(p["lam"], p["T"], p["sigma"], p["L"])
    rho0 = qc.ground_state_pm()
    q = qc.gapless_pair_quantum(rho0, i)
    return (hs_distance(q, qc.gapless_pair_qc(rho0, i.Dab)), qc.hs_asymptote(p["lam"]),
            qc.min_pt_eigenvalue(q))


def _gme(p, tol):
    W, T, r, far = qc.Worldline, p["T"], p["r12"], p["far"]
    paths = qc.GMEPaths(W.static([-far, 0, 0], T), W.static([0, 0, 0], T), W.static([r, 0, 0], T),
                        W.static([r + far, 0, 0], T), m1=p["m1"], m2=p["m2"], T=T, G=p["G"])
    _, neg = qc.gme_newtonian(paths)
    delta = {pr: qc.gme_delta(paths, pr) for pr in qc.GMEPaths.PAIRS}
    _, Nq, Nc, _ = qc.gme_state(delta, p["lam"])
    return (neg, Nq, Nc)


def _kernel(p, eps):
    k = p["kernel"]
    if k == "massless":
        return metric.MinkowskiMassless(eps)
    if k == "massive":
        return metric.MinkowskiMassive(p["m"], eps)
    if k == "half-space":
        return metric.HalfSpaceDirichlet(eps)
    if k == "rw":
        return metric.RWHyperbolic(p["a"], p["mu"], eps)
    if k == "desitter":
        return metric.DeSitter(p["ell"], p["nu"], eps)
    return metric.OneParticleGaussian(p["sigma_k"], eps)


def _metric(p, tol):
    L = p["L"]
    n = p["sites"]
    if n < 1:
        raise ContractError("sites must be at least 1")
    lat = metric.LatticeSpec(p["chart"], L, (n,) * 4, (p["t"], p["x"], p["y"], p["z"]),
                             {"a": p["a"], "ell": p["ell"]})
    est = metric.discrete_metric(_kernel(p, tol["regulator"] * L), lat, fail_tol=tol["metric_fail"])
    ok = ~est.failed
    imag = float(np.max(est.imag_max[ok])) if np.any(ok) else math.inf
    return (est.max_residual, imag, int(np.sum(est.failed)))


def _tmunu(p, tol):
    m = tmunu.ProbeModel(p["ell"], p["mu_fluid"], p["eta"], p["m_c"], p["m_d"])
    P = tmunu.fluid_pressure(m, p["r"])
    g = tmunu.ground_tmunu(m, p["r"])
    return (P, tmunu.fluid_density(m, p["r"], P), g.rho0, g.R0, g.P0, g.deviator, g.p)


_RUNNERS = {
    "propagator": _propagator, "detector": _detector, "harvest": _harvest, "modes": _modes,
    "qc": _qc, "gme": _gme, "metric": _metric, "tmunu": _tmunu,
}


def run_point(tag, params, tolerances):
    return _RUNNERS[tag](params, tolerances)
