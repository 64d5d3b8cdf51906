"""Pilot funding, constraint inversion and the border-point secrecy optimum.

Two funding modes decide where the pilot energy comes from:

* ``budget``: fixed previous-frame energies ``Q_budget_user``/``Q_budget_eve``
  give ``p_t = theta Q / eta`` and ``q_t = zeta Q_eve / eta``.  Harvested
  energy then depends on (theta, rho) only through these powers.
* ``steady``: the energy harvested in one frame funds the next frame's
  pilots; the operating point is the damped fixed point of that map.

The common user pilot power is funded by user ``k`` (the one being
optimized).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .energy import harvested_eve, harvested_user
from .secrecy import d_bound_d_rho, d_bound_d_rho_high_sinr, secrecy_bound_closed
from .sysmodel import ConfigError, SystemConfig

EPS = 1e-6


class InfeasibleError(ConfigError):
    pass


class NonConvergenceError(RuntimeError):
    def __init__(self, msg, last):
        super().__init__(msg)
        self.last = last


@dataclass
class SteadyState:
    Q_user: np.ndarray
    Q_eve: float
    p_t: float
    q_t: float
    iterations: int
    converged: bool
    dead: bool = False


@dataclass
class OptimumReport:
    theta_star: float
    rho_star: float
    R_star: float
    rho_max: float
    theta_min: float
    feasible: bool
    binding: list[str] = field(default_factory=list)
    audit_best: float = float("nan")
    audit_excess: float = float("nan")
    audit_points: int = 0

    @property
    def border_optimal(self) -> bool:
        return not self.audit_excess > 1e-6


def pilot_powers(config: SystemConfig, theta, Q_user, Q_eve):
    """``p_t = theta Q_user / eta`` and ``q_t = zeta Q_eve / eta``."""
    return (np.asarray(theta, dtype=float) * Q_user / config.eta,
            config.zeta * Q_eve / config.eta)


def _harvest(config, p, q, rho_k):
    return (np.atleast_1d(harvested_user(config, p, q, rho_k)),
            float(harvested_eve(config, p, q)))


def steady_state_energy(config: SystemConfig, rho_k: float, theta: float, tol: float = 1e-9,
                        max_iter: int = 1000, k: int = 0, damping: float = 0.5,
                        start=None) -> SteadyState:
    """Damped fixed point of (Q_user, Q_eve) -> pilot powers -> RF power -> harvested energy.

    Iteration starts from the configured budgets unless ``start`` gives
    ``(Q_user, Q_eve)``.  Components the map sends to exactly zero are set
    to zero without damping.  If one application of the map harvests
    nothing anywhere the network is dead and the zero state is returned.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if start is None:
        Qu = np.full(config.K, config.Q_budget_user, dtype=float)
        Qe = float(config.Q_budget_eve)
    else:
        Qu, Qe = np.array(start[0], dtype=float), float(start[1])
    for it in range(1, max_iter + 1):
        p, q = pilot_powers(config, theta, Qu[k], Qe)
        nu, ne = _harvest(config, float(p), float(q), rho_k)
        if not np.any(nu) and ne == 0.0:
            return SteadyState(np.zeros(config.K), 0.0, 0.0, 0.0, it, True, dead=True)
        # stop on the fixed-point residual and report the map image, which is exact for a saturated map
        scale = np.maximum(np.abs(np.append(nu, ne)), 1e-300)
        residual = np.max(np.abs(np.append(nu - Qu, ne - Qe)) / scale)
        if residual < tol:
            p, q = pilot_powers(config, theta, nu[k], ne)
            return SteadyState(nu, ne, float(p), float(q), it, True)
        # components below sensitivity map to exactly zero; damping them only slows the approach
        Qu = np.where(nu == 0.0, 0.0, (1 - damping) * Qu + damping * nu)
        Qe = 0.0 if ne == 0.0 else (1 - damping) * Qe + damping * ne
    p, q = pilot_powers(config, theta, Qu[k], Qe)
    raise NonConvergenceError(f"no fixed point within {max_iter} iterations",
                              SteadyState(Qu, Qe, float(p), float(q), max_iter, False))


def operating_point(config: SystemConfig, rho_k: float, theta: float, k: int = 0):
    """``(p_t, q_t, Q_user, Q_eve)`` under the configured funding mode."""
    if config.funding == "steady":
        st = steady_state_energy(config, rho_k, theta, k=k)
        return st.p_t, st.q_t, st.Q_user, st.Q_eve
    p, q = pilot_powers(config, theta, config.Q_budget_user, config.Q_budget_eve)
    Qu, Qe = _harvest(config, float(p), float(q), rho_k)
    return float(p), float(q), Qu, Qe


def secrecy_at(config: SystemConfig, rho_k, theta, k: int = 0):
    """Bound at (rho_k, theta) with funding-consistent pilot powers; broadcasts in budget mode."""
    if config.funding == "budget":
        p, q = pilot_powers(config, theta, config.Q_budget_user, config.Q_budget_eve)
        return secrecy_bound_closed(config, p, q, rho_k, None, k)
    rho_b, th_b = np.broadcast_arrays(np.asarray(rho_k, float), np.asarray(theta, float))
    out = np.empty(rho_b.shape)
    for idx in np.ndindex(rho_b.shape):
        p, q, _, _ = operating_point(config, float(rho_b[idx]), float(th_b[idx]), k)
        out[idx] = secrecy_bound_closed(config, p, q, rho_b[idx], None, k)
    return float(out) if out.ndim == 0 else out


def _bisect(f, lo, hi, tol):
    """Shrink [lo, hi] around the sign change of boolean ``f`` (True at lo)."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi


def rho_max(config: SystemConfig, theta: float, Q_min: float, k: int = 0, tol: float = 1e-9) -> float:
    """Largest rho_k whose harvested energy still meets ``Q_min`` (Q_k decreases in rho_k)."""
    if Q_min < 0:
        raise ValueError("Q_min must be nonnegative")
    if Q_min == 0:
        return 1.0
    Qk = lambda r: operating_point(config, r, theta, k)[2][k]
    if Qk(0.0) < Q_min:
        raise InfeasibleError(f"user {k} cannot harvest Q_min={Q_min:g} even at rho=0")
    if Qk(1.0) >= Q_min:
        return 1.0
    lo, _ = _bisect(lambda r: Qk(r) >= Q_min, 0.0, 1.0, tol)
    return lo


def theta_min(config: SystemConfig, rho_k: float, Q_max: float, k: int = 0, tol: float = 1e-9) -> float:
    """Smallest theta keeping the eavesdropper's harvest at or below ``Q_max`` (Q_eve decreases in theta)."""
    if not Q_max > 0:
        raise ValueError("Q_max must be positive")
    Qe = lambda t: operating_point(config, rho_k, t, k)[3]
    if Qe(0.0) <= Q_max:
        return 0.0
    if Qe(1.0) > Q_max:
        raise InfeasibleError(f"eavesdropper harvest exceeds Q_max={Q_max:g} even at theta=1")
    _, hi = _bisect(lambda t: Qe(t) > Q_max, 0.0, 1.0, tol)
    return hi


def feasible_mask(config: SystemConfig, rhos, thetas, Q_min: float, Q_max: float, k: int = 0):
    """Boolean (len(thetas), len(rhos)) map of constraint satisfaction."""
    mask = np.zeros((len(thetas), len(rhos)), dtype=bool)
    for i, t in enumerate(thetas):
        for j, r in enumerate(rhos):
            _, _, Qu, Qe = operating_point(config, float(r), float(t), k)
            mask[i, j] = Qu[k] >= Q_min and Qe <= Q_max
    return mask


def maximize_secrecy(config: SystemConfig, Q_min: float = 0.0, Q_max: float = np.inf,
                     k: int = 0, audit: int = 50) -> OptimumReport:
    """Border optimum theta* = 1, rho* = rho_max(1), with an optional grid audit of the feasible box."""
    theta_star = 1.0
    rmax = rho_max(config, theta_star, Q_min, k)
    rho_star = float(np.clip(rmax, EPS, 1.0 - EPS))
    tmin = 0.0 if np.isinf(Q_max) else theta_min(config, rho_star, Q_max, k)
    R = float(secrecy_at(config, rho_star, theta_star, k))
    binding = []
    if Q_min > 0 and rmax < 1.0:
        binding.append("Q_min")
    if not np.isinf(Q_max) and tmin > 0.0:
        binding.append("Q_max")
    rep = OptimumReport(theta_star, rho_star, R, rmax, tmin, True, binding)
    if audit:
        thetas = np.linspace(0.0, 1.0, audit)
        rhos = np.linspace(EPS, 1.0 - EPS, audit)
        mask = feasible_mask(config, rhos, thetas, Q_min, Q_max, k)
        vals = secrecy_at(config, rhos[None, :], thetas[:, None], k)
        if mask.any():
            best = float(np.max(np.where(mask, vals, -np.inf)))
            rep.audit_best, rep.audit_excess = best, best - R
        rep.audit_points = int(mask.sum())
    return rep


@dataclass
class MonotonicityReport:
    d_rho: np.ndarray        # (n_theta, n_rho)
    d_theta: np.ndarray
    d_rho_closed: np.ndarray
    sign_agree: bool
    max_rel_err: float

    @property
    def min_d_rho(self) -> float:
        return float(np.min(self.d_rho))

    @property
    def min_d_theta(self) -> float:
        return float(np.min(self.d_theta))

    @property
    def all_positive(self) -> bool:
        return self.min_d_rho > 0 and self.min_d_theta > 0


def monotonicity_check(config: SystemConfig, thetas, rhos, k: int = 0, h: float = 1e-6) -> MonotonicityReport:
    """Central differences of the bound in rho_k and theta over a grid.

    The rho-derivative is also taken at frozen pilot powers and compared with
    the exact analytic derivative; the high-SINR form is used for a sign check.
    """
    th = np.asarray(thetas, dtype=float)[:, None]
    rh = np.asarray(rhos, dtype=float)[None, :]
    d_rho = (secrecy_at(config, rh + h, th, k) - secrecy_at(config, rh - h, th, k)) / (2 * h)
    d_theta = (secrecy_at(config, rh, th + h, k) - secrecy_at(config, rh, th - h, k)) / (2 * h)
    P = np.empty(np.broadcast_shapes(th.shape, rh.shape))
    Qp = np.empty_like(P)
    for i, t in enumerate(th[:, 0]):
        for j, r in enumerate(rh[0]):
            P[i, j], Qp[i, j], _, _ = operating_point(config, float(r), float(t), k)
    fd_frozen = (secrecy_bound_closed(config, P, Qp, rh + h, None, k)
                 - secrecy_bound_closed(config, P, Qp, rh - h, None, k)) / (2 * h)
    exact = d_bound_d_rho(config, P, Qp, rh * np.ones_like(P), k)
    high_sinr = d_bound_d_rho_high_sinr(config, P, Qp, rh * np.ones_like(P), k)
    live = exact > 0    # exact is identically zero where no pilot power is available
    rel = np.abs(fd_frozen - exact)[live] / exact[live]
    return MonotonicityReport(d_rho, d_theta, exact,
                              bool(np.all(high_sinr[live] > 0)),
                              float(np.max(rel)) if rel.size else 0.0)
