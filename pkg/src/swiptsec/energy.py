"""Received RF power (closed form, empirical, asymptotic) and the logistic harvester."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sysmodel import EhParams, SystemConfig


@dataclass(frozen=True)
class EnergyReport:
    p_rf_user: np.ndarray
    p_rf_eve: float
    q_user: np.ndarray
    q_eve: float
    variant: str  # "closed-form" | "empirical" | "asymptotic"
    stderr_user: np.ndarray | None = field(default=None)
    stderr_eve: float | None = None


def _fading(config, betas, beta_w):
    betas = config.betas if betas is None else np.asarray(betas, dtype=float)
    beta_w = config.beta_w if beta_w is None else float(beta_w)
    return betas, beta_w


def _denominators(config, p_t, q_t, betas, beta_w):
    return config.sigma2 + q_t * beta_w + config.eta * p_t * betas


def beamforming_gain_user(config: SystemConfig, p_t, q_t, betas=None, beta_w=None) -> np.ndarray:
    """``M eta p beta_k^2 / D_k`` = ``M sigma2_ghat_k``: coherent power a user receives from its own beam."""
    betas, beta_w = _fading(config, betas, beta_w)
    return config.M * config.eta * p_t * betas ** 2 / _denominators(config, p_t, q_t, betas, beta_w)


def leakage_gain_eve(config: SystemConfig, p_t, q_t, betas=None, beta_w=None) -> np.ndarray:
    """``M q beta_w^2 / D_i`` per user beam: what pilot contamination steers toward the eavesdropper."""
    betas, beta_w = _fading(config, betas, beta_w)
    return config.M * q_t * beta_w ** 2 / _denominators(config, p_t, q_t, betas, beta_w)


def rf_power_user_closed(config: SystemConfig, p_t, q_t, rho_k, betas=None, beta_w=None) -> np.ndarray:
    """Mean RF power reaching each user's harvester (one value per user)."""
    betas, beta_w = _fading(config, betas, beta_w)
    K = len(betas)
    total = (K * betas + beamforming_gain_user(config, p_t, q_t, betas, beta_w)) * (config.W_E + 1.0)
    return (1.0 - np.asarray(rho_k, dtype=float)) * (total + config.sigma2_ant)


def rf_power_eve_closed(config: SystemConfig, p_t, q_t, rho_eve=None, betas=None, beta_w=None) -> float:
    """Mean RF power reaching the eavesdropper's harvester."""
    rho_eve = config.rho_eve if rho_eve is None else rho_eve
    betas, beta_w = _fading(config, betas, beta_w)
    K = len(betas)
    leak = np.sum(leakage_gain_eve(config, p_t, q_t, betas, beta_w))
    return float((1.0 - rho_eve) * ((K * beta_w + leak) * (config.W_E + 1.0) + config.sigma2_ant))


def nonlinear_eh(p_eh, eh: EhParams, duration: float, saturation: float | None = None):
    """Logistic harvester output energy for input RF power ``p_eh``.

    Written as ``P_s (1 - e^{-a x}) / (1 + e^{a b - a x})`` with
    ``x = [p_eh - P_sen]^+``, which is algebraically the normalized
    logistic but cannot overflow or lose the zero at ``x = 0``.
    ``saturation`` defaults to the user saturation power.
    """
    P_s = eh.P_s_user if saturation is None else saturation
    x = np.maximum(np.asarray(p_eh, dtype=float) - eh.P_sen, 0.0)
    with np.errstate(over="ignore"):
        q = P_s * (-np.expm1(-eh.a * x)) / (1.0 + np.exp(eh.a * eh.b - eh.a * x)) * duration
    return float(q) if q.ndim == 0 else q


def linear_eh(p_eh, duration: float, efficiency: float = 1.0):
    """Diagnostic only: ideal linear harvester."""
    return efficiency * np.asarray(p_eh, dtype=float) * duration


def harvested_user(config: SystemConfig, p_t, q_t, rho_k, betas=None, beta_w=None) -> np.ndarray:
    return nonlinear_eh(rf_power_user_closed(config, p_t, q_t, rho_k, betas, beta_w),
                        config.eh, config.harvest_time, config.eh.P_s_user)


def harvested_eve(config: SystemConfig, p_t, q_t, rho_eve=None, betas=None, beta_w=None) -> float:
    return nonlinear_eh(rf_power_eve_closed(config, p_t, q_t, rho_eve, betas, beta_w),
                        config.eh, config.harvest_time, config.eh.P_s_eve)


def rf_power_asymptotic(config: SystemConfig, p_t, q_t, rho_k, rho_eve=None):
    """Large-M RF powers: only the M-scaled beamformed terms survive.

    The eavesdropper sum uses ``beta_w^2 / D_i`` per user beam, i.e. exactly
    the M-proportional part of :func:`rf_power_eve_closed`.
    """
    rho_eve = config.rho_eve if rho_eve is None else rho_eve
    user = (1.0 - np.asarray(rho_k, dtype=float)) * beamforming_gain_user(config, p_t, q_t) * (config.W_E + 1.0)
    eve = (1.0 - rho_eve) * float(np.sum(leakage_gain_eve(config, p_t, q_t))) * (config.W_E + 1.0)
    return user, eve


def eh_asymptotic(config: SystemConfig, p_rf_asym, duration: float | None = None, who: str = "user"):
    duration = config.harvest_time if duration is None else duration
    sat = config.eh.P_s_user if who == "user" else config.eh.P_s_eve
    return nonlinear_eh(p_rf_asym, config.eh, duration, sat)


def energy_report(config: SystemConfig, p_t, q_t, rho_k, rho_eve=None, variant="closed-form") -> EnergyReport:
    if variant == "closed-form":
        pu = rf_power_user_closed(config, p_t, q_t, rho_k)
        pe = rf_power_eve_closed(config, p_t, q_t, rho_eve)
    elif variant == "asymptotic":
        pu, pe = rf_power_asymptotic(config, p_t, q_t, rho_k, rho_eve)
    else:
        raise ValueError(f"unknown variant {variant!r}; use rf_power_empirical for Monte Carlo")
    T = config.harvest_time
    return EnergyReport(np.atleast_1d(pu), pe,
                        np.atleast_1d(nonlinear_eh(pu, config.eh, T, config.eh.P_s_user)),
                        nonlinear_eh(pe, config.eh, T, config.eh.P_s_eve), variant)
