"""Achievable rates and the secrecy-rate lower bound.

Closed forms broadcast over array-valued ``p_t``, ``q_t`` and ``rho_k`` so
that whole parameter grids evaluate in one call.  Rates are in bits/s/Hz and
carry the ``(T - tau)/T`` prelog.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import estimation_stats, mmse_gain, train
from .downlink import mrt_precoder
from .montecarlo import Estimate, chunk_size, run_chunks, sample_gains
from .sysmodel import ConfigError, SystemConfig, substream

LN2 = np.log(2.0)


@dataclass(frozen=True)
class MomentBundle:
    sigma_Z_sq: float
    jensen_C: float
    delta: float
    norm_moments: tuple[float, ...]   # E{||g_w||^(2m)}, m = 1..4


@dataclass
class SecrecyReport:
    bound: float
    user_rate_bound: float
    eve_rate_bound: float
    sinr_terms: dict[str, float]
    mc_estimate: float | None = None
    mc_stderr: float | None = None
    mc_user_rate: float | None = None
    mc_eve_rate: float | None = None
    flags: list[str] = field(default_factory=list)


def _grid(config: SystemConfig, p_t, q_t):
    """Broadcast pilot powers against the user axis; returns (p, q, D) with D[..., i]."""
    p = np.asarray(p_t, dtype=float)[..., None]
    q = np.asarray(q_t, dtype=float)[..., None]
    D = config.sigma2 + q * config.beta_w + config.eta * p * config.betas
    return p, q, D


def bound_terms(config: SystemConfig, p_t, q_t, rho_k, rho_eve=None, k: int = 0) -> dict:
    """Signal and interference-plus-noise powers inside both logarithms of the bound.

    User side: signal ``rho |E{g_k^H w_k}|^2`` over ``E{U}``; eavesdropper
    side: ``rho_eve |E{g_w^H w_k}|^2`` over ``E{Z}``.
    """
    rho_eve = config.rho_eve if rho_eve is None else rho_eve
    rho = np.asarray(rho_k, dtype=float)
    p, q, D = _grid(config, p_t, q_t)
    b, bw, K, M, WE = config.betas, config.beta_w, config.K, config.M, config.W_E
    bk, Dk = b[k], D[..., k]
    user_signal = rho * M * config.eta * p[..., 0] * bk ** 2 / Dk
    residual = bk * (q[..., 0] * bw + config.sigma2) / Dk
    user_ipn = rho * (K * bk + (K - 1) * bk * WE + WE * residual + config.sigma2_ant) + config.sigma2_s
    A = M * q * bw ** 2 / D
    eve_signal = rho_eve * A[..., k]
    eve_ipn = rho_eve * ((K * bw + A.sum(axis=-1)) * (WE + 1.0) - A[..., k] + config.sigma2_ant) + config.sigma2_s
    return {"user_signal": user_signal, "user_ipn": user_ipn,
            "eve_signal": eve_signal, "eve_ipn": eve_ipn}


def user_rate_bound(config, p_t, q_t, rho_k, k=0):
    t = bound_terms(config, p_t, q_t, rho_k, None, k)
    return config.prelog * np.log2(1.0 + t["user_signal"] / t["user_ipn"])


def eve_rate_bound(config, p_t, q_t, rho_eve=None, k=0):
    t = bound_terms(config, p_t, q_t, 0.5, rho_eve, k)
    return config.prelog * np.log2(1.0 + t["eve_signal"] / t["eve_ipn"])


def secrecy_bound_closed(config: SystemConfig, p_t, q_t, rho_k, rho_eve=None, k: int = 0):
    """Signed secrecy-rate lower bound for user ``k`` (may be negative)."""
    t = bound_terms(config, p_t, q_t, rho_k, rho_eve, k)
    out = config.prelog * (np.log2(1.0 + t["user_signal"] / t["user_ipn"])
                           - np.log2(1.0 + t["eve_signal"] / t["eve_ipn"]))
    return float(out) if np.ndim(out) == 0 else out


def d_bound_d_rho(config: SystemConfig, p_t, q_t, rho_k, k: int = 0):
    """Exact partial derivative of the bound in ``rho_k`` at fixed pilot powers."""
    rho = np.asarray(rho_k, dtype=float)
    t = bound_terms(config, p_t, q_t, 1.0, None, k)
    A = t["user_signal"]                           # signal per unit rho
    X = (t["user_ipn"] - config.sigma2_s)          # interference per unit rho
    s = config.sigma2_s
    out = config.prelog / LN2 * A * s / ((rho * (A + X) + s) * (rho * X + s))
    return float(out) if np.ndim(out) == 0 else out


def d_bound_d_rho_high_sinr(config: SystemConfig, p_t, q_t, rho_k, k: int = 0):
    """The high-SINR form ``sigma_s^2 / (rho (rho X + sigma_s^2))`` (natural-log units, no prelog).

    Used only as a sign cross-check of :func:`d_bound_d_rho`.
    """
    rho = np.asarray(rho_k, dtype=float)
    t = bound_terms(config, p_t, q_t, 1.0, None, k)
    X = t["user_ipn"] - config.sigma2_s
    return config.sigma2_s / (rho * (rho * X + config.sigma2_s))


def secrecy_asymptotic_terms(config: SystemConfig, p_t, q_t, rho_k, k: int = 0):
    """``(user_term, eve_term)`` of the large-M bound, each with prelog.

    The user term keeps its M-scaling; the eavesdropper term
    ``a_k / (sum_i a_i (W_E + 1) - a_k)`` with ``a_i = q beta_w^2 / D_i`` has no M.
    """
    t = bound_terms(config, p_t, q_t, rho_k, None, k)
    user = config.prelog * np.log2(1.0 + t["user_signal"] / t["user_ipn"])
    _, q, D = _grid(config, p_t, q_t)
    a = q * config.beta_w ** 2 / D
    ak = a[..., k]
    den = a.sum(axis=-1) * (config.W_E + 1.0) - ak
    ratio = np.divide(ak, den, out=np.zeros_like(ak), where=den > 0)
    return user, config.prelog * np.log2(1.0 + ratio)


def secrecy_asymptotic(config: SystemConfig, p_t, q_t, rho_k, k: int = 0):
    """Large-M secrecy bound: the eavesdropper's advantage saturates while the user's grows."""
    user, eve = secrecy_asymptotic_terms(config, p_t, q_t, rho_k, k)
    out = user - eve
    return float(out) if np.ndim(out) == 0 else out


def jensen_constant(mu: float) -> float:
    """Generalized-Jensen constant ``(2 mu + 1) / (4 (mu^2 + mu))``; maximal (3/8) at mu = 1."""
    if not mu >= 1:
        raise ConfigError("mu must be >= 1")
    if np.isinf(mu):
        return 0.0
    return (2.0 * mu + 1.0) / (4.0 * (mu * mu + mu))


def gaussian_moments(M: int, beta: float, order: int) -> float:
    """``E{(||g||^2)^order}`` for ``g ~ CN(0, beta I_M)``.

    ``||g||^2 = (beta/2) X`` with X chi-square on 2M degrees of freedom and
    ``E{X^m} = k (k+2) ... (k+2m-2)``, k = 2M.
    """
    if order not in (1, 2, 3, 4):
        raise ValueError(f"unsupported moment order {order}")
    if M < 1 or beta < 0:
        raise ValueError("need M >= 1 and beta >= 0")
    dof = 2 * M
    chi = 1.0
    for j in range(order):
        chi *= dof + 2 * j
    return (beta / 2.0) ** order * chi


def entry_quartic_moment(beta: float) -> float:
    """``E{|g(i)|^4} = 2 beta^2`` for one CN(0, beta) entry."""
    return 2.0 * beta * beta


def _delta(config, p_t, q_t):
    _, _, D = _grid(config, p_t, q_t)
    return (1.0 / (config.M ** 2 * D ** 2)).sum(axis=-1)


def leakage_sum_variance(config: SystemConfig, p_t: float, q_t: float) -> float:
    """``var(sum_i |g_w^H w_i|^2)`` over channels, noise and the eavesdropper's random pilot.

    Conditioned on ``r = ||g_w||^2`` and the pilot projections ``x_i``, each
    ``g_w^H w_i`` is complex Gaussian with mean ``kappa_i sqrt(q/p) x_i r``
    and variance ``kappa_i^2 v_i r``; ``r`` is Gamma(M, beta_w) and
    ``|x_i|^2`` are Dirichlet(1, ..., 1) coordinates on the eta-sphere.
    """
    if not p_t > 0:
        raise ConfigError("leakage variance needs p_t > 0")
    M, eta, bw = config.M, config.eta, config.beta_w
    b = config.betas
    D = config.sigma2 + q_t * bw + eta * p_t * b
    alpha_i = (eta * p_t * b + config.sigma2) / (M * D)    # kappa_i^2 v_i
    lam = eta * q_t / (M * D)                              # kappa_i^2 q / p
    r1, r2, r3, r4 = (gaussian_moments(M, bw, m) for m in (1, 2, 3, 4))
    inner = np.sum(alpha_i ** 2 * r2 + 2.0 * q_t * alpha_i * r3 / (M * D))
    alpha = alpha_i.sum()
    EY = lam.sum() / eta
    EY2 = (np.sum(lam ** 2) + lam.sum() ** 2) / (eta * (eta + 1.0))
    var_r = r2 - r1 * r1
    outer = alpha ** 2 * var_r + (r4 * EY2 - (r2 * EY) ** 2) + 2.0 * alpha * (r3 * EY - r1 * r2 * EY)
    return float(inner + outer)


def sigma_z_sq(config: SystemConfig, p_t: float, q_t: float, rho_eve=None) -> float:
    """Variance of the eavesdropper's interference-plus-noise aggregate Z."""
    rho_eve = config.rho_eve if rho_eve is None else rho_eve
    return rho_eve ** 2 * (config.W_E + 1.0) ** 2 * leakage_sum_variance(config, p_t, q_t)


def sigma_z_sq_unbalanced(config: SystemConfig, p_t: float, q_t: float, rho_eve=None) -> float:
    """Alternative term arrangement with unbalanced units (diagnostic; does not match simulation)."""
    rho_eve = config.rho_eve if rho_eve is None else rho_eve
    M, K, eta, s2, bw = config.M, config.K, config.eta, config.sigma2, config.beta_w
    b, p, q, WE = config.betas, p_t, q_t, config.W_E
    D = s2 + q * bw + eta * p * b
    delta = float(np.sum(1.0 / (M ** 2 * D ** 2)))
    t1 = 2 * M * bw ** 2 * np.sum((eta ** 2 * p ** 2 * K * (K + 1) * b ** 2 + 2 * eta * p * s2 * b) / (M ** 2 * D ** 2))
    t2 = (M ** 2 - M) * bw ** 2 * np.sum((eta ** 2 * p ** 2 * b ** 2 + 2 * eta * p * s2 * b) / (M ** 2 * D ** 2))
    t3 = q * (M + 1) * (M + 2) * (6 * s2 + (M + 3) * q * bw)
    t4 = 2 * K * delta * eta * p * M * (M + 1) * (s2 + (M + 2) * q * bw) * bw ** 2 * np.sum(b ** 2)
    t5 = K ** 2 * delta * M * (M * (5 * M + 11) * s2 * bw ** 2 / 4)
    mean = (K * bw + np.sum(M * q * bw ** 2 / D)) ** 2 * (WE + 1) ** 2
    return float(rho_eve ** 2 * ((t1 + t2 + t3 + t4) * (WE + 1) ** 2 + t5 - mean))


def moment_bundle(config: SystemConfig, p_t: float, q_t: float, mu: float = 1.0) -> MomentBundle:
    return MomentBundle(sigma_z_sq(config, p_t, q_t), jensen_constant(mu),
                        float(_delta(config, p_t, q_t)),
                        tuple(gaussian_moments(config.M, config.beta_w, m) for m in (1, 2, 3, 4)))


def leakage_sum_samples(config: SystemConfig, p_t: float, q_t: float, n: int, seed: int,
                        batch: int = 20000) -> np.ndarray:
    """Brute-force samples of ``sum_i |g_w^H w_i|^2`` through the explicit training/precoding chain."""
    out = []
    done, b = 0, 0
    while done < n:
        m = min(batch, n - done)
        rng = substream(seed, 99, b)
        ch, _, tr = train(config, p_t, q_t, rng, m)
        W = mrt_precoder(tr.G_hat, tr.sigma2_ghat).W
        ge = np.einsum("tm,tmi->ti", ch.g_w.conj(), W)
        out.append(np.sum(np.abs(ge) ** 2, axis=-1))
        done += m
        b += 1
    return np.concatenate(out)


def instantaneous_rates(config: SystemConfig, gains: dict, p_t: float, q_t: float,
                        rho_k: float, rho_eve: float):
    """Per-realization user and eavesdropper rates, shape (n, K) each.

    User k decodes against the deterministic mean gain ``sqrt(M sigma2_ghat_k)``
    after cancelling the known part of its own energy symbol.  The
    eavesdropper attacking user k decodes against the pilot-conditional mean
    of ``g_w^H w_k``; it knows no energy symbols.
    """
    M, K, WE = config.M, config.K, config.W_E
    s_hat, _ = estimation_stats(config, p_t, q_t)
    c = mmse_gain(config, p_t, q_t)
    D = config.sigma2 + q_t * config.beta_w + config.eta * p_t * config.betas
    Gk, ge, gnorm, x = gains["Gk"], gains["ge"], gains["gnorm"], gains["x"]
    a_u = np.sqrt(M * s_hat)
    diag = np.diagonal(Gk, axis1=-2, axis2=-1)
    row_pow = np.sum(np.abs(Gk) ** 2, axis=-1)
    other = row_pow - np.abs(diag) ** 2
    known = np.sqrt(config.eta * p_t) * gnorm / np.sqrt(M * D)
    U = rho_k * (other * (WE + 1.0) + np.abs(diag - a_u) ** 2 + np.abs(diag - known) ** 2 * WE
                 + config.sigma2_ant) + config.sigma2_s
    r_user = config.prelog * np.log2(1.0 + rho_k * a_u ** 2 / U)

    a_e = c * np.sqrt(q_t / p_t) * M * config.beta_w * x / np.sqrt(M * s_hat)
    ge_pow = np.abs(ge) ** 2
    Z = rho_eve * (np.abs(ge - a_e) ** 2 + ge_pow * WE + (ge_pow.sum(axis=-1, keepdims=True) - ge_pow) * (WE + 1.0)
                   + config.sigma2_ant) + config.sigma2_s
    r_eve = config.prelog * np.log2(1.0 + rho_eve * np.abs(a_e) ** 2 / Z)
    return r_user, r_eve


def _secrecy_chunk(seed, key, n, config, p_t, q_t, rho_k, rho_eve):
    g = sample_gains(config, p_t, q_t, seed, key, n)
    ru, re = instantaneous_rates(config, g, p_t, q_t, rho_k, rho_eve)
    return {"user": ru, "eve": re, "secrecy": np.maximum(ru - re, 0.0)}


@dataclass
class SecrecyMC:
    secrecy: Estimate
    user_rate: Estimate
    eve_rate: Estimate


def mc_secrecy_all(config: SystemConfig, p_t: float, q_t: float, rho_k: float, n_trials: int,
                   seed: int, rho_eve=None, workers: int = 1, key=(0,)) -> list[SecrecyMC]:
    """Monte Carlo ``E{[R_k - R_Eve]^+}`` for every user from one shared set of realizations."""
    rho_eve = config.rho_eve if rho_eve is None else rho_eve
    res = run_chunks(_secrecy_chunk, n_trials, seed, key, workers, chunk_size(config),
                     config=config, p_t=p_t, q_t=q_t, rho_k=rho_k, rho_eve=rho_eve)
    return [SecrecyMC(Estimate.from_samples(res["secrecy"][:, k]),
                      Estimate.from_samples(res["user"][:, k]),
                      Estimate.from_samples(res["eve"][:, k])) for k in range(config.K)]


def mc_secrecy_rate(config: SystemConfig, p_t: float, q_t: float, rho_k: float, rho_eve=None,
                    n_trials: int = 10_000, seed: int = 0, k: int = 0, workers: int = 1) -> SecrecyMC:
    return mc_secrecy_all(config, p_t, q_t, rho_k, n_trials, seed, rho_eve, workers)[k]


def secrecy_report(config: SystemConfig, p_t: float, q_t: float, rho_k: float, k: int = 0,
                   n_trials: int = 0, seed: int = 0, workers: int = 1) -> SecrecyReport:
    t = bound_terms(config, p_t, q_t, rho_k, None, k)
    ub = float(config.prelog * np.log2(1.0 + t["user_signal"] / t["user_ipn"]))
    eb = float(config.prelog * np.log2(1.0 + t["eve_signal"] / t["eve_ipn"]))
    rep = SecrecyReport(ub - eb, ub, eb, {name: float(v) for name, v in t.items()})
    if ub - eb < 0:
        rep.flags.append("negative-bound")
    if n_trials:
        mc = mc_secrecy_rate(config, p_t, q_t, rho_k, None, n_trials, seed, k, workers)
        rep.mc_estimate, rep.mc_stderr = mc.secrecy.mean, mc.secrecy.stderr
        rep.mc_user_rate, rep.mc_eve_rate = mc.user_rate.mean, mc.eve_rate.mean
    return rep
