"""Channel realizations, pilots, contaminated uplink training and MMSE estimation.

Every array-producing function accepts ``size`` for a leading batch shape so
that Monte Carlo code can draw many coherence blocks at once; ``size=None``
gives a single realization.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sysmodel import ConfigError, SystemConfig


def crandn(rng: np.random.Generator, shape, var: float = 1.0) -> np.ndarray:
    """Circularly symmetric complex Gaussian samples with variance ``var``."""
    z = rng.standard_normal((*shape, 2))
    z *= np.sqrt(var / 2.0)
    return z.view(np.complex128)[..., 0]


def _shape(size) -> tuple:
    if size is None:
        return ()
    return (size,) if np.isscalar(size) else tuple(size)


@dataclass(frozen=True)
class ChannelSet:
    G: np.ndarray        # (..., M, K)
    g_w: np.ndarray      # (..., M)
    betas: np.ndarray    # (K,)
    beta_w: float


@dataclass(frozen=True)
class PilotSet:
    Phi: np.ndarray      # (..., eta, K), orthonormal columns
    phi_w: np.ndarray    # (..., eta), unit norm


@dataclass(frozen=True)
class TrainingOutcome:
    Y_t: np.ndarray
    G_hat: np.ndarray
    sigma2_ghat: np.ndarray
    sigma2_err: np.ndarray
    p_t: float
    q_t: float


def draw_channels(config: SystemConfig, rng: np.random.Generator, size=None,
                  betas=None, beta_w=None) -> ChannelSet:
    """Rayleigh channels ``g_k = sqrt(beta_k) h_k`` and ``g_w = sqrt(beta_w) h_w``."""
    betas = config.betas if betas is None else np.asarray(betas, dtype=float)
    beta_w = config.beta_w if beta_w is None else float(beta_w)
    if np.any(betas < 0) or beta_w < 0:
        raise ConfigError("large-scale fading must be nonnegative")
    lead = _shape(size)
    M, K = config.M, len(betas)
    G = crandn(rng, (*lead, M, K)) * np.sqrt(betas)
    g_w = crandn(rng, (*lead, M)) * np.sqrt(beta_w)
    return ChannelSet(G, g_w, betas, beta_w)


def make_pilots(eta: int, K: int, rng: np.random.Generator, size=None) -> PilotSet:
    """Orthonormal user pilots (QR of a Gaussian matrix) and a sphere-uniform eavesdropper pilot."""
    if eta < K:
        raise ConfigError(f"need eta >= K for orthogonal pilots (eta={eta}, K={K})")
    lead = _shape(size)
    Q, _ = np.linalg.qr(crandn(rng, (*lead, eta, K)))
    phi_w = crandn(rng, (*lead, eta))
    phi_w /= np.linalg.norm(phi_w, axis=-1, keepdims=True)
    return PilotSet(Q, phi_w)


def uplink_receive(channels: ChannelSet, pilots: PilotSet, p_t: float, q_t: float,
                   sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """Received training block ``Y_t`` of shape (..., M, eta)."""
    if p_t < 0 or q_t < 0 or sigma2 < 0:
        raise ConfigError("pilot and noise powers must be nonnegative")
    eta = pilots.Phi.shape[-2]
    Y = np.sqrt(eta * p_t) * (channels.G @ np.swapaxes(pilots.Phi, -1, -2))
    Y = Y + np.sqrt(eta * q_t) * (channels.g_w[..., :, None] * pilots.phi_w[..., None, :])
    if sigma2 > 0:
        Y = Y + crandn(rng, Y.shape, sigma2)
    return Y


def mmse_gain(config: SystemConfig, p_t: float, q_t: float, betas=None, beta_w=None) -> np.ndarray:
    """Per-user shrinkage ``eta p beta_k / (eta p beta_k + sigma2 + q beta_w)``."""
    betas = config.betas if betas is None else np.asarray(betas, dtype=float)
    beta_w = config.beta_w if beta_w is None else float(beta_w)
    num = config.eta * p_t * betas
    den = num + config.sigma2 + q_t * beta_w
    return np.divide(num, den, out=np.zeros_like(num), where=den > 0)


def mmse_estimate(Y_t: np.ndarray, pilots: PilotSet, p_t: float, q_t: float,
                  config: SystemConfig, betas=None, beta_w=None) -> np.ndarray:
    """MMSE estimate of G from the training block.

    The diagonal inverse is applied per user; a user with zero large-scale
    fading gets the zero estimate.
    """
    if not p_t > 0:
        raise ConfigError("MMSE estimation needs p_t > 0")
    eta = config.eta
    despread = (Y_t @ pilots.Phi.conj()) / np.sqrt(eta * p_t)
    return despread * mmse_gain(config, p_t, q_t, betas, beta_w)


def estimation_stats(config: SystemConfig, p_t: float, q_t: float, betas=None, beta_w=None):
    """Per-entry variances of the estimate and of the estimation error."""
    if p_t < 0 or q_t < 0:
        raise ConfigError("pilot powers must be nonnegative")
    betas = config.betas if betas is None else np.asarray(betas, dtype=float)
    beta_w = config.beta_w if beta_w is None else float(beta_w)
    c = mmse_gain(config, p_t, q_t, betas, beta_w)
    s_hat = c * betas
    return s_hat, betas - s_hat


def train(config: SystemConfig, p_t: float, q_t: float, rng: np.random.Generator, size=None,
          betas=None, beta_w=None):
    """Draw channels and pilots, run the training phase; returns (channels, pilots, outcome)."""
    ch = draw_channels(config, rng, size, betas, beta_w)
    pil = make_pilots(config.eta, len(ch.betas), rng, size)
    Y = uplink_receive(ch, pil, p_t, q_t, config.sigma2, rng)
    G_hat = mmse_estimate(Y, pil, p_t, q_t, config, ch.betas, ch.beta_w)
    s_hat, s_err = estimation_stats(config, p_t, q_t, ch.betas, ch.beta_w)
    return ch, pil, TrainingOutcome(Y, G_hat, s_hat, s_err, p_t, q_t)


def dump_realization_csv(channels: ChannelSet, path) -> None:
    """Debug dump: one row per antenna, real/imag pairs for every user then the eavesdropper."""
    G = np.asarray(channels.G)
    if G.ndim != 2:
        raise ValueError("dump expects a single realization")
    cols = np.column_stack([G, channels.g_w])
    K = G.shape[1]
    names = [f"g{k}" for k in range(K)] + ["g_w"]
    header = ",".join(f"{n}_re,{n}_im" for n in names)
    data = np.empty((cols.shape[0], 2 * cols.shape[1]))
    data[:, 0::2] = cols.real
    data[:, 1::2] = cols.imag
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.12g")
