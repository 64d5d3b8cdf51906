"""MRT precoding, downlink reception and power splitting."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet, crandn
from .sysmodel import ConfigError, SystemConfig


class UnestimableUserError(ConfigError):
    pass


@dataclass(frozen=True)
class Precoder:
    W: np.ndarray  # (..., M, K)


@dataclass(frozen=True)
class DownlinkSymbols:
    s: np.ndarray    # (..., K) data, unit power
    w_E: np.ndarray  # (..., K) energy symbols, power W_E


@dataclass(frozen=True)
class SplitSignal:
    id_stream: np.ndarray
    eh_power_sample: np.ndarray


def mrt_precoder(G_hat: np.ndarray, sigma2_ghat) -> Precoder:
    """Columns ``g_hat_k / sqrt(M sigma2_ghat_k)``: statistical, not instantaneous, normalization."""
    s = np.asarray(sigma2_ghat, dtype=float)
    bad = np.flatnonzero(~(s > 0))
    if bad.size:
        raise UnestimableUserError(f"user {int(bad[0])} unestimable (zero estimate variance)")
    M = G_hat.shape[-2]
    return Precoder(G_hat / np.sqrt(M * s))


def draw_symbols(K: int, W_E: float, rng: np.random.Generator, size=None) -> DownlinkSymbols:
    lead = () if size is None else ((size,) if np.isscalar(size) else tuple(size))
    s = crandn(rng, (*lead, K))
    w_E = crandn(rng, (*lead, K), W_E)
    return DownlinkSymbols(s, w_E)


def downlink_receive(channels: ChannelSet, precoder: Precoder, symbols: DownlinkSymbols,
                     sigma2_ant: float, rng: np.random.Generator):
    """Received samples at every user (..., K) and at the eavesdropper (...)."""
    x = precoder.W @ (symbols.s + symbols.w_E)[..., :, None]   # (..., M, 1)
    y_users = (np.swapaxes(channels.G.conj(), -1, -2) @ x)[..., 0]
    y_eve = (channels.g_w.conj()[..., None, :] @ x)[..., 0, 0]
    if sigma2_ant > 0:
        y_users = y_users + crandn(rng, y_users.shape, sigma2_ant)
        y_eve = y_eve + crandn(rng, np.shape(y_eve), sigma2_ant)
    return y_users, y_eve


def split_power(y, rho: float, sigma2_s: float, rng: np.random.Generator) -> SplitSignal:
    """Power splitter: ``sqrt(rho) y + n_s`` to decoding, ``(1-rho)|y|^2`` to the harvester."""
    if not (0.0 <= rho <= 1.0):
        raise ConfigError(f"power-splitting ratio must lie in [0, 1], got {rho}")
    y = np.asarray(y)
    n_s = crandn(rng, y.shape, sigma2_s) if sigma2_s > 0 else np.zeros(y.shape, complex)
    return SplitSignal(np.sqrt(rho) * y + n_s, (1.0 - rho) * np.abs(y) ** 2)


def known_energy_part(channels: ChannelSet, config: SystemConfig, p_t: float, q_t: float) -> np.ndarray:
    """Coefficient of the user's own energy symbol that the user can cancel.

    This is ``sqrt(eta p) ||g_k||^2 / sqrt(M (eta p beta_k + q beta_w + sigma2))``;
    what remains of ``g_k^H w_k`` is the estimation-error leakage.
    """
    betas = channels.betas
    D = config.eta * p_t * betas + q_t * channels.beta_w + config.sigma2
    M = channels.G.shape[-2]
    norms = np.sum(np.abs(channels.G) ** 2, axis=-2)
    return np.sqrt(config.eta * p_t) * norms / np.sqrt(M * D)


def energy_residual(channels: ChannelSet, precoder: Precoder, config: SystemConfig,
                    p_t: float, q_t: float) -> np.ndarray:
    """Per-user residual energy-symbol coefficient after known-signal cancellation."""
    own = np.einsum("...mk,...mk->...k", channels.G.conj(), precoder.W)
    return own - known_energy_part(channels, config, p_t, q_t)
