"""Chunked, seed-split Monte Carlo engine.

Trials are cut into chunks whose size depends only on the problem
dimensions.  Chunk ``c`` of a run keyed ``key`` draws from
``substream(seed, *key, c, role)``, so results are identical for any
number of workers.
"""
from __future__ import annotations

import functools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .channel import crandn, draw_channels, make_pilots, mmse_gain, estimation_stats
from .downlink import draw_symbols, UnestimableUserError
from .sysmodel import (ROLE_CHANNEL, ROLE_DOWNLINK_NOISE, ROLE_PILOT, ROLE_SYMBOLS,
                       ROLE_UPLINK_NOISE, SystemConfig, substream)

_CHUNK_ELEMS = 1 << 21


def chunk_size(config: SystemConfig, cap: int = 4000) -> int:
    per_trial = config.M * (config.K + config.eta + 1)
    return max(1, min(cap, _CHUNK_ELEMS // per_trial))


@dataclass
class Estimate:
    mean: float
    stderr: float
    n: int

    @classmethod
    def from_samples(cls, x) -> "Estimate":
        x = np.asarray(x, dtype=float)
        se = float(np.std(x, ddof=1) / np.sqrt(x.size)) if x.size > 1 else float("nan")
        return cls(float(np.mean(x)), se, int(x.size))


def _chunk_bounds(n_trials: int, size: int):
    return [(c, min(size, n_trials - c * size)) for c in range(-(-n_trials // size))]


def run_chunks(sampler: Callable, n_trials: int, seed: int, key=(), workers: int = 1,
               size: int | None = None, **kwargs) -> dict[str, np.ndarray]:
    """Evaluate ``sampler(seed, key + (chunk,), n, **kwargs)`` over all chunks; concatenate in order."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    size = size or 1000
    bounds = _chunk_bounds(n_trials, size)
    call = functools.partial(_call_chunk, sampler, seed, tuple(key), kwargs)
    if workers <= 1 or len(bounds) == 1:
        parts = [call(b) for b in bounds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(call, bounds))
    return {name: np.concatenate([p[name] for p in parts]) for name in parts[0]}


def _call_chunk(sampler, seed, key, kwargs, bound):
    c, n = bound
    return sampler(seed, key + (c,), n, **kwargs)


def sample_gains(config: SystemConfig, p_t: float, q_t: float, seed: int, key: tuple, n: int):
    """Draw ``n`` coherence blocks and return the Gram products every rate needs.

    Keys: ``Gk`` (n, K, K) = g_k^H w_i, ``ge`` (n, K) = g_w^H w_i,
    ``gnorm`` (n, K) = ||g_k||^2, ``gwnorm`` (n,) = ||g_w||^2 and
    ``x`` (n, K) = phi_w^T phi_k^*.
    """
    s_hat, _ = estimation_stats(config, p_t, q_t)
    if np.any(~(s_hat > 0)):
        raise UnestimableUserError("MRT precoder undefined: some user has zero estimate variance")
    ch = draw_channels(config, substream(seed, *key, ROLE_CHANNEL), n)
    pil = make_pilots(config.eta, config.K, substream(seed, *key, ROLE_PILOT), n)
    N = crandn(substream(seed, *key, ROLE_UPLINK_NOISE), (n, config.M, config.eta), config.sigma2)
    c = mmse_gain(config, p_t, q_t)
    scale = np.ascontiguousarray(c / (np.sqrt(config.eta * p_t) * np.sqrt(config.M * s_hat)))
    Gk, ge, gnorm = kernels.realization_gains(
        np.ascontiguousarray(ch.G), np.ascontiguousarray(ch.g_w), N,
        np.ascontiguousarray(pil.Phi), np.ascontiguousarray(pil.phi_w),
        float(np.sqrt(config.eta * p_t)), float(np.sqrt(config.eta * q_t)), scale)
    x = np.einsum("tj,tjk->tk", pil.phi_w, pil.Phi.conj())
    gwnorm = np.sum(np.abs(ch.g_w) ** 2, axis=-1)
    return {"Gk": Gk, "ge": ge, "gnorm": gnorm, "gwnorm": gwnorm, "x": x}


def _rf_power_chunk(seed, key, n, config, p_t, q_t, rho_k, rho_eve):
    g = sample_gains(config, p_t, q_t, seed, key, n)
    sym = draw_symbols(config.K, config.W_E, substream(seed, *key, ROLE_SYMBOLS), n)
    x = (sym.s + sym.w_E)[:, None, :]
    rng = substream(seed, *key, ROLE_DOWNLINK_NOISE)
    y_users = np.sum(g["Gk"] * x, axis=-1) + crandn(rng, (n, config.K), config.sigma2_ant)
    y_eve = np.sum(g["ge"] * x[:, 0, :], axis=-1) + crandn(rng, (n,), config.sigma2_ant)
    out = {f"user{k}": (1.0 - rho_k) * np.abs(y_users[:, k]) ** 2 for k in range(config.K)}
    out["eve"] = (1.0 - rho_eve) * np.abs(y_eve) ** 2
    return out


def rf_power_empirical(config: SystemConfig, p_t: float, q_t: float, rho_k: float,
                       n_trials: int, seed: int, rho_eve: float | None = None,
                       workers: int = 1, key=(0,)):
    """Sample mean of ``(1 - rho)|y|^2`` with explicit symbols and antenna noise.

    Returns ``(user Estimates, eve Estimate)``.
    """
    rho_eve = config.rho_eve if rho_eve is None else rho_eve
    res = run_chunks(_rf_power_chunk, n_trials, seed, key, workers, chunk_size(config),
                     config=config, p_t=p_t, q_t=q_t, rho_k=rho_k, rho_eve=rho_eve)
    users = [Estimate.from_samples(res[f"user{k}"]) for k in range(config.K)]
    return users, Estimate.from_samples(res["eve"])
