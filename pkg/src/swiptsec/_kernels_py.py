"""Numpy reference implementation of the per-realization gain kernel."""
import numpy as np


def realization_gains(G, g_w, N, Phi, phi_w, sqrt_etap, sqrt_etaq, scale):
    """Gram products of the true channels with the MRT precoder built from training.

    Returns ``(Gk, ge, gnorm)`` with ``Gk[t, k, i] = g_k^H w_i``,
    ``ge[t, i] = g_w^H w_i`` and ``gnorm[t, k] = ||g_k||^2`` for every
    realization ``t`` of the batch.
    """
    Y = sqrt_etap * (G @ np.swapaxes(Phi, -1, -2))
    Y += sqrt_etaq * (g_w[:, :, None] * phi_w[:, None, :])
    Y += N
    W = (Y @ Phi.conj()) * scale
    Gk = np.swapaxes(G.conj(), -1, -2) @ W
    ge = np.einsum("tm,tmi->ti", g_w.conj(), W)
    gnorm = np.einsum("tmk,tmk->tk", G.conj(), G).real
    return Gk, ge, gnorm
