"""Per-subnetwork zero-forcing transmission and ergodic rate estimation.

Each subnetwork precodes with the right pseudo-inverse of its own channel,
normalized per user, under equal power allocation. Users outside the
subnetwork still receive its signals through the actual cross channels,
which is the only interference left after zero forcing.
"""

from dataclasses import dataclass

import numpy as np

from .scenario import sample_small_scale


class SingularChannelError(RuntimeError):
    """A subnetwork channel with enough APs is rank deficient, so ZF is undefined."""


@dataclass(frozen=True)
class RateReport:
    """Per-user ergodic rates in bps/Hz averaged over fading draws."""

    per_user_rate: np.ndarray  # (K,)
    sum_rate: float
    fading_draw_count: int


def allocate_power(p_tx: float, num_aps: int, num_users: int) -> float:
    """Per-user transmit power under equal allocation of the subnetwork budget.

    The subnetwork spends p_tx per active AP, split evenly over its users:
    P_k = p_tx * L_m / K_m.
    """
    if num_users < 1:
        raise ValueError("power allocation needs at least one user")
    return p_tx * num_aps / num_users


def _zf_stack(channels):
    """Unit-norm ZF precoders for a stack of (K_m x L_m) channels, L_m >= K_m."""
    u, s, vh = np.linalg.svd(channels, full_matrices=False)
    k_m = channels.shape[-2]
    l_m = channels.shape[-1]
    tol = max(k_m, l_m) * np.finfo(float).eps * s[..., 0]
    if np.any(s[..., -1] <= tol):
        raise SingularChannelError(
            "rank-deficient subnetwork channel; zero-forcing is undefined")
    pinv = (vh.conj().swapaxes(-1, -2) / s[..., None, :]) @ u.conj().swapaxes(-1, -2)
    norms = np.linalg.norm(pinv, axis=-2, keepdims=True)
    return pinv / norms


def zf_precoders(channel: np.ndarray) -> np.ndarray:
    """L_m x K_m precoding matrix whose k-th column serves user k.

    Columns are the normalized columns of the right pseudo-inverse, computed
    through an SVD factorization rather than the explicit Gram inverse for
    numerical stability. With fewer APs than users zero forcing is
    infeasible and all columns are zero.
    """
    g = np.asarray(channel, dtype=complex)
    if g.ndim != 2:
        raise ValueError("channel must be a 2-D matrix")
    k_m, l_m = g.shape
    if k_m == 0:
        return np.zeros((l_m, 0), dtype=complex)
    if l_m < k_m:
        return np.zeros((l_m, k_m), dtype=complex)
    return _zf_stack(g[None])[0]


def zf_precoder_set(partition, channel: np.ndarray) -> list:
    """Per-subnetwork ZF precoders for one full K x L channel draw."""
    out = []
    for sub in partition.subnetworks:
        g_m = channel[np.ix_(sub.user_indices, sub.ap_indices)]
        out.append(zf_precoders(g_m))
    return out


def instantaneous_sinr(partition, large_scale: np.ndarray, small_scale: np.ndarray,
                       precoders: list, power_model, noise_watts: float) -> np.ndarray:
    """Per-user SINR for one fading draw.

    ``precoders`` must have been built from the same draw. Users in
    subnetworks with zero precoders get zero signal; their subnetwork also
    radiates nothing.
    """
    g_full = np.asarray(large_scale) * np.asarray(small_scale)
    K = g_full.shape[0]
    n_sub = partition.num_subnetworks
    signal = np.zeros(K)
    received = np.zeros((K, n_sub))
    for m, (sub, w) in enumerate(zip(partition.subnetworks, precoders)):
        if sub.num_users == 0 or sub.num_aps == 0:
            continue
        p_user = allocate_power(power_model.p_tx, sub.num_aps, sub.num_users)
        cross = g_full[:, sub.ap_indices] @ w                      # (K, K_m)
        received[:, m] = (np.abs(cross) ** 2).sum(axis=1) * p_user
        own = cross[sub.user_indices, np.arange(sub.num_users)]
        signal[sub.user_indices] = np.abs(own) ** 2 * p_user
    user_sub = partition.user_to_subnetwork(K)
    total = received.sum(axis=1)
    interference = total - received[np.arange(K), user_sub]
    return signal / (noise_watts + interference)


def ergodic_user_rates(partition, large_scale: np.ndarray, n_fading_draws: int,
                       power_model, noise_watts: float, seed: int) -> RateReport:
    """Average log2(1 + SINR) over i.i.d. fading draws with fresh ZF per draw.

    The small-scale matrix is drawn for the full K x L network so that the
    same seed yields the same fading regardless of how the network was
    partitioned. Users in infeasible subnetworks (fewer APs than users)
    receive rate zero.
    """
    g = np.asarray(large_scale, dtype=float)
    K, L = g.shape
    draws = sample_small_scale(K, L, n_fading_draws, seed)
    n_sub = partition.num_subnetworks
    signal = np.zeros((n_fading_draws, K))
    received = np.zeros((n_fading_draws, K, n_sub))
    for m, sub in enumerate(partition.subnetworks):
        k_m, l_m = sub.num_users, sub.num_aps
        if k_m == 0 or l_m == 0 or l_m < k_m:
            continue
        h_m = draws[:, sub.user_indices[:, None], sub.ap_indices[None, :]]
        w = _zf_stack(g[np.ix_(sub.user_indices, sub.ap_indices)] * h_m)
        p_user = allocate_power(power_model.p_tx, l_m, k_m)
        cross = (draws[:, :, sub.ap_indices] * g[:, sub.ap_indices]) @ w
        received[:, :, m] = (np.abs(cross) ** 2).sum(axis=2) * p_user
        own = cross[:, sub.user_indices, np.arange(k_m)]
        signal[:, sub.user_indices] = np.abs(own) ** 2 * p_user
    user_sub = partition.user_to_subnetwork(K)
    total = received.sum(axis=2)
    interference = total - received[:, np.arange(K), user_sub]
    sinr = signal / (noise_watts + interference)
    rates = np.log2(1.0 + sinr).mean(axis=0)
    return RateReport(per_user_rate=rates, sum_rate=float(rates.sum()),
                      fading_draw_count=int(n_fading_draws))
